use std::collections::BTreeMap;
use std::fs::File;
use std::hint::black_box;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Context;
use rayon::prelude::*;
use rbperm::analytic::{self, RegimeId, StatisticId};
use rbperm::oracle::{self, Formulas, ENUMERATION_CAP};
use rbperm::permuton::LimitPermuton;
use rbperm::samplers::batch_map_range;
use rbperm::{RandomStream, RecordBias, SamplerKind};

use crate::table::{Cell, Table};
use crate::{Command, Failure, Output};

/// Samples per parallel chunk when streaming long batches.
const CHUNK: u64 = 1 << 16;

type Outcome = std::result::Result<(), Failure>;

fn usage<T>(msg: impl Into<String>) -> std::result::Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn open(out: &Option<PathBuf>) -> std::result::Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(table: &Table, output: &Output) -> Outcome {
    let mut w = open(&output.out)?;
    table.write(output.format, &mut w)?;
    w.flush()?;
    Ok(())
}

fn check_size(n: usize) -> Outcome {
    if n == 0 {
        return usage("--n must be at least 1");
    }
    Ok(())
}

fn check_count(count: u64) -> Outcome {
    if count == 0 {
        return usage("--count must be at least 1");
    }
    Ok(())
}

fn resolve(bias: RecordBias, n: usize) -> std::result::Result<f64, Failure> {
    bias.resolve_theta(n).or_else(|e| usage(e.to_string()))
}

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Sample {
            n,
            theta,
            count,
            sampler,
            seed,
            out,
        } => sample(n, theta, count, sampler, seed.seed, &out),
        Command::Law {
            stat,
            n,
            theta,
            count,
            sampler,
            seed,
            output,
        } => law(stat, n, theta, count, sampler, seed.seed, &output),
        Command::Permuton {
            n,
            lambda,
            seeds,
            sampler,
            seed,
            output,
        } => permuton(&n, lambda, seeds, sampler, seed.seed, &output),
        Command::Heatmap {
            n,
            theta,
            count,
            sampler,
            seed,
            output,
        } => heatmap(n, theta, count, sampler, seed.seed, &output),
        Command::Verify { max_n, thetas } => verify(max_n, &thetas),
        Command::Expect {
            stat,
            n,
            theta,
            output,
        } => expect(stat, n, theta, &output),
        Command::Bench {
            sampler,
            sizes,
            theta,
            reps,
            seed,
            output,
        } => bench(sampler, &sizes, theta, reps, seed.seed, &output),
    }
}

fn chunks(count: u64) -> impl Iterator<Item = std::ops::Range<u64>> {
    (0..count.div_ceil(CHUNK)).map(move |c| c * CHUNK..((c + 1) * CHUNK).min(count))
}

fn sample(n: usize, bias: RecordBias, count: u64, kind: SamplerKind, seed: u64, out: &Option<PathBuf>) -> Outcome {
    check_size(n)?;
    check_count(count)?;
    resolve(bias, n)?;
    let mut w = open(out)?;
    for range in chunks(count) {
        let lines = batch_map_range(kind, n, bias, range, seed, |p| p.to_string()).map_err(anyhow::Error::from)?;
        for line in lines {
            writeln!(w, "{line}")?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Exact law of the statistic at this size, when one is available.
fn exact_law(stat: StatisticId, n: usize, theta: f64) -> anyhow::Result<Option<BTreeMap<u64, f64>>> {
    let indexed = |pmf: Vec<f64>| pmf.into_iter().enumerate().map(|(k, p)| (k as u64, p)).collect();
    Ok(match stat {
        StatisticId::Records if n <= analytic::RECORDS_PMF_CAP => Some(indexed(analytic::exact_pmf_records(theta, n)?)),
        StatisticId::Inversions if n <= analytic::INVERSIONS_PMF_CAP => {
            Some(indexed(analytic::exact_pmf_inversions(theta, n)?))
        }
        StatisticId::FirstValue => Some(
            (1..=n)
                .map(|k| Ok((k as u64, analytic::prob_first_value(theta, n, k)?)))
                .collect::<rbperm::Result<_>>()?,
        ),
        StatisticId::Descents if n <= ENUMERATION_CAP => Some(
            oracle::exact_statistic_pmf(n, theta, stat)?
                .iter()
                .map(|(&k, p)| (k, p))
                .collect(),
        ),
        _ => None,
    })
}

fn law(
    stat: StatisticId,
    n: usize,
    bias: RecordBias,
    count: u64,
    kind: SamplerKind,
    seed: u64,
    output: &Output,
) -> Outcome {
    check_size(n)?;
    check_count(count)?;
    let theta = resolve(bias, n)?;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for range in chunks(count) {
        let values = batch_map_range(kind, n, bias, range, seed, |p| stat.evaluate(&p)).map_err(anyhow::Error::from)?;
        for v in values {
            *counts.entry(v).or_insert(0) += 1;
        }
    }
    let exact = exact_law(stat, n, theta)?;
    let mut headers = vec!["value", "count", "empirical_prob"];
    if exact.is_some() {
        headers.push("exact_prob");
    }
    let mut table = Table::new(headers);
    for (&value, &c) in &counts {
        let mut row: Vec<Cell> = vec![value.into(), c.into(), (c as f64 / count as f64).into()];
        if let Some(exact) = &exact {
            row.push(exact.get(&value).copied().unwrap_or(0.0).into());
        }
        table.push(row);
    }
    emit(&table, output)
}

fn permuton(sizes: &[usize], lambda: f64, seeds: u64, kind: SamplerKind, seed: u64, output: &Output) -> Outcome {
    let limit = LimitPermuton::new(lambda).or_else(|e| usage(e.to_string()))?;
    if seeds == 0 {
        return usage("--seeds must be at least 1");
    }
    for &n in sizes {
        check_size(n)?;
    }
    let jobs: Vec<(usize, u64)> = sizes
        .iter()
        .flat_map(|&n| (0..seeds).map(move |k| (n, seed.wrapping_add(k))))
        .collect();
    let distances: Vec<rbperm::Result<f64>> = jobs
        .par_iter()
        .map(|&(n, s)| {
            let p = kind.sample(n, lambda * n as f64, &mut RandomStream::new(s));
            limit.distance_grid(&p)
        })
        .collect();
    let mut table = Table::new(["n", "seed", "d"]);
    for (&(n, s), d) in jobs.iter().zip(distances) {
        table.push(vec![n.into(), s.into(), d.map_err(anyhow::Error::from)?.into()]);
    }
    emit(&table, output)
}

fn heatmap(n: usize, bias: RecordBias, count: u64, kind: SamplerKind, seed: u64, output: &Output) -> Outcome {
    check_size(n)?;
    check_count(count)?;
    let theta = resolve(bias, n)?;
    let grid = (0..count)
        .into_par_iter()
        .fold(
            || vec![0u64; n * n],
            |mut grid, k| {
                let p = kind.sample(n, theta, &mut RandomStream::derive(seed, k));
                for (i, &v) in p.word().iter().enumerate() {
                    grid[i * n + v as usize - 1] += 1;
                }
                grid
            },
        )
        .reduce(
            || vec![0u64; n * n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut table = Table::new((1..=n).map(|j| j.to_string()));
    for row in grid.chunks(n) {
        table.push(row.iter().map(|&c| c.into()).collect());
    }
    emit(&table, output)
}

fn verify(max_n: usize, thetas: &[f64]) -> Outcome {
    if max_n == 0 || max_n > ENUMERATION_CAP {
        return usage(format!("--max-n must be in 1..={ENUMERATION_CAP}"));
    }
    if thetas.is_empty() || thetas.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return usage("--thetas must be positive");
    }
    let checks = oracle::verify_suite(max_n, thetas, &Formulas::default()).map_err(anyhow::Error::from)?;
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    let mut out = io::stdout().lock();
    for check in &failed {
        writeln!(out, "{check}")?;
    }
    writeln!(out, "{} checks, {} failed", checks.len(), failed.len())?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn expect(stat: StatisticId, n: usize, bias: RecordBias, output: &Output) -> Outcome {
    check_size(n)?;
    let theta = resolve(bias, n)?;
    let exact = analytic::expected_value(stat, theta, n).map_err(anyhow::Error::from)?;
    let asymptotic = analytic::asymptotic_expectation(stat, RegimeId::from_bias(bias), n).unwrap_or(f64::NAN);
    let mut table = Table::new(["stat", "n", "theta", "exact", "asymptotic", "ratio"]);
    table.push(vec![
        stat.name().to_string().into(),
        n.into(),
        theta.into(),
        exact.into(),
        asymptotic.into(),
        (exact / asymptotic).into(),
    ]);
    emit(&table, output)
}

fn bench(kind: SamplerKind, sizes: &[usize], bias: RecordBias, reps: usize, seed: u64, output: &Output) -> Outcome {
    if reps == 0 {
        return usage("--reps must be at least 1");
    }
    let mut thetas = Vec::with_capacity(sizes.len());
    for &n in sizes {
        check_size(n)?;
        thetas.push(resolve(bias, n)?);
    }
    // sizes alternate within each repetition so load drift hits all alike
    let mut times = vec![Vec::with_capacity(reps); sizes.len()];
    for r in 0..reps {
        for (k, (&n, &theta)) in sizes.iter().zip(&thetas).enumerate() {
            let mut stream = RandomStream::derive(seed, r as u64);
            let start = Instant::now();
            black_box(kind.sample(n, theta, &mut stream));
            times[k].push(start.elapsed().as_secs_f64());
        }
    }
    let mut table = Table::new(["size", "seconds", "ns_per_element"]);
    for (&n, mut t) in sizes.iter().zip(times) {
        t.sort_by(f64::total_cmp);
        let median = t[reps / 2];
        table.push(vec![n.into(), median.into(), (median * 1e9 / n as f64).into()]);
    }
    emit(&table, output)
}
