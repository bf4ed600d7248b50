//! Record-biased random permutations.
//!
//! A permutation of size `n` drawn with probability proportional to
//! `theta^rec(sigma)`, where `rec` counts left-to-right maxima. The crate
//! provides
//!
//! * [`Permutation`] with its word, cycle and diagram views, the classical
//!   statistics and the Foata bijection ([`foata`]),
//! * linear-time samplers for the Ewens and record-biased laws ([`samplers`]),
//! * closed-form probabilities, moments and exact pmfs ([`analytic`]),
//! * empirical permutons and the limit permuton for `theta = lambda * n`
//!   ([`permuton`]),
//! * an exhaustive-enumeration oracle for small sizes ([`oracle`]).

pub mod analytic;
pub mod cycles;
mod error;
pub mod foata;
pub mod oracle;
pub mod permutation;
pub mod permuton;
pub mod rng;
pub mod samplers;
pub mod special;
pub mod stats;

pub use cycles::CycleDecomposition;
pub use error::{Error, Result};
pub use permutation::Permutation;
pub use rng::RandomStream;
pub use samplers::{RecordBias, SamplerKind};
pub use stats::StatSummary;
