//! Exact and asymptotic cycle statistics of weighted random permutations.
//!
//! The measures considered weight a permutation `σ ∈ S_n` by
//! `Π_m θ_m^{C_m(σ)}` (or, more generally, by `Π_m F_m(C_m(σ))`), where
//! `C_m` counts the cycles of length `m`. Exact laws are read off truncated
//! generating functions in either exact or floating arithmetic, and the
//! asymptotic estimators compare them with their singularity-analysis
//! limits.

pub mod asymptotics;
pub mod catalog;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod format;
pub mod generalized;
pub mod lindelof;
pub mod measure;
pub mod partitions;
pub mod pmf;
pub mod sampler;
pub mod scalar;
pub mod series;
pub mod special;
pub mod weights;

pub use num_complex::Complex64;
pub use num_rational::BigRational;

pub use error::{Error, Result};
pub use partitions::Partition;
pub use pmf::Pmf;
pub use scalar::{Scalar, ScalarKind, Surd};
pub use series::{BivariateSeries, TruncatedSeries};
pub use weights::WeightSequence;
