//! Longest alternating subsequences in uniformly random separable permutations.
//!
//! The crate is split along the lines of the computation:
//!
//! - [`perm`]: permutations, direct/skew sums, separability, block statistics
//!   and exhaustive enumeration of separable permutations.
//! - [`las`]: the four typed longest-alternating-subsequence lengths, exact
//!   conditional moment tables by enumeration, and exact checks of the
//!   first-block recursions.
//! - [`schroder`]: big Schröder numbers, the coefficient sequences of
//!   `(t²−6t+1)^{m/2}`, and high-precision evaluation of their asymptotics.
//! - [`series`]: exact truncated power series, the generating-function
//!   catalog, exact moments at large `n`, and identity verification.
//! - [`sampler`]: exact uniform sampling of separable permutations and a
//!   reproducible parallel Monte Carlo harness.

pub mod error;
pub mod exact;
pub mod las;
pub mod perm;
pub mod sampler;
pub mod schroder;
pub mod series;

pub use error::{Error, Result};
pub use las::{alt_profile, AltProfile, Flavor, MomentTable};
pub use perm::{BlockStats, Permutation};
pub use series::TruncatedSeries;
