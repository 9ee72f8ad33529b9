//! Hoeffding-type concentration bounds for sample means of random vectors
//! supported in the probability simplex.
//!
//! The bound on `Pr{mean <= z}` (or `>=`) for `n` independent vectors with
//! mean `mu` is `exp(-n KL(z || mu))` over the completed vectors; see
//! [`bounds::theorem1_bound`]. Multinomial counts and Dirichlet means are
//! handled in [`distributions`]; [`oracle`] computes exact and Monte Carlo
//! tail probabilities to check every bound against.

pub mod bounds;
pub mod distributions;
pub mod error;
pub mod oracle;
pub mod simplex;
pub mod stream;
pub mod transform;

pub use bounds::{
    exponent_m, kl_divergence, lemma1_gap, optimal_t, theorem1_bound, theorem1_bound_with_slack,
    BoundResult, ExponentArgument,
};
pub use error::{Error, Result};
pub use simplex::{complete, CompletedPoint, SimplexPoint, TailDirection};
pub use stream::RandomStream;
