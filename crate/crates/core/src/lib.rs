//! Numerical laboratory for m-homogeneous polynomials on the unit ball of
//! ℓ∞ⁿ over real or complex scalars.
//!
//! The crate covers four layers:
//!
//! - [`multiindex`] / [`poly`]: sparse polynomial representation with
//!   evaluation, coefficient ℓ_r norms, complexification, and a bit-exact
//!   text format;
//! - [`supnorm`]: certified two-sided estimates of the sup norm over the
//!   polydisc (complex) or the cube [-1,1]ⁿ (real), combining covering
//!   grids, multi-start projected gradient ascent, and Lipschitz cell
//!   refinement;
//! - [`ksz`]: seeded random Bernoulli (±1 coefficient) polynomials, the
//!   extremal family for ratio growth;
//! - [`scaling`]: the sharp exponent m/r - (m+1)/2, Hölder interpolation
//!   bounds, and seeded sweeps fitting the log-log growth of the ratio
//!   ‖P‖_r / ‖P‖_∞ against n.
//!
//! Everything randomized flows from explicit 64-bit seeds through
//! counter-based streams ([`rng`]), so identical inputs give identical
//! results for any worker count.

pub mod error;
pub mod ksz;
pub mod multiindex;
pub mod norm;
mod parallel;
pub mod poly;
pub mod rng;
pub mod scaling;
pub mod supnorm;

pub use error::{Error, ErrorCategory, Result};
pub use multiindex::MultiIndex;
pub use norm::NormOrder;
pub use poly::{HomogeneousPolynomial, ScalarField};
pub use supnorm::{Budget, SupNormEstimate};
