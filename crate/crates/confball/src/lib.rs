//! Nonasymptotic Euclidean confidence balls for the mean of a Gaussian
//! vector, built by testing a family of linear subspaces.
//!
//! Observing `Y = f + σε` in ℝⁿ, the procedure runs a χ² goodness-of-fit test
//! for each subspace in a user-supplied family, pairs every subspace with a
//! data-independent radius computed by exact quantile inversion and supremum
//! search, and centers the ball at the projection onto the accepted subspace
//! with the smallest radius. Coverage `1 - β` holds for every `n`, every `f`,
//! and — in the interval-variance variant — every noise level inside the
//! stated interval.

pub mod bounds;
pub mod distributions;
pub mod error;
pub mod io;
pub mod models;
pub mod procedure;
pub mod radii;
pub mod sim;
pub mod varselect;

pub use error::{Error, Result};
