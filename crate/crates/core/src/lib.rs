//! Statistical inference with possibility functions.
//!
//! A possibility function is a map `f: X -> [0, 1]` with `sup f = 1`; the
//! credibility of a set `A` is `sup_{x in A} f(x)`. This crate provides the
//! usual parametric families, the sup-based transforms of uncertain
//! variables (change of variable, sup-convolution, marginalisation),
//! possibilistic Bayesian updating, credibility tests, numerical checks of
//! the limit theorems (LLN, CLT, Bernstein-von Mises) and the
//! ratio-of-two-means replication experiment.
//!
//! ```
//! use possic::PossibilityFn;
//!
//! let f = PossibilityFn::normal(0.0, 1.0).unwrap();
//! assert!((f.eval(1.0).unwrap() - (-0.5f64).exp()).abs() < 1e-15);
//! ```

pub mod asymptotics;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod inference;
pub mod interval;
pub mod numerics;
pub mod possibility;
mod serde_ext;
pub mod transform;

pub use error::{Error, Result};
pub use grid::UniformGrid;
pub use interval::{Interval, IntervalSet};
pub use numerics::OptimizerConfig;
pub use serde_ext::sig17;
pub use possibility::{ExtendedVariance, Kind, ModeSet, PossibilityFn, Tabulated};
