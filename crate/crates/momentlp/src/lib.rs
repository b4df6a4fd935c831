//! Guaranteed upper and lower bounds on double-barrier option prices under
//! polynomial jump-diffusions.
//!
//! The price of a knockout/corridor contract is a linear functional of two
//! occupation-type measures: the discounted exit-location measure and the
//! discounted occupation measure of the state before exit.  Their moments
//! satisfy a linear (adjoint) identity driven by the model's generator, and
//! lie in the cone of moment sequences of nonnegative measures.  Relaxing the
//! cone to finitely many Hausdorff moment conditions yields a pair of linear
//! programs whose optima *bracket* the true price; the bracket tightens as
//! the truncation degree grows.
//!
//! Crate layout:
//! - [`poly`]: sparse bivariate polynomials and affine changes of variable;
//! - [`special`]: incomplete gamma / exponential integral / normal CDF;
//! - [`levy`]: jump-measure specifications and their moments;
//! - [`model`]: polynomial jump-diffusions, generator, jump-size truncation;
//! - [`support`]: supports and labeled pieces of the unknown measures;
//! - [`lp`]: moment LP assembly, solver backends, certificates, MPS export;
//! - [`contracts`]: payoff decompositions and ready-made example bundles;
//! - [`oracles`]: Monte Carlo, analytic series, and quadrature references.

pub mod contracts;
pub mod error;
pub mod levy;
pub mod lp;
pub mod model;
pub mod oracles;
pub mod poly;
pub mod special;
pub mod support;

pub use error::{Error, Result};
