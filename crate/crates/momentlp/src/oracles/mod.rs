//! Independent reference prices: adaptive quadrature for jump-density
//! integrals, an analytic double-barrier series for geometric Brownian
//! motion, and Monte Carlo simulation of the model paths.

pub mod closed_form;
pub mod mc;
pub mod quadrature;

pub use closed_form::gbm_double_barrier_exact;
pub use mc::{mc_price, McConfig, McResult};
pub use quadrature::{adaptive_simpson, levy_quadrature, LevyIntegrand};
