//! Surface area measures of log-concave functions and the functional
//! Minkowski problem.
//!
//! A log-concave function `f = e^{-phi}` carries a pair of measures
//! `(mu_f, nu_f)`: the pushforward of `f dx` under the gradient of `phi`,
//! and the pushforward of `f dH^{n-1}` on the boundary of the support under
//! the Gauss map. This crate computes the pair exactly in one and two
//! dimensions for polyhedral potentials (Monte Carlo otherwise), solves the
//! inverse problem for finitely supported admissible pairs by minimizing a
//! convex functional over a semi-discrete parametrization, and checks the
//! convergence theory through a computable metric on the hemispherical
//! compactification plus an independent boundary-integral pipeline built on
//! the curvilinear radial function.
//!
//! The five workflows are exposed as library modules, each with a runnable
//! example under `examples/`, and as subcommands of the thin `logmink`
//! binary (`solve`, `measures`, `variation`, `radial`, `distance`,
//! `verify`).

pub mod convex;
pub mod measures;
pub mod surface;
pub mod error;
pub mod numeric;
pub mod poly2d;

pub use convex::{ConvexFunction, LogConcaveDensity};
pub use error::{Error, Result};
