//! Numerical Hopf fibrations over ℂP¹ and ℂP³, the associated and tautological
//! line bundles, the metric connection on the sphere bundles, and a singlet
//! spin-measurement simulator whose records carry the pre-measurement ray in
//! `ℂP³`, the surviving spin's ray in `ℂP¹` and its embedding back into `ℂP³`.
//!
//! Basis order for two spins is `(↑↑, ↑↓, ↓↑, ↓↓)`, i.e. index `(i, j) ↦ 2i + j`.

pub mod collapse;
pub mod connection;
pub mod error;
pub mod exec;
pub mod hopf;
pub mod line_bundle;
pub mod ray;
pub mod rng;

pub use error::{Error, Result};
pub use exec::Execution;
pub use ray::{Direction, Ray, Sign, StateVector};

/// Default tolerance for algebraic identities.
pub const DEFAULT_TOL: f64 = 1e-12;
