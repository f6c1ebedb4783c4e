//! Critical exponents of singular quasiradial p-harmonic functions
//! `r^k f(θ)` in the upper half-space, computed by shooting on the reduced
//! angular ODE, together with the analytic brackets they must satisfy and a
//! planar finite-difference experiment for the p-harmonic measure of small
//! boundary intervals.

pub mod analytic;
pub mod error;
pub mod format;
pub mod measure;
pub mod ode;
pub mod profile;
pub mod rk;
pub mod shooting;
pub mod uniqueness;

pub use analytic::{classify_cos_test, exponent_bounds, known_exponent, ExponentBounds, SignVerdict};
pub use error::{Error, Result};
pub use ode::ProblemParams;
pub use profile::{compute_profile, Profile};
pub use shooting::{classify_k, solve_exponent, Classification, ExponentResult};
