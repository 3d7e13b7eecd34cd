//! Ground states of the two-dimensional nonlinear Schrödinger equation with a
//! point interaction at the origin, and their orbital stability.
//!
//! The operator `-Δ_α` is the self-adjoint extension of the Laplacian
//! restricted off the origin, parametrized by the interaction strength
//! `α ∈ ℝ`. This crate solves the stationary equation
//!
//! ```text
//!     -Δ_α φ + ω φ - |φ|^{p-1} φ = 0
//! ```
//!
//! in the rescaled frame (unit frequency, coupling constant `β = β_α(ω)`),
//! where the solution splits into a regular part `f` and a multiple of the
//! Green function `G₁`:
//!
//! ```text
//!     φ̃ = f̃ + (f̃(0)/β) G₁,        G₁(r) = K₀(r)/(2π).
//! ```
//!
//! Standing waves are classified stable/unstable by the slope criterion
//! `d/dω ‖φ_ω‖²_{L²} ≷ 0` evaluated along an ω-continuation branch.
//!
//! Module map:
//! - [`specfun`]: modified Bessel functions `K₀`, `K₁`
//! - [`radial`]: offset radial mesh, discrete Laplacian, quadrature
//! - [`pointop`]: point-interaction operator algebra (Green functions,
//!   eigenpair, resolvent, quadratic form)
//! - [`groundstate`]: classical limit solver, Newton solver with the
//!   self-consistent singular coefficient, ω-continuation
//! - [`stability`]: mass curve, slope classification, linearized-operator
//!   diagnostics
//! - [`selfcheck`]: analytic identity suite used by the CLI and the
//!   acceptance tests

pub mod error;
pub mod groundstate;
pub mod pointop;
pub mod radial;
pub mod selfcheck;
pub mod specfun;
pub mod stability;

mod tridiag;

pub use error::Error;
pub use groundstate::{
    continue_sweep, solve_classic, solve_ground, ClassicProfile, GroundState, Profile, SweepPoint,
};
pub use pointop::{GreenRef, OperatorParams};
pub use radial::{RadialField, RadialGrid};
pub use stability::{
    asymptotic_dmass, domega_f0_ratio, linearized_report, mass_curve, pohozaev_residual,
    LinearizedReport, MassCurve, StabilityClass,
};

/// Euler–Mascheroni constant, stored to 20 digits (rounds to the nearest
/// f64).
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.57721566490153286061;

/// Lower bound on `β_α(ω)` accepted by the ground-state solver. Below it the
/// singular coefficient `c = f(0)/β` amplifies origin-extrapolation error
/// beyond what the grid can certify.
pub const BETA_GUARD: f64 = 0.02;
