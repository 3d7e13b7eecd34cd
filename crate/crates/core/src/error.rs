use thiserror::Error;

/// Errors surfaced by the solvers and operator algebra.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("omega = {omega} is inadmissible for alpha = {alpha}: beta_alpha(omega) = {beta} < {guard} (requires omega >= {omega_min})")]
    BetaTooSmall {
        alpha: f64,
        omega: f64,
        beta: f64,
        guard: f64,
        omega_min: f64,
    },

    #[error("resolvent parameter singular: |beta_alpha(lambda)| = {0} < 1e-12")]
    SingularResolvent(f64),

    #[error("shooting bracket failed: {0}")]
    Bracket(String),

    #[error("Newton iteration did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("converged profile is not positive at node {node} (value {value:.3e})")]
    PositivityViolation { node: usize, value: f64 },

    #[error("degenerate profile: {0}")]
    Degenerate(String),

    #[error("sweep failed at every frequency")]
    SweepAllFailed,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
