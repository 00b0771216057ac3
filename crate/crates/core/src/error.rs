use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("position {q} is outside the potential domain (q >= {domain_min})")]
    Domain { q: f64, domain_min: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("trajectory reached the singular region at t = {t} (q = {q})")]
    SingularityReached { t: f64, q: f64 },

    #[error("integrator exceeded {max_steps} steps before t = {t_f}")]
    StepLimitExceeded { max_steps: usize, t_f: f64 },

    #[error("no convergence after {iterations} iterations: {context}")]
    NoConvergence { iterations: usize, context: String },

    #[error("boundary data unreachable: {0}")]
    Unreachable(String),

    #[error("no real envelope energy at q = {q}, t = {t}: {reason}")]
    EnvelopeDomain { q: f64, t: f64, reason: String },

    #[error("quadrature failed to reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("trajectory is inconsistent with the potential: {0}")]
    InconsistentTrajectory(String),

    #[error("counterterm evaluated at (q = {ct_q}, t = {ct_t}) but trajectory ends at (q = {q_f}, t = {t_f})")]
    MismatchedEvaluationPoint {
        ct_q: f64,
        ct_t: f64,
        q_f: f64,
        t_f: f64,
    },

    #[error("scan point t_f = {t_f} failed: {source}")]
    ScanPoint { t_f: f64, source: Box<Error> },

    #[error("negative radicand {radicand:e} at X = {x}")]
    NegativeRadicand { x: f64, radicand: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
