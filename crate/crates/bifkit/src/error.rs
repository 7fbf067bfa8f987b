use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluation error at mu = {mu}: {what}")]
    Evaluation { mu: f64, what: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root isolation failed on [{lo}, {hi}]: f(lo) = {flo:e}, f(hi) = {fhi:e}")]
    RootIsolation { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("curve monotonicity violated on mu in [{mu_lo}, {mu_hi}]: k goes {k_lo} -> {k_hi}")]
    CurveMonotonicity { mu_lo: f64, mu_hi: f64, k_lo: f64, k_hi: f64 },

    #[error("degenerate eigenmode: {0}")]
    DegenerateMode(String),

    #[error("unsupported grid: {0}")]
    UnsupportedGrid(String),

    #[error("boundary-condition spec violation: {0}")]
    SpecViolation(String),

    #[error("eigensolver did not converge: {0}")]
    EigenConvergence(String),

    #[error("Newton did not converge after {iters} iterations, last residual {residual:e}")]
    NewtonDiverged { iters: usize, residual: f64 },

    #[error("continuation stalled: {0}")]
    ContinuationStall(String),

    #[error("kernel detection mismatch: {0}")]
    KernelMismatch(String),

    #[error("degenerate reduced coefficients: {0}")]
    DegenerateCoefficients(String),

    #[error("configuration error in field `{field}`: {what}")]
    Config { field: String, what: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
