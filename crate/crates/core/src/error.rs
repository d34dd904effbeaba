use thiserror::Error;

/// Errors raised by the solvers, the harness and the problem-file reader.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum VieError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("degenerate seed: denominator {denominator:e} is below {threshold:e}")]
    DegenerateSeed { denominator: f64, threshold: f64 },

    #[error("degenerate diagonal integral at node k={k}: {value:e}")]
    DegenerateDiagonal { k: usize, value: f64 },

    #[error("no convergent regularization parameter; final residuals: {residuals:?}")]
    NoConvergentGamma { residuals: Vec<(f64, f64)> },

    #[error("could not bracket a root at node k={k}")]
    RootBracketFailure { k: usize },

    #[error("no sign change on [{lo}, {hi}] (f(lo)={f_lo:e}, f(hi)={f_hi:e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("brent iteration did not converge within {iterations} iterations")]
    BrentNonConvergence { iterations: usize },

    #[error("adaptive quadrature exceeded its panel budget at t={t}")]
    QuadratureBudget { t: f64 },

    #[error("iteration did not converge after {iterations} steps (last gap {gap:e})")]
    NotConverged { iterations: usize, gap: f64 },

    #[error("non-finite value {value} at node k={k}")]
    NonFinite { k: usize, value: f64 },

    #[error("meshes are not nested by exact halving")]
    MeshesNotNested,

    #[error("convergence order undefined: D_2N = {0}")]
    UndefinedOrder(f64),

    #[error("{problem}/{method} at h={h}: {source}")]
    Benchmark {
        problem: String,
        method: String,
        h: f64,
        source: Box<VieError>,
    },

    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, VieError>;
