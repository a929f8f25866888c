use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("phase-space point is zero")]
    ZeroPoint,
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(f64),
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("invalid anisotropic index (t={t}, s={s}): need t > 0, s > 0, t + s > 1")]
    InvalidIndex { t: f64, s: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("window width must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("signal has no pointwise values: {0}")]
    NotPointwise(String),
    #[error("signal does not decay at the grid boundary")]
    BoundaryMass,
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("quadrature did not converge at (x={x}, xi={xi}): last delta {delta:e}, value {value:e}")]
    QuadratureNonConvergent { x: f64, xi: f64, delta: f64, value: f64 },
    #[error("grid under-resolved: {0}")]
    UnderResolved(String),
    #[error("grids do not match")]
    GridMismatch,
    #[error("profile has {have} usable points, need {need}")]
    TooFewPoints { have: usize, need: usize },
    #[error("no closed form: {0}")]
    NoClosedForm(String),
    #[error("product not representable in the catalog: {0}")]
    NotRepresentable(String),
    #[error("grid of {0} points exceeds the dense limit")]
    GridTooLarge(usize),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    /// `line` is 1-based; 0 refers to the file as a whole.
    #[error("{}", config_message(*line, msg))]
    Config { line: usize, msg: String },
}

fn config_message(line: usize, msg: &str) -> String {
    if line == 0 {
        format!("config: {msg}")
    } else {
        format!("config line {line}: {msg}")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
