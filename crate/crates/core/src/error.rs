use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("missing parameter `{0}`")]
    MissingParameter(String),

    #[error("empty intersection between cube and sampling box")]
    EmptyIntersection,

    #[error(
        "no shifted dyadic cover found for [{low:?}, {high:?}) searching side lengths up to {max_ratio} x the input"
    )]
    NoCover { low: Vec<f64>, high: Vec<f64>, max_ratio: f64 },

    #[error("scan too large: {count} cubes exceeds cap {cap}")]
    ScanTooLarge { count: u64, cap: u64 },

    #[error("empty scan")]
    EmptyScan,

    #[error("weight not locally integrable: {0}")]
    NotLocallyIntegrable(String),

    #[error("lambda too small: need lambda > 2^n = {min}, got {lambda}")]
    LambdaTooSmall { lambda: f64, min: f64 },

    #[error("no decay at scan top: top-level averages reach {top_max} against a maximum average {max_avg}")]
    NoDecay { top_max: f64, max_avg: f64 },

    #[error("sparse sum vanishes on support")]
    VanishingSparseSum,

    #[error("time too large for box: kernel radius {radius} needs halfwidth >= {min_halfwidth}")]
    TimeTooLarge { radius: f64, min_halfwidth: f64 },

    #[error("zero input norm")]
    ZeroInputNorm,

    #[error("exponent out of range: {0}")]
    ExponentOutOfRange(String),

    #[error("no contraction at this T (rho = {rho})")]
    NoContraction { rho: f64 },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("initial datum too large: norm {norm} exceeds admissible {max_norm}")]
    SmallnessViolated { norm: f64, max_norm: f64 },

    #[error("divergent constant: {0}")]
    DivergentConstant(String),

    #[error("time grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("too few samples: need {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },
}
