use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("transition matrix entry at ({row}, {col}) is not 0 or 1")]
    BadMatrixEntry { row: usize, col: usize },

    #[error("symbol {symbol} has an empty {side}")]
    StrandedSymbol { symbol: usize, side: &'static str },

    #[error("state budget exceeded: {required} states required, {allowed} allowed")]
    StateBudgetExceeded { required: u128, allowed: u128 },

    #[error("table budget exceeded: {required} entries required, {allowed} allowed")]
    TableBudgetExceeded { required: u128, allowed: u128 },

    #[error("prefix of length {got} is too short, need at least {needed}")]
    InsufficientPrefix { needed: usize, got: usize },

    #[error("word {0} is not admissible")]
    InadmissibleWord(String),

    #[error("potential cannot be evaluated exactly: {0}")]
    UnresolvablePotential(String),

    #[error("skeleton depth {skeleton} is below potential depth {potential}")]
    DepthMismatch { skeleton: usize, potential: usize },

    #[error("admissible word {0} has no table entry")]
    MissingWord(String),

    #[error("table key {0} is not an admissible word")]
    InadmissibleKey(String),

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("bad specification: {0}")]
    BadSpec(String),

    #[error("simple-cycle enumeration exceeded the cap of {cap} cycles (use support sampling)")]
    CycleBudgetExceeded { cap: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("target is not interior to the rotation set (signed margin {distance:e})")]
    NotInterior { distance: f64 },

    #[error("Newton iteration stalled after {iterations} steps: gradient residual {residual:e}, last step {last_step:e}")]
    NewtonStalled {
        iterations: usize,
        residual: f64,
        last_step: f64,
        best_t: Vec<f64>,
    },

    #[error("all counts in the estimation window are at most 1")]
    EmptyCounts,

    #[error("counting budget exceeded: {required} > {allowed}; {hint}")]
    BudgetExceeded {
        required: u128,
        allowed: u128,
        hint: String,
    },

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("boundary is not convex at vertices ({0}, {1}, {2})")]
    NonConvex(usize, usize, usize),

    #[error("degenerate boundary curve: {0}")]
    DegenerateCurve(String),

    #[error("stage {stage} needs words of length {required}, cap is {cap}")]
    StageOverflow { stage: usize, required: u128, cap: u128 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::BadMatrixEntry { .. } => "BadMatrixEntry",
            Error::StrandedSymbol { .. } => "StrandedSymbol",
            Error::StateBudgetExceeded { .. } => "StateBudgetExceeded",
            Error::TableBudgetExceeded { .. } => "TableBudgetExceeded",
            Error::InsufficientPrefix { .. } => "InsufficientPrefix",
            Error::InadmissibleWord(_) => "InadmissibleWord",
            Error::UnresolvablePotential(_) => "UnresolvablePotential",
            Error::DepthMismatch { .. } => "DepthMismatch",
            Error::MissingWord(_) => "MissingWord",
            Error::InadmissibleKey(_) => "InadmissibleKey",
            Error::BadDimension(_) => "BadDimension",
            Error::BadSpec(_) => "BadSpec",
            Error::CycleBudgetExceeded { .. } => "CycleBudgetExceeded",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::NotInterior { .. } => "NotInterior",
            Error::NewtonStalled { .. } => "NewtonStalled",
            Error::EmptyCounts => "EmptyCounts",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::Overflow(_) => "Overflow",
            Error::NonConvex(..) => "NonConvex",
            Error::DegenerateCurve(_) => "DegenerateCurve",
            Error::StageOverflow { .. } => "StageOverflow",
            Error::Parse(_) => "Parse",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
