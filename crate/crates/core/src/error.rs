use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("symbol undefined at k = {0}")]
    SymbolUndefined(i64),
    #[error("symbolic mode unsupported for {0}")]
    SymbolicUnsupported(String),
    #[error("invalid symbol spec `{spec}`: {reason}")]
    BadSymbolSpec { spec: String, reason: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at kappa = {0}")]
    Pole(String),
    #[error("resonant denominator: {0}")]
    Resonance(String),
    #[error("cannot parse rational function: {0}")]
    Parse(String),
    #[error("invalid coefficient family: {0}")]
    InvalidFamily(String),
    #[error("oracle size cap exceeded: {size} > {cap}")]
    OracleCap { size: usize, cap: usize },
    #[error("size cap exceeded ({0}); use the level recursion instead")]
    SizeCap(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("beyond the analytic range of the bulk spectrum at p = {0}")]
    BeyondBulk(f64),
    #[error("below the branch point s_min = {0}")]
    BelowBranchPoint(f64),
    #[error("bound not asserted for p < {0}")]
    BoundNotAsserted(f64),
    #[error("complex branch: {0}")]
    ComplexBranch(String),
    #[error("point too close to a singularity: {0}")]
    TooClose(String),
    #[error("degenerate parameters: gamma pole at {0}")]
    Degenerate(f64),
    #[error("bracketing failed: {0}")]
    Bracket(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid driver: {0}")]
    InvalidDriver(String),
}
