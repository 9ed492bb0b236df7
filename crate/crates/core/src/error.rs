use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("shape mismatch: expected {expected} samples per component, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("Hermitian symmetry violated at k={at:?} (defect {defect:.3e})")]
    SymmetryViolation { at: [i64; 3], defect: f64 },
    #[error("invalid exponent p={0}")]
    InvalidExponent(f64),
    #[error("axis {0} out of range")]
    AxisOutOfRange(usize),
    #[error("wavenumber {k:?} lies outside the resolved band |k_i| <= {kmax}")]
    OutOfBand { k: [i64; 3], kmax: i64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("construction integrity: {0}")]
    ConstructionIntegrity(String),
    #[error("insufficient resolution: data needs |k_i| <= {needed}, grid resolves {available}")]
    Resolution { needed: i64, available: i64 },
    #[error("support budget exceeded: {work} lattice evaluations > budget {budget}")]
    SupportBudget { work: u128, budget: u128 },
    #[error("insufficient data: {got} shells available, {required} required")]
    InsufficientData { got: usize, required: usize },
    #[error("ratio undefined at shell {0} (zero projection)")]
    UndefinedRatio(i32),
    #[error("step rejected: CFL number {cfl:.3} exceeds {limit}")]
    StepRejected { cfl: f64, limit: f64 },
    #[error("blow-up detected at t={t}: {what}")]
    BlowUp { t: f64, what: String },
    #[error("grid mismatch between operands")]
    GridMismatch,
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
