use thiserror::Error;

/// Errors raised by the curvature-tensor library and the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not self-adjoint (max asymmetry {0})")]
    InvalidOperator(f64),
    #[error("invalid dimension {0}")]
    InvalidDimension(usize),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("array of length {0} is not m^4 for any m >= 2")]
    InvalidShape(usize),
    #[error("not a Hermitian almost complex structure: {0}")]
    InvalidComplexStructure(String),
    #[error("incompatible operands: {0}")]
    IncompatibleTensors(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("structure identity violated: {identity} residual {residual}")]
    StructureViolation { identity: String, residual: f64 },
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("classification inconsistency: {0}")]
    ClassificationInconsistency(String),
    #[error("Jacobi operator is not rank one (rank {0})")]
    NotRankOne(usize),
    #[error("value not representable in exact arithmetic: {0}")]
    NotRepresentable(String),
    #[error("format error at line {line}: {msg}")]
    FormatError { line: usize, msg: String },
    #[error("conflicting entry at {0:?}")]
    ConflictingEntry([usize; 4]),
    #[error("Bianchi identity violated by {max} at {indices:?}")]
    BianchiViolation { max: String, indices: [usize; 4] },
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Variant name, used on the CLI diagnostic stream.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidOperator(_) => "InvalidOperator",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::InvalidShape(_) => "InvalidShape",
            Error::InvalidComplexStructure(_) => "InvalidComplexStructure",
            Error::IncompatibleTensors(_) => "IncompatibleTensors",
            Error::PreconditionFailed(_) => "PreconditionFailed",
            Error::StructureViolation { .. } => "StructureViolation",
            Error::InvalidPolynomial(_) => "InvalidPolynomial",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::ClassificationInconsistency(_) => "ClassificationInconsistency",
            Error::NotRankOne(_) => "NotRankOne",
            Error::NotRepresentable(_) => "NotRepresentable",
            Error::FormatError { .. } => "FormatError",
            Error::ConflictingEntry(_) => "ConflictingEntry",
            Error::BianchiViolation { .. } => "BianchiViolation",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
