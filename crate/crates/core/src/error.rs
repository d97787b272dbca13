use thiserror::Error;

/// Errors raised across the crate. Variants carry enough context to be
/// surfaced directly by the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("unsupported boundary for {op}: {detail}")]
    UnsupportedBoundary { op: &'static str, detail: String },

    #[error("unsupported partition shape: {0}")]
    UnsupportedShape(String),

    #[error("empty subsystem")]
    EmptySubsystem,

    #[error("qubit {qubit} out of range for {n} qubits")]
    QubitOutOfRange { qubit: usize, n: usize },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("circuit parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("non-Clifford gate {0} on tableau backend")]
    NonCliffordOnTableau(String),

    #[error("qubit count {n} exceeds backend limit {max}")]
    QubitCountExceeded { n: usize, max: usize },

    #[error("excitation path is not connected: {0}")]
    DisconnectedPath(String),

    #[error("state is not normalized: |alpha|^2 + |beta|^2 = {0}")]
    NotNormalized(f64),

    #[error("unsupported code distance {0}")]
    UnsupportedDistance(usize),

    #[error("operator is not Hermitian (phase exponent {0})")]
    NotHermitian(u8),

    #[error("pauli string overlaps auxiliary qubit {0}")]
    AuxiliaryOverlap(usize),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("response matrix column {0} sums to zero")]
    ZeroColumn(usize),

    #[error("missing covariance for unfolded distribution")]
    MissingCovariance,

    #[error("non-positive purity {0}")]
    NonPositivePurity(f64),

    #[error("missing region {0} for topological entropy")]
    MissingRegion(String),

    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("no defined phase: mean Bloch vector length {0:.4} below threshold")]
    NoDefinedPhase(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Variant name, used as the machine-readable error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidLattice { .. } => "InvalidLattice",
            Error::UnsupportedBoundary { .. } => "UnsupportedBoundary",
            Error::UnsupportedShape { .. } => "UnsupportedShape",
            Error::EmptySubsystem => "EmptySubsystem",
            Error::QubitOutOfRange { .. } => "QubitOutOfRange",
            Error::InvalidCircuit { .. } => "InvalidCircuit",
            Error::Parse { .. } => "Parse",
            Error::NonCliffordOnTableau { .. } => "NonCliffordOnTableau",
            Error::QubitCountExceeded { .. } => "QubitCountExceeded",
            Error::DisconnectedPath { .. } => "DisconnectedPath",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::UnsupportedDistance { .. } => "UnsupportedDistance",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::AuxiliaryOverlap { .. } => "AuxiliaryOverlap",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ZeroColumn { .. } => "ZeroColumn",
            Error::MissingCovariance => "MissingCovariance",
            Error::NonPositivePurity { .. } => "NonPositivePurity",
            Error::MissingRegion { .. } => "MissingRegion",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::NoDefinedPhase { .. } => "NoDefinedPhase",
            Error::InvalidParameter { .. } => "InvalidParameter",
        }
    }
}
