use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quantum numbers: {0}")]
    QuantumNumbers(String),
    #[error("order {order} exceeds the configured maximum {max}")]
    OrderOverflow { order: usize, max: usize },
    #[error("Fock level {level} beyond truncation {truncation}")]
    FockTruncation { level: usize, truncation: usize },
    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("incompatible basis: {0}")]
    Basis(String),
    #[error("density matrix invariant violated: {0}")]
    Invariant(String),
    #[error("zero state vector")]
    ZeroVector,
    #[error("degenerate frame (mu={mu}, nu={nu}): {reason}")]
    DegenerateFrame { mu: f64, nu: f64, reason: &'static str },
    #[error("frame (mu={mu}, nu={nu}) has no rotation/scaling parameterization")]
    UnsolvableFrame { mu: f64, nu: f64 },
    #[error("lattice mismatch: {0}")]
    Lattice(String),
    #[error("reconstruction failed: hermiticity defect {defect:e} above {threshold:e}")]
    Reconstruction { defect: f64, threshold: f64 },
    #[error("quadrature did not converge (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },
    #[error("unsupported Hamiltonian for this operation: {0}")]
    UnsupportedHamiltonian(String),
    #[error("evolution unstable at t={time}: norm drifted to {norm}")]
    Unstable { time: f64, norm: f64 },
    #[error("truncation leak {leak:e} above threshold {threshold:e}")]
    TruncationLeak { leak: f64, threshold: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
