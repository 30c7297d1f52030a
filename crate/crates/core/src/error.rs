use thiserror::Error;

use crate::quasifree::PolarizationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("one-particle dimension {0} is not a positive even integer")]
    OddDimension(usize),
    #[error("involution matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),
    #[error("involution does not square to the identity (residual {0:.3e})")]
    InvolutionSquareFails(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("seed vector yields no gamma-invariant vector above tolerance")]
    DegenerateSeed,
    #[error("matrix is not hermitian (residual {0:.3e})")]
    NotHermitian(f64),
    #[error("generator does not anticommute with the involution (residual {0:.3e})")]
    NotGammaOdd(f64),
    #[error("inverse temperature must be positive, got {0}")]
    BetaNonPositive(f64),
    #[error("generator has an eigenvalue {0:.3e} within tolerance of zero")]
    ZeroMode(f64),
    #[error("invalid basis polarization: {0}")]
    InvalidPolarization(Box<PolarizationReport>),
    #[error("basis polarization is not idempotent (residual {0:.3e})")]
    NotProjection(f64),
    #[error("projection rank {rank} does not equal half the dimension {dim}")]
    RankMismatch { rank: f64, dim: usize },
    #[error("fock space with {modes} modes exceeds the cap of {cap}")]
    TooManyModes { modes: usize, cap: usize },
    #[error("mode index {index} out of range for {modes} modes")]
    ModeOutOfRange { index: usize, modes: usize },
    #[error("range of the projection is not invariant under the generator (residual {0:.3e})")]
    NotInvariant(f64),
    #[error("vector is zero")]
    ZeroVector,
    #[error("vector state is not cyclic and separating (smallest schmidt coefficient {0:.3e})")]
    NotSeparating(f64),
    #[error("density matrix invalid: {0}")]
    InvalidDensity(String),
    #[error("field vector is not gamma-invariant (residual {0:.3e})")]
    NotGammaInvariant(f64),
    #[error("field vector has (f,f) = {0}, which differs from the required normalization")]
    WrongNormalization(f64),
    #[error("polarization does not commute with the dynamics (residual {0:.3e})")]
    FlowIncompatible(f64),
    #[error("mass {0} is too small; spinor normalization degenerates")]
    MasslessDegenerate(f64),
    #[error("invalid mode: {0}")]
    BadMode(String),
    #[error("computed value has imaginary part {0:.3e}, expected a real number")]
    ComplexResidue(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
