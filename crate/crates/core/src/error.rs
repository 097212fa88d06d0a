use thiserror::Error;

/// Errors raised by the estimation and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("array needs at least 2 elements, got {0}")]
    TooFewElements(usize),
    #[error("element spacing ratio must be positive and finite, got {0}")]
    InvalidSpacing(f64),
    #[error("target angle {0} deg outside [0, 180]")]
    InvalidAngle(f64),
    #[error("target amplitude must be positive and finite, got {0}")]
    InvalidAmplitude(f64),
    #[error("scene has no targets")]
    EmptyScene,
    #[error("reference index {index} out of range for {len} targets")]
    InvalidReference { index: usize, len: usize },
    #[error("reference target must have the largest amplitude in the scene")]
    ReferenceNotStrongest,
    #[error("noise variance must be non-negative and finite, got {0}")]
    InvalidNoiseVariance(f64),
    #[error("maximum phase error must be non-negative and finite, got {0}")]
    InvalidPhaseError(f64),
    #[error("number of snapshots must be at least 1")]
    NoSnapshots,
    #[error("sequence length {0} is too short (need at least 2)")]
    SequenceTooShort(usize),
    #[error("zero padding factor must be at least 1")]
    InvalidPadFactor,
    #[error("peak count must be at least 1")]
    InvalidPeakCount,
    #[error("found {found} spectral peaks, {requested} requested")]
    InsufficientPeaks { requested: usize, found: usize },
    #[error("invalid angle bounds [{min}, {max}]")]
    InvalidAngleBounds { min: f64, max: f64 },
    #[error("could not place {count} targets with {separation} deg separation after {attempts} attempts")]
    SeparationInfeasible {
        count: usize,
        separation: f64,
        attempts: usize,
    },
    #[error("scene needs at least 2 targets")]
    SingleTargetScene,
    #[error("upsample factor must be at least 1")]
    InvalidUpsampleFactor,
    #[error("no sequences to integrate")]
    NothingToIntegrate,
    #[error("sequence lengths differ: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("dictionary needs at least 2 angle bins, got {0}")]
    TooFewBins(usize),
    #[error("sparsity {sparsity} invalid for a dictionary of {bins} atoms")]
    InvalidSparsity { sparsity: usize, bins: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
