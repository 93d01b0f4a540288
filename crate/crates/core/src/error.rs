use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("eigensolver did not converge after {iterations} QR sweeps")]
    NonConvergence { iterations: usize },
    #[error("ill-conditioned invariant split: eigenvalue gap {gap:.3e} below threshold {threshold:.3e}")]
    IllConditionedSplit { gap: f64, threshold: f64 },
    #[error("ill-conditioned projection: singular value {value:.3e} is ambiguous for the rank cut")]
    IllConditionedProjection { value: f64 },
    #[error("operator is not power-bounded (spectral radius {spectral_radius:.6})")]
    NotPowerBounded { spectral_radius: f64 },
    #[error("orbit net exceeded {cap} representatives; increase epsilon")]
    NetTooLarge { cap: usize },
    #[error("horizon {horizon} too small: {detail}")]
    HorizonTooSmall { horizon: usize, detail: String },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("matrix is not positive: {0}")]
    NotPositive(String),
    #[error("singular matrix at pivot {pivot}")]
    Singular { pivot: usize },
    #[error("semigroup exceeded cap of {cap} elements")]
    SemigroupCapExceeded { cap: usize },
    #[error("epsilon collapse too coarse: associativity fails at ({a}, {b}, {c}); use a smaller epsilon")]
    CollapseTooCoarse { a: usize, b: usize, c: usize },
    #[error("cayley table is not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("infeasible fixture: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
