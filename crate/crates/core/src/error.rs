use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector is not normalized (norm² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("zero vector has no ray")]
    ZeroVector,

    #[error("matrix is not a rank-one orthogonal projector (deviation {deviation:e})")]
    InvalidRay { deviation: f64 },

    #[error("direction is not a unit vector (norm = {norm})")]
    InvalidDirection { norm: f64 },

    #[error("vector is not tangent to the sphere (Re<z, X> = {residual:e})")]
    NotTangent { residual: f64 },

    #[error("vector does not lie on the base line (residual {residual:e})")]
    NotOnLine { residual: f64 },

    #[error("sample count must be positive")]
    ZeroSamples,

    #[error("start vector is not over the first path point (distance {distance:e})")]
    NotOverStart { distance: f64 },

    #[error("path step {index} has Fubini-Study gap {gap} >= pi/4")]
    MeshTooCoarse { index: usize, gap: f64 },

    #[error("path is empty")]
    EmptyPath,

    #[error("loop is not closed (endpoint distance {distance:e})")]
    OpenLoop { distance: f64 },

    #[error("mesh size {mesh} is below the minimum {min}")]
    MeshTooSmall { mesh: usize, min: usize },

    #[error("plaquette phase {phase} is not below pi/2, refine the mesh")]
    RefinementRequired { phase: f64 },

    #[error("lattice flux {value} is not within 1e-6 of an integer")]
    NonIntegerFlux { value: f64 },

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("inconsistent measurement record: {0}")]
    InconsistentRecord(String),

    #[error("failed to build worker pool: {0}")]
    WorkerPool(String),
}
