use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("gram matrix is not hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("gram matrix has imaginary entries but the field is R")]
    NotReal,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("near stratum boundary: singular value {value:e} falls inside the ambiguous band")]
    NearStratumBoundary { value: f64 },

    #[error("frame is rank deficient (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("subspace is not totally isotropic (residual {residual:e})")]
    NotIsotropic { residual: f64 },

    #[error("objects live in different ambient spaces")]
    AmbientMismatch,

    #[error("tangent vector range condition violated (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("null tangent direction: tr(t*t) vanishes")]
    NullDirection,

    #[error("points are not distinct")]
    CoincidentPoints,

    #[error("absolute point: <p,p> vanishes")]
    AbsolutePoint,

    #[error("projective line through the points is degenerate")]
    DegenerateLine,

    #[error("points are not on a common projective line (angle {angle:e})")]
    NotCoplanar { angle: f64 },

    #[error("points lie in different riemannian pieces")]
    DifferentPieces,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("wrong field: {0}")]
    WrongField(String),

    #[error("wrong signature: {0}")]
    WrongSignature(String),

    #[error("coordinates outside chart (|h| = {norm}, radius {radius})")]
    OutsideChart { norm: f64, radius: f64 },

    #[error("ill-conditioned metric (condition number {0:e})")]
    IllConditioned(f64),

    #[error("no geodesic found: shooting residual {residual:e} after {iterations} iterations")]
    NoGeodesic { residual: f64, iterations: usize },

    #[error("transport failure: {0}")]
    TransportFailure(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
