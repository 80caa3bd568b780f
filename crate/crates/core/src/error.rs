use alloc::string::String;

use crate::C64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("curve {curve}: {reason}")]
    Geometry { curve: usize, reason: String },

    #[error("unknown catalog domain `{0}`")]
    UnknownDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {point} lies within {distance:e} of the boundary")]
    Proximity { point: C64, distance: f64 },

    #[error("point {0} is not interior to the domain")]
    PointNotInterior(C64),

    #[error("point {point} has clearance {actual:e}, need at least {required:e}")]
    Clearance { point: C64, required: f64, actual: f64 },

    #[error("matrix is singular to tolerance (pivot {pivot:e})")]
    Singular { pivot: f64 },

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("iteration did not converge (best estimate {best:e})")]
    Convergence { best: f64 },

    #[error("boundary functions live on different grids")]
    GridMismatch,

    #[error("Hardy basis reproduces polynomials only to {residual:e}; increase nodes or lower the basis order")]
    BasisQuality { residual: f64 },

    #[error("Hardy-space membership residual {residual:e} exceeds {tolerance:e}")]
    Decomposition { residual: f64, tolerance: f64 },

    #[error("expected {expected} zeros, argument principle gives {found:.6}")]
    ZeroCount { expected: usize, found: f64 },

    #[error("zeros are not distinct and simple")]
    ZeroSimplicity,

    #[error("internal consistency check `{what}` failed with residual {residual:e}")]
    Consistency { what: &'static str, residual: f64 },

    #[error("evaluation points are not separated: {0}")]
    Separation(String),

    #[error("weight is not strictly positive (minimum {min:e})")]
    NonPositiveWeight { min: f64 },

    #[error("boundary modulus of the proper map deviates from one by {deviation:e}")]
    BoundaryModulus { deviation: f64 },

    #[error("Dirichlet solve residual {residual:e} exceeds tolerance")]
    SolverResidual { residual: f64 },

    #[error("no Möbius parameter in the search grid gives simple zeros")]
    NoMobius,

    #[error("samples are ill-scaled: |f| exceeds one by {excess:e}")]
    IllScaled { excess: f64 },

    #[error("missing input: {0}")]
    MissingInput(String),
}

impl Error {
    /// Stable machine-readable token for the error kind.
    pub fn cause(&self) -> &'static str {
        match self {
            Error::Geometry { .. } => "geometry",
            Error::UnknownDomain(_) => "unknown-domain",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::Proximity { .. } => "boundary-proximity",
            Error::PointNotInterior(_) => "point-not-interior",
            Error::Clearance { .. } => "clearance",
            Error::Singular { .. } => "singular-matrix",
            Error::NonFinite => "non-finite",
            Error::Dimension(_) => "dimension-mismatch",
            Error::Convergence { .. } => "no-convergence",
            Error::GridMismatch => "grid-mismatch",
            Error::BasisQuality { .. } => "basis-quality",
            Error::Decomposition { .. } => "decomposition",
            Error::ZeroCount { .. } => "zero-count",
            Error::ZeroSimplicity => "zero-simplicity",
            Error::Consistency { .. } => "internal-consistency",
            Error::Separation(_) => "separation",
            Error::NonPositiveWeight { .. } => "non-positive-weight",
            Error::BoundaryModulus { .. } => "boundary-modulus",
            Error::SolverResidual { .. } => "solver-residual",
            Error::NoMobius => "no-mobius",
            Error::IllScaled { .. } => "ill-scaled",
            Error::MissingInput(_) => "missing-input",
        }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::Geometry { .. }
                | Error::UnknownDomain(_)
                | Error::InvalidParameter(_)
                | Error::Proximity { .. }
                | Error::PointNotInterior(_)
                | Error::Clearance { .. }
                | Error::GridMismatch
                | Error::Dimension(_)
                | Error::MissingInput(_)
                | Error::Separation(_)
        )
    }
}
