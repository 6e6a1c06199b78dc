use thiserror::Error;

/// Errors produced by the geometry kernel.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point is not interior to the hyperboloid solid (form value {form})")]
    NonInteriorPoint { form: f64 },

    #[error("point lies at infinity of the Euclidean chart (x0 = 0)")]
    AtInfinity,

    #[error("matrix entries do not have unit determinant (ad - bc = {det})")]
    NotUnitDeterminant { det: f64 },

    #[error("radius must be non-negative, got {0}")]
    NegativeRadius(f64),

    #[error("arc length must be non-negative, got {0}")]
    NegativeArcLength(f64),

    #[error("fibre coordinate reaches the chart boundary |phi| = pi/2 (phi = {0})")]
    ChartOverflow(f64),

    #[error("adaptive step size underflow at s = {s} (h = {h})")]
    StepSizeUnderflow { s: f64, h: f64 },

    #[error("geodesic ODE started at the axis r = 0 without bootstrap")]
    SingularStart,

    #[error("distance solver did not converge (best residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("target point out of chart: |phi| = {0} >= pi/2")]
    OutOfChart(f64),

    #[error("ball radius {0} outside [0, pi/2)")]
    RadiusOutOfRange(f64),

    #[error("quadrature failed to reach tolerance (estimate {estimate}, error {error:e})")]
    QuadratureFailure { estimate: f64, error: f64 },

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadratureSpec(String),

    #[error("invalid radial curve: {0}")]
    InvalidCurve(String),

    #[error("invalid tiling parameters (p={p}, q={q}): {reason}")]
    InvalidParams { p: u32, q: u32, reason: String },

    #[error("no rotation sign makes (ab)^2 a fibre translation by the prism height")]
    ConventionFailure,

    #[error("half-screw invariant subspace has dimension {0}, expected 2")]
    DegenerateNullspace(usize),

    #[error("side curve endpoint misses the vertex by {0:e}")]
    EndpointMismatch(f64),

    #[error("side curve polar angle is not monotone")]
    NonMonotoneAngle,

    #[error("mesh resolution must be an even number >= 2, got {0}")]
    InvalidMeshResolution(usize),

    #[error("cannot start worker pool: {0}")]
    WorkerPool(String),
}

pub type Result<T> = std::result::Result<T, Error>;
