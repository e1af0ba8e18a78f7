use crate::expr::ExprError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("unknown geometry `{0}`")]
    UnknownGeometry(String),
    #[error("dimension out of range: {0}")]
    Dimension(String),
    #[error("geometry spec, line {line}, key `{key}`: {message}")]
    Spec { line: usize, key: String, message: String },
    #[error("warping function is not positive: {0}")]
    NonPositiveWarping(String),
    #[error("operation needs a {expected} geometry, got {found}")]
    WrongGeometry { expected: &'static str, found: String },
    #[error("variable `{var}` is not a coordinate of this geometry (allowed: {allowed})")]
    ForeignVariable { var: String, allowed: String },
    #[error("expression blew up to {size} nodes at order {order}")]
    ExpressionBlowup { order: usize, size: usize },
    #[error("finite-difference stencil hit a singular point: {0}")]
    StencilSingular(String),
    #[error("point {point} is closer than 2h to the boundary of ({lo}, {hi})")]
    OutOfDomain { point: f64, lo: f64, hi: f64 },
    #[error("quadrature on [{a}, {b}] did not converge within {subdivisions} subdivisions")]
    QuadratureFailure { a: f64, b: f64, subdivisions: usize },
    #[error("leading coefficient c1 must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("identity fit is degenerate: {0}")]
    FitDegenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
