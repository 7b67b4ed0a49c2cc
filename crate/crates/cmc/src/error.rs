use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum CmcError {
    #[error("AntipodalPoints: the distance gradient is undefined between antipodal points")]
    AntipodalPoints,
    #[error("DegenerateBase: the gradient of the distance is undefined at the base point itself")]
    DegenerateBase,
    #[error("OutOfDomain: {0}")]
    OutOfDomain(String),
    #[error("NonPositiveU: u must be positive, got {0}")]
    NonPositiveU(f64),
    #[error("InconsistentMeanCurvature: (lambda1+lambda2)/2 = {got} but H = {h}")]
    InconsistentMeanCurvature { got: f64, h: f64 },
    #[error("AxisCollision: the profile reached the rotation axis at s = {0}")]
    AxisCollision(f64),
    #[error("DomainViolation: sample at s = {s}, theta = {theta} has r = {r} outside the admissible range")]
    DomainViolation { s: f64, theta: f64, r: f64 },
    #[error("DegenerateMetric: first fundamental form has det = {0}")]
    DegenerateMetric(f64),
    #[error("NonPositiveU0: u0 must be positive, got {0}")]
    NonPositiveU0(f64),
    #[error("BranchMismatch: stored branch does not match the sign of c + H^2")]
    BranchMismatch,
    #[error("Breakdown: u reached the breakdown floor at s = {0}")]
    Breakdown(f64),
    #[error("NonPositiveW: w must be positive, got {0}")]
    NonPositiveW(f64),
    #[error("InvalidGeometry: {0}")]
    InvalidGeometry(String),
    #[error("NoContact: no orthogonal contact found for s <= {0}")]
    NoContact(f64),
    #[error("NoBracket: no sign change of R(u0) - R_target over the scanned range")]
    NoBracket,
    #[error("NoSuchCap: {0}")]
    NoSuchCap(String),
    #[error("Io: {0}")]
    Io(#[from] std::io::Error),
    #[error("Json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("Parse: {0}")]
    Parse(String),
}

impl CmcError {
    /// Stable name of the variant, used in CLI messages and exit-code mapping.
    pub fn name(&self) -> &'static str {
        match self {
            CmcError::AntipodalPoints => "AntipodalPoints",
            CmcError::DegenerateBase => "DegenerateBase",
            CmcError::OutOfDomain(_) => "OutOfDomain",
            CmcError::NonPositiveU(_) => "NonPositiveU",
            CmcError::InconsistentMeanCurvature { .. } => "InconsistentMeanCurvature",
            CmcError::AxisCollision(_) => "AxisCollision",
            CmcError::DomainViolation { .. } => "DomainViolation",
            CmcError::DegenerateMetric(_) => "DegenerateMetric",
            CmcError::NonPositiveU0(_) => "NonPositiveU0",
            CmcError::BranchMismatch => "BranchMismatch",
            CmcError::Breakdown(_) => "Breakdown",
            CmcError::NonPositiveW(_) => "NonPositiveW",
            CmcError::InvalidGeometry(_) => "InvalidGeometry",
            CmcError::NoContact(_) => "NoContact",
            CmcError::NoBracket => "NoBracket",
            CmcError::NoSuchCap(_) => "NoSuchCap",
            CmcError::Io(_) => "Io",
            CmcError::Json(_) => "Json",
            CmcError::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, CmcError>;
