use lab_core::LabError;
use serde::Serialize;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExitKind {
    Ok,
    CheckFailed,
    InvalidParameters,
    Resolution,
    InsufficientData,
    BlowUp,
    MissingArtifact,
    StepRejected,
}

impl ExitKind {
    pub fn code(self) -> i32 {
        match self {
            ExitKind::Ok => 0,
            ExitKind::CheckFailed => 1,
            ExitKind::InvalidParameters => 2,
            ExitKind::Resolution => 3,
            ExitKind::InsufficientData => 4,
            ExitKind::BlowUp => 5,
            ExitKind::MissingArtifact => 6,
            ExitKind::StepRejected => 7,
        }
    }
}

/// A command that could not complete, with the reason recorded in the manifest.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub kind: ExitKind,
    /// Machine-readable reason code.
    pub code: String,
    pub message: String,
}

impl Failure {
    pub fn new(kind: ExitKind, code: &str, message: impl Into<String>) -> Self {
        Self {
            kind,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn missing(path: &std::path::Path) -> Self {
        Self::new(
            ExitKind::MissingArtifact,
            "missing_artifact",
            format!("missing artifact {}", path.display()),
        )
    }

    pub fn io(e: std::io::Error) -> Self {
        Self::new(ExitKind::CheckFailed, "io", e.to_string())
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        let message = e.to_string();
        let (kind, code) = match &e {
            LabError::InvalidGrid(_) => (ExitKind::InvalidParameters, "invalid_grid"),
            LabError::InvalidExponent(_) => (ExitKind::InvalidParameters, "invalid_exponent"),
            LabError::InvalidParameter(_) => (ExitKind::InvalidParameters, "invalid_parameter"),
            LabError::AxisOutOfRange(_) => (ExitKind::InvalidParameters, "axis_out_of_range"),
            LabError::Format(_) => (ExitKind::InvalidParameters, "format"),
            LabError::Resolution { .. } => (ExitKind::Resolution, "resolution"),
            LabError::OutOfBand { .. } => (ExitKind::Resolution, "out_of_band"),
            LabError::SupportBudget { .. } => (ExitKind::Resolution, "support_budget"),
            LabError::InsufficientData { .. } => (ExitKind::InsufficientData, "insufficient_data"),
            LabError::BlowUp { .. } => (ExitKind::BlowUp, "blow_up"),
            LabError::StepRejected { .. } => (ExitKind::StepRejected, "step_rejected"),
            LabError::ShapeMismatch { .. } => (ExitKind::CheckFailed, "shape_mismatch"),
            LabError::SymmetryViolation { .. } => (ExitKind::CheckFailed, "symmetry_violation"),
            LabError::ConstructionIntegrity(_) => (ExitKind::CheckFailed, "construction_integrity"),
            LabError::UndefinedRatio(_) => (ExitKind::CheckFailed, "undefined_ratio"),
            LabError::GridMismatch => (ExitKind::CheckFailed, "grid_mismatch"),
            LabError::Io(_) => (ExitKind::CheckFailed, "io"),
        };
        Self::new(kind, code, message)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::new(ExitKind::InvalidParameters, "config_format", e.to_string())
    }
}
