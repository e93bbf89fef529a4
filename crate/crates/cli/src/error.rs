use serde::Serialize;
use sphere_re::Error;

pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorClass {
    Validation,
    Numerical,
}

/// An error with a stable machine-readable code, written to stderr as JSON.
#[derive(Debug, Clone, Serialize)]
pub struct CliError {
    pub class: ErrorClass,
    pub code: &'static str,
    pub message: String,
}

impl CliError {
    pub fn validation(code: &'static str, message: impl Into<String>) -> Self {
        Self { class: ErrorClass::Validation, code, message: message.into() }
    }

    pub fn numerical(code: &'static str, message: impl Into<String>) -> Self {
        Self { class: ErrorClass::Numerical, code, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class {
            ErrorClass::Validation => EXIT_VALIDATION,
            ErrorClass::Numerical => EXIT_NUMERICAL,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let (class, code) = match e {
            Error::DegenerateShape(..) => (ErrorClass::Validation, "degenerate_shape"),
            Error::UnrealizableShape(_) => (ErrorClass::Validation, "unrealizable_shape"),
            Error::SingularSeparation { .. } => (ErrorClass::Validation, "singular_separation"),
            Error::ExcludedAngle(_) => (ErrorClass::Validation, "excluded_angle"),
            Error::NoLreForRepulsive => (ErrorClass::Validation, "no_lre_for_repulsive"),
            Error::InvalidInput(_) => (ErrorClass::Validation, "invalid_input"),
            Error::CoordinateSingularity(_) => (ErrorClass::Numerical, "coordinate_singularity"),
            Error::DegenerateNormalization => (ErrorClass::Numerical, "degenerate_normalization"),
            Error::ReconstructionOutOfRange(_) => (ErrorClass::Numerical, "reconstruction_out_of_range"),
            Error::DegenerateDiscriminant(_) => (ErrorClass::Numerical, "degenerate_discriminant"),
            Error::InconsistentRatios(_) => (ErrorClass::Numerical, "inconsistent_ratios"),
            Error::NotAnEquilibrium(_) => (ErrorClass::Numerical, "not_an_equilibrium"),
            Error::FixedPointLre(_) => (ErrorClass::Numerical, "fixed_point_lre"),
            Error::IntegrationAborted { .. } => (ErrorClass::Numerical, "integration_aborted"),
            Error::Internal(_) => (ErrorClass::Numerical, "internal"),
        };
        Self { class, code, message }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::validation("io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::validation("bad_json", e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::validation("io", e.to_string())
    }
}
