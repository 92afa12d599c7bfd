use toric_core::fan::FanError;
use toric_core::kclass::KclassError;
use toric_core::potential::PotentialError;
use toric_core::reeb::ReebError;
use toric_core::resolve::ResolveError;

/// Every failure the command line reports, each with a fixed exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("unsupported dimension: {0}")]
    Unsupported(String),
    #[error("{0}")]
    NoSupport(String),
    #[error("Reeb vector optimization failed: {0}")]
    NoConvergence(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::InvalidFan(_) => 3,
            CliError::Unsupported(_) => 4,
            CliError::NoSupport(_) => 5,
            CliError::NoConvergence(_) => 6,
            CliError::Verification(_) => 7,
        }
    }
}

impl From<FanError> for CliError {
    fn from(e: FanError) -> Self {
        CliError::InvalidFan(e.to_string())
    }
}

impl From<ResolveError> for CliError {
    fn from(e: ResolveError) -> Self {
        match e {
            ResolveError::DimensionUnsupported(_) => CliError::Unsupported(e.to_string()),
            ResolveError::NotAWall(_) | ResolveError::NotFlippable(_) => {
                CliError::Usage(e.to_string())
            }
            ResolveError::InvalidParameters { .. } | ResolveError::NotFano(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::InvalidFan(e.to_string()),
        }
    }
}

impl From<KclassError> for CliError {
    fn from(e: KclassError) -> Self {
        match e {
            KclassError::NoneExists => CliError::NoSupport(e.to_string()),
            _ => CliError::InvalidFan(e.to_string()),
        }
    }
}

impl From<ReebError> for CliError {
    fn from(e: ReebError) -> Self {
        match e {
            ReebError::Fan(f) => f.into(),
            _ => CliError::NoConvergence(e.to_string()),
        }
    }
}

impl From<PotentialError> for CliError {
    fn from(e: PotentialError) -> Self {
        match e {
            PotentialError::Fan(f) => f.into(),
            _ => CliError::Verification(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_errors_keep_their_exit_codes() {
        assert_eq!(
            CliError::from(ResolveError::DimensionUnsupported(3)).exit_code(),
            4
        );
        assert_eq!(CliError::from(KclassError::NoneExists).exit_code(), 5);
        assert_eq!(CliError::from(ReebError::OutsideReebCone).exit_code(), 6);
        assert_eq!(CliError::from(PotentialError::OutsideCone).exit_code(), 7);
    }
}
