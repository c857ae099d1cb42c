use thiserror::Error;

use crate::model::MomentumPoint;

/// Errors raised by model construction and the spectral analyses.
///
/// Every variant maps onto one [`ErrorCategory`]; the CLI turns the category
/// into its exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error{}: {message}", location.as_ref().map(|l| format!(" at {l}")).unwrap_or_default())]
    Config {
        message: String,
        location: Option<String>,
    },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("numerical error at {k}: {message} (residual {residual:.3e})")]
    Numerical {
        k: MomentumPoint,
        message: String,
        residual: f64,
    },

    #[error("tracking error on segment {from} -> {to}: {message}")]
    Tracking {
        from: MomentumPoint,
        to: MomentumPoint,
        message: String,
    },

    #[error("degeneracy error near {k}: {message}")]
    Degeneracy { k: MomentumPoint, message: String },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Numerical,
    Degeneracy,
    Geometry,
    Io,
}

impl ErrorCategory {
    pub fn name(self) -> &'static str {
        match self {
            ErrorCategory::Config => "configuration",
            ErrorCategory::Numerical => "numerical",
            ErrorCategory::Degeneracy => "degeneracy",
            ErrorCategory::Geometry => "geometry",
            ErrorCategory::Io => "io",
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Numerical => 3,
            ErrorCategory::Degeneracy => 4,
            ErrorCategory::Geometry => 5,
            ErrorCategory::Io => 6,
        }
    }
}

impl Error {
    pub fn config(message: impl Into<String>) -> Self {
        Error::Config {
            message: message.into(),
            location: None,
        }
    }

    pub fn config_at(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            message: message.into(),
            location: Some(location.into()),
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config { .. } | Error::Dimension(_) => ErrorCategory::Config,
            Error::Numerical { .. } | Error::Tracking { .. } => ErrorCategory::Numerical,
            Error::Degeneracy { .. } => ErrorCategory::Degeneracy,
            Error::Geometry(_) => ErrorCategory::Geometry,
            Error::Io(_) => ErrorCategory::Io,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
