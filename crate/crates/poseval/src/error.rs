use std::fmt;
use std::path::{Path, PathBuf};

use poseval_core::{EvalError, GeometryError, PerturbError, ProcessError};

/// Process exit code for IO failures.
pub const EXIT_IO: i32 = 1;
/// Process exit code for malformed input or invalid configuration.
pub const EXIT_VALIDATION: i32 = 2;

/// Where in an input file a problem was found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    File,
    Row(u64),
    RowField(u64, String),
    Entry { image: String, instance: usize, field: String },
    Line { line: usize, column: usize },
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::File => Ok(()),
            Self::Row(row) => write!(f, "row {row}: "),
            Self::RowField(row, field) => write!(f, "row {row}, field {field}: "),
            Self::Entry { image, instance, field } => write!(f, "image {image}, instance {instance}, field {field}: "),
            Self::Line { line, column } => write!(f, "line {line}, column {column}: "),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {location}{message}", path.display())]
    Format { path: PathBuf, location: Location, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("output directory {} already exists (use --force to overwrite)", .0.display())]
    OutputExists(PathBuf),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error(transparent)]
    Process(#[from] ProcessError),
}

impl Error {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Self::Io { path: path.as_ref().to_path_buf(), source }
    }

    pub fn format(path: impl AsRef<Path>, location: Location, message: impl fmt::Display) -> Self {
        Self::Format { path: path.as_ref().to_path_buf(), location, message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io { .. } | Self::OutputExists(_) => EXIT_IO,
            _ => EXIT_VALIDATION,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
