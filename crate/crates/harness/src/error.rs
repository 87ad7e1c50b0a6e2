use std::path::PathBuf;

use loday_core::algebra::AlgebraError;
use loday_core::field::FieldError;
use loday_core::homology::HomologyError;
use loday_core::loday::LodayError;
use loday_core::simplicial::SimplicialError;
use loday_core::spectral::SpectralError;
use loday_core::torusdiag::TorusError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{source_name}:{line}:{column}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {0}")]
    Input(String),
    #[error("unknown bundled scenario or table {0:?}")]
    Unknown(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error(transparent)]
    Loday(#[from] LodayError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
