use std::path::{Path, PathBuf};
use thiserror::Error;

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("line {line}, column {column}{}: {message}", field_suffix(.field))]
    Scenario {
        line: usize,
        column: usize,
        field: String,
        message: String,
    },
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<BenchError>,
    },
    #[error("engines disagree after iteration {iteration}: {diff}")]
    Mismatch { iteration: usize, diff: String },
    #[error("unsound label: {0}")]
    Unsound(String),
    #[error(transparent)]
    Core(#[from] rgg_core::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn field_suffix(field: &str) -> String {
    if field.is_empty() {
        String::new()
    } else {
        format!(" ({field})")
    }
}

impl BenchError {
    pub(crate) fn in_file(self, path: &Path) -> Self {
        BenchError::InFile {
            path: path.to_path_buf(),
            source: Box::new(self),
        }
    }
}
