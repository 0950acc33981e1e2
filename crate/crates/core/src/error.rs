use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("evaluation point is {distance:.3e} m from {}, inside the {guard:.0e} m guard", segment_label(.location))]
    Singularity {
        /// `(path index, segment index)` when known.
        location: Option<(usize, usize)>,
        distance: f64,
        guard: f64,
    },

    #[error("k = {k} exceeds the {distinct} distinct data values")]
    InfeasibleK { k: usize, distinct: usize },

    #[error("brute-force search refused for n = {n} (limit {limit})")]
    TooLarge { n: usize, limit: usize },

    #[error("invalid safety standard: {0}")]
    InvalidStandard(String),

    #[error("{}line {line}: {message}", source_prefix(.file))]
    Parse {
        file: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error("line {line}: unknown unit {unit:?}")]
    Unit { line: usize, unit: String },

    #[error("{0}: no survey rows")]
    EmptyInput(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn segment_label(location: &Option<(usize, usize)>) -> String {
    match location {
        Some((path, segment)) => format!("path {path} segment {segment}"),
        None => "the segment".to_string(),
    }
}

fn source_prefix(file: &Option<PathBuf>) -> String {
    match file {
        Some(p) => format!("{}: ", p.display()),
        None => String::new(),
    }
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            file: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn with_file(self, path: &std::path::Path) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                file: Some(path.to_path_buf()),
                line,
                message,
            },
            other => other,
        }
    }
}
