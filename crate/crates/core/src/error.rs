use std::path::PathBuf;

use crate::io::ValidationReport;
use crate::model::{MonthId, UnitId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{} forecast cell(s) have no matching observation, first: {}", .0.len(), fmt_cells(.0))]
    MissingObservations(Vec<(UnitId, MonthId)>),

    #[error("forecast cell(s) fall outside every declared window, first: {}", fmt_cells(.0))]
    OutsideWindows(Vec<(UnitId, MonthId)>),

    #[error("missing history for {} unit(s): {}", .0.len(), fmt_history(.0))]
    MissingHistory(Vec<(UnitId, Vec<MonthId>)>),

    #[error("empty bootstrap pool: {0}")]
    EmptyPool(String),

    #[error("ensemble has no members")]
    EmptyEnsemble,

    #[error("score tables are not comparable: {0}")]
    CoverageMismatch(String),

    #[error("unscorable cell {unit} {month}: {reason}")]
    Unscorable {
        unit: UnitId,
        month: MonthId,
        reason: String,
    },

    #[error("{path}: invalid submission\n{}", report.summary())]
    InvalidSubmission {
        path: PathBuf,
        report: Box<ValidationReport>,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Parquet {
        path: PathBuf,
        #[source]
        source: parquet::errors::ParquetError,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}

fn fmt_cells(cells: &[(UnitId, MonthId)]) -> String {
    let mut out: Vec<String> = cells
        .iter()
        .take(5)
        .map(|(u, m)| format!("({u}, {m})"))
        .collect();
    if cells.len() > 5 {
        out.push(format!("... {} more", cells.len() - 5));
    }
    out.join(", ")
}

fn fmt_history(units: &[(UnitId, Vec<MonthId>)]) -> String {
    units
        .iter()
        .take(5)
        .map(|(u, months)| format!("{u} lacks {} month(s)", months.len()))
        .collect::<Vec<_>>()
        .join(", ")
}
