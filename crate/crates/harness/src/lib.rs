//! Experiment harness: instance files in, trace CSVs, summaries and rate
//! certificates out.

pub mod certificate;
pub mod cli;
pub mod compare;
pub mod trace_csv;

pub use certificate::{certificates, fit_rate_slope, geo_mean_gain, geo_mean_gain_series, BoundKind, Certificate};
pub use cli::cli_main;
pub use trace_csv::{read_trace_csv, write_trace_csv, CsvRow};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] bregman_core::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line() as usize);
        match e.kind() {
            csv::ErrorKind::Io(_) => HarnessError::Io(e.to_string()),
            _ => HarnessError::Parse { line, msg: e.to_string() },
        }
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
