use thiserror::Error;

/// Errors raised by kernels, objectives, subproblem solvers and the algorithm drivers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain violation at coordinate {coord}: {value} ({reason})")]
    Domain {
        coord: usize,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("degenerate step: D_h(z, z~) = 0")]
    DegenerateStep,

    #[error("singular moment matrix (pivot {pivot} = {value})")]
    SingularMatrix { pivot: usize, value: f64 },

    #[error("unbounded subproblem at coordinate {coord}: effective linear coefficient {coeff} <= 0")]
    Unbounded { coord: usize, coeff: f64 },

    #[error("unsupported pairing: {0}")]
    Unsupported(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("adaptation failed at iteration {iter} after {trials} trials")]
    Adaptation { iter: usize, trials: usize },

    #[error("{what} did not converge within {iters} iterations (residual {residual:e})")]
    NonConvergence {
        what: &'static str,
        iters: usize,
        residual: f64,
    },

    #[error("iteration {iter}: {source}")]
    AtIteration {
        iter: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn at(self, iter: usize) -> Error {
        match self {
            e @ Error::AtIteration { .. } => e,
            e => Error::AtIteration {
                iter,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, with iteration context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtIteration { source, .. } => source.root(),
            e => e,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
