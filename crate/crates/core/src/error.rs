use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Market parameters violate a model constraint.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// The 2×2 matrix has a = c or b = d.
    #[error("degenerate game matrix: {0}")]
    DegenerateMatrix(String),

    #[error("integration error at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit code used by the command-line tool.
    ///
    /// 2 = parse/validation, 3 = domain, 4 = numerical, 1 = I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Validation(_) | Error::DegenerateMatrix(_) => 2,
            Error::Domain(_) | Error::Constraint(_) => 3,
            Error::Integration { .. } | Error::Simulation(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
