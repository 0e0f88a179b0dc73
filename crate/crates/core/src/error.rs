use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A declared deadline does not lie strictly after the job's release.
    #[error("infeasible deadline for job {job}: d = {deadline} must exceed r = {release}")]
    InfeasibleDeadline {
        job: usize,
        release: f64,
        deadline: f64,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    /// The penalty was still decreasing at the largest search bound tried.
    #[error(
        "unbounded window for player {player}: penalty slope {slope:e} still negative at d = {upper} after {doublings} doublings"
    )]
    UnboundedWindow {
        player: usize,
        upper: f64,
        slope: f64,
        doublings: u32,
    },

    #[error("alpha = {alpha} is not supported here (requires alpha >= {min})")]
    UnsupportedAlpha { alpha: f64, min: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("trace outside the analysed regime: {0}")]
    OutOfRegime(String),

    #[error("best response failed at dynamics step {step}: {source}")]
    Dynamics {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
