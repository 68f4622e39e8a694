use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside the supported range {min}..={max}")]
    SizeLimit {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("graph has no vertices")]
    EmptyGraph,

    #[error("graph is not connected")]
    Disconnected,

    #[error("graph is not a tree")]
    NotATree,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown polymer `{0}`")]
    UnknownPolymer(String),

    #[error("invalid value for `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("convergence condition not verified: {0}")]
    ConditionNotVerified(String),

    #[error("product structure invalid for subset {subset:?}: {reason}")]
    ProductStructure { subset: Vec<String>, reason: String },

    #[error("stability violated: energy {energy} < -B*N = {bound} at {configuration:?}")]
    StabilityViolated {
        energy: f64,
        bound: f64,
        configuration: Vec<Vec<f64>>,
    },

    #[error("integral does not converge: {0}")]
    NonConvergent(String),

    #[error("integration tail cannot be certified: {0}")]
    TailNotCertifiable(String),

    #[error("hard rods are jammed: N*sigma = {packed} >= L = {side}")]
    Jammed { packed: f64, side: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn size(what: &'static str, value: usize, min: usize, max: usize) -> Self {
        Error::SizeLimit {
            what,
            value,
            min,
            max,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Rejects `value` unless `min <= value <= max`.
pub(crate) fn check_range(what: &'static str, value: usize, min: usize, max: usize) -> Result<()> {
    if value < min || value > max {
        Err(Error::size(what, value, min, max))
    } else {
        Ok(())
    }
}
