use alloc::string::String;
use core::fmt;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the arguments does not hold.
    InvalidInput(String),
    /// The requested object does not fit the configured budget.
    Capacity { requested: u128, limit: u128 },
    /// The operation is only defined for a different class of profiles.
    UnsupportedProfile(String),
    /// Thinning target is not dominated by the source profile on some shell.
    CouplingOrder { shell: u32, source: f64, target: f64 },
    /// An iterative solve did not reach its tolerance.
    NumericalFailure { residual: f64, iterations: usize },
    /// A cutset sequence is not consistent with the cluster it was built from.
    InconsistentCutset { j: u32 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::Capacity { requested, limit } => {
                write!(f, "capacity exceeded: {requested} requested, limit {limit}")
            }
            Error::UnsupportedProfile(msg) => write!(f, "unsupported profile: {msg}"),
            Error::CouplingOrder {
                shell,
                source,
                target,
            } => write!(
                f,
                "coupling order violated at shell {shell}: target probability {target} exceeds source {source}"
            ),
            Error::NumericalFailure {
                residual,
                iterations,
            } => write!(
                f,
                "solver did not converge after {iterations} iterations (residual {residual:e})"
            ),
            Error::InconsistentCutset { j } => {
                write!(f, "cutset {j} is empty while deeper shells are populated")
            }
        }
    }
}

impl core::error::Error for Error {}
