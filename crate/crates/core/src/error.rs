use thiserror::Error;

use crate::graph::AgentId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by graph construction, influence computations and the
/// lottery oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("agent `{0}` is not part of the universe")]
    UnknownAgent(AgentId),
    #[error("agent `{0}` has more than one outgoing delegation")]
    DuplicateDelegator(AgentId),
    #[error("agent `{agent}` has more than one delegation for scope {scope}")]
    DuplicateScope { agent: AgentId, scope: String },
    #[error("agent `{0}` delegates to itself; express endpoints by omitting the delegation")]
    SelfDelegation(AgentId),
    #[error("agent `{0}` is listed more than once")]
    DuplicateAgent(AgentId),
    #[error("issue `{0}` is not assigned to any policy area")]
    UnknownIssue(String),
    #[error("the agent universe is empty")]
    EmptyUniverse,
    #[error("probability {value} is outside [0, 1]{}", agent.as_ref().map(|a| format!(" for agent `{a}`")).unwrap_or_default())]
    InvalidProbability { agent: Option<AgentId>, value: f64 },
    #[error("no voting probability given for delegating agent `{0}`")]
    MissingProbability(AgentId),
    #[error("tolerance must be a positive finite number, got {0}")]
    InvalidTolerance(f64),
    #[error("power iteration did not converge within {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("exact enumeration needs {trials} Bernoulli trials, above the limit of {limit}; use Monte Carlo sampling instead")]
    TooLarge { trials: usize, limit: usize },
    #[error("Monte Carlo estimation needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
}

impl Error {
    /// Stable machine-readable code for the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnknownAgent(_) => "unknown-agent",
            Error::DuplicateDelegator(_) => "duplicate-delegator",
            Error::DuplicateScope { .. } => "duplicate-scope",
            Error::SelfDelegation(_) => "self-delegation",
            Error::DuplicateAgent(_) => "duplicate-agent",
            Error::UnknownIssue(_) => "unknown-issue",
            Error::EmptyUniverse => "empty-universe",
            Error::InvalidProbability { .. } => "probability-range",
            Error::MissingProbability(_) => "missing-probability",
            Error::InvalidTolerance(_) => "invalid-tolerance",
            Error::NoConvergence { .. } => "no-convergence",
            Error::TooLarge { .. } => "too-large",
            Error::TooFewSamples(_) => "too-few-samples",
        }
    }
}
