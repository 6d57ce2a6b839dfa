//! Error types shared across the crate.

use thiserror::Error;

use crate::time::TimeMs;

/// Crate-wide error type. Variants carry enough context to name the failing
/// entity in diagnostics and in the run log.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("unknown operator {0:?}")]
    UnknownOperator(String),
    #[error("unknown PE {0}")]
    UnknownPe(u64),
    #[error("unknown host {0:?}")]
    UnknownHost(String),
    #[error("unknown job {0}")]
    UnknownJob(u64),
    #[error("job {0} already cancelled")]
    AlreadyCancelled(u64),
    #[error("no host available in pool {pool:?}")]
    NoHostAvailable { pool: String },
    #[error("invalid state transition: {0}")]
    InvalidStateTransition(String),
    #[error("filter {filter} not legal for subscope kind {kind}")]
    IllegalFilterForKind { kind: String, filter: String },
    #[error("subscope key must be non-empty")]
    EmptyKey,
    #[error("subscope key {0:?} already registered")]
    DuplicateKey(String),
    #[error("period must be positive")]
    NonPositivePeriod,
    #[error("config id {0:?} already registered")]
    DuplicateId(String),
    #[error("unknown application {0:?}")]
    UnknownApplication(String),
    #[error("unknown config {0:?}")]
    UnknownConfig(String),
    #[error("dependency {dependent:?} -> {dependency:?} would create a cycle")]
    CycleError { dependent: String, dependency: String },
    #[error("uptime requirement must be non-negative")]
    NegativeUptime,
    #[error("config {0:?} is not running")]
    NotRunning(String),
    #[error("config {0:?} is not pending cancellation")]
    NotPendingCancel(String),
    #[error("config {0:?} was already submitted")]
    AlreadySubmitted(String),
    #[error("job {0} is not managed by this orchestrator")]
    UnmanagedJob(u64),
    #[error("cannot cancel {config:?}: running application {dependent:?} depends on it")]
    StarvationError { config: String, dependent: String },
    #[error("injection at {at}ms references {what}: {source}")]
    Injection {
        at: TimeMs,
        what: String,
        #[source]
        source: Box<Error>,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable code, used in log records.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse_error",
            Error::Validation(_) => "validation_error",
            Error::UnknownOperator(_) => "unknown_operator",
            Error::UnknownPe(_) => "unknown_pe",
            Error::UnknownHost(_) => "unknown_host",
            Error::UnknownJob(_) => "unknown_job",
            Error::AlreadyCancelled(_) => "already_cancelled",
            Error::NoHostAvailable { .. } => "no_host_available",
            Error::InvalidStateTransition(_) => "invalid_state_transition",
            Error::IllegalFilterForKind { .. } => "illegal_filter_for_kind",
            Error::EmptyKey => "empty_key",
            Error::DuplicateKey(_) => "duplicate_key",
            Error::NonPositivePeriod => "non_positive_period",
            Error::DuplicateId(_) => "duplicate_id",
            Error::UnknownApplication(_) => "unknown_application",
            Error::UnknownConfig(_) => "unknown_config",
            Error::CycleError { .. } => "cycle_error",
            Error::NegativeUptime => "negative_uptime",
            Error::NotRunning(_) => "not_running",
            Error::NotPendingCancel(_) => "not_pending_cancel",
            Error::AlreadySubmitted(_) => "already_submitted",
            Error::UnmanagedJob(_) => "unmanaged_job",
            Error::StarvationError { .. } => "starvation_error",
            Error::Injection { source, .. } => source.code(),
            Error::Io(_) => "io_error",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
