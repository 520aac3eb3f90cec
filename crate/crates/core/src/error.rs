use alloc::string::String;

pub type Result<T, E = StsError> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StsError {
    #[error("invalid epsilon: {0}")]
    InvalidEpsilon(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("no jobs")]
    NoJobs,
    #[error("guess too small: job {job} exceeds the makespan guess")]
    GuessTooSmall { job: usize },
    #[error("not a schedule: jobs {first} and {second} overlap on machine {machine}")]
    NotASchedule { machine: usize, first: usize, second: usize },
    #[error("schedule does not cover the instance: {0}")]
    Coverage(String),
    #[error("input violates time constraint")]
    InputViolatesTimeConstraint,
    #[error("input schedule is not nice: {0}")]
    NotNice(String),
    #[error("instance too large for oracle")]
    OracleTooLarge,
    #[error("container explosion: raise caps or shrink ε-regime")]
    ContainerExplosion,
    #[error("solver budget exceeded")]
    BudgetExceeded,
    #[error("no guess admitted a solution")]
    NoGuessAdmitted,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("TU violation: non-integral vertex in interval LP")]
    TuViolation,
    #[error("internal error: {0}")]
    Internal(String),
}
