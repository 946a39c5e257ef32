use thiserror::Error;

use super::config::StateId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown state {0}")]
    UnknownState(StateId),

    #[error("unknown state name `{0}`")]
    UnknownStateName(String),

    #[error("duplicate state name `{0}`")]
    DuplicateState(String),

    #[error("transition {pre:?} -> {post:?} is not enabled")]
    NotEnabled { pre: [StateId; 2], post: [StateId; 2] },

    #[error("state {0} is not occupied")]
    Unoccupied(StateId),

    #[error("output sets do not partition the states: {0}")]
    BadPartition(String),

    #[error("neutral states are only allowed in weak-consensus protocols")]
    NeutralInConsensus,

    #[error("expected {expected} input values, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state space too large: {0}")]
    TooLarge(String),

    #[error("malformed predicate: {0}")]
    Predicate(String),

    #[error("malformed protocol document: {0}")]
    Format(String),
}
