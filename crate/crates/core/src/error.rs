use thiserror::Error;

use crate::rational::Rational;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution weights sum to {sum}, expected 1")]
    NotNormalized { sum: Rational },

    #[error("action index {action} out of range for player {player}")]
    ActionOutOfRange { player: usize, action: usize },

    #[error("profile has {got} components, environment has {expected} players")]
    ProfileArity { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("vacuous punishment: player {player} has no threat available against deviation to action {action}")]
    VacuousPunishment { player: usize, action: usize },

    #[error("player {player} has no opponent profiles inside the restricted set")]
    EmptyOpponents { player: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("instance too large: {what} needs {needed}, cap is {cap}")]
    TooLarge {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    #[error("ordering distribution is missing on supported profile {0}")]
    MissingOrdering(usize),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
