use thiserror::Error;

use crate::env::EnvError;
use crate::evolution::GenomeError;
use crate::recording::RecordingError;
use crate::reward::RewardError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad or unusable input data.
    Data,
    /// Invalid configuration.
    Config,
    /// A caller broke an API contract.
    Contract,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Recording(#[from] RecordingError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error(transparent)]
    Genome(#[from] GenomeError),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Recording(e) => e.kind(),
            Error::Env(e) => e.kind(),
            Error::Reward(_) => ErrorKind::Contract,
            Error::Genome(e) => e.kind(),
        }
    }
}
