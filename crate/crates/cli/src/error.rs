use std::path::PathBuf;

use antdyn_core::ErrorKind;
use thiserror::Error;

pub const EXIT_DATA: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_CONTRACT: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] antdyn_core::Error),
    #[error("{0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("check failed: {0}")]
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Data => EXIT_DATA,
                ErrorKind::Config => EXIT_CONFIG,
                ErrorKind::Contract => EXIT_CONTRACT,
            },
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Output { .. } => EXIT_DATA,
            CliError::Check(_) => EXIT_CONTRACT,
        }
    }
}

pub fn write_file(path: impl Into<PathBuf>, bytes: impl AsRef<[u8]>) -> Result<(), CliError> {
    let path = path.into();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Output {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(&path, bytes).map_err(|source| CliError::Output { path, source })
}
