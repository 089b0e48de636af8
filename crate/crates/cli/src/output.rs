use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// Writes files under one directory, each prefixed by the config digest.
pub struct Output {
    dir: PathBuf,
    header: String,
    pub written: Vec<PathBuf>,
}

impl Output {
    pub fn new(dir: &Path, digest: &str) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Output {
            dir: dir.to_path_buf(),
            header: format!("# config-sha256: {digest}\n"),
            written: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, body: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, format!("{}{body}", self.header)).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }
}
