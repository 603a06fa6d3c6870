//! Atomic file output and provenance stamps.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::{CliError, RunConfig};

pub fn out_dir(config: &RunConfig) -> PathBuf {
    config.out.clone().unwrap_or_else(|| PathBuf::from("out"))
}

/// Writes to a sibling temporary file and renames it into place, so a
/// reader never sees a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io_error)?;
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("bad output path {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let mut file = fs::File::create(&tmp).map_err(io_error)?;
    file.write_all(bytes).map_err(io_error)?;
    file.sync_all().map_err(io_error)?;
    fs::rename(&tmp, path).map_err(io_error)?;
    Ok(())
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::Compute(frontspeed::Error::Io(e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// The comment line stamped on every CSV.
pub fn provenance(config: &RunConfig, details: &str) -> String {
    let seed = config
        .seed
        .map_or_else(|| "none".to_string(), |s| s.to_string());
    format!(
        "frontspeed {} seed={seed} {details}",
        env!("CARGO_PKG_VERSION")
    )
}
