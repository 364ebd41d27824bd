//! Number formatting and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// `v` with 17 significant digits, positional for moderate magnitudes.
pub fn fmt17(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.16e}")
    }
}

/// Comma-separated rows with a header line and LF endings.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Writes every file to a temporary sibling first, then renames them all,
/// so a failure leaves no partial output behind.
pub fn write_all_atomic(files: &[(&Path, &str)]) -> CliResult<()> {
    let io = |path: &Path, e: std::io::Error| CliError::Io(format!("cannot write {}: {e}", path.display()));
    let mut staged = Vec::with_capacity(files.len());
    for (path, content) in files {
        let dir = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
            _ => PathBuf::from("."),
        };
        let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| io(path, e))?;
        tmp.write_all(content.as_bytes()).map_err(|e| io(path, e))?;
        tmp.flush().map_err(|e| io(path, e))?;
        staged.push((tmp, *path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| io(path, e.error))?;
    }
    Ok(())
}

pub fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    write_all_atomic(&[(path, content)])
}
