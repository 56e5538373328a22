use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Writes `contents` to a temporary file next to `path`, then renames it.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.flush().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Report to `out` when given, stdout otherwise.
pub fn emit(out: Option<&Path>, value: &impl Serialize) -> Result<(), CliError> {
    let text = to_json(value);
    match out {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// The full command line and tool version.
#[derive(Clone, Debug, Serialize)]
pub struct Invocation {
    pub argv: Vec<String>,
    pub version: &'static str,
}

impl Invocation {
    pub fn new(argv: &[String]) -> Self {
        Self {
            argv: argv.to_vec(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// At most `max` evenly spaced samples, always keeping the last one.
pub fn downsample(xs: &[f64], max: usize) -> Vec<(usize, f64)> {
    if xs.len() <= max {
        return xs.iter().copied().enumerate().collect();
    }
    let stride = xs.len().div_ceil(max - 1);
    let mut out: Vec<(usize, f64)> = xs.iter().copied().enumerate().step_by(stride).collect();
    if out.last().map(|(i, _)| *i) != Some(xs.len() - 1) {
        out.push((xs.len() - 1, xs[xs.len() - 1]));
    }
    out
}
