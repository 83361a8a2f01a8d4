//! Atomic output helpers: every artifact lands under its final name only
//! after a complete write, so interrupted runs never leave torn files and
//! reruns replace outputs in one step.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

/// Runs `write` against a hidden sibling path, then renames it into place.
///
/// The temporary keeps the real file name as a suffix (`.tmp-overlay.png`)
/// so extension-driven format selection still sees the right extension.
pub fn atomic(path: &Path, write: impl FnOnce(&Path) -> Result<()>) -> Result<()> {
    let name = path
        .file_name()
        .with_context(|| format!("output path {} has no file name", path.display()))?;
    let tmp = path.with_file_name(format!(".tmp-{}", name.to_string_lossy()));
    write(&tmp)?;
    fs::rename(&tmp, path).with_context(|| format!("moving {} into place", path.display()))?;
    Ok(())
}

/// Serializes `value` as pretty JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    atomic(path, |tmp| {
        let mut body = serde_json::to_string_pretty(value).context("serializing JSON")?;
        body.push('\n');
        fs::write(tmp, body).with_context(|| format!("writing {}", tmp.display()))?;
        Ok(())
    })
}

/// Atomically writes a PNG through one of the core save functions.
pub fn write_png(path: &Path, save: impl FnOnce(&Path) -> towscan_core::Result<()>) -> Result<()> {
    atomic(path, |tmp| {
        save(tmp).with_context(|| format!("writing {}", tmp.display()))
    })
}

/// Reads and deserializes a JSON file.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let body = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&body).with_context(|| format!("parsing {}", path.display()))
}
