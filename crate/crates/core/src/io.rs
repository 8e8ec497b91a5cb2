//! Hashing, CSV parsing and atomic file output shared by all modules.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const TOOL_NAME: &str = "qbath";

/// SHA-256 of the canonical JSON serialization of `value`.
pub fn config_hash<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// SHA-256 of raw bytes, hex encoded.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// `# tool=qbath version=… config_hash=…` comment line (no newline).
pub fn header_comment(config_hash: &str) -> String {
    format!("# tool={TOOL_NAME} version={} config_hash={config_hash}", crate::VERSION)
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?
        .to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Parses rows of comma-separated numbers. Lines starting with `#` and
/// blank lines are skipped; the first non-comment line may be a text
/// header. Every data row must have `expected_cols` columns.
pub fn parse_numeric_csv(text: &str, expected_cols: usize) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(vals) => {
                if vals.len() != expected_cols {
                    return Err(Error::Parse {
                        line: line_no,
                        reason: format!("expected {expected_cols} columns, found {}", vals.len()),
                    });
                }
                if vals.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Parse { line: line_no, reason: "non-finite value".into() });
                }
                rows.push(vals);
            }
            Err(_) if !seen_content => {}
            Err(e) => return Err(Error::Parse { line: line_no, reason: e.to_string() }),
        }
        seen_content = true;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_header_and_comments() {
        let rows = parse_numeric_csv("# c\nwavelength_nm,irradiance\n400,1.5\n\n500,2\n", 2).unwrap();
        assert_eq!(rows, vec![vec![400.0, 1.5], vec![500.0, 2.0]]);
    }

    #[test]
    fn csv_reports_bad_line() {
        match parse_numeric_csv("a,b\n1,2\n3,x\n", 2) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_numeric_csv("1,2,3\n", 2).is_err());
    }

    #[test]
    fn hash_is_stable() {
        let a = config_hash(&(1, "x")).unwrap();
        assert_eq!(a, config_hash(&(1, "x")).unwrap());
        assert_ne!(a, config_hash(&(2, "x")).unwrap());
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = std::env::temp_dir().join(format!("qbath-io-{}", std::process::id()));
        let p = dir.join("out.txt");
        atomic_write(&p, b"one").unwrap();
        atomic_write(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        std::fs::remove_dir_all(dir).unwrap();
    }
}
