//! File helpers shared by the subcommands.

use std::io::Write;
use std::path::Path;

use shallowlab_core::corpus::{Corpus, TagSet};

use crate::ssf::{parse_ssf, SsfError};

/// Writes through a temporary file in the target directory and renames it
/// into place, so a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: not valid UTF-8 (valid up to byte {valid_up_to})")]
    Encoding { path: String, valid_up_to: usize },
    #[error("{path}: {source}")]
    Ssf { path: String, source: SsfError },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

pub fn read_text(path: &Path) -> Result<String, InputError> {
    let bytes = std::fs::read(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })?;
    String::from_utf8(bytes).map_err(|e| InputError::Encoding {
        path: path.display().to_string(),
        valid_up_to: e.utf8_error().valid_up_to(),
    })
}

pub fn read_corpus(path: &Path, pos: &TagSet, chunk: &TagSet) -> Result<Corpus, InputError> {
    let text = read_text(path)?;
    parse_ssf(&text, pos, chunk).map_err(|source| InputError::Ssf {
        path: path.display().to_string(),
        source,
    })
}

/// Loads a tagset file, or the bundled ILMT list when `path` is `None`.
pub fn read_tagset(path: Option<&Path>, bundled: fn() -> TagSet) -> Result<TagSet, InputError> {
    let Some(path) = path else {
        return Ok(bundled());
    };
    let text = read_text(path)?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    TagSet::parse(&name, &text).map_err(|e| InputError::Invalid {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Parses a ratings table: one item per line, one rater per tab-separated
/// column. Blank lines are skipped; every cell must be filled.
pub fn parse_ratings(text: &str) -> Result<Vec<Vec<String>>, (usize, String)> {
    let mut rows: Vec<Vec<String>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<String> = line.split('\t').map(|c| c.trim().to_string()).collect();
        if let Some(col) = cells.iter().position(String::is_empty) {
            return Err((i + 1, format!("empty rating in column {}", col + 1)));
        }
        if let Some(first) = rows.first() {
            if first.len() != cells.len() {
                return Err((i + 1, format!("expected {} ratings, found {}", first.len(), cells.len())));
            }
        }
        rows.push(cells);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratings_table() {
        let rows = parse_ratings("X\tX\r\n\nX\tY\n").unwrap();
        assert_eq!(rows, vec![vec!["X", "X"], vec!["X", "Y"]]);
        assert_eq!(parse_ratings("X\tX\nX\n").unwrap_err().0, 2);
        assert_eq!(parse_ratings("X\t\n").unwrap_err().0, 1);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
