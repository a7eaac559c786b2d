//! Reading corpus columns from a directory tree.
//!
//! `.csv` files contribute one column per CSV column (the first row is the
//! header). Every other file is a single column with one value per line.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;
use walkdir::WalkDir;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("reading {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("parsing {path}: {source}")]
    Csv { path: String, source: csv::Error },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub id: String,
    pub values: Vec<String>,
}

/// Files under `dir`, sorted by path. Hidden entries are skipped.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    let mut files = Vec::new();
    let walker = WalkDir::new(dir).sort_by_file_name().into_iter().filter_entry(|e| {
        e.depth() == 0 || !e.file_name().to_string_lossy().starts_with('.')
    });
    for entry in walker {
        let entry = entry.map_err(|e| CorpusError::Io {
            path: e.path().unwrap_or(dir).display().to_string(),
            source: e.into_io_error().unwrap_or_else(|| io::Error::other("directory loop")),
        })?;
        if entry.file_type().is_file() {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Splits text into lines. A single trailing newline does not produce an
/// empty final value; `\r\n` endings are accepted.
pub fn split_lines(text: &str) -> Vec<String> {
    if text.is_empty() {
        return Vec::new();
    }
    let text = text.strip_suffix('\n').unwrap_or(text);
    text.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l).to_owned()).collect()
}

/// Reads the columns stored in one file; `id` prefixes the column ids.
pub fn read_columns(path: &Path, id: &str) -> Result<Vec<Column>, CorpusError> {
    let io_err = |source| CorpusError::Io { path: path.display().to_string(), source };
    if !is_csv(path) {
        let text = fs::read_to_string(path).map_err(io_err)?;
        return Ok(vec![Column { id: id.to_owned(), values: split_lines(&text) }]);
    }
    let csv_err = |source| CorpusError::Csv { path: path.display().to_string(), source };
    let bytes = fs::read(path).map_err(io_err)?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(bytes.as_slice());
    let headers = reader.headers().map_err(csv_err)?.clone();
    let mut columns: Vec<Column> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let name = if h.is_empty() { i.to_string() } else { h.to_owned() };
            Column { id: format!("{id}#{name}"), values: Vec::new() }
        })
        .collect();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            col.values.push(field.to_owned());
        }
    }
    Ok(columns)
}

/// Column id for a file: its path relative to the corpus root.
pub fn column_id(root: &Path, path: &Path) -> String {
    path.strip_prefix(root).unwrap_or(path).to_string_lossy().replace('\\', "/")
}

/// Reads every column under `dir`, skipping unreadable files with a warning.
pub fn read_corpus(dir: &Path) -> Result<Vec<Column>, CorpusError> {
    let mut out = Vec::new();
    for path in corpus_files(dir)? {
        match read_columns(&path, &column_id(dir, &path)) {
            Ok(cols) => out.extend(cols),
            Err(e) => log::warn!("skipping {}: {e}", path.display()),
        }
    }
    Ok(out)
}
