//! Reading and writing weights, images and result tables.
//!
//! Every parser takes the text or bytes plus a display name so that errors
//! can point at the file; the `load_*` and `write_*` wrappers add the file
//! system.

mod csv;
mod idx;
mod images;
mod weights;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use csv::{parse_accel_csv, parse_bench_csv, parse_sweep_csv, write_results_csv, CsvTable};
pub use idx::{load_mnist_idx, parse_idx_images, parse_idx_labels, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC};
pub use images::{load_images, parse_images_text, render_images_text, write_images_text};
pub use weights::{load_weights_text, parse_weights_text, render_weights_text, write_weights_text};

use crate::kernels::KernelsError;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{file}:{line}: expected {expected}, found `{found}`")]
    Parse { file: String, line: usize, expected: &'static str, found: String },
    #[error("{file}: missing weight block {block}")]
    MissingBlock { file: String, block: &'static str },
    #[error("{file}:{line}: block {block} declared twice")]
    DuplicateBlock { file: String, line: usize, block: String },
    #[error("{file}:{line}: unexpected block `{block}`")]
    ExtraBlock { file: String, line: usize, block: String },
    #[error("{file}:{line}: block {block} has shape {actual:?}, expected {expected:?}")]
    BlockShape { file: String, line: usize, block: &'static str, expected: Vec<usize>, actual: Vec<usize> },
    #[error("{file}: block {block} has {actual} values, expected {expected}")]
    BlockCount { file: String, block: &'static str, expected: usize, actual: usize },
    #[error("{file}: bad magic number {found} (expected {expected})")]
    BadMagic { file: String, expected: u32, found: u32 },
    #[error("{file}: truncated; {needed} bytes needed, {available} present")]
    Truncated { file: String, needed: usize, available: usize },
    #[error("{file}: requested {requested} items, file holds {available}")]
    CountOverflow { file: String, requested: usize, available: usize },
    #[error("{file}: {reason}")]
    Format { file: String, reason: String },
    #[error(transparent)]
    Kernels(#[from] KernelsError),
}

pub(crate) fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn read_bytes(path: &Path) -> Result<Vec<u8>, IoError> {
    std::fs::read(path).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|source| IoError::Io { path: path.to_path_buf(), source })
}

pub(crate) fn display_name(path: &Path) -> String {
    path.display().to_string()
}

/// Finite decimal number, locale independent.
pub(crate) fn parse_number(token: &str) -> Option<f64> {
    let first = token.as_bytes().first()?;
    if !(first.is_ascii_digit() || matches!(first, b'-' | b'+' | b'.')) {
        return None;
    }
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}
