//! MNIST IDX files: big-endian header, unsigned-byte payload.

use std::path::Path;

use crate::tensor::{Shape, Tensor};

use super::{display_name, read_bytes, IoError};

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

fn be_u32(file: &str, bytes: &[u8], at: usize) -> Result<u32, IoError> {
    let chunk = bytes.get(at..at + 4).ok_or_else(|| IoError::Truncated {
        file: file.to_string(),
        needed: at + 4,
        available: bytes.len(),
    })?;
    Ok(u32::from_be_bytes(chunk.try_into().expect("four bytes")))
}

fn header(file: &str, bytes: &[u8], magic: u32, dims: usize) -> Result<Vec<usize>, IoError> {
    let found = be_u32(file, bytes, 0)?;
    if found != magic {
        return Err(IoError::BadMagic { file: file.to_string(), expected: magic, found });
    }
    (0..dims).map(|d| be_u32(file, bytes, 4 + 4 * d).map(|v| v as usize)).collect()
}

fn payload<'a>(file: &str, bytes: &'a [u8], offset: usize, len: usize) -> Result<&'a [u8], IoError> {
    let needed = offset + len;
    bytes.get(offset..needed).ok_or(IoError::Truncated { file: file.to_string(), needed, available: bytes.len() })
}

fn check_count(file: &str, requested: usize, available: usize) -> Result<(), IoError> {
    if requested > available {
        return Err(IoError::CountOverflow { file: file.to_string(), requested, available });
    }
    Ok(())
}

/// First `count` images as 1x28x28 tensors scaled to [0, 1].
pub fn parse_idx_images(file: &str, bytes: &[u8], count: usize) -> Result<Vec<Tensor>, IoError> {
    let dims = header(file, bytes, IDX_IMAGES_MAGIC, 3)?;
    let (n, rows, cols) = (dims[0], dims[1], dims[2]);
    if (rows, cols) != (28, 28) {
        return Err(IoError::Format {
            file: file.to_string(),
            reason: format!("images are {rows}x{cols}, expected 28x28"),
        });
    }
    let data = payload(file, bytes, 16, n * 784)?;
    check_count(file, count, n)?;
    let shape = Shape::new(&[1, 28, 28]).expect("static shape");
    Ok(data
        .chunks_exact(784)
        .take(count)
        .map(|px| Tensor::from_f64(shape.clone(), px.iter().map(|&p| p as f64 / 255.0).collect()).expect("784 pixels"))
        .collect())
}

pub fn parse_idx_labels(file: &str, bytes: &[u8], count: usize) -> Result<Vec<u8>, IoError> {
    let n = header(file, bytes, IDX_LABELS_MAGIC, 1)?[0];
    let data = payload(file, bytes, 8, n)?;
    check_count(file, count, n)?;
    if let Some(bad) = data.iter().find(|&&l| l > 9) {
        return Err(IoError::Format { file: file.to_string(), reason: format!("label {bad} outside 0..=9") });
    }
    Ok(data[..count].to_vec())
}

pub fn load_mnist_idx(images: &Path, labels: &Path, count: usize) -> Result<Vec<(Tensor, u8)>, IoError> {
    let imgs = parse_idx_images(&display_name(images), &read_bytes(images)?, count)?;
    let labs = parse_idx_labels(&display_name(labels), &read_bytes(labels)?, count)?;
    Ok(imgs.into_iter().zip(labs).collect())
}
