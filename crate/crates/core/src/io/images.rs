//! Text images: 784 whitespace-separated pixels in [0, 1] per image, row
//! major; a file may hold several images back to back. Files starting with
//! the IDX image magic number are read as IDX instead.

use std::path::Path;

use crate::tensor::{Shape, Tensor};

use super::{display_name, parse_idx_images, parse_number, read_bytes, write_text, IoError, IDX_IMAGES_MAGIC};

const PIXELS: usize = 784;

pub fn parse_images_text(file: &str, text: &str) -> Result<Vec<Tensor>, IoError> {
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        for t in line.split_whitespace() {
            let v = parse_number(t).filter(|v| (0.0..=1.0).contains(v)).ok_or_else(|| IoError::Parse {
                file: file.to_string(),
                line: i + 1,
                expected: "a pixel value in [0, 1]",
                found: t.to_string(),
            })?;
            values.push(v);
        }
    }
    if values.is_empty() || values.len() % PIXELS != 0 {
        return Err(IoError::Format {
            file: file.to_string(),
            reason: format!("{} pixel values is not a positive multiple of {PIXELS}", values.len()),
        });
    }
    let shape = Shape::new(&[1, 28, 28]).expect("static shape");
    Ok(values.chunks_exact(PIXELS).map(|c| Tensor::from_f64(shape.clone(), c.to_vec()).expect("784 pixels")).collect())
}

/// One image per block of 28 lines, blocks separated by a blank line.
pub fn render_images_text(images: &[Tensor]) -> String {
    let mut out = String::new();
    for (k, img) in images.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for row in img.to_f64_vec().chunks(28) {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

/// Text or IDX images; IDX files yield every stored image.
pub fn load_images(path: &Path) -> Result<Vec<Tensor>, IoError> {
    let bytes = read_bytes(path)?;
    let name = display_name(path);
    if bytes.len() >= 8 && bytes[..4] == IDX_IMAGES_MAGIC.to_be_bytes() {
        let n = u32::from_be_bytes(bytes[4..8].try_into().expect("four bytes")) as usize;
        return parse_idx_images(&name, &bytes, n);
    }
    let text = String::from_utf8(bytes)
        .map_err(|_| IoError::Format { file: name.clone(), reason: "neither IDX nor UTF-8 text".into() })?;
    parse_images_text(&name, &text)
}

pub fn write_images_text(images: &[Tensor], path: &Path) -> Result<(), IoError> {
    write_text(path, &render_images_text(images))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let imgs = crate::fixtures::synthetic_images(2, 2);
        let text = render_images_text(&imgs);
        assert_eq!(parse_images_text("t", &text).unwrap(), imgs);
    }

    #[test]
    fn rejects_out_of_range_and_partial() {
        let mut text = vec!["0.5"; 784].join(" ");
        assert_eq!(parse_images_text("t", &text).unwrap().len(), 1);
        text.push_str("\n1.5");
        assert!(matches!(parse_images_text("t", &text), Err(IoError::Parse { line: 2, .. })));
        assert!(matches!(parse_images_text("t", "0.1 0.2"), Err(IoError::Format { .. })));
        assert!(parse_images_text("t", "").is_err());
    }
}
