//! Text weights: blocks of a header line `name d0 d1 ...` followed by the
//! values, one row per last-dimension run.

use std::path::Path;

use crate::kernels::{WeightBlock, WeightStore};
use crate::tensor::Tensor;

use super::{display_name, parse_number, read_text, write_text, IoError};

pub fn parse_weights_text(file: &str, text: &str) -> Result<WeightStore, IoError> {
    let mut found: [Option<Vec<f64>>; 8] = Default::default();
    let mut current: Option<(WeightBlock, Vec<f64>)> = None;
    let finish = |cur: Option<(WeightBlock, Vec<f64>)>, found: &mut [Option<Vec<f64>>; 8]| -> Result<(), IoError> {
        if let Some((block, values)) = cur {
            if values.len() != block.elem_count() {
                return Err(IoError::BlockCount {
                    file: file.to_string(),
                    block: block.name(),
                    expected: block.elem_count(),
                    actual: values.len(),
                });
            }
            found[block as usize] = Some(values);
        }
        Ok(())
    };

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let mut tokens = line.split_whitespace().peekable();
        let Some(&first) = tokens.peek() else { continue };
        if first.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
            finish(current.take(), &mut found)?;
            let name = tokens.next().expect("peeked");
            let block: WeightBlock = name.parse().map_err(|_| IoError::ExtraBlock {
                file: file.to_string(),
                line: line_no,
                block: name.to_string(),
            })?;
            if found[block as usize].is_some() {
                return Err(IoError::DuplicateBlock { file: file.to_string(), line: line_no, block: name.to_string() });
            }
            let dims = tokens
                .map(|t| {
                    t.parse::<usize>().map_err(|_| IoError::Parse {
                        file: file.to_string(),
                        line: line_no,
                        expected: "a dimension (non-negative integer)",
                        found: t.to_string(),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if dims != block.dims() {
                return Err(IoError::BlockShape {
                    file: file.to_string(),
                    line: line_no,
                    block: block.name(),
                    expected: block.dims().to_vec(),
                    actual: dims,
                });
            }
            current = Some((block, Vec::with_capacity(block.elem_count())));
            continue;
        }
        let Some((_, values)) = current.as_mut() else {
            return Err(IoError::Parse {
                file: file.to_string(),
                line: line_no,
                expected: "a block header `name d0 d1 ...`",
                found: first.to_string(),
            });
        };
        for t in tokens {
            values.push(parse_number(t).ok_or_else(|| IoError::Parse {
                file: file.to_string(),
                line: line_no,
                expected: "a decimal number",
                found: t.to_string(),
            })?);
        }
    }
    finish(current.take(), &mut found)?;

    let mut blocks = Vec::with_capacity(8);
    for (block, values) in WeightBlock::ALL.into_iter().zip(found) {
        let values = values.ok_or(IoError::MissingBlock { file: file.to_string(), block: block.name() })?;
        blocks.push(Tensor::from_f64(block.shape(), values).expect("count checked"));
    }
    Ok(WeightStore::new(blocks.try_into().expect("eight blocks"))?)
}

/// Shortest round-trip decimal for every value, so parsing gives the same bits.
pub fn render_weights_text(weights: &WeightStore) -> String {
    let mut out = String::new();
    for (block, tensor) in weights.blocks() {
        out.push_str(block.name());
        for d in block.dims() {
            out.push(' ');
            out.push_str(&d.to_string());
        }
        out.push('\n');
        let row = *block.dims().last().expect("non-empty dims");
        for chunk in tensor.to_f64_vec().chunks(row) {
            let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    out
}

pub fn load_weights_text(path: &Path) -> Result<WeightStore, IoError> {
    parse_weights_text(&display_name(path), &read_text(path)?)
}

pub fn write_weights_text(weights: &WeightStore, path: &Path) -> Result<(), IoError> {
    write_text(path, &render_weights_text(weights))
}
