//! Shape-tagged tensors and deterministic fixed-point arithmetic.
//!
//! Fixed-point values are stored as raw signed integers together with a
//! [`QFormat`]. Rounding is always round-to-nearest-even and overflow always
//! saturates, so the same sequence of operations gives the same raw bits on
//! every platform.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TensorError {
    #[error("invalid shape {dims:?}: {reason}")]
    InvalidShape { dims: Vec<usize>, reason: &'static str },
    #[error("invalid fixed-point format Q{total_bits}.{frac_bits}")]
    InvalidQFormat { total_bits: u32, frac_bits: u32 },
    #[error("cannot quantize NaN")]
    NaN,
    #[error("element count mismatch: shape {shape} needs {expected}, got {actual}")]
    LengthMismatch { shape: Shape, expected: usize, actual: usize },
    #[error("raw value {raw} outside the range of {q}")]
    RawOutOfRange { raw: i64, q: QFormat },
    #[error("accumulator overflow beyond {width} bits")]
    AccumulatorOverflow { width: u32 },
    #[error("expected a {expected} tensor")]
    WrongKind { expected: &'static str },
}

/// Extents of a tensor, outermost first. 1 to 4 dimensions, each at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(dims: &[usize]) -> Result<Self, TensorError> {
        let invalid = |reason| TensorError::InvalidShape { dims: dims.to_vec(), reason };
        if dims.is_empty() || dims.len() > 4 {
            return Err(invalid("expected 1 to 4 dimensions"));
        }
        if dims.contains(&0) {
            return Err(invalid("every extent must be at least 1"));
        }
        let mut count: u64 = 1;
        for &d in dims {
            count = count.checked_mul(d as u64).ok_or_else(|| invalid("element count overflows 64 bits"))?;
        }
        if usize::try_from(count).is_err() {
            return Err(invalid("element count overflows usize"));
        }
        Ok(Shape(dims.to_vec()))
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn elem_count(&self) -> usize {
        self.0.iter().product()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("x")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// Signed two's-complement fixed-point format with `frac_bits` fractional bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QFormat {
    total_bits: u32,
    frac_bits: u32,
}

impl QFormat {
    /// Q16.8, the default working precision.
    pub const Q16_8: QFormat = QFormat { total_bits: 16, frac_bits: 8 };

    pub fn new(total_bits: u32, frac_bits: u32) -> Result<Self, TensorError> {
        if !(8..=32).contains(&total_bits) || frac_bits >= total_bits {
            return Err(TensorError::InvalidQFormat { total_bits, frac_bits });
        }
        Ok(QFormat { total_bits, frac_bits })
    }

    pub fn total_bits(self) -> u32 {
        self.total_bits
    }

    pub fn frac_bits(self) -> u32 {
        self.frac_bits
    }

    pub fn is_signed(self) -> bool {
        true
    }

    pub fn scale(self) -> f64 {
        (1u64 << self.frac_bits) as f64
    }

    pub fn min_raw(self) -> i64 {
        -(1i64 << (self.total_bits - 1))
    }

    pub fn max_raw(self) -> i64 {
        (1i64 << (self.total_bits - 1)) - 1
    }

    /// Bytes occupied by one element in device memory.
    pub fn elem_bytes(self) -> usize {
        self.total_bits.div_ceil(8) as usize
    }

    /// Signed width of the MAC accumulator: two full products plus 16 guard bits.
    pub fn accumulator_bits(self) -> u32 {
        2 * self.total_bits + 16
    }

    pub fn contains(self, raw: i64) -> bool {
        (self.min_raw()..=self.max_raw()).contains(&raw)
    }

    pub fn saturate(self, wide: i128) -> i64 {
        wide.clamp(self.min_raw() as i128, self.max_raw() as i128) as i64
    }
}

impl Default for QFormat {
    fn default() -> Self {
        QFormat::Q16_8
    }
}

impl fmt::Display for QFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q{}.{}", self.total_bits, self.frac_bits)
    }
}

/// Round-to-nearest-even of `x * 2^frac_bits`, saturated to the format range.
pub fn quantize(x: f64, q: QFormat) -> Result<i64, TensorError> {
    if x.is_nan() {
        return Err(TensorError::NaN);
    }
    // Scaling by a power of two is exact (or overflows to infinity, which saturates).
    let scaled = (x * q.scale()).round_ties_even();
    if scaled >= q.max_raw() as f64 {
        Ok(q.max_raw())
    } else if scaled <= q.min_raw() as f64 {
        Ok(q.min_raw())
    } else {
        Ok(scaled as i64)
    }
}

pub fn dequantize(raw: i64, q: QFormat) -> f64 {
    raw as f64 / q.scale()
}

/// `value / 2^shift` rounded to nearest, ties to even.
pub fn round_shift_rne(value: i128, shift: u32) -> i128 {
    if shift == 0 {
        return value;
    }
    let floor = value >> shift;
    let rem = value - (floor << shift);
    let half = 1i128 << (shift - 1);
    if rem > half || (rem == half && floor & 1 == 1) {
        floor + 1
    } else {
        floor
    }
}

/// `num / den` rounded to nearest, ties to even. `den` must be positive.
pub fn div_rne(num: i128, den: i128) -> i128 {
    debug_assert!(den > 0);
    let floor = num.div_euclid(den);
    let rem = num.rem_euclid(den);
    match (2 * rem).cmp(&den) {
        std::cmp::Ordering::Greater => floor + 1,
        std::cmp::Ordering::Equal if floor & 1 == 1 => floor + 1,
        _ => floor,
    }
}

/// Full-precision MAC accumulator for one output element.
///
/// Holds products at scale `2^(2·frac_bits)`; narrowing back to the format
/// happens once, in [`Accumulator::narrow`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Accumulator {
    value: i128,
    q: QFormat,
}

impl Accumulator {
    pub fn new(q: QFormat) -> Self {
        Accumulator { value: 0, q }
    }

    pub fn from_raw(value: i128, q: QFormat) -> Result<Self, TensorError> {
        let acc = Accumulator { value, q };
        acc.check()?;
        Ok(acc)
    }

    pub fn value(&self) -> i128 {
        self.value
    }

    pub fn qformat(&self) -> QFormat {
        self.q
    }

    #[inline]
    fn check(&self) -> Result<(), TensorError> {
        let width = self.q.accumulator_bits();
        let limit = 1i128 << (width - 1);
        if self.value >= limit || self.value < -limit {
            return Err(TensorError::AccumulatorOverflow { width });
        }
        Ok(())
    }

    #[inline]
    pub fn mac(&mut self, a: i64, b: i64) -> Result<(), TensorError> {
        self.value += a as i128 * b as i128;
        self.check()
    }

    /// Adds a raw value of the element format (e.g. a bias) at product scale.
    pub fn add_raw(&mut self, raw: i64) -> Result<(), TensorError> {
        self.value += (raw as i128) << self.q.frac_bits;
        self.check()
    }

    /// Rounds back to the element format (nearest-even) and saturates.
    pub fn narrow(&self) -> i64 {
        self.q.saturate(round_shift_rne(self.value, self.q.frac_bits))
    }
}

/// Functional form of [`Accumulator::mac`].
pub fn mac_fixed(mut acc: Accumulator, a: i64, b: i64) -> Result<Accumulator, TensorError> {
    acc.mac(a, b)?;
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    Float(Vec<f64>),
    Fixed { raw: Vec<i64>, q: QFormat },
}

/// A row-major, channel-outermost tensor of float64 or fixed-point elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Shape,
    data: TensorData,
}

impl Tensor {
    pub fn from_f64(shape: Shape, values: Vec<f64>) -> Result<Self, TensorError> {
        check_len(&shape, values.len())?;
        Ok(Tensor { shape, data: TensorData::Float(values) })
    }

    pub fn from_raw(shape: Shape, raw: Vec<i64>, q: QFormat) -> Result<Self, TensorError> {
        check_len(&shape, raw.len())?;
        if let Some(&bad) = raw.iter().find(|&&r| !q.contains(r)) {
            return Err(TensorError::RawOutOfRange { raw: bad, q });
        }
        Ok(Tensor { shape, data: TensorData::Fixed { raw, q } })
    }

    pub fn zeros(shape: Shape) -> Self {
        let n = shape.elem_count();
        Tensor { shape, data: TensorData::Float(vec![0.0; n]) }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.shape.elem_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn qformat(&self) -> Option<QFormat> {
        match self.data {
            TensorData::Fixed { q, .. } => Some(q),
            TensorData::Float(_) => None,
        }
    }

    pub fn as_f64(&self) -> Option<&[f64]> {
        match &self.data {
            TensorData::Float(v) => Some(v),
            TensorData::Fixed { .. } => None,
        }
    }

    pub fn raw(&self) -> Option<&[i64]> {
        match &self.data {
            TensorData::Fixed { raw, .. } => Some(raw),
            TensorData::Float(_) => None,
        }
    }

    /// Float values, dequantizing fixed-point elements.
    pub fn to_f64_vec(&self) -> Vec<f64> {
        match &self.data {
            TensorData::Float(v) => v.clone(),
            TensorData::Fixed { raw, q } => raw.iter().map(|&r| dequantize(r, *q)).collect(),
        }
    }

    /// Converts to fixed point in `q`. Fixed tensors in another format are
    /// re-quantized through their float value.
    pub fn quantized(&self, q: QFormat) -> Result<Tensor, TensorError> {
        let raw = match &self.data {
            TensorData::Fixed { raw, q: from } if *from == q => raw.clone(),
            _ => self.to_f64_vec().into_iter().map(|x| quantize(x, q)).collect::<Result<_, _>>()?,
        };
        Ok(Tensor { shape: self.shape.clone(), data: TensorData::Fixed { raw, q } })
    }

    pub fn dequantized(&self) -> Tensor {
        Tensor { shape: self.shape.clone(), data: TensorData::Float(self.to_f64_vec()) }
    }

    pub fn reshaped(&self, shape: Shape) -> Result<Tensor, TensorError> {
        check_len(&shape, self.len())?;
        Ok(Tensor { shape, data: self.data.clone() })
    }
}

fn check_len(shape: &Shape, actual: usize) -> Result<(), TensorError> {
    let expected = shape.elem_count();
    if expected != actual {
        return Err(TensorError::LengthMismatch { shape: shape.clone(), expected, actual });
    }
    Ok(())
}
