use std::fmt;
use std::str::FromStr;

use crate::tensor::{QFormat, Shape, Tensor, TensorData, TensorError};

use super::KernelsError;

/// The eight parameter tensors of LeNet-5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightBlock {
    Conv1W,
    Conv1B,
    Conv2W,
    Conv2B,
    Ip1W,
    Ip1B,
    Ip2W,
    Ip2B,
}

impl WeightBlock {
    pub const ALL: [WeightBlock; 8] = [
        WeightBlock::Conv1W,
        WeightBlock::Conv1B,
        WeightBlock::Conv2W,
        WeightBlock::Conv2B,
        WeightBlock::Ip1W,
        WeightBlock::Ip1B,
        WeightBlock::Ip2W,
        WeightBlock::Ip2B,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WeightBlock::Conv1W => "conv1_w",
            WeightBlock::Conv1B => "conv1_b",
            WeightBlock::Conv2W => "conv2_w",
            WeightBlock::Conv2B => "conv2_b",
            WeightBlock::Ip1W => "ip1_w",
            WeightBlock::Ip1B => "ip1_b",
            WeightBlock::Ip2W => "ip2_w",
            WeightBlock::Ip2B => "ip2_b",
        }
    }

    pub fn dims(self) -> &'static [usize] {
        match self {
            WeightBlock::Conv1W => &[20, 1, 5, 5],
            WeightBlock::Conv1B => &[20],
            WeightBlock::Conv2W => &[50, 20, 5, 5],
            WeightBlock::Conv2B => &[50],
            WeightBlock::Ip1W => &[500, 800],
            WeightBlock::Ip1B => &[500],
            WeightBlock::Ip2W => &[10, 500],
            WeightBlock::Ip2B => &[10],
        }
    }

    pub fn shape(self) -> Shape {
        Shape::new(self.dims()).expect("static shape")
    }

    pub fn elem_count(self) -> usize {
        self.dims().iter().product()
    }
}

impl fmt::Display for WeightBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightBlock {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WeightBlock::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| format!("unknown weight block `{s}`"))
    }
}

/// All LeNet-5 parameters, either all float64 or all in one fixed-point format.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightStore {
    blocks: [Tensor; 8],
}

impl WeightStore {
    /// `blocks` in [`WeightBlock::ALL`] order.
    pub fn new(blocks: [Tensor; 8]) -> Result<Self, KernelsError> {
        let first_q = blocks[0].qformat();
        for (block, t) in WeightBlock::ALL.into_iter().zip(&blocks) {
            if t.shape().dims() != block.dims() {
                return Err(KernelsError::WeightShape {
                    block: block.name(),
                    expected: block.shape(),
                    actual: t.shape().clone(),
                });
            }
            if t.qformat() != first_q {
                return Err(KernelsError::MixedWeightKinds);
            }
        }
        Ok(WeightStore { blocks })
    }

    pub fn zeros() -> Self {
        WeightStore { blocks: WeightBlock::ALL.map(|b| Tensor::zeros(b.shape())) }
    }

    /// Builds a float store by calling `f(block, flat index)` for every element.
    pub fn from_fn(mut f: impl FnMut(WeightBlock, usize) -> f64) -> Self {
        let blocks = WeightBlock::ALL.map(|b| {
            let values = (0..b.elem_count()).map(|i| f(b, i)).collect();
            Tensor::from_f64(b.shape(), values).expect("length matches shape")
        });
        WeightStore { blocks }
    }

    pub fn get(&self, block: WeightBlock) -> &Tensor {
        &self.blocks[block as usize]
    }

    pub fn blocks(&self) -> impl Iterator<Item = (WeightBlock, &Tensor)> {
        WeightBlock::ALL.into_iter().zip(self.blocks.iter())
    }

    pub fn qformat(&self) -> Option<QFormat> {
        self.blocks[0].qformat()
    }

    pub fn is_float(&self) -> bool {
        matches!(self.blocks[0].data(), TensorData::Float(_))
    }

    pub fn quantized(&self, q: QFormat) -> Result<WeightStore, TensorError> {
        let mut out = Vec::with_capacity(8);
        for t in &self.blocks {
            out.push(t.quantized(q)?);
        }
        Ok(WeightStore { blocks: out.try_into().expect("eight blocks") })
    }

    pub fn dequantized(&self) -> WeightStore {
        WeightStore { blocks: self.blocks.each_ref().map(Tensor::dequantized) }
    }

    pub fn param_count(&self) -> usize {
        self.blocks.iter().map(Tensor::len).sum()
    }
}
