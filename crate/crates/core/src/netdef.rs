//! Declarative description of the LeNet-5 network and its split into five
//! pipeline kernels.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use thiserror::Error;

use crate::tensor::{Shape, TensorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("layer {index} ({kind}): {reason}")]
    Layer { index: usize, kind: &'static str, reason: String },
    #[error("invalid stage grouping: {0}")]
    Grouping(String),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PoolOp {
    #[default]
    Max,
    Average,
}

impl FromStr for PoolOp {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(PoolOp::Max),
            "average" | "avg" => Ok(PoolOp::Average),
            other => Err(format!("unknown pool op `{other}` (expected max or average)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerSpec {
    Conv { out_maps: usize, kernel: usize, stride: usize },
    Pool { window: usize, stride: usize, op: PoolOp },
    FullyConnected { out_neurons: usize },
    Relu,
}

impl LayerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            LayerSpec::Conv { .. } => "conv",
            LayerSpec::Pool { .. } => "pool",
            LayerSpec::FullyConnected { .. } => "fully_connected",
            LayerSpec::Relu => "relu",
        }
    }

    fn validate(&self, index: usize) -> Result<(), NetError> {
        let bad = |reason: &str| NetError::Layer { index, kind: self.kind(), reason: reason.into() };
        match *self {
            LayerSpec::Conv { out_maps, kernel, stride } => {
                if out_maps == 0 || kernel == 0 || stride == 0 {
                    return Err(bad("out_maps, kernel and stride must be at least 1"));
                }
            }
            LayerSpec::Pool { window, stride, .. } => {
                if window == 0 || stride == 0 {
                    return Err(bad("window and stride must be at least 1"));
                }
            }
            LayerSpec::FullyConnected { out_neurons } => {
                if out_neurons == 0 {
                    return Err(bad("out_neurons must be at least 1"));
                }
            }
            LayerSpec::Relu => {}
        }
        Ok(())
    }
}

/// The five pipeline kernels, in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StageName {
    ConvPool1,
    Conv2,
    Pool2,
    Ip1Relu,
    Ip2,
}

impl StageName {
    pub const ALL: [StageName; 5] =
        [StageName::ConvPool1, StageName::Conv2, StageName::Pool2, StageName::Ip1Relu, StageName::Ip2];

    pub fn as_str(self) -> &'static str {
        match self {
            StageName::ConvPool1 => "conv_pool1",
            StageName::Conv2 => "conv2",
            StageName::Pool2 => "pool2",
            StageName::Ip1Relu => "ip1_relu",
            StageName::Ip2 => "ip2",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for StageName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StageName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StageName::ALL
            .into_iter()
            .find(|st| st.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSpec {
    input_shape: Shape,
    layers: Vec<LayerSpec>,
    stages: Vec<(StageName, Range<usize>)>,
}

impl NetworkSpec {
    /// `stage_lengths[i]` is the number of consecutive layers grouped into
    /// `StageName::ALL[i]`.
    pub fn new(input_shape: Shape, layers: Vec<LayerSpec>, stage_lengths: [usize; 5]) -> Result<Self, NetError> {
        for (i, layer) in layers.iter().enumerate() {
            layer.validate(i)?;
        }
        if stage_lengths.contains(&0) {
            return Err(NetError::Grouping("every stage needs at least one layer".into()));
        }
        let total: usize = stage_lengths.iter().sum();
        if total != layers.len() {
            return Err(NetError::Grouping(format!(
                "stages cover {total} layers but the network has {}",
                layers.len()
            )));
        }
        let mut start = 0;
        let stages = StageName::ALL
            .into_iter()
            .zip(stage_lengths)
            .map(|(name, len)| {
                let range = start..start + len;
                start += len;
                (name, range)
            })
            .collect();
        let spec = NetworkSpec { input_shape, layers, stages };
        spec.infer_shapes()?;
        Ok(spec)
    }

    pub fn input_shape(&self) -> &Shape {
        &self.input_shape
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn stages(&self) -> impl Iterator<Item = (StageName, &[LayerSpec])> {
        self.stages.iter().map(|(name, r)| (*name, &self.layers[r.clone()]))
    }

    pub fn stage_layers(&self, stage: StageName) -> &[LayerSpec] {
        &self.layers[self.stages[stage.index()].1.clone()]
    }

    pub fn stage_range(&self, stage: StageName) -> Range<usize> {
        self.stages[stage.index()].1.clone()
    }

    pub fn pool_op(&self) -> PoolOp {
        self.layers
            .iter()
            .find_map(|l| match l {
                LayerSpec::Pool { op, .. } => Some(*op),
                _ => None,
            })
            .unwrap_or_default()
    }

    pub fn infer_shapes(&self) -> Result<Vec<Shape>, NetError> {
        infer_shapes(&self.input_shape, &self.layers)
    }

    /// (input shape, output shape) of one pipeline stage.
    pub fn stage_io(&self, stage: StageName) -> Result<(Shape, Shape), NetError> {
        let shapes = self.infer_shapes()?;
        let range = self.stage_range(stage);
        let input = if range.start == 0 { self.input_shape.clone() } else { shapes[range.start - 1].clone() };
        Ok((input, shapes[range.end - 1].clone()))
    }

    pub fn stage_output_shapes(&self) -> Result<Vec<Shape>, NetError> {
        let shapes = self.infer_shapes()?;
        Ok(self.stages.iter().map(|(_, r)| shapes[r.end - 1].clone()).collect())
    }
}

/// Output shape of every layer, in order.
pub fn infer_shapes(input: &Shape, layers: &[LayerSpec]) -> Result<Vec<Shape>, NetError> {
    let mut current = input.clone();
    let mut out = Vec::with_capacity(layers.len());
    for (index, layer) in layers.iter().enumerate() {
        layer.validate(index)?;
        let bad = |reason: String| NetError::Layer { index, kind: layer.kind(), reason };
        current = match *layer {
            LayerSpec::Conv { out_maps, kernel, stride } => {
                let (_, h, w) = spatial(&current).map_err(bad)?;
                if kernel > h || kernel > w {
                    return Err(bad(format!("kernel {kernel}x{kernel} larger than input {h}x{w}")));
                }
                Shape::new(&[out_maps, (h - kernel) / stride + 1, (w - kernel) / stride + 1])?
            }
            LayerSpec::Pool { window, stride, .. } => {
                let (c, h, w) = spatial(&current).map_err(bad)?;
                if window > h || window > w {
                    return Err(bad(format!("window {window}x{window} larger than input {h}x{w}")));
                }
                Shape::new(&[c, (h - window) / stride + 1, (w - window) / stride + 1])?
            }
            LayerSpec::FullyConnected { out_neurons } => Shape::new(&[out_neurons])?,
            LayerSpec::Relu => current.clone(),
        };
        out.push(current.clone());
    }
    Ok(out)
}

fn spatial(shape: &Shape) -> Result<(usize, usize, usize), String> {
    match *shape.dims() {
        [c, h, w] => Ok((c, h, w)),
        _ => Err(format!("expected a CxHxW input, got {shape}")),
    }
}

/// LeNet-5 for 28x28 MNIST digits with max pooling.
pub fn lenet5_spec() -> NetworkSpec {
    lenet5_with_pool(PoolOp::Max)
}

pub fn lenet5_with_pool(op: PoolOp) -> NetworkSpec {
    let layers = vec![
        LayerSpec::Conv { out_maps: 20, kernel: 5, stride: 1 },
        LayerSpec::Pool { window: 2, stride: 2, op },
        LayerSpec::Conv { out_maps: 50, kernel: 5, stride: 1 },
        LayerSpec::Pool { window: 2, stride: 2, op },
        LayerSpec::FullyConnected { out_neurons: 500 },
        LayerSpec::Relu,
        LayerSpec::FullyConnected { out_neurons: 10 },
    ];
    let input = Shape::new(&[1, 28, 28]).expect("static shape");
    NetworkSpec::new(input, layers, [2, 1, 1, 2, 1]).expect("static network is valid")
}
