//! Straight-line float64 reference for LeNet-5.
//!
//! No execution model and no shared code with the kernels. With a format
//! given it also models the fixed-point pipeline step by step: parameters and
//! input are rounded to the format first, and every conv, pool and fully
//! connected output is rounded as soon as it is produced.

use crate::netdef::PoolOp;
use crate::tensor::{dequantize, quantize, QFormat, Tensor};

use super::{KernelsError, WeightBlock, WeightStore};

/// Per-stage outputs (conv_pool1, conv2, pool2, ip1_relu, ip2) and MAC counts.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub stages: [Vec<f64>; 5],
    pub macs: [u64; 5],
}

impl OracleRun {
    pub fn logits(&self) -> &[f64] {
        &self.stages[4]
    }

    /// Stage outputs as raw fixed-point values; only meaningful for a run made
    /// with the same format.
    pub fn raw_stage(&self, stage: usize, q: QFormat) -> Vec<i64> {
        self.stages[stage].iter().map(|&x| quantize(x, q).expect("finite")).collect()
    }
}

/// Float logits of `image` under `weights`, no rounding anywhere.
pub fn oracle_forward(image: &Tensor, weights: &WeightStore, pool: PoolOp) -> Result<Vec<f64>, KernelsError> {
    Ok(oracle_run(image, weights, pool, None)?.stages[4].clone())
}

/// The fixed-point pipeline re-computed in float64 with rounding after each step.
pub fn oracle_forward_quantized(
    image: &Tensor,
    weights: &WeightStore,
    pool: PoolOp,
    q: QFormat,
) -> Result<OracleRun, KernelsError> {
    oracle_run(image, weights, pool, Some(q))
}

pub fn oracle_run(
    image: &Tensor,
    weights: &WeightStore,
    pool: PoolOp,
    q: Option<QFormat>,
) -> Result<OracleRun, KernelsError> {
    if image.shape().dims() != [1, 28, 28] {
        return Err(KernelsError::InputShape {
            stage: "oracle",
            expected: vec![1, 28, 28],
            actual: image.shape().clone(),
        });
    }
    let round = |x: f64| -> f64 {
        match q {
            Some(q) => dequantize(quantize(x, q).expect("finite activations"), q),
            None => x,
        }
    };
    let param = |b: WeightBlock| -> Vec<f64> { weights.get(b).to_f64_vec().into_iter().map(round).collect() };
    let input: Vec<f64> = image.to_f64_vec().into_iter().map(round).collect();
    let mut macs = [0u64; 5];

    // conv1 5x5, 1 -> 20 maps, 28x28 -> 24x24, each output rounded
    let (w1, b1) = (param(WeightBlock::Conv1W), param(WeightBlock::Conv1B));
    let mut c1 = vec![0.0; 20 * 24 * 24];
    for m in 0..20 {
        for y in 0..24 {
            for x in 0..24 {
                let mut sum = 0.0;
                for kr in 0..5 {
                    for kc in 0..5 {
                        sum += input[(y + kr) * 28 + x + kc] * w1[(m * 5 + kr) * 5 + kc];
                        macs[0] += 1;
                    }
                }
                c1[(m * 24 + y) * 24 + x] = round(sum + b1[m]);
            }
        }
    }
    let s1: Vec<f64> = pool2x2(&c1, 20, 24, pool).into_iter().map(round).collect();

    // conv2 5x5, 20 -> 50 maps, 12x12 -> 8x8
    let (w2, b2) = (param(WeightBlock::Conv2W), param(WeightBlock::Conv2B));
    let mut c2 = vec![0.0; 50 * 8 * 8];
    for m in 0..50 {
        for y in 0..8 {
            for x in 0..8 {
                let mut sum = 0.0;
                for c in 0..20 {
                    for kr in 0..5 {
                        for kc in 0..5 {
                            sum += s1[(c * 12 + y + kr) * 12 + x + kc] * w2[((m * 20 + c) * 5 + kr) * 5 + kc];
                            macs[1] += 1;
                        }
                    }
                }
                c2[(m * 8 + y) * 8 + x] = round(sum + b2[m]);
            }
        }
    }
    let s2: Vec<f64> = pool2x2(&c2, 50, 8, pool).into_iter().map(round).collect();

    // ip1 800 -> 500 then ReLU
    let (w3, b3) = (param(WeightBlock::Ip1W), param(WeightBlock::Ip1B));
    let mut h = vec![0.0; 500];
    for (n, out) in h.iter_mut().enumerate() {
        let mut sum = 0.0;
        for (i, &x) in s2.iter().enumerate() {
            sum += x * w3[n * 800 + i];
            macs[3] += 1;
        }
        *out = round(sum + b3[n]).max(0.0);
    }

    // ip2 500 -> 10
    let (w4, b4) = (param(WeightBlock::Ip2W), param(WeightBlock::Ip2B));
    let mut logits = vec![0.0; 10];
    for (n, out) in logits.iter_mut().enumerate() {
        let mut sum = 0.0;
        for (i, &x) in h.iter().enumerate() {
            sum += x * w4[n * 500 + i];
            macs[4] += 1;
        }
        *out = round(sum + b4[n]);
    }

    Ok(OracleRun { stages: [s1, c2, s2, h, logits], macs })
}

fn pool2x2(input: &[f64], maps: usize, size: usize, op: PoolOp) -> Vec<f64> {
    let half = size / 2;
    let mut out = vec![0.0; maps * half * half];
    for m in 0..maps {
        for y in 0..half {
            for x in 0..half {
                let at = |dy: usize, dx: usize| input[(m * size + 2 * y + dy) * size + 2 * x + dx];
                let window = [at(0, 0), at(0, 1), at(1, 0), at(1, 1)];
                out[(m * half + y) * half + x] = match op {
                    PoolOp::Max => window.into_iter().fold(f64::NEG_INFINITY, f64::max),
                    PoolOp::Average => window.iter().sum::<f64>() / 4.0,
                };
            }
        }
    }
    out
}
