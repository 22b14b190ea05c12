//! Precision sweep: how far the fixed-point pipeline drifts from the float
//! reference as the format narrows.

use thiserror::Error;

use crate::exec::Executor;
use crate::kernels::{argmax, oracle_forward, KernelsError, Pipeline, WeightStore};
use crate::ocl::Schedule;
use crate::tensor::{QFormat, Tensor, TensorError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantError {
    #[error("the sweep needs at least one image")]
    EmptyDataset,
    #[error("the sweep needs at least one format")]
    EmptyFormats,
    #[error("logit vectors differ in length ({fixed} vs {float})")]
    LengthMismatch { fixed: usize, float: usize },
    #[error("weights must be float64 before sweeping")]
    NotFloat,
    #[error(transparent)]
    Kernels(#[from] KernelsError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Formats of the default sweep: half of the bits fractional.
pub fn default_grid() -> Vec<QFormat> {
    [8, 12, 16, 24, 32].into_iter().map(|t| QFormat::new(t, t / 2).expect("valid grid format")).collect()
}

/// Largest absolute logit error and whether both vectors pick the same winner.
pub fn divergence(fixed: &Tensor, float: &[f64]) -> Result<(f64, bool), QuantError> {
    let values = fixed.to_f64_vec();
    if values.len() != float.len() || values.is_empty() {
        return Err(QuantError::LengthMismatch { fixed: values.len(), float: float.len() });
    }
    let max_err = values.iter().zip(float).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((max_err, argmax(&values) == argmax(float)))
}

/// Logits of one image under one format next to the float reference.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRecord {
    pub fixed: Vec<f64>,
    pub float: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub qformat: QFormat,
    pub max_abs_logit_error: f64,
    /// Mean over every logit of every image.
    pub mean_abs_logit_error: f64,
    pub argmax_agreement: f64,
    pub n_samples: usize,
    pub records: Vec<ImageRecord>,
}

/// The aggregate columns of a [`SweepResult`], as stored in CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSummary {
    pub qformat: QFormat,
    pub max_abs_logit_error: f64,
    pub mean_abs_logit_error: f64,
    pub argmax_agreement: f64,
    pub n_samples: usize,
}

impl SweepResult {
    pub fn summary(&self) -> SweepSummary {
        SweepSummary {
            qformat: self.qformat,
            max_abs_logit_error: self.max_abs_logit_error,
            mean_abs_logit_error: self.mean_abs_logit_error,
            argmax_agreement: self.argmax_agreement,
            n_samples: self.n_samples,
        }
    }

    fn aggregate(qformat: QFormat, records: Vec<ImageRecord>) -> Self {
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut count = 0usize;
        let mut agree = 0usize;
        for r in &records {
            for (a, b) in r.fixed.iter().zip(&r.float) {
                let e = (a - b).abs();
                max = max.max(e);
                sum += e;
                count += 1;
            }
            agree += usize::from(argmax(&r.fixed) == argmax(&r.float));
        }
        SweepResult {
            qformat,
            max_abs_logit_error: max,
            mean_abs_logit_error: sum / count as f64,
            argmax_agreement: agree as f64 / records.len() as f64,
            n_samples: records.len(),
            records,
        }
    }
}

/// Runs the device pipeline on every image for every format, images in
/// parallel on `executor`.
pub fn sweep_precision(
    pipeline: &Pipeline,
    weights: &WeightStore,
    images: &[Tensor],
    formats: &[QFormat],
    executor: Executor,
) -> Result<Vec<SweepResult>, QuantError> {
    if images.is_empty() {
        return Err(QuantError::EmptyDataset);
    }
    if formats.is_empty() {
        return Err(QuantError::EmptyFormats);
    }
    if !weights.is_float() {
        return Err(QuantError::NotFloat);
    }
    let pool = pipeline.pool_op();
    let reference = executor.try_map(images.len(), |i| oracle_forward(&images[i], weights, pool))?;
    // Groups inside one forward run sequentially; the parallelism is across images.
    let pipe =
        pipeline.clone().with_device(crate::ocl::DeviceConfig { executor: Executor::Sequential, ..*pipeline.device() });
    formats
        .iter()
        .map(|&q| {
            let wq = weights.quantized(q)?;
            let records = executor.try_map(images.len(), |i| -> Result<ImageRecord, QuantError> {
                let out = pipe.forward(&images[i], &wq, Schedule::SERIAL)?;
                Ok(ImageRecord { fixed: out.logits.to_f64_vec(), float: reference[i].clone() })
            })?;
            Ok(SweepResult::aggregate(q, records))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{synthetic_images, synthetic_weights};
    use crate::tensor::Shape;

    fn logits(v: &[f64]) -> Tensor {
        Tensor::from_f64(Shape::new(&[v.len()]).unwrap(), v.to_vec()).unwrap()
    }

    #[test]
    fn divergence_cases() {
        let f = [0.1, 0.7, -0.3];
        assert_eq!(divergence(&logits(&f), &f).unwrap(), (0.0, true));
        let shifted: Vec<f64> = f.iter().map(|x| x + 0.25).collect();
        let (e, agree) = divergence(&logits(&shifted), &f).unwrap();
        assert!((e - 0.25).abs() < 1e-12 && agree);
        let fixed = logits(&[1.0, 0.0]).quantized(QFormat::Q16_8).unwrap();
        assert_eq!(divergence(&fixed, &[0.0, 1.0]).unwrap(), (1.0, false));
        assert!(divergence(&logits(&[1.0]), &f).is_err());
    }

    #[test]
    fn grid() {
        let g = default_grid();
        assert_eq!(g.len(), 5);
        assert_eq!((g[2].total_bits(), g[2].frac_bits()), (16, 8));
    }

    #[test]
    fn single_sample_and_brute_force() {
        let w = synthetic_weights(42);
        let imgs = synthetic_images(42, 3);
        let grid = [QFormat::new(12, 6).unwrap(), QFormat::Q16_8];
        let res = sweep_precision(&Pipeline::default(), &w, &imgs[..1], &grid[..1], Executor::Sequential).unwrap();
        assert_eq!(res[0].n_samples, 1);
        let res = sweep_precision(&Pipeline::default(), &w, &imgs, &grid, Executor::default()).unwrap();
        for r in &res {
            let mut max = 0.0f64;
            let mut agree = 0;
            for (rec, img) in r.records.iter().zip(&imgs) {
                let fixed = logits(&rec.fixed);
                let (e, a) = divergence(&fixed, &rec.float).unwrap();
                assert_eq!(rec.float, oracle_forward(img, &w, Default::default()).unwrap());
                max = max.max(e);
                agree += a as usize;
            }
            assert_eq!(r.max_abs_logit_error, max);
            assert_eq!(r.argmax_agreement, agree as f64 / 3.0);
        }
    }

    #[test]
    fn representable_weights_are_exact() {
        // weights and inputs on a coarse dyadic grid stay exact at 32.16
        let w = WeightStore::from_fn(|_, i| ((i % 5) as f64 - 2.0) / 64.0);
        let img = Tensor::from_f64(Shape::new(&[1, 28, 28]).unwrap(), (0..784).map(|i| (i % 4) as f64 / 4.0).collect())
            .unwrap();
        let q = QFormat::new(32, 16).unwrap();
        let r = &sweep_precision(&Pipeline::default(), &w, &[img], &[q], Executor::Sequential).unwrap()[0];
        assert_eq!(r.max_abs_logit_error, 0.0);
    }

    #[test]
    fn empty_inputs() {
        let w = WeightStore::zeros();
        let p = Pipeline::default();
        assert_eq!(sweep_precision(&p, &w, &[], &default_grid(), Executor::Sequential), Err(QuantError::EmptyDataset));
        let img = synthetic_images(1, 1);
        assert_eq!(sweep_precision(&p, &w, &img, &[], Executor::Sequential), Err(QuantError::EmptyFormats));
    }
}
