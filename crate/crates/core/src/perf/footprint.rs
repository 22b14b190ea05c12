use crate::netdef::{LayerSpec, NetworkSpec, StageName};
use crate::ocl::KernelStats;
use crate::tensor::QFormat;

use super::PerfError;

/// Work and global-memory traffic of one stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelFootprint {
    pub stage: StageName,
    pub macs: u64,
    pub bytes_read: u64,
    pub bytes_written: u64,
}

impl KernelFootprint {
    /// A stage that produces nothing reads and computes nothing.
    pub fn from_counts(
        stage: StageName,
        macs: u64,
        input_elems: u64,
        param_elems: u64,
        output_elems: u64,
        elem_bytes: u64,
    ) -> Self {
        if output_elems == 0 {
            return KernelFootprint { stage, macs: 0, bytes_read: 0, bytes_written: 0 };
        }
        KernelFootprint {
            stage,
            macs,
            bytes_read: (input_elems + param_elems) * elem_bytes,
            bytes_written: output_elems * elem_bytes,
        }
    }

    /// Footprint measured by the device emulator: each distinct element counts once.
    pub fn from_stats(stage: StageName, stats: &KernelStats) -> Self {
        KernelFootprint {
            stage,
            macs: stats.macs,
            bytes_read: stats.unique_bytes_read,
            bytes_written: stats.unique_bytes_written,
        }
    }

    pub fn total_bytes(&self) -> u64 {
        self.bytes_read + self.bytes_written
    }
}

/// Analytic footprint: each input, weight and bias element is read once and
/// each output element written once.
pub fn kernel_footprint(spec: &NetworkSpec, stage: StageName, q: QFormat) -> Result<KernelFootprint, PerfError> {
    let shapes = spec.infer_shapes()?;
    let range = spec.stage_range(stage);
    let (input, _) = spec.stage_io(stage)?;
    let mut macs = 0u64;
    let mut params = 0u64;
    let mut current = input.clone();
    for i in range.clone() {
        let out = &shapes[i];
        match spec.layers()[i] {
            LayerSpec::Conv { out_maps, kernel, .. } => {
                let per_out = (current.dims()[0] * kernel * kernel) as u64;
                macs += out.elem_count() as u64 * per_out;
                params += out_maps as u64 * per_out + out_maps as u64;
            }
            LayerSpec::FullyConnected { out_neurons } => {
                let fan_in = current.elem_count() as u64;
                macs += out_neurons as u64 * fan_in;
                params += out_neurons as u64 * (fan_in + 1);
            }
            LayerSpec::Pool { .. } | LayerSpec::Relu => {}
        }
        current = out.clone();
    }
    Ok(KernelFootprint::from_counts(
        stage,
        macs,
        input.elem_count() as u64,
        params,
        current.elem_count() as u64,
        q.elem_bytes() as u64,
    ))
}
