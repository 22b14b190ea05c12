use crate::netdef::{NetworkSpec, StageName};
use crate::ocl::{ModeKind, Schedule};
use crate::tensor::QFormat;

use super::{
    estimate_resources, estimate_time, kernel_footprint, BenchRecord, CoeffTable, ModeMetrics, PerfError,
    PlatformConfig,
};

/// Parameters of the three modes a bench compares.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchModes {
    pub factor: u32,
    pub width: u32,
    pub compute_units: u32,
}

impl Default for BenchModes {
    fn default() -> Self {
        BenchModes { factor: 4, width: 4, compute_units: 1 }
    }
}

impl BenchModes {
    pub fn schedule(&self, mode: ModeKind) -> Schedule {
        Schedule::new(mode.with_param(self.factor, self.width), self.compute_units)
    }
}

/// Modelled time and resources of every stage in every mode on one platform.
pub fn model_bench(
    spec: &NetworkSpec,
    q: QFormat,
    platform: &PlatformConfig,
    coeffs: &CoeffTable,
    modes: BenchModes,
) -> Result<Vec<BenchRecord>, PerfError> {
    StageName::ALL
        .into_iter()
        .map(|stage| {
            let fp = kernel_footprint(spec, stage, q)?;
            let c = coeffs.get(&platform.name, stage)?;
            let mut metrics = Vec::with_capacity(3);
            for mode in ModeKind::ALL {
                let s = modes.schedule(mode);
                let r = estimate_resources(c, s, platform);
                metrics.push(ModeMetrics {
                    time_ms: estimate_time(&fp, platform, s)?,
                    logic_k: r.logic_k,
                    dsp: r.dsp,
                    bram_kb: r.bram_kb,
                });
            }
            Ok(BenchRecord {
                kernel: stage.as_str().to_string(),
                platform: platform.name.clone(),
                modes: metrics.try_into().expect("three modes"),
            })
        })
        .collect()
}

/// Time of one full forward pass: the five stages back to back.
pub fn service_time_ms(
    spec: &NetworkSpec,
    q: QFormat,
    platform: &PlatformConfig,
    schedule: Schedule,
) -> Result<f64, PerfError> {
    StageName::ALL.into_iter().map(|stage| estimate_time(&kernel_footprint(spec, stage, q)?, platform, schedule)).sum()
}
