use std::collections::BTreeMap;

use crate::netdef::StageName;
use crate::ocl::Schedule;

use super::platform::{ALTERA, XILINX};
use super::{PerfError, PlatformConfig};

/// Linear resource model of one stage on one platform: usage at a single lane
/// plus the growth per additional lane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ResourceCoeffs {
    pub base_logic_k: f64,
    pub base_dsp: f64,
    pub base_bram_kb: f64,
    pub inc_logic_k: f64,
    pub inc_dsp: f64,
    pub inc_bram_kb: f64,
}

impl ResourceCoeffs {
    pub const FIELDS: [&'static str; 6] =
        ["base_logic_k", "base_dsp", "base_bram_kb", "inc_logic_k", "inc_dsp", "inc_bram_kb"];

    pub const fn new(base: [f64; 3], inc: [f64; 3]) -> Self {
        ResourceCoeffs {
            base_logic_k: base[0],
            base_dsp: base[1],
            base_bram_kb: base[2],
            inc_logic_k: inc[0],
            inc_dsp: inc[1],
            inc_bram_kb: inc[2],
        }
    }

    pub(crate) fn field_mut(&mut self, field: &str) -> Option<&mut f64> {
        Some(match field {
            "base_logic_k" => &mut self.base_logic_k,
            "base_dsp" => &mut self.base_dsp,
            "base_bram_kb" => &mut self.base_bram_kb,
            "inc_logic_k" => &mut self.inc_logic_k,
            "inc_dsp" => &mut self.inc_dsp,
            "inc_bram_kb" => &mut self.inc_bram_kb,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResourceEstimate {
    pub logic_k: f64,
    pub dsp: f64,
    pub bram_kb: f64,
    /// Set when any figure had to be clamped to the platform's capacity.
    pub over_capacity: bool,
}

/// Coefficients keyed by (platform, stage).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoeffTable {
    entries: BTreeMap<(String, StageName), ResourceCoeffs>,
}

impl CoeffTable {
    pub fn get(&self, platform: &str, stage: StageName) -> Result<&ResourceCoeffs, PerfError> {
        self.entries
            .get(&(platform.to_string(), stage))
            .ok_or_else(|| PerfError::MissingCoefficients { platform: platform.to_string(), stage })
    }

    pub fn insert(&mut self, platform: &str, stage: StageName, coeffs: ResourceCoeffs) {
        self.entries.insert((platform.to_string(), stage), coeffs);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Shipped defaults. Bases are the measured single-lane usage of each kernel;
/// increments are hand-set so that parallel builds grow in the same order as
/// the measured ones.
pub fn default_coeffs() -> CoeffTable {
    use StageName::*;
    let rows: [(&str, StageName, [f64; 3], [f64; 3]); 10] = [
        (XILINX, ConvPool1, [4.9, 11.0, 180.0], [0.1, 0.0, 12.0]),
        (XILINX, Conv2, [4.8, 11.0, 108.0], [0.03, 0.0, 12.0]),
        (XILINX, Pool2, [3.0, 4.0, 72.0], [0.0, 0.0, 24.0]),
        (XILINX, Ip1Relu, [4.2, 11.0, 72.0], [0.0, 0.0, 0.0]),
        (XILINX, Ip2, [4.0, 9.0, 72.0], [0.0, 0.0, 0.0]),
        (ALTERA, ConvPool1, [145.7, 8.0, 5225.0], [1.0, 8.0, 400.0]),
        (ALTERA, Conv2, [300.5, 8.0, 3207.0], [0.5, 8.0, 500.0]),
        (ALTERA, Pool2, [6.9, 2.0, 279.0], [0.0, 0.0, 0.0]),
        (ALTERA, Ip1Relu, [5.8, 4.0, 1471.0], [0.0, 0.0, 10.0]),
        (ALTERA, Ip2, [5.7, 4.0, 1471.0], [0.0, 0.0, 10.0]),
    ];
    let mut table = CoeffTable::default();
    for (platform, stage, base, inc) in rows {
        table.insert(platform, stage, ResourceCoeffs::new(base, inc));
    }
    table
}

/// `base + inc * (lanes - 1)` over all lanes of all compute units, clamped to
/// the platform's capacity.
pub fn estimate_resources(coeffs: &ResourceCoeffs, schedule: Schedule, p: &PlatformConfig) -> ResourceEstimate {
    let extra = schedule.total_lanes().saturating_sub(1) as f64;
    let raw = [
        (coeffs.base_logic_k + coeffs.inc_logic_k * extra, p.logic_capacity),
        (coeffs.base_dsp + coeffs.inc_dsp * extra, p.dsp_capacity),
        (coeffs.base_bram_kb + coeffs.inc_bram_kb * extra, p.bram_capacity_kb),
    ];
    let over_capacity = raw.iter().any(|&(v, cap)| v > cap);
    let [logic_k, dsp, bram_kb] = raw.map(|(v, cap)| v.min(cap));
    ResourceEstimate { logic_k, dsp, bram_kb, over_capacity }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perf::platform_catalog;

    #[test]
    fn linear_growth() {
        let p = &platform_catalog()[1];
        let c = ResourceCoeffs::new([3.0, 4.0, 72.0], [1.0, 2.0, 36.0]);
        let one = estimate_resources(&c, Schedule::SERIAL, p);
        assert_eq!((one.logic_k, one.dsp, one.bram_kb), (3.0, 4.0, 72.0));
        let four = estimate_resources(&c, Schedule::simd(4), p);
        assert_eq!((four.logic_k, four.dsp, four.bram_kb, four.over_capacity), (6.0, 10.0, 180.0, false));
        let cu = estimate_resources(&c, Schedule::SERIAL.with_compute_units(4), p);
        assert_eq!(cu, four);
    }

    #[test]
    fn zero_increments_are_mode_invariant() {
        let p = &platform_catalog()[0];
        let c = ResourceCoeffs::new([1.0, 2.0, 3.0], [0.0; 3]);
        assert_eq!(estimate_resources(&c, Schedule::unroll(16), p), estimate_resources(&c, Schedule::SERIAL, p));
    }

    #[test]
    fn clamps_at_capacity() {
        let p = &platform_catalog()[0];
        let c = ResourceCoeffs::new([1.0, 250.0, 3.0], [0.0, 8.0, 0.0]);
        let r = estimate_resources(&c, Schedule::simd(16), p);
        assert!(r.over_capacity);
        assert_eq!(r.dsp, p.dsp_capacity);
    }

    #[test]
    fn defaults_cover_both_platforms() {
        let t = default_coeffs();
        assert_eq!(t.len(), 10);
        assert_eq!(t.get(XILINX, StageName::ConvPool1).unwrap().base_bram_kb, 180.0);
        assert!(t.get("other", StageName::Ip2).is_err());
    }
}
