use crate::ocl::Schedule;

use super::{KernelFootprint, PerfError, PlatformConfig};

/// Compute and memory terms of the roofline bound, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeEstimate {
    pub compute_ms: f64,
    pub memory_ms: f64,
}

impl TimeEstimate {
    pub fn time_ms(&self) -> f64 {
        self.compute_ms.max(self.memory_ms)
    }

    pub fn memory_bound(&self) -> bool {
        self.memory_ms >= self.compute_ms
    }
}

/// Roofline terms for `fp` under `schedule`. Every lane of every compute
/// unit does one MAC per cycle; compute units share the DDR bandwidth while
/// SIMD lanes share one memory port.
pub fn time_terms(fp: &KernelFootprint, p: &PlatformConfig, schedule: Schedule) -> Result<TimeEstimate, PerfError> {
    let total = schedule.total_lanes();
    if total == 0 {
        return Err(PerfError::InvalidSchedule(schedule.to_string()));
    }
    if total > p.lane_budget {
        return Err(PerfError::LaneBudget { requested: total, budget: p.lane_budget });
    }
    let cu = schedule.compute_units as f64;
    Ok(TimeEstimate {
        compute_ms: fp.macs as f64 / (total as f64 * p.compute_clock_hz) * 1e3,
        memory_ms: fp.total_bytes() as f64 / (p.effective_bandwidth() / cu) * 1e3,
    })
}

pub fn estimate_time(fp: &KernelFootprint, p: &PlatformConfig, schedule: Schedule) -> Result<f64, PerfError> {
    Ok(time_terms(fp, p, schedule)?.time_ms())
}
