use crate::ocl::ModeKind;

use super::PerfError;

/// Time and resource usage of one kernel build.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMetrics {
    pub time_ms: f64,
    pub logic_k: f64,
    pub dsp: f64,
    pub bram_kb: f64,
}

/// One kernel on one platform, measured or estimated in each mode.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub kernel: String,
    pub platform: String,
    /// Indexed in [`ModeKind::ALL`] order.
    pub modes: [ModeMetrics; 3],
}

impl BenchRecord {
    pub fn mode(&self, mode: ModeKind) -> &ModeMetrics {
        &self.modes[mode as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccelRecord {
    pub kernel: String,
    pub ratios: [f64; 3],
    pub percents: [i64; 3],
}

/// Tolerance protecting exact two-decimal quotients such as 1.96 / 0.98 from
/// truncating to 1.99.
const TRUNC_EPS: f64 = 1e-9;

/// Ratio of the slower to the faster time, positive when the second platform
/// is faster, truncated toward zero to two decimals; percent is the gain that
/// ratio represents.
pub fn signed_acceleration(t_first_ms: f64, t_second_ms: f64) -> Result<(f64, i64), PerfError> {
    if !(t_first_ms > 0.0 && t_second_ms > 0.0 && t_first_ms.is_finite() && t_second_ms.is_finite()) {
        return Err(PerfError::NonPositiveTime(t_first_ms.min(t_second_ms)));
    }
    let (sign, magnitude) =
        if t_first_ms >= t_second_ms { (1.0, t_first_ms / t_second_ms) } else { (-1.0, t_second_ms / t_first_ms) };
    let truncated = ((magnitude + TRUNC_EPS) * 100.0).floor() / 100.0;
    let percent = (sign * (truncated - 1.0) * 100.0).round() as i64;
    Ok((sign * truncated, percent))
}

/// Acceleration of `second` over `first`, kernel by kernel in `first`'s order.
pub fn accel_table(first: &[BenchRecord], second: &[BenchRecord]) -> Result<Vec<AccelRecord>, PerfError> {
    if first.is_empty() || second.is_empty() {
        return Err(PerfError::EmptyRecords);
    }
    check_same_kernels(first, second)?;
    first
        .iter()
        .map(|a| {
            let b = second.iter().find(|b| b.kernel == a.kernel).expect("kernel sets checked");
            let mut ratios = [0.0; 3];
            let mut percents = [0; 3];
            for m in 0..3 {
                (ratios[m], percents[m]) = signed_acceleration(a.modes[m].time_ms, b.modes[m].time_ms)?;
            }
            Ok(AccelRecord { kernel: a.kernel.clone(), ratios, percents })
        })
        .collect()
}

pub(crate) fn check_same_kernels(a: &[BenchRecord], b: &[BenchRecord]) -> Result<(), PerfError> {
    let mut ka: Vec<&str> = a.iter().map(|r| r.kernel.as_str()).collect();
    let mut kb: Vec<&str> = b.iter().map(|r| r.kernel.as_str()).collect();
    ka.sort_unstable();
    kb.sort_unstable();
    if ka != kb || ka.windows(2).any(|w| w[0] == w[1]) {
        return Err(PerfError::MismatchedKernels(format!("{ka:?} vs {kb:?}")));
    }
    Ok(())
}
