use std::fmt;

use super::PerfError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Constant,
    Growing,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Constant => "constant",
            Verdict::Growing => "growing",
        })
    }
}

/// Frame latencies of a single-server FIFO fed at a fixed interval.
///
/// The recurrence runs on whole picoseconds so that the slope is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamResult {
    pub service_ps: u64,
    pub interval_ps: u64,
    pub latencies_ps: Vec<u64>,
}

const PS_PER_MS: f64 = 1e9;

impl StreamResult {
    pub fn latencies_ms(&self) -> Vec<f64> {
        self.latencies_ps.iter().map(|&l| l as f64 / PS_PER_MS).collect()
    }

    /// Average latency increase per frame, in picoseconds.
    pub fn slope_ps(&self) -> i64 {
        match self.latencies_ps.as_slice() {
            [first, .., last] => (*last as i64 - *first as i64) / (self.latencies_ps.len() as i64 - 1),
            _ => 0,
        }
    }

    pub fn slope_ms(&self) -> f64 {
        self.slope_ps() as f64 / PS_PER_MS
    }

    pub fn verdict(&self) -> Verdict {
        if self.slope_ps() > 0 {
            Verdict::Growing
        } else {
            Verdict::Constant
        }
    }
}

pub fn ms_to_ps(ms: f64) -> u64 {
    (ms * PS_PER_MS).round() as u64
}

pub fn simulate_stream(service_ms: f64, interval_ms: f64, frames: usize) -> Result<StreamResult, PerfError> {
    for (what, v) in [("service time", service_ms), ("capture interval", interval_ms)] {
        if !(v.is_finite() && v > 0.0) || ms_to_ps(v) == 0 {
            return Err(PerfError::InvalidStream(format!("{what} must be positive, got {v}")));
        }
    }
    if frames == 0 {
        return Err(PerfError::InvalidStream("at least one frame is required".into()));
    }
    let (service, interval) = (ms_to_ps(service_ms), ms_to_ps(interval_ms));
    let mut done = 0u64;
    let latencies_ps = (0..frames as u64)
        .map(|i| {
            let arrival = i * interval;
            done = done.max(arrival) + service;
            done - arrival
        })
        .collect();
    Ok(StreamResult { service_ps: service, interval_ps: interval, latencies_ps })
}
