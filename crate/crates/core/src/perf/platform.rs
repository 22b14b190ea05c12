use std::fmt;

use super::PerfError;

/// One FPGA board as seen by the timing and resource model.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatformConfig {
    pub name: String,
    pub compute_clock_hz: f64,
    /// Mega-transfers per second.
    pub ddr_transfer_rate: f64,
    pub ddr_bus_bytes: f64,
    pub ddr_efficiency: f64,
    /// Thousands of logic cells or elements.
    pub logic_capacity: f64,
    pub dsp_capacity: f64,
    pub bram_capacity_kb: f64,
    pub lane_budget: u64,
    /// Secondary multiplier count, recorded but not used by the model.
    pub aux_multipliers: u32,
}

pub const ALTERA: &str = "stratixV_gxa7_de5";
pub const XILINX: &str = "virtex7_690t_7v3";

pub const DEFAULT_CLOCK_HZ: f64 = 200e6;
pub const DEFAULT_EFFICIENCY: f64 = 0.7;
pub const DEFAULT_LANE_BUDGET: u64 = 4096;

impl PlatformConfig {
    /// Sustained bandwidth in bytes per second.
    pub fn effective_bandwidth(&self) -> f64 {
        self.ddr_transfer_rate * 1e6 * self.ddr_bus_bytes * self.ddr_efficiency
    }

    pub fn validate(&self) -> Result<(), PerfError> {
        let fields = [
            ("compute_clock_hz", self.compute_clock_hz),
            ("ddr_transfer_rate", self.ddr_transfer_rate),
            ("ddr_bus_bytes", self.ddr_bus_bytes),
            ("ddr_efficiency", self.ddr_efficiency),
            ("logic_capacity", self.logic_capacity),
            ("dsp_capacity", self.dsp_capacity),
            ("bram_capacity_kb", self.bram_capacity_kb),
        ];
        for (field, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(PerfError::InvalidPlatform(format!("{}: {field} must be positive, got {v}", self.name)));
            }
        }
        if self.ddr_efficiency > 1.0 {
            return Err(PerfError::InvalidPlatform(format!("{}: ddr_efficiency must be at most 1", self.name)));
        }
        if self.lane_budget == 0 {
            return Err(PerfError::InvalidPlatform(format!("{}: lane_budget must be positive", self.name)));
        }
        if self.name.is_empty() || self.name.contains(|c: char| c.is_whitespace() || c == ',' || c == '.') {
            return Err(PerfError::InvalidPlatform(format!("bad platform name `{}`", self.name)));
        }
        Ok(())
    }
}

impl fmt::Display for PlatformConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} MHz, DDR {} MT/s x {} B @ {}, {}K logic, {} DSP, {} Kb BRAM",
            self.name,
            self.compute_clock_hz / 1e6,
            self.ddr_transfer_rate,
            self.ddr_bus_bytes,
            self.ddr_efficiency,
            self.logic_capacity,
            self.dsp_capacity,
            self.bram_capacity_kb
        )
    }
}

/// The two boards: Stratix V GX A7 (DE5-Net) and Virtex-7 XC7VX690T (VC709).
pub fn platform_catalog() -> Vec<PlatformConfig> {
    vec![
        PlatformConfig {
            name: ALTERA.into(),
            compute_clock_hz: DEFAULT_CLOCK_HZ,
            ddr_transfer_rate: 800.0,
            ddr_bus_bytes: 8.0,
            ddr_efficiency: DEFAULT_EFFICIENCY,
            logic_capacity: 622.0,
            dsp_capacity: 256.0,
            // 2560 M20K blocks
            bram_capacity_kb: 51_200.0,
            lane_budget: DEFAULT_LANE_BUDGET,
            aux_multipliers: 512,
        },
        PlatformConfig {
            name: XILINX.into(),
            compute_clock_hz: DEFAULT_CLOCK_HZ,
            ddr_transfer_rate: 1333.0,
            ddr_bus_bytes: 8.0,
            ddr_efficiency: DEFAULT_EFFICIENCY,
            logic_capacity: 693.12,
            dsp_capacity: 3600.0,
            bram_capacity_kb: 52_920.0,
            lane_budget: DEFAULT_LANE_BUDGET,
            aux_multipliers: 0,
        },
    ]
}

pub fn find_platform<'a>(platforms: &'a [PlatformConfig], name: &str) -> Result<&'a PlatformConfig, PerfError> {
    platforms.iter().find(|p| p.name == name).ok_or_else(|| PerfError::UnknownPlatform(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_values() {
        let c = platform_catalog();
        let a = find_platform(&c, ALTERA).unwrap();
        let x = find_platform(&c, XILINX).unwrap();
        assert_eq!(a.logic_capacity, 622.0);
        assert_eq!(a.dsp_capacity, 256.0);
        assert_eq!(x.dsp_capacity, 3600.0);
        assert_eq!(x.bram_capacity_kb, 52_920.0);
        assert!(x.ddr_transfer_rate > a.ddr_transfer_rate);
        assert!(c.iter().all(|p| p.validate().is_ok()));
        assert!((a.effective_bandwidth() - 4.48e9).abs() < 1.0);
    }

    #[test]
    fn unknown_and_invalid() {
        assert!(matches!(find_platform(&platform_catalog(), "zynq"), Err(PerfError::UnknownPlatform(_))));
        let mut p = platform_catalog().remove(0);
        p.ddr_efficiency = 1.5;
        assert!(p.validate().is_err());
        p.ddr_efficiency = 0.0;
        assert!(p.validate().is_err());
    }
}
