use super::PlatformConfig;

/// FIFO channels needed to connect every input map to every output map.
pub fn pipes_required(in_maps: u64, out_maps: u64) -> u64 {
    in_maps * out_maps
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipeFeasibility {
    pub feasible: bool,
    pub required_kb: f64,
    pub capacity_kb: f64,
}

pub fn pipes_feasible(count: u64, fifo_kb_each: f64, p: &PlatformConfig) -> PipeFeasibility {
    let required_kb = count as f64 * fifo_kb_each;
    PipeFeasibility { feasible: required_kb <= p.bram_capacity_kb, required_kb, capacity_kb: p.bram_capacity_kb }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perf::platform_catalog;

    #[test]
    fn counts() {
        assert_eq!(pipes_required(20, 50), 1000);
        assert_eq!(pipes_required(1, 1), 1);
        assert_eq!(pipes_required(3, 4), 12);
    }

    #[test]
    fn feasibility() {
        let c = platform_catalog();
        let x = pipes_feasible(1000, 72.0, &c[1]);
        assert_eq!((x.feasible, x.required_kb), (false, 72_000.0));
        assert!(pipes_feasible(0, 72.0, &c[0]).feasible);
        for p in &c {
            let ten = pipes_feasible(10, 72.0, p);
            assert!(ten.feasible && ten.required_kb == 720.0);
            assert!(!pipes_feasible(1000, 53.0, p).feasible);
        }
    }
}
