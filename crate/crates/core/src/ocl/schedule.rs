use std::fmt;
use std::str::FromStr;

/// How a kernel's datapath is widened.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Parallelism {
    #[default]
    None,
    /// Inner loops unrolled by a factor.
    Unroll(u32),
    /// Work-items vectorized across lanes of a single compute unit.
    Simd(u32),
}

impl Parallelism {
    pub fn lanes(self) -> u32 {
        match self {
            Parallelism::None => 1,
            Parallelism::Unroll(f) => f,
            Parallelism::Simd(w) => w,
        }
    }

    pub fn mode_name(self) -> &'static str {
        match self {
            Parallelism::None => "none",
            Parallelism::Unroll(_) => "unroll",
            Parallelism::Simd(_) => "simd",
        }
    }
}

impl fmt::Display for Parallelism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parallelism::None => f.write_str("none"),
            Parallelism::Unroll(n) => write!(f, "unroll({n})"),
            Parallelism::Simd(n) => write!(f, "simd({n})"),
        }
    }
}

/// Execution mode names as they appear in reports and CSV files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModeKind {
    None,
    Unroll,
    Simd,
}

impl ModeKind {
    pub const ALL: [ModeKind; 3] = [ModeKind::None, ModeKind::Unroll, ModeKind::Simd];

    pub fn as_str(self) -> &'static str {
        match self {
            ModeKind::None => "none",
            ModeKind::Unroll => "unroll",
            ModeKind::Simd => "simd",
        }
    }

    pub fn with_param(self, factor: u32, width: u32) -> Parallelism {
        match self {
            ModeKind::None => Parallelism::None,
            ModeKind::Unroll => Parallelism::Unroll(factor),
            ModeKind::Simd => Parallelism::Simd(width),
        }
    }
}

impl FromStr for ModeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(ModeKind::None),
            "unroll" => Ok(ModeKind::Unroll),
            "simd" => Ok(ModeKind::Simd),
            other => Err(format!("unknown mode `{other}` (expected none, unroll or simd)")),
        }
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Parallelism mode plus the number of replicated compute units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Schedule {
    pub parallelism: Parallelism,
    pub compute_units: u32,
}

impl Schedule {
    pub const SERIAL: Schedule = Schedule { parallelism: Parallelism::None, compute_units: 1 };

    pub fn new(parallelism: Parallelism, compute_units: u32) -> Self {
        Schedule { parallelism, compute_units }
    }

    pub fn unroll(factor: u32) -> Self {
        Schedule::new(Parallelism::Unroll(factor), 1)
    }

    pub fn simd(width: u32) -> Self {
        Schedule::new(Parallelism::Simd(width), 1)
    }

    pub fn with_compute_units(self, compute_units: u32) -> Self {
        Schedule { compute_units, ..self }
    }

    pub fn lanes(&self) -> u32 {
        self.parallelism.lanes()
    }

    pub fn total_lanes(&self) -> u64 {
        self.lanes() as u64 * self.compute_units as u64
    }

    pub fn mode_kind(&self) -> ModeKind {
        match self.parallelism {
            Parallelism::None => ModeKind::None,
            Parallelism::Unroll(_) => ModeKind::Unroll,
            Parallelism::Simd(_) => ModeKind::Simd,
        }
    }
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule::SERIAL
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} x{} cu", self.parallelism, self.compute_units)
    }
}
