//! Analytic timing and resource model of the two FPGA boards.

mod accel;
mod bench;
mod config;
mod footprint;
mod pipes;
mod platform;
mod report;
mod resources;
mod roofline;
mod stream;

use thiserror::Error;

pub use accel::{accel_table, signed_acceleration, AccelRecord, BenchRecord, ModeMetrics};
pub use bench::{model_bench, service_time_ms, BenchModes};
pub use config::{PerfConfig, PLATFORM_FIELDS};
pub use footprint::{kernel_footprint, KernelFootprint};
pub use pipes::{pipes_feasible, pipes_required, PipeFeasibility};
pub use platform::{
    find_platform, platform_catalog, PlatformConfig, ALTERA, DEFAULT_CLOCK_HZ, DEFAULT_EFFICIENCY, DEFAULT_LANE_BUDGET,
    XILINX,
};
pub use report::render_report;
pub use resources::{default_coeffs, estimate_resources, CoeffTable, ResourceCoeffs, ResourceEstimate};
pub use roofline::{estimate_time, time_terms, TimeEstimate};
pub use stream::{ms_to_ps, simulate_stream, StreamResult, Verdict};

use crate::netdef::{NetError, StageName};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerfError {
    #[error("schedule needs {requested} lanes, budget is {budget}")]
    LaneBudget { requested: u64, budget: u64 },
    #[error("invalid schedule {0}")]
    InvalidSchedule(String),
    #[error("execution times must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("invalid platform: {0}")]
    InvalidPlatform(String),
    #[error("unknown platform `{0}`")]
    UnknownPlatform(String),
    #[error("no resource coefficients for {platform}/{stage}")]
    MissingCoefficients { platform: String, stage: StageName },
    #[error("no benchmark records")]
    EmptyRecords,
    #[error("platforms cover different kernels: {0}")]
    MismatchedKernels(String),
    #[error("{file}:{line}: {reason}")]
    Config { file: String, line: usize, reason: String },
    #[error("invalid stream parameters: {0}")]
    InvalidStream(String),
    #[error(transparent)]
    Net(#[from] NetError),
}
