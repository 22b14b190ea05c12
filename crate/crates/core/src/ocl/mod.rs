//! Emulation of the OpenCL platform, execution and memory models.
//!
//! Kernels are host-registered closures ([`KernelDef`]) launched over an
//! [`NdRange`] through an in-order [`CommandQueue`]. Buffers live in a
//! [`Context`]; local and private regions are created per launch.

mod engine;
mod memory;
mod ndrange;
mod queue;
mod schedule;

use thiserror::Error;

pub use engine::{
    ArgAccess, ArgBinding, BufferId, Context, DeviceConfig, GroupBarrier, KernelDef, KernelFn, KernelStats, Step,
    WorkItem, MAX_PHASES,
};
pub use memory::{check_region_access, AccessKind, AccessViolation, Accessor, ByteStore, MemRegion, RegionKind, Scope};
pub use ndrange::NdRange;
pub use queue::{Command, CommandKind, CommandQueue, EventId, QueueReport, TraceEntry};
pub use schedule::{ModeKind, Parallelism, Schedule};

use crate::tensor::TensorError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OclError {
    #[error("invalid NDRange: {0}")]
    InvalidNdRange(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("requested {requested} lanes exceeds the lane budget of {budget}")]
    LaneBudget { requested: u64, budget: u64 },
    #[error("invalid buffer: {0}")]
    InvalidBuffer(String),
    #[error("buffer does not belong to this context")]
    UnknownBuffer,
    #[error("event does not belong to this queue")]
    DanglingEvent,
    #[error("event is already signaled by another command")]
    EventAlreadyBound,
    #[error("queue is empty")]
    EmptyQueue,
    #[error("deadlock: `{command}` waits on {waiting_on}{}", if *.cycle { " (dependency cycle)" } else { "" })]
    Deadlock { command: String, waiting_on: String, cycle: bool },
    #[error("barrier divergence in work-group {group}: {arrived} of {size} arrived ({detail})")]
    BarrierDivergence { group: usize, arrived: usize, size: usize, detail: String },
    #[error("memory access violation: {0}")]
    Violation(#[from] AccessViolation),
    #[error("kernel argument {arg}: {reason}")]
    ArgAccess { arg: usize, reason: &'static str },
    #[error("index {index} out of bounds for {region} ({len} elements)")]
    OutOfBounds { region: String, index: usize, len: usize },
    #[error("value {value} does not fit a {width}-byte element")]
    ValueDoesNotFit { value: i64, width: usize },
    #[error("kernel `{kernel}`: two work-groups wrote element {index} of argument {arg}")]
    WriteConflict { kernel: String, arg: usize, index: usize },
    #[error("kernel `{kernel}` exceeded {limit} barrier phases")]
    PhaseLimit { kernel: String, limit: usize },
    #[error("kernel `{kernel}` failed in work-group {group}, work-item {item}: {source}")]
    Kernel { kernel: String, group: usize, item: usize, source: Box<OclError> },
    #[error(transparent)]
    Arithmetic(#[from] TensorError),
}

impl OclError {
    /// The innermost error, unwrapping kernel context.
    pub fn root(&self) -> &OclError {
        match self {
            OclError::Kernel { source, .. } => source.root(),
            other => other,
        }
    }
}
