//! LeNet-5 on an emulated OpenCL device, with a fixed-point precision study
//! and an analytic FPGA timing and resource model.
//!
//! * [`tensor`]: shapes, fixed-point formats and tensors
//! * [`netdef`]: the network description and shape inference
//! * [`ocl`]: NDRange execution, memory regions and command queues
//! * [`kernels`]: the five pipeline kernels and the float64 reference
//! * [`quant`]: precision sweeps against the reference
//! * [`perf`]: roofline timing, resource growth, acceleration and streaming
//! * [`io`]: weight, image and CSV formats
//!
//! The `parallel` feature (on by default) runs work-groups and sweep images
//! on rayon; without it every [`exec::Executor`] is sequential.

pub mod exec;
pub mod fixtures;
pub mod io;
pub mod kernels;
pub mod netdef;
pub mod ocl;
pub mod perf;
pub mod quant;
pub mod tensor;

use thiserror::Error;

use kernels::KernelsError;
use netdef::NetError;
use ocl::OclError;
use perf::PerfError;
use quant::QuantError;
use tensor::TensorError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Ocl(#[from] OclError),
    #[error(transparent)]
    Kernels(#[from] KernelsError),
    #[error(transparent)]
    Perf(#[from] PerfError),
    #[error(transparent)]
    Quant(#[from] QuantError),
    #[error(transparent)]
    Io(#[from] io::IoError),
}

fn ocl_is_internal(e: &OclError) -> bool {
    !matches!(
        e.root(),
        OclError::InvalidNdRange(_)
            | OclError::InvalidSchedule(_)
            | OclError::LaneBudget { .. }
            | OclError::Arithmetic(_)
    )
}

fn kernels_is_internal(e: &KernelsError) -> bool {
    match e {
        KernelsError::Ocl(o) => ocl_is_internal(o),
        KernelsError::Net(_) => true,
        _ => false,
    }
}

impl Error {
    /// True for a broken internal invariant rather than bad input.
    pub fn is_internal(&self) -> bool {
        match self {
            Error::Ocl(e) => ocl_is_internal(e),
            Error::Kernels(e) | Error::Quant(QuantError::Kernels(e)) | Error::Io(io::IoError::Kernels(e)) => {
                kernels_is_internal(e)
            }
            Error::Net(_) => true,
            Error::Tensor(_) | Error::Perf(_) | Error::Quant(_) | Error::Io(_) => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn internal_classification() {
        let user: Error = PerfError::UnknownPlatform("x".into()).into();
        assert!(!user.is_internal());
        let conflict: Error = OclError::WriteConflict { kernel: "k".into(), arg: 0, index: 1 }.into();
        assert!(conflict.is_internal());
        let budget: Error = KernelsError::Ocl(OclError::LaneBudget { requested: 9, budget: 8 }).into();
        assert!(!budget.is_internal());
    }
}
