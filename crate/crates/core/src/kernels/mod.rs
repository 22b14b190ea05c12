//! The five LeNet-5 pipeline kernels on the emulated device, plus a float64
//! reference implementation.
//!
//! Stages exchange data only through global memory and run as an in-order
//! queue chained by events: conv_pool1, conv2, pool2, ip1_relu, ip2.

mod oracle;
mod stages;
mod weights;

use std::sync::Arc;

use thiserror::Error;

pub use oracle::{oracle_forward, oracle_forward_quantized, oracle_run, OracleRun};
pub use weights::{WeightBlock, WeightStore};

use crate::netdef::{lenet5_with_pool, LayerSpec, NetError, NetworkSpec, PoolOp, StageName};
use crate::ocl::{
    BufferId, CommandQueue, Context, DeviceConfig, EventId, KernelDef, KernelStats, NdRange, OclError, QueueReport,
    RegionKind, Schedule,
};
use crate::tensor::{QFormat, Shape, Tensor, TensorError};
use stages::{ConvGeom, PoolGeom};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelsError {
    #[error("{stage}: expected input shape {expected:?}, got {actual}")]
    InputShape { stage: &'static str, expected: Vec<usize>, actual: Shape },
    #[error("weight block {block}: expected shape {expected}, got {actual}")]
    WeightShape { block: &'static str, expected: Shape, actual: Shape },
    #[error("weight blocks mix float and fixed-point (or different formats)")]
    MixedWeightKinds,
    #[error("the device pipeline needs fixed-point weights; quantize the store first")]
    NotQuantized,
    #[error("NDRange for {stage} does not cover its output: {detail}")]
    Range { stage: StageName, detail: String },
    #[error(transparent)]
    Ocl(#[from] OclError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// NDRange per stage. The defaults divide each output evenly; any other
/// covering decomposition gives the same results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRanges {
    pub conv_pool1: NdRange,
    pub conv2: NdRange,
    pub pool2: NdRange,
    pub ip1_relu: NdRange,
    pub ip2: NdRange,
}

impl StageRanges {
    pub fn get(&self, stage: StageName) -> &NdRange {
        match stage {
            StageName::ConvPool1 => &self.conv_pool1,
            StageName::Conv2 => &self.conv2,
            StageName::Pool2 => &self.pool2,
            StageName::Ip1Relu => &self.ip1_relu,
            StageName::Ip2 => &self.ip2,
        }
    }
}

impl Default for StageRanges {
    fn default() -> Self {
        let nd = |g: &[usize], l: &[usize]| NdRange::with_local(g, l).expect("static range");
        StageRanges {
            conv_pool1: nd(&[12, 12, 20], &[4, 4, 1]),
            conv2: nd(&[8, 8, 50], &[4, 4, 1]),
            pool2: nd(&[4, 4, 50], &[4, 4, 1]),
            ip1_relu: nd(&[500], &[20]),
            ip2: nd(&[10], &[10]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    pub stage: StageName,
    pub output: Tensor,
    pub stats: KernelStats,
}

impl StageResult {
    pub fn macs(&self) -> u64 {
        self.stats.macs
    }

    pub fn bytes_read(&self) -> u64 {
        self.stats.bytes_read
    }

    pub fn bytes_written(&self) -> u64 {
        self.stats.bytes_written
    }
}

#[derive(Debug, Clone)]
pub struct ForwardResult {
    pub logits: Tensor,
    pub winner: usize,
    pub stages: Vec<StageResult>,
    pub report: QueueReport,
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
struct Geometry {
    conv1: ConvGeom,
    pool1: PoolGeom,
    conv2: ConvGeom,
    pool2: PoolGeom,
    ip1_in: usize,
    ip2_in: usize,
}

/// LeNet-5 on the emulated device.
#[derive(Debug, Clone)]
pub struct Pipeline {
    spec: NetworkSpec,
    geometry: Geometry,
    device: DeviceConfig,
    ranges: StageRanges,
}

impl Pipeline {
    pub fn new(pool: PoolOp) -> Self {
        let spec = lenet5_with_pool(pool);
        let geometry = geometry_of(&spec).expect("LeNet-5 geometry");
        Pipeline { spec, geometry, device: DeviceConfig::default(), ranges: StageRanges::default() }
    }

    pub fn with_device(mut self, device: DeviceConfig) -> Self {
        self.device = device;
        self
    }

    pub fn with_ranges(mut self, ranges: StageRanges) -> Result<Self, KernelsError> {
        let outputs = self.spec.stage_output_shapes()?;
        for (stage, shape) in StageName::ALL.into_iter().zip(outputs) {
            let nd = ranges.get(stage);
            let mut dims = shape.dims().to_vec();
            dims.reverse(); // ranges are (x, y, map)
            if nd.global_size() != dims.as_slice() || nd.offset().iter().any(|&o| o != 0) {
                return Err(KernelsError::Range {
                    stage,
                    detail: format!("global {:?} offset {:?}, output needs {:?}", nd.global_size(), nd.offset(), dims),
                });
            }
        }
        self.ranges = ranges;
        Ok(self)
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn pool_op(&self) -> PoolOp {
        self.spec.pool_op()
    }

    pub fn device(&self) -> &DeviceConfig {
        &self.device
    }

    pub fn ranges(&self) -> &StageRanges {
        &self.ranges
    }

    fn kernel(&self, stage: StageName, q: QFormat, schedule: Schedule, io: [BufferId; 4]) -> Arc<KernelDef> {
        let g = &self.geometry;
        let name = stage.as_str();
        match stage {
            StageName::ConvPool1 => {
                let l = self.ranges.conv_pool1.local_size();
                stages::conv_pool_kernel(name, g.conv1, g.pool1, [l[0], l[1]], q, schedule, io)
            }
            StageName::Conv2 => stages::conv_kernel(name, g.conv2, q, schedule, io),
            StageName::Pool2 => {
                stages::pool_kernel(name, g.conv2.out_h(), g.conv2.out_w(), g.pool2, q, schedule, [io[0], io[3]])
            }
            StageName::Ip1Relu => stages::fc_kernel(name, g.ip1_in, true, q, schedule, io),
            StageName::Ip2 => stages::fc_kernel(name, g.ip2_in, false, q, schedule, io),
        }
    }

    fn params(stage: StageName) -> Option<(WeightBlock, WeightBlock)> {
        match stage {
            StageName::ConvPool1 => Some((WeightBlock::Conv1W, WeightBlock::Conv1B)),
            StageName::Conv2 => Some((WeightBlock::Conv2W, WeightBlock::Conv2B)),
            StageName::Pool2 => None,
            StageName::Ip1Relu => Some((WeightBlock::Ip1W, WeightBlock::Ip1B)),
            StageName::Ip2 => Some((WeightBlock::Ip2W, WeightBlock::Ip2B)),
        }
    }

    fn quantized_input(&self, stage: StageName, input: &Tensor, q: QFormat) -> Result<Tensor, KernelsError> {
        let (expected, _) = self.spec.stage_io(stage)?;
        if input.len() != expected.elem_count()
            || (input.shape() != &expected && !(stage == StageName::Ip1Relu && input.shape().rank() == 1))
        {
            return Err(KernelsError::InputShape {
                stage: stage.as_str(),
                expected: expected.dims().to_vec(),
                actual: input.shape().clone(),
            });
        }
        Ok(input.quantized(q)?)
    }

    /// Enqueues one stage: parameter uploads, the kernel, and a read-back of
    /// its output. Returns (kernel event, read event).
    fn enqueue_stage(
        &self,
        ctx: &mut Context,
        queue: &mut CommandQueue,
        stage: StageName,
        input: (BufferId, EventId),
        weights: &WeightStore,
        schedule: Schedule,
    ) -> Result<(BufferId, EventId, EventId), KernelsError> {
        let q = weights.qformat().ok_or(KernelsError::NotQuantized)?;
        let width = q.elem_bytes();
        let (_, out_shape) = self.spec.stage_io(stage)?;
        let out = ctx.create_buffer(RegionKind::Global, out_shape.elem_count(), width)?;
        let mut waits = vec![input.1];
        let mut io = [input.0, input.0, input.0, out];
        if let Some((wb, bb)) = Self::params(stage) {
            for (slot, block) in [(1, wb), (2, bb)] {
                let t = weights.get(block);
                let buf = ctx.create_buffer(RegionKind::Constant, t.len(), width)?;
                let data = t.raw().expect("quantized store").to_vec();
                waits.push(queue.enqueue_write(ctx, buf, data, &[])?);
                io[slot] = buf;
            }
        }
        let kernel = self.kernel(stage, q, schedule, io);
        let done = queue.enqueue_kernel(ctx, kernel, self.ranges.get(stage).clone(), &waits)?;
        let read = queue.enqueue_read(ctx, out, &[done])?;
        Ok((out, done, read))
    }

    fn stage_result(
        &self,
        stage: StageName,
        report: &QueueReport,
        done: EventId,
        read: EventId,
        q: QFormat,
    ) -> Result<StageResult, KernelsError> {
        let (_, shape) = self.spec.stage_io(stage)?;
        let raw = report.read_data(read).expect("read enqueued").to_vec();
        let stats = report.entry(done).and_then(|e| e.stats.clone()).expect("kernel traced");
        Ok(StageResult { stage, output: Tensor::from_raw(shape, raw, q)?, stats })
    }

    /// Runs a single stage on its own queue.
    pub fn run_stage(
        &self,
        stage: StageName,
        input: &Tensor,
        weights: &WeightStore,
        schedule: Schedule,
    ) -> Result<StageResult, KernelsError> {
        let q = weights.qformat().ok_or(KernelsError::NotQuantized)?;
        let input = self.quantized_input(stage, input, q)?;
        let mut ctx = Context::new(self.device);
        let mut queue = CommandQueue::new();
        let buf = ctx.create_buffer(RegionKind::Global, input.len(), q.elem_bytes())?;
        let written = queue.enqueue_write(&ctx, buf, input.raw().expect("quantized").to_vec(), &[])?;
        let (_, done, read) = self.enqueue_stage(&mut ctx, &mut queue, stage, (buf, written), weights, schedule)?;
        let report = queue.run(&mut ctx)?;
        self.stage_result(stage, &report, done, read, q)
    }

    pub fn conv_pool1(&self, input: &Tensor, w: &WeightStore, schedule: Schedule) -> Result<StageResult, KernelsError> {
        self.run_stage(StageName::ConvPool1, input, w, schedule)
    }

    pub fn conv2(&self, input: &Tensor, w: &WeightStore, schedule: Schedule) -> Result<StageResult, KernelsError> {
        self.run_stage(StageName::Conv2, input, w, schedule)
    }

    pub fn pool2(&self, input: &Tensor, w: &WeightStore, schedule: Schedule) -> Result<StageResult, KernelsError> {
        self.run_stage(StageName::Pool2, input, w, schedule)
    }

    pub fn ip1_relu(&self, input: &Tensor, w: &WeightStore, schedule: Schedule) -> Result<StageResult, KernelsError> {
        self.run_stage(StageName::Ip1Relu, input, w, schedule)
    }

    pub fn ip2(&self, input: &Tensor, w: &WeightStore, schedule: Schedule) -> Result<StageResult, KernelsError> {
        self.run_stage(StageName::Ip2, input, w, schedule)
    }

    /// Full forward pass: the five stages on one queue, each waiting on the
    /// previous stage's completion event.
    pub fn forward(
        &self,
        image: &Tensor,
        weights: &WeightStore,
        schedule: Schedule,
    ) -> Result<ForwardResult, KernelsError> {
        let q = weights.qformat().ok_or(KernelsError::NotQuantized)?;
        let image = self.quantized_input(StageName::ConvPool1, image, q)?;
        let mut ctx = Context::new(self.device);
        let mut queue = CommandQueue::new();
        let buf = ctx.create_buffer(RegionKind::Global, image.len(), q.elem_bytes())?;
        let mut prev = (buf, queue.enqueue_write(&ctx, buf, image.raw().expect("quantized").to_vec(), &[])?);
        let mut events = Vec::with_capacity(5);
        for stage in StageName::ALL {
            let (out, done, read) = self.enqueue_stage(&mut ctx, &mut queue, stage, prev, weights, schedule)?;
            events.push((done, read));
            prev = (out, done);
        }
        let report = queue.run(&mut ctx)?;
        let stages = StageName::ALL
            .into_iter()
            .zip(events)
            .map(|(stage, (done, read))| self.stage_result(stage, &report, done, read, q))
            .collect::<Result<Vec<_>, _>>()?;
        let logits = stages[4].output.clone();
        let winner = argmax(logits.raw().expect("fixed logits"));
        Ok(ForwardResult { logits, winner, stages, report })
    }
}

impl Default for Pipeline {
    fn default() -> Self {
        Pipeline::new(PoolOp::Max)
    }
}

fn geometry_of(spec: &NetworkSpec) -> Result<Geometry, KernelsError> {
    let shapes = spec.infer_shapes()?;
    let input = spec.input_shape().dims();
    let conv = |layer: &LayerSpec, in_dims: &[usize]| match *layer {
        LayerSpec::Conv { out_maps, kernel, stride } => {
            Some(ConvGeom { in_maps: in_dims[0], in_h: in_dims[1], in_w: in_dims[2], out_maps, kernel, stride })
        }
        _ => None,
    };
    let pool = |layer: &LayerSpec| match *layer {
        LayerSpec::Pool { window, stride, op } => Some(PoolGeom { window, stride, op }),
        _ => None,
    };
    let l = spec.layers();
    let bad = || NetError::Grouping("pipeline expects conv, pool, conv, pool, fc, relu, fc".into());
    Ok(Geometry {
        conv1: conv(&l[0], input).ok_or_else(bad)?,
        pool1: pool(&l[1]).ok_or_else(bad)?,
        conv2: conv(&l[2], shapes[1].dims()).ok_or_else(bad)?,
        pool2: pool(&l[3]).ok_or_else(bad)?,
        ip1_in: shapes[3].elem_count(),
        ip2_in: shapes[5].elem_count(),
    })
}
