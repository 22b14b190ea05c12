//! Kernel bodies of the five pipeline stages.
//!
//! Every dot product accumulates input channel outermost, then kernel row,
//! then kernel column, and narrows exactly once per output element. Unrolling
//! only chunks the innermost loop, so it never changes the summation order.

use std::sync::Arc;

use crate::netdef::PoolOp;
use crate::ocl::{ArgAccess, BufferId, KernelDef, OclError, Schedule, Step, WorkItem};
use crate::tensor::{div_rne, Accumulator, QFormat};

/// Spatial geometry of a convolution stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ConvGeom {
    pub in_maps: usize,
    pub in_h: usize,
    pub in_w: usize,
    pub out_maps: usize,
    pub kernel: usize,
    pub stride: usize,
}

impl ConvGeom {
    pub fn out_h(&self) -> usize {
        (self.in_h - self.kernel) / self.stride + 1
    }

    pub fn out_w(&self) -> usize {
        (self.in_w - self.kernel) / self.stride + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PoolGeom {
    pub window: usize,
    pub stride: usize,
    pub op: PoolOp,
}

impl PoolGeom {
    pub fn out_len(&self, input: usize) -> usize {
        (input - self.window) / self.stride + 1
    }

    fn reduce(&self, values: impl Iterator<Item = i64>, q: QFormat) -> i64 {
        match self.op {
            PoolOp::Max => values.max().expect("non-empty window"),
            PoolOp::Average => {
                let sum: i128 = values.map(i128::from).sum();
                q.saturate(div_rne(sum, (self.window * self.window) as i128))
            }
        }
    }
}

const ARG_IN: usize = 0;
const ARG_W: usize = 1;
const ARG_B: usize = 2;
const ARG_OUT: usize = 3;

/// One convolution output at (`oy`, `ox`) of map `m`, before narrowing.
/// `fetch(c, iy, ix)` supplies the input element.
fn conv_point(
    item: &mut WorkItem<'_>,
    g: &ConvGeom,
    q: QFormat,
    m: usize,
    oy: usize,
    ox: usize,
    mut fetch: impl FnMut(&mut WorkItem<'_>, usize, usize, usize) -> Result<i64, OclError>,
) -> Result<i64, OclError> {
    let k = g.kernel;
    let unroll = item.unroll_factor().max(1);
    let mut acc = Accumulator::new(q);
    for c in 0..g.in_maps {
        for kr in 0..k {
            let iy = oy * g.stride + kr;
            for chunk in (0..k).step_by(unroll) {
                for kc in chunk..(chunk + unroll).min(k) {
                    let x = fetch(item, c, iy, ox * g.stride + kc)?;
                    let w = item.load(ARG_W, ((m * g.in_maps + c) * k + kr) * k + kc)?;
                    item.mac(&mut acc, x, w)?;
                }
            }
        }
    }
    let bias = item.load(ARG_B, m)?;
    acc.add_raw(bias)?;
    Ok(acc.narrow())
}

/// Convolution fused with pooling. Each work-group first copies the input
/// tile it needs into local memory, synchronizes on a barrier, then each
/// work-item computes one pooled output from the tile, keeping the
/// pre-pooling convolution values in private memory.
///
/// Range: (pooled width, pooled height, out maps).
pub(crate) fn conv_pool_kernel(
    name: &str,
    conv: ConvGeom,
    pool: PoolGeom,
    local: [usize; 2],
    q: QFormat,
    schedule: Schedule,
    buffers: [BufferId; 4],
) -> Arc<KernelDef> {
    let span = |l: usize| ((l - 1) * pool.stride + pool.window - 1) * conv.stride + conv.kernel;
    let (tile_w, tile_h) = (span(local[0]), span(local[1]));
    let tile_elems = conv.in_maps * tile_h * tile_w;
    let (ph, pw) = (pool.out_len(conv.out_h()), pool.out_len(conv.out_w()));

    let body = move |item: &mut WorkItem<'_>, phase: usize| -> Result<Step, OclError> {
        let origin_y = item.group_id(1) * local[1] * pool.stride * conv.stride;
        let origin_x = item.group_id(0) * local[0] * pool.stride * conv.stride;
        if phase == 0 {
            for t in (item.local_linear_id()..tile_elems).step_by(item.group_size()) {
                let (c, rest) = (t / (tile_h * tile_w), t % (tile_h * tile_w));
                let (iy, ix) = (origin_y + rest / tile_w, origin_x + rest % tile_w);
                if iy < conv.in_h && ix < conv.in_w {
                    let v = item.load(ARG_IN, (c * conv.in_h + iy) * conv.in_w + ix)?;
                    item.local_store(t, v)?;
                }
            }
            return Ok(Step::Barrier);
        }
        let (px, py, m) = (item.global_id(0), item.global_id(1), item.global_id(2));
        let mut slot = 0;
        for dy in 0..pool.window {
            for dx in 0..pool.window {
                let (oy, ox) = (py * pool.stride + dy, px * pool.stride + dx);
                let v = conv_point(item, &conv, q, m, oy, ox, |it, c, iy, ix| {
                    it.local_load((c * tile_h + iy - origin_y) * tile_w + ix - origin_x)
                })?;
                item.private_store(slot, v)?;
                slot += 1;
            }
        }
        let window: Vec<i64> = (0..slot).map(|s| item.private_load(s)).collect::<Result<_, _>>()?;
        item.store(ARG_OUT, (m * ph + py) * pw + px, pool.reduce(window.into_iter(), q))?;
        Ok(Step::Done)
    };
    Arc::new(
        bind(KernelDef::new(name, body), buffers, q, schedule)
            .local_elems(tile_elems)
            .private_elems(pool.window * pool.window),
    )
}

/// Plain convolution reading its input straight from global memory.
/// Range: (out width, out height, out maps).
pub(crate) fn conv_kernel(
    name: &str,
    conv: ConvGeom,
    q: QFormat,
    schedule: Schedule,
    buffers: [BufferId; 4],
) -> Arc<KernelDef> {
    let (oh, ow) = (conv.out_h(), conv.out_w());
    let body = move |item: &mut WorkItem<'_>, _phase: usize| -> Result<Step, OclError> {
        let (x, y, m) = (item.global_id(0), item.global_id(1), item.global_id(2));
        let v = conv_point(item, &conv, q, m, y, x, |it, c, iy, ix| {
            it.load(ARG_IN, (c * conv.in_h + iy) * conv.in_w + ix)
        })?;
        item.store(ARG_OUT, (m * oh + y) * ow + x, v)?;
        Ok(Step::Done)
    };
    Arc::new(bind(KernelDef::new(name, body), buffers, q, schedule))
}

/// Range: (out width, out height, maps). Buffers: input, output.
pub(crate) fn pool_kernel(
    name: &str,
    in_h: usize,
    in_w: usize,
    pool: PoolGeom,
    q: QFormat,
    schedule: Schedule,
    buffers: [BufferId; 2],
) -> Arc<KernelDef> {
    let (oh, ow) = (pool.out_len(in_h), pool.out_len(in_w));
    let body = move |item: &mut WorkItem<'_>, _phase: usize| -> Result<Step, OclError> {
        let (x, y, c) = (item.global_id(0), item.global_id(1), item.global_id(2));
        let mut window = Vec::with_capacity(pool.window * pool.window);
        for dy in 0..pool.window {
            for dx in 0..pool.window {
                let (iy, ix) = (y * pool.stride + dy, x * pool.stride + dx);
                window.push(item.load(0, (c * in_h + iy) * in_w + ix)?);
            }
        }
        item.store(1, (c * oh + y) * ow + x, pool.reduce(window.into_iter(), q))?;
        Ok(Step::Done)
    };
    Arc::new(
        KernelDef::new(name, body)
            .arg(buffers[0], ArgAccess::Read)
            .arg(buffers[1], ArgAccess::Write)
            .scratch_width(q.elem_bytes())
            .schedule(schedule),
    )
}

/// Fully connected layer, optionally followed by ReLU. Range: (out neurons).
pub(crate) fn fc_kernel(
    name: &str,
    in_len: usize,
    relu: bool,
    q: QFormat,
    schedule: Schedule,
    buffers: [BufferId; 4],
) -> Arc<KernelDef> {
    let body = move |item: &mut WorkItem<'_>, _phase: usize| -> Result<Step, OclError> {
        let n = item.global_id(0);
        let unroll = item.unroll_factor().max(1);
        let mut acc = Accumulator::new(q);
        for chunk in (0..in_len).step_by(unroll) {
            for i in chunk..(chunk + unroll).min(in_len) {
                let x = item.load(ARG_IN, i)?;
                let w = item.load(ARG_W, n * in_len + i)?;
                item.mac(&mut acc, x, w)?;
            }
        }
        let bias = item.load(ARG_B, n)?;
        acc.add_raw(bias)?;
        let mut y = acc.narrow();
        if relu {
            y = y.max(0);
        }
        item.store(ARG_OUT, n, y)?;
        Ok(Step::Done)
    };
    Arc::new(bind(KernelDef::new(name, body), buffers, q, schedule))
}

fn bind(def: KernelDef, b: [BufferId; 4], q: QFormat, schedule: Schedule) -> KernelDef {
    def.arg(b[ARG_IN], ArgAccess::Read)
        .arg(b[ARG_W], ArgAccess::Read)
        .arg(b[ARG_B], ArgAccess::Read)
        .arg(b[ARG_OUT], ArgAccess::Write)
        .scratch_width(q.elem_bytes())
        .schedule(schedule)
}
