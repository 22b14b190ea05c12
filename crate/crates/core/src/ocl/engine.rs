//! Device context, kernel definitions and work-group execution.
//!
//! Work-groups of one launch may run concurrently. Inside a group the body is
//! called once per work-item and phase, in linear local-id order; a phase ends
//! when every item has returned, and items move to the next phase only if all
//! of them returned [`Step::Barrier`].
//!
//! Global-memory stores are buffered per group and committed when the launch
//! completes, so work-items always read the state the kernel started with.
//! Two groups storing to the same element is reported as a conflict in debug
//! mode.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use super::memory::{check_region_access, AccessKind, Accessor, MemRegion, RegionKind, Scope, TouchSet};
use super::{NdRange, OclError, Parallelism, Schedule};
use crate::exec::Executor;
use crate::tensor::Accumulator;

/// Upper bound on barrier-separated phases per work-group.
pub const MAX_PHASES: usize = 1024;

static NEXT_CONTEXT: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeviceConfig {
    /// Maximum `lanes * compute_units` a kernel may request.
    pub lane_budget: u64,
    /// Enables memory-visibility checks and cross-group write-conflict detection.
    pub debug: bool,
    pub executor: Executor,
}

impl Default for DeviceConfig {
    fn default() -> Self {
        DeviceConfig { lane_budget: 64, debug: true, executor: Executor::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BufferId {
    context: u64,
    index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgAccess {
    Read,
    Write,
    ReadWrite,
}

impl ArgAccess {
    fn reads(self) -> bool {
        matches!(self, ArgAccess::Read | ArgAccess::ReadWrite)
    }

    fn writes(self) -> bool {
        matches!(self, ArgAccess::Write | ArgAccess::ReadWrite)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArgBinding {
    pub buffer: BufferId,
    pub access: ArgAccess,
}

/// What a work-item does at the end of a phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Barrier,
    Done,
}

pub type KernelFn = dyn Fn(&mut WorkItem<'_>, usize) -> Result<Step, OclError> + Send + Sync;

/// A host-registered kernel: body, buffer bindings, scratch sizes and schedule.
#[derive(Clone)]
pub struct KernelDef {
    name: String,
    args: Vec<ArgBinding>,
    local_elems: usize,
    private_elems: usize,
    scratch_bytes: usize,
    schedule: Schedule,
    body: Arc<KernelFn>,
}

impl fmt::Debug for KernelDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelDef")
            .field("name", &self.name)
            .field("args", &self.args)
            .field("local_elems", &self.local_elems)
            .field("private_elems", &self.private_elems)
            .field("schedule", &self.schedule)
            .finish_non_exhaustive()
    }
}

impl KernelDef {
    pub fn new<F>(name: impl Into<String>, body: F) -> Self
    where
        F: Fn(&mut WorkItem<'_>, usize) -> Result<Step, OclError> + Send + Sync + 'static,
    {
        KernelDef {
            name: name.into(),
            args: Vec::new(),
            local_elems: 0,
            private_elems: 0,
            scratch_bytes: 8,
            schedule: Schedule::SERIAL,
            body: Arc::new(body),
        }
    }

    pub fn arg(mut self, buffer: BufferId, access: ArgAccess) -> Self {
        self.args.push(ArgBinding { buffer, access });
        self
    }

    /// Element width used for local and private scratch memory.
    pub fn scratch_width(mut self, bytes: usize) -> Self {
        self.scratch_bytes = bytes;
        self
    }

    pub fn local_elems(mut self, elems: usize) -> Self {
        self.local_elems = elems;
        self
    }

    pub fn private_elems(mut self, elems: usize) -> Self {
        self.private_elems = elems;
        self
    }

    pub fn schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn args(&self) -> &[ArgBinding] {
        &self.args
    }

    pub fn get_schedule(&self) -> Schedule {
        self.schedule
    }
}

/// Barrier bookkeeping for one work-group and one program point.
#[derive(Debug, Clone)]
pub struct GroupBarrier {
    group: usize,
    arrived: Vec<bool>,
    count: usize,
}

impl GroupBarrier {
    pub fn new(group: usize, size: usize) -> Self {
        GroupBarrier { group, arrived: vec![false; size], count: 0 }
    }

    pub fn arrive(&mut self, local_id: usize) -> Result<(), OclError> {
        match self.arrived.get_mut(local_id) {
            Some(slot) if !*slot => {
                *slot = true;
                self.count += 1;
                Ok(())
            }
            Some(_) => Err(OclError::BarrierDivergence {
                group: self.group,
                arrived: self.count,
                size: self.arrived.len(),
                detail: format!("work-item {local_id} arrived twice"),
            }),
            None => Err(OclError::OutOfBounds { region: "group".into(), index: local_id, len: self.arrived.len() }),
        }
    }

    pub fn arrived(&self) -> usize {
        self.count
    }

    /// Succeeds only when every work-item of the group has arrived.
    pub fn release(&self) -> Result<(), OclError> {
        if self.count == self.arrived.len() {
            return Ok(());
        }
        let missing = self.arrived.iter().position(|a| !a).unwrap_or(0);
        Err(OclError::BarrierDivergence {
            group: self.group,
            arrived: self.count,
            size: self.arrived.len(),
            detail: format!("work-item {missing} never reached the barrier"),
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counters {
    macs: u64,
    global_loads: u64,
    global_stores: u64,
    bytes_read: u64,
    bytes_written: u64,
    local_accesses: u64,
    private_accesses: u64,
}

impl Counters {
    fn add(&mut self, o: &Counters) {
        self.macs += o.macs;
        self.global_loads += o.global_loads;
        self.global_stores += o.global_stores;
        self.bytes_read += o.bytes_read;
        self.bytes_written += o.bytes_written;
        self.local_accesses += o.local_accesses;
        self.private_accesses += o.private_accesses;
    }
}

/// Execution and global-memory access statistics of one kernel launch.
///
/// `bytes_read` / `bytes_written` count every load and store; the `unique_`
/// variants count each distinct element once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelStats {
    pub kernel: String,
    pub schedule: Schedule,
    pub groups: usize,
    pub items: usize,
    pub phases: usize,
    pub simd_issues: u64,
    pub groups_per_cu: Vec<usize>,
    pub macs: u64,
    pub global_loads: u64,
    pub global_stores: u64,
    pub bytes_read: u64,
    pub bytes_written: u64,
    pub unique_bytes_read: u64,
    pub unique_bytes_written: u64,
    pub local_accesses: u64,
    pub private_accesses: u64,
}

struct ArgView<'a> {
    region: &'a MemRegion,
    access: ArgAccess,
    reads: TouchSet,
}

#[derive(Debug, Clone, Copy)]
struct PendingWrite {
    arg: usize,
    index: usize,
    value: i64,
}

#[derive(Default)]
struct GroupOutcome {
    writes: Vec<PendingWrite>,
    counters: Counters,
    phases: usize,
    simd_issues: u64,
}

/// The view a kernel body gets of one work-item.
pub struct WorkItem<'a> {
    nd: &'a NdRange,
    group: [usize; 3],
    local: [usize; 3],
    global: [usize; 3],
    group_linear: usize,
    local_linear: usize,
    item_linear: usize,
    args: &'a [ArgView<'a>],
    local_mem: &'a mut MemRegion,
    privates: &'a mut [MemRegion],
    writes: &'a mut Vec<PendingWrite>,
    counters: &'a mut Counters,
    debug: bool,
    unroll: usize,
}

impl WorkItem<'_> {
    pub fn global_id(&self, dim: usize) -> usize {
        self.global[dim]
    }

    pub fn local_id(&self, dim: usize) -> usize {
        self.local[dim]
    }

    pub fn group_id(&self, dim: usize) -> usize {
        self.group[dim]
    }

    pub fn global_size(&self, dim: usize) -> usize {
        self.nd.global_size().get(dim).copied().unwrap_or(1)
    }

    pub fn local_size(&self, dim: usize) -> usize {
        self.nd.local_size().get(dim).copied().unwrap_or(1)
    }

    pub fn global_offset(&self, dim: usize) -> usize {
        self.nd.offset().get(dim).copied().unwrap_or(0)
    }

    /// Linear global index with the offset removed.
    pub fn global_linear_id(&self) -> usize {
        self.item_linear
    }

    pub fn local_linear_id(&self) -> usize {
        self.local_linear
    }

    pub fn group_linear_id(&self) -> usize {
        self.group_linear
    }

    pub fn group_size(&self) -> usize {
        self.nd.group_size()
    }

    /// Chunk size inner loops should use; 1 unless the kernel is unrolled.
    pub fn unroll_factor(&self) -> usize {
        self.unroll
    }

    fn accessor(&self) -> Accessor {
        Accessor::Item { item: self.item_linear, group: self.group_linear }
    }

    fn check(&self, region: &MemRegion, kind: AccessKind) -> Result<(), OclError> {
        if self.debug {
            check_region_access(region, self.accessor(), kind)?;
        }
        Ok(())
    }

    fn view(&self, arg: usize) -> Result<&ArgView<'_>, OclError> {
        self.args.get(arg).ok_or(OclError::ArgAccess { arg, reason: "no such kernel argument" })
    }

    #[inline]
    pub fn load(&mut self, arg: usize, index: usize) -> Result<i64, OclError> {
        let view = self.view(arg)?;
        self.check(view.region, AccessKind::Read)?;
        if !view.access.reads() {
            return Err(OclError::ArgAccess { arg, reason: "argument is write-only" });
        }
        let store = view.region.store();
        let Some(value) = store.load(index) else {
            return Err(out_of_bounds(arg, index, store.len()));
        };
        view.reads.mark(index);
        let width = store.elem_bytes() as u64;
        self.counters.global_loads += 1;
        self.counters.bytes_read += width;
        Ok(value)
    }

    #[inline]
    pub fn store(&mut self, arg: usize, index: usize, value: i64) -> Result<(), OclError> {
        let view = self.view(arg)?;
        self.check(view.region, AccessKind::Write)?;
        if !view.access.writes() {
            return Err(OclError::ArgAccess { arg, reason: "argument is read-only" });
        }
        let store = view.region.store();
        if index >= store.len() {
            return Err(out_of_bounds(arg, index, store.len()));
        }
        if !store.fits(value) {
            return Err(OclError::ValueDoesNotFit { value, width: store.elem_bytes() });
        }
        let width = store.elem_bytes() as u64;
        self.writes.push(PendingWrite { arg, index, value });
        self.counters.global_stores += 1;
        self.counters.bytes_written += width;
        Ok(())
    }

    pub fn local_load(&mut self, index: usize) -> Result<i64, OclError> {
        self.check(self.local_mem, AccessKind::Read)?;
        self.counters.local_accesses += 1;
        scratch_load(self.local_mem, "local", index)
    }

    pub fn local_store(&mut self, index: usize, value: i64) -> Result<(), OclError> {
        self.check(self.local_mem, AccessKind::Write)?;
        self.counters.local_accesses += 1;
        scratch_store(self.local_mem, "local", index, value)
    }

    pub fn private_load(&mut self, index: usize) -> Result<i64, OclError> {
        self.private_load_of(self.local_linear, index)
    }

    pub fn private_store(&mut self, index: usize, value: i64) -> Result<(), OclError> {
        let region = &self.privates[self.local_linear];
        self.check(region, AccessKind::Write)?;
        self.counters.private_accesses += 1;
        scratch_store(&mut self.privates[self.local_linear], "private", index, value)
    }

    /// Reads another work-item's private memory. Only legal for the item
    /// itself; in debug mode anything else is an access violation.
    pub fn private_load_of(&mut self, local_linear: usize, index: usize) -> Result<i64, OclError> {
        let region = self.privates.get(local_linear).ok_or(OclError::OutOfBounds {
            region: "work-group".into(),
            index: local_linear,
            len: self.privates.len(),
        })?;
        self.check(region, AccessKind::Read)?;
        self.counters.private_accesses += 1;
        scratch_load(region, "private", index)
    }

    /// `acc += a * b`, counted as one MAC.
    #[inline]
    pub fn mac(&mut self, acc: &mut Accumulator, a: i64, b: i64) -> Result<(), OclError> {
        self.counters.macs += 1;
        acc.mac(a, b)?;
        Ok(())
    }
}

#[cold]
fn out_of_bounds(arg: usize, index: usize, len: usize) -> OclError {
    OclError::OutOfBounds { region: format!("arg {arg}"), index, len }
}

fn scratch_load(region: &MemRegion, name: &str, index: usize) -> Result<i64, OclError> {
    let store = region.store();
    store.load(index).ok_or(OclError::OutOfBounds { region: name.into(), index, len: store.len() })
}

fn scratch_store(region: &mut MemRegion, name: &str, index: usize, value: i64) -> Result<(), OclError> {
    let store = region.store_mut();
    if !store.fits(value) {
        return Err(OclError::ValueDoesNotFit { value, width: store.elem_bytes() });
    }
    let len = store.len();
    if store.store(index, value) {
        Ok(())
    } else {
        Err(OclError::OutOfBounds { region: name.into(), index, len })
    }
}

/// Buffers and device configuration shared by the command queues of one device.
#[derive(Debug)]
pub struct Context {
    id: u64,
    config: DeviceConfig,
    buffers: Vec<MemRegion>,
}

impl Context {
    pub fn new(config: DeviceConfig) -> Self {
        Context { id: NEXT_CONTEXT.fetch_add(1, Ordering::Relaxed), config, buffers: Vec::new() }
    }

    pub fn config(&self) -> &DeviceConfig {
        &self.config
    }

    pub fn create_buffer(&mut self, kind: RegionKind, elems: usize, elem_bytes: usize) -> Result<BufferId, OclError> {
        if !matches!(kind, RegionKind::Global | RegionKind::Constant) {
            return Err(OclError::InvalidBuffer(format!("host buffers must be global or constant, not {kind}")));
        }
        if !(1..=8).contains(&elem_bytes) {
            return Err(OclError::InvalidBuffer(format!("element width {elem_bytes} not in 1..=8")));
        }
        self.buffers.push(MemRegion::new(kind, Scope::Device, elems, elem_bytes));
        Ok(BufferId { context: self.id, index: self.buffers.len() - 1 })
    }

    pub fn buffer(&self, id: BufferId) -> Result<&MemRegion, OclError> {
        if id.context != self.id {
            return Err(OclError::UnknownBuffer);
        }
        self.buffers.get(id.index).ok_or(OclError::UnknownBuffer)
    }

    fn buffer_mut(&mut self, id: BufferId) -> Result<&mut MemRegion, OclError> {
        if id.context != self.id {
            return Err(OclError::UnknownBuffer);
        }
        self.buffers.get_mut(id.index).ok_or(OclError::UnknownBuffer)
    }

    /// Host-to-device copy. Returns the number of bytes moved.
    pub fn host_write(&mut self, id: BufferId, values: &[i64]) -> Result<u64, OclError> {
        let region = self.buffer_mut(id)?;
        check_region_access(region, Accessor::Host, AccessKind::Write)?;
        let store = region.store_mut();
        if values.len() != store.len() {
            return Err(OclError::InvalidBuffer(format!(
                "host write of {} elements into a buffer of {}",
                values.len(),
                store.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !store.fits(v) {
                return Err(OclError::ValueDoesNotFit { value: v, width: store.elem_bytes() });
            }
            store.store(i, v);
        }
        Ok(store.byte_len() as u64)
    }

    pub fn host_read(&self, id: BufferId) -> Result<Vec<i64>, OclError> {
        let store = self.buffer(id)?.store();
        Ok((0..store.len()).map(|i| store.load(i).expect("in bounds")).collect())
    }

    pub(crate) fn validate_kernel(&self, def: &KernelDef) -> Result<(), OclError> {
        let schedule = def.schedule;
        if schedule.lanes() == 0 || schedule.compute_units == 0 {
            return Err(OclError::InvalidSchedule(format!("{schedule}: lanes and compute units must be at least 1")));
        }
        if schedule.total_lanes() > self.config.lane_budget {
            return Err(OclError::LaneBudget { requested: schedule.total_lanes(), budget: self.config.lane_budget });
        }
        for binding in &def.args {
            let region = self.buffer(binding.buffer)?;
            if region.kind() == RegionKind::Constant && binding.access.writes() {
                return Err(OclError::Violation(crate::ocl::AccessViolation {
                    region: RegionKind::Constant,
                    owner: Scope::Device,
                    accessor: Accessor::Item { item: 0, group: 0 },
                    kind: AccessKind::Write,
                    rule: "work-items cannot write constant memory",
                }));
            }
        }
        Ok(())
    }

    pub(crate) fn launch(&mut self, def: &KernelDef, nd: &NdRange) -> Result<KernelStats, OclError> {
        self.validate_kernel(def)?;
        for binding in &def.args {
            let region = self.buffer_mut(binding.buffer)?;
            if region.kind() == RegionKind::Constant {
                region.seal();
            }
        }
        let debug = self.config.debug;
        let views: Vec<ArgView<'_>> = def
            .args
            .iter()
            .map(|b| {
                let region = &self.buffers[b.buffer.index];
                ArgView { region, access: b.access, reads: TouchSet::new(region.store().len()) }
            })
            .collect();

        let groups = nd.group_count();
        let outcomes = self.config.executor.try_map(groups, |g| run_group(def, nd, g, &views, debug))?;

        let unique_read: Vec<u64> =
            views.iter().map(|v| v.reads.count() as u64 * v.region.store().elem_bytes() as u64).collect();
        drop(views);

        let mut counters = Counters::default();
        let mut phases = 0;
        let mut simd_issues = 0;
        for o in &outcomes {
            counters.add(&o.counters);
            phases = phases.max(o.phases);
            simd_issues += o.simd_issues;
        }

        // writer group per element, per written argument
        let mut writers: Vec<Option<Vec<u32>>> = def
            .args
            .iter()
            .map(|b| b.access.writes().then(|| vec![u32::MAX; self.buffers[b.buffer.index].store().len()]))
            .collect();
        for (g, outcome) in outcomes.iter().enumerate() {
            for w in &outcome.writes {
                let owner = &mut writers[w.arg].as_mut().expect("checked at store")[w.index];
                if debug && *owner != u32::MAX && *owner != g as u32 {
                    return Err(OclError::WriteConflict { kernel: def.name.clone(), arg: w.arg, index: w.index });
                }
                *owner = g as u32;
                let buffer = def.args[w.arg].buffer;
                self.buffers[buffer.index].store_mut().store(w.index, w.value);
            }
        }
        let unique_bytes_written = writers
            .iter()
            .zip(&def.args)
            .filter_map(|(w, b)| w.as_ref().map(|w| (w, b)))
            .map(|(w, b)| {
                let width = self.buffers[b.buffer.index].store().elem_bytes() as u64;
                w.iter().filter(|&&o| o != u32::MAX).count() as u64 * width
            })
            .sum();

        let cu = def.schedule.compute_units as usize;
        let mut groups_per_cu = vec![0; cu];
        for g in 0..groups {
            groups_per_cu[g % cu] += 1;
        }

        Ok(KernelStats {
            kernel: def.name.clone(),
            schedule: def.schedule,
            groups,
            items: nd.item_count(),
            phases,
            simd_issues,
            groups_per_cu,
            macs: counters.macs,
            global_loads: counters.global_loads,
            global_stores: counters.global_stores,
            bytes_read: counters.bytes_read,
            bytes_written: counters.bytes_written,
            unique_bytes_read: unique_read.iter().sum(),
            unique_bytes_written,
            local_accesses: counters.local_accesses,
            private_accesses: counters.private_accesses,
        })
    }
}

fn run_group(
    def: &KernelDef,
    nd: &NdRange,
    g: usize,
    views: &[ArgView<'_>],
    debug: bool,
) -> Result<GroupOutcome, OclError> {
    let group = nd.group_coords(g);
    let size = nd.group_size();
    let mut local_mem = MemRegion::new(RegionKind::Local, Scope::Group(g), def.local_elems, def.scratch_bytes);
    let locals: Vec<[usize; 3]> = (0..size).map(|l| nd.local_coords(l)).collect();
    let mut privates: Vec<MemRegion> = locals
        .iter()
        .map(|&l| {
            let item = nd.global_linear(nd.global_id(group, l));
            MemRegion::new(RegionKind::Private, Scope::Item(item), def.private_elems, def.scratch_bytes)
        })
        .collect();
    let (simd_width, unroll) = match def.schedule.parallelism {
        Parallelism::Simd(w) => (w as usize, 1),
        Parallelism::Unroll(f) => (1, f as usize),
        Parallelism::None => (1, 1),
    };

    let mut out = GroupOutcome::default();
    for phase in 0..MAX_PHASES {
        let mut barrier = GroupBarrier::new(g, size);
        // SIMD lanes issue consecutive work-items together; the canonical
        // item order inside a vector keeps results identical to scalar mode.
        for lane_base in (0..size).step_by(simd_width) {
            for (l, &local) in locals.iter().enumerate().skip(lane_base).take(simd_width) {
                let global = nd.global_id(group, local);
                let mut item = WorkItem {
                    nd,
                    group,
                    local,
                    global,
                    group_linear: g,
                    local_linear: l,
                    item_linear: nd.global_linear(global),
                    args: views,
                    local_mem: &mut local_mem,
                    privates: &mut privates,
                    writes: &mut out.writes,
                    counters: &mut out.counters,
                    debug,
                    unroll,
                };
                let step = (def.body)(&mut item, phase).map_err(|e| OclError::Kernel {
                    kernel: def.name.clone(),
                    group: g,
                    item: l,
                    source: Box::new(e),
                })?;
                if step == Step::Barrier {
                    barrier.arrive(l)?;
                }
            }
            out.simd_issues += 1;
        }
        out.phases = phase + 1;
        if barrier.arrived() == 0 {
            return Ok(out);
        }
        barrier.release().map_err(|e| OclError::Kernel {
            kernel: def.name.clone(),
            group: g,
            item: 0,
            source: Box::new(e),
        })?;
    }
    Err(OclError::PhaseLimit { kernel: def.name.clone(), limit: MAX_PHASES })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barrier_full_group_proceeds() {
        let mut b = GroupBarrier::new(0, 64);
        for i in 0..64 {
            b.arrive(i).unwrap();
        }
        assert!(b.release().is_ok());
    }

    #[test]
    fn barrier_partial_group_diverges() {
        let mut b = GroupBarrier::new(3, 64);
        for i in 0..63 {
            b.arrive(i).unwrap();
        }
        let err = b.release().unwrap_err();
        assert!(matches!(err, OclError::BarrierDivergence { group: 3, arrived: 63, size: 64, .. }), "{err}");
    }

    #[test]
    fn barrier_single_item_is_noop() {
        let mut b = GroupBarrier::new(0, 1);
        b.arrive(0).unwrap();
        assert!(b.release().is_ok());
    }

    #[test]
    fn barrier_double_arrival() {
        let mut b = GroupBarrier::new(0, 2);
        b.arrive(1).unwrap();
        assert!(b.arrive(1).is_err());
    }

    #[test]
    fn foreign_buffer_rejected() {
        let mut a = Context::new(DeviceConfig::default());
        let b = Context::new(DeviceConfig::default());
        let id = a.create_buffer(RegionKind::Global, 4, 2).unwrap();
        assert!(a.buffer(id).is_ok());
        assert!(matches!(b.buffer(id), Err(OclError::UnknownBuffer)));
        assert!(a.create_buffer(RegionKind::Local, 4, 2).is_err());
    }

    #[test]
    fn host_write_checks() {
        let mut ctx = Context::new(DeviceConfig::default());
        let id = ctx.create_buffer(RegionKind::Global, 2, 1).unwrap();
        assert!(ctx.host_write(id, &[1, 2, 3]).is_err());
        assert!(ctx.host_write(id, &[1, 300]).is_err());
        assert_eq!(ctx.host_write(id, &[-5, 100]).unwrap(), 2);
        assert_eq!(ctx.host_read(id).unwrap(), [-5, 100]);
    }
}
