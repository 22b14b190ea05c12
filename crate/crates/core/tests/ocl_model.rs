use std::sync::Arc;

use kernelpipe::exec::Executor;
use kernelpipe::ocl::{
    ArgAccess, BufferId, CommandKind, CommandQueue, Context, DeviceConfig, KernelDef, NdRange, OclError, Parallelism,
    RegionKind, Schedule, Step,
};
use proptest::prelude::*;

fn ctx() -> Context {
    Context::new(DeviceConfig { lane_budget: 4096, ..DeviceConfig::default() })
}

/// Each item adds one to the marker slot of its global linear id.
fn marker_kernel(buf: BufferId) -> Arc<KernelDef> {
    Arc::new(
        KernelDef::new("mark", |item, _| {
            let i = item.global_linear_id();
            let v = item.load(0, i)?;
            item.store(0, i, v + 1)?;
            Ok(Step::Done)
        })
        .arg(buf, ArgAccess::ReadWrite),
    )
}

fn run_marker(global: &[usize], local: &[usize], offset: &[usize], executor: Executor) -> Vec<i64> {
    let mut c = Context::new(DeviceConfig { executor, ..DeviceConfig::default() });
    let n: usize = global.iter().product();
    let buf = c.create_buffer(RegionKind::Global, n, 4).unwrap();
    let mut q = CommandQueue::new();
    let k = q.enqueue_kernel(&c, marker_kernel(buf), NdRange::new(global, local, offset).unwrap(), &[]).unwrap();
    let r = q.enqueue_read(&c, buf, &[k]).unwrap();
    q.run(&mut c).unwrap().read_data(r).unwrap().to_vec()
}

#[test]
fn every_index_visited_once() {
    for ex in [Executor::Sequential, Executor::default()] {
        assert!(run_marker(&[24, 24], &[8, 8], &[0, 0], ex).iter().all(|&v| v == 1));
        assert!(run_marker(&[6, 4, 10], &[3, 2, 5], &[1, 2, 3], ex).iter().all(|&v| v == 1));
        assert!(run_marker(&[576], &[576], &[0], ex).iter().all(|&v| v == 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]
    #[test]
    fn coverage_for_any_divisible_range(
        groups in prop::collection::vec(1usize..4, 1..=3),
        locals in prop::collection::vec(1usize..5, 3),
        off in 0usize..3,
    ) {
        let local: Vec<usize> = locals[..groups.len()].to_vec();
        let global: Vec<usize> = groups.iter().zip(&local).map(|(g, l)| g * l).collect();
        let offset = vec![off; global.len()];
        let marks = run_marker(&global, &local, &offset, Executor::default());
        prop_assert!(marks.iter().all(|&v| v == 1));
    }
}

#[test]
fn divisibility_and_extents() {
    assert_eq!(NdRange::with_local(&[24, 24], &[8, 8]).unwrap().group_count(), 9);
    assert!(matches!(NdRange::with_local(&[10], &[4]), Err(OclError::InvalidNdRange(_))));
    assert_eq!(NdRange::with_local(&[576], &[576]).unwrap().group_count(), 1);
    assert!(NdRange::with_local(&[0], &[1]).is_err());
    assert!(NdRange::with_local(&[4, 4], &[2]).is_err());
    assert!(NdRange::with_local(&[1, 1, 1, 1], &[1, 1, 1, 1]).is_err());
}

fn barrier_kernel(buf: BufferId, skip: Option<usize>) -> Arc<KernelDef> {
    Arc::new(
        KernelDef::new("barrier", move |item, phase| {
            let l = item.local_linear_id();
            if phase == 0 {
                item.local_store(l, l as i64 * 10)?;
                return Ok(if Some(l) == skip { Step::Done } else { Step::Barrier });
            }
            // read a neighbour's value, only safe after the barrier
            let n = (l + 1) % item.group_size();
            let v = item.local_load(n)?;
            item.store(0, item.global_linear_id(), v)?;
            Ok(Step::Done)
        })
        .arg(buf, ArgAccess::Write)
        .local_elems(64),
    )
}

#[test]
fn barrier_orders_local_memory() {
    let mut c = ctx();
    let buf = c.create_buffer(RegionKind::Global, 128, 4).unwrap();
    let mut q = CommandQueue::new();
    let k = q.enqueue_kernel(&c, barrier_kernel(buf, None), NdRange::with_local(&[128], &[64]).unwrap(), &[]).unwrap();
    let r = q.enqueue_read(&c, buf, &[k]).unwrap();
    let report = q.run(&mut c).unwrap();
    let out = report.read_data(r).unwrap();
    for (g, &v) in out.iter().enumerate() {
        assert_eq!(v, ((g % 64 + 1) % 64) as i64 * 10);
    }
    assert_eq!(report.entry(k).unwrap().stats.as_ref().unwrap().phases, 2);
}

#[test]
fn partial_barrier_diverges() {
    let mut c = ctx();
    let buf = c.create_buffer(RegionKind::Global, 64, 4).unwrap();
    let mut q = CommandQueue::new();
    q.enqueue_kernel(&c, barrier_kernel(buf, Some(17)), NdRange::with_local(&[64], &[64]).unwrap(), &[]).unwrap();
    let err = q.run(&mut c).unwrap_err();
    assert!(matches!(err.root(), OclError::BarrierDivergence { arrived: 63, size: 64, .. }), "{err}");
}

#[test]
fn private_memory_of_another_item_is_a_violation() {
    let mut c = ctx();
    let buf = c.create_buffer(RegionKind::Global, 8, 4).unwrap();
    let k = KernelDef::new("peek", |item, _| {
        item.private_store(0, 1)?;
        if item.local_linear_id() == 3 {
            item.private_load_of(7, 0)?;
        }
        Ok(Step::Done)
    })
    .arg(buf, ArgAccess::Write)
    .private_elems(1);
    let mut q = CommandQueue::new();
    q.enqueue_kernel(&c, Arc::new(k), NdRange::with_local(&[8], &[8]).unwrap(), &[]).unwrap();
    let err = q.run(&mut c).unwrap_err();
    assert!(matches!(err.root(), OclError::Violation(v) if v.region == RegionKind::Private), "{err}");
}

#[test]
fn constant_memory_rules() {
    let mut c = ctx();
    let konst = c.create_buffer(RegionKind::Constant, 4, 2).unwrap();
    let out = c.create_buffer(RegionKind::Global, 4, 2).unwrap();
    let copy = Arc::new(
        KernelDef::new("copy", |item, _| {
            let i = item.global_linear_id();
            let v = item.load(0, i)?;
            item.store(1, i, v)?;
            Ok(Step::Done)
        })
        .arg(konst, ArgAccess::Read)
        .arg(out, ArgAccess::Write),
    );
    let mut q = CommandQueue::new();
    let w = q.enqueue_write(&c, konst, vec![1, -2, 3, -4], &[]).unwrap();
    let k = q.enqueue_kernel(&c, copy, NdRange::with_local(&[4], &[2]).unwrap(), &[w]).unwrap();
    let r = q.enqueue_read(&c, out, &[k]).unwrap();
    assert_eq!(q.run(&mut c).unwrap().read_data(r).unwrap(), &[1, -2, 3, -4]);

    // sealed by the launch
    let err = c.host_write(konst, &[0; 4]).unwrap_err();
    assert!(matches!(err, OclError::Violation(v) if v.region == RegionKind::Constant));

    // items may never write constant memory
    let writer = Arc::new(KernelDef::new("w", |_, _| Ok(Step::Done)).arg(konst, ArgAccess::Write));
    let mut q = CommandQueue::new();
    assert!(q.enqueue_kernel(&c, writer, NdRange::with_local(&[4], &[4]).unwrap(), &[]).is_err());
}

#[test]
fn host_cannot_touch_local_memory() {
    let mut c = ctx();
    assert!(c.create_buffer(RegionKind::Local, 4, 2).is_err());
    assert!(c.create_buffer(RegionKind::Private, 4, 2).is_err());
}

#[test]
fn cross_group_writes_conflict_in_debug_mode() {
    let mut c = ctx();
    let buf = c.create_buffer(RegionKind::Global, 1, 4).unwrap();
    let k = Arc::new(
        KernelDef::new("race", |item, _| {
            item.store(0, 0, item.group_linear_id() as i64)?;
            Ok(Step::Done)
        })
        .arg(buf, ArgAccess::Write),
    );
    let mut q = CommandQueue::new();
    q.enqueue_kernel(&c, k, NdRange::with_local(&[4], &[1]).unwrap(), &[]).unwrap();
    assert!(matches!(q.run(&mut c), Err(OclError::WriteConflict { .. })));
}

#[test]
fn queue_order_events_and_deadlock() {
    let mut c = ctx();
    let buf = c.create_buffer(RegionKind::Global, 16, 4).unwrap();
    let nd = NdRange::with_local(&[16], &[4]).unwrap();

    // independent kernels run in enqueue order
    let mut q = CommandQueue::new();
    let names = ["a", "b", "c"];
    for n in names {
        let k = KernelDef::new(n, |_, _| Ok(Step::Done)).arg(buf, ArgAccess::Read);
        q.enqueue_kernel(&c, Arc::new(k), nd.clone(), &[]).unwrap();
    }
    let b = q.enqueue_barrier(&c).unwrap();
    let report = q.run(&mut c).unwrap();
    assert_eq!(report.kernel_order(), names);
    assert_eq!(report.entry(b).unwrap().waits.len(), 3);
    for t in &report.trace {
        for w in &t.waits {
            assert!(report.entry(*w).unwrap().end < t.start);
        }
    }

    // A waits on B, B waits on A
    let mut q = CommandQueue::new();
    let ev_b = q.create_event();
    let k = |n| Arc::new(KernelDef::new(n, |_, _| Ok(Step::Done)).arg(buf, ArgAccess::Read));
    let ev_a = q.enqueue_kernel(&c, k("A"), nd.clone(), &[ev_b]).unwrap();
    q.enqueue_signaling(&c, "B", kernelpipe::ocl::Command::Kernel { kernel: k("B"), range: nd.clone() }, &[ev_a], ev_b)
        .unwrap();
    assert!(matches!(q.run(&mut c), Err(OclError::Deadlock { cycle: true, .. })));

    // an event from another queue is dangling
    let mut other = CommandQueue::new();
    let foreign = other.enqueue_barrier(&c).unwrap();
    let mut q = CommandQueue::new();
    assert!(matches!(q.enqueue_kernel(&c, k("x"), nd.clone(), &[foreign]), Err(OclError::DanglingEvent)));

    // empty queue
    assert!(matches!(CommandQueue::new().run(&mut c), Err(OclError::EmptyQueue)));
}

#[test]
fn access_counts_match_brute_force() {
    let mut c = ctx();
    let a = c.create_buffer(RegionKind::Global, 32, 2).unwrap();
    let out = c.create_buffer(RegionKind::Global, 16, 4).unwrap();
    // each item sums a[i] and a[i + 16]: 2 loads of 2 bytes, 1 store of 4 bytes
    let k = Arc::new(
        KernelDef::new("sum", |item, _| {
            let i = item.global_linear_id();
            let v = item.load(0, i)? + item.load(0, i + 16)?;
            item.store(1, i, v)?;
            Ok(Step::Done)
        })
        .arg(a, ArgAccess::Read)
        .arg(out, ArgAccess::Write),
    );
    let mut q = CommandQueue::new();
    let w = q.enqueue_write(&c, a, (0..32).collect(), &[]).unwrap();
    let ev = q.enqueue_kernel(&c, k, NdRange::with_local(&[16], &[4]).unwrap(), &[w]).unwrap();
    let report = q.run(&mut c).unwrap();
    let s = report.entry(ev).unwrap().stats.clone().unwrap();
    assert_eq!((s.global_loads, s.bytes_read, s.global_stores, s.bytes_written), (32, 64, 16, 64));
    assert_eq!((s.unique_bytes_read, s.unique_bytes_written), (64, 64));
    assert_eq!(report.entry(w).unwrap().transfer_bytes, 64);
    assert_eq!(report.entry(w).unwrap().kind, CommandKind::Write);
}

#[test]
fn schedules_change_cost_not_values() {
    let mut outputs = Vec::new();
    for p in [Parallelism::None, Parallelism::Unroll(4), Parallelism::Simd(8)] {
        for cu in [1, 2, 4] {
            let mut c = ctx();
            let buf = c.create_buffer(RegionKind::Global, 64, 4).unwrap();
            let mut q = CommandQueue::new();
            let def = KernelDef::new("mark", |item, _| {
                let i = item.global_linear_id();
                item.store(0, i, (i * i) as i64)?;
                Ok(Step::Done)
            })
            .arg(buf, ArgAccess::Write)
            .schedule(Schedule::new(p, cu));
            let k = q.enqueue_kernel(&c, Arc::new(def), NdRange::with_local(&[64], &[16]).unwrap(), &[]).unwrap();
            let r = q.enqueue_read(&c, buf, &[k]).unwrap();
            let report = q.run(&mut c).unwrap();
            let stats = report.entry(k).unwrap().stats.clone().unwrap();
            assert_eq!(stats.groups_per_cu.len(), cu as usize);
            assert_eq!(stats.groups_per_cu.iter().sum::<usize>(), 4);
            outputs.push(report.read_data(r).unwrap().to_vec());
        }
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn lane_budget_is_enforced() {
    let mut c = Context::new(DeviceConfig { lane_budget: 8, ..DeviceConfig::default() });
    let buf = c.create_buffer(RegionKind::Global, 4, 4).unwrap();
    let def = KernelDef::new("k", |_, _| Ok(Step::Done))
        .arg(buf, ArgAccess::Read)
        .schedule(Schedule::new(Parallelism::Simd(4), 4));
    let mut q = CommandQueue::new();
    let err = q.enqueue_kernel(&c, Arc::new(def), NdRange::with_local(&[4], &[4]).unwrap(), &[]).unwrap_err();
    assert!(matches!(err, OclError::LaneBudget { requested: 16, budget: 8 }));
    let _ = &mut c;
}
