use kernelpipe::io::parse_bench_csv;
use kernelpipe::netdef::{lenet5_spec, StageName};
use kernelpipe::ocl::{ModeKind, Parallelism, Schedule};
use kernelpipe::perf::{
    accel_table, default_coeffs, estimate_time, find_platform, kernel_footprint, model_bench, pipes_feasible,
    pipes_required, platform_catalog, render_report, service_time_ms, simulate_stream, BenchModes, PerfConfig, Verdict,
    ALTERA, XILINX,
};
use kernelpipe::tensor::QFormat;

const TABLE3: &str = include_str!("../../../fixtures/measured_bench.csv");
const EXAMPLE_CONF: &str = include_str!("../../../fixtures/platforms.example.toml");

#[test]
fn measured_bench_gives_the_reference_percentages() {
    let records = parse_bench_csv("measured_bench.csv", TABLE3).unwrap();
    let (x, a): (Vec<_>, Vec<_>) = records.into_iter().partition(|r| r.platform == XILINX);
    let accel = accel_table(&x, &a).unwrap();
    let percents: Vec<[i64; 3]> = accel.iter().map(|r| r.percents).collect();
    assert_eq!(percents, [[259, 94, 100], [92, 24, 15], [-166, -16, -116], [-83, -229, -267], [133, 150, 169]]);
    let report = render_report(&x.iter().chain(&a).cloned().collect::<Vec<_>>(), Some(&accel)).unwrap();
    assert!(report.contains(XILINX) && report.contains(ALTERA) && report.contains("-166"));
}

#[test]
fn pipes_do_not_fit_on_either_board() {
    let n = pipes_required(20, 50);
    assert_eq!(n, 1000);
    for p in platform_catalog() {
        for kb in [53.0, 72.0, 144.0] {
            assert!(!pipes_feasible(n, kb, &p).feasible, "{} at {kb}", p.name);
        }
    }
}

#[test]
fn roofline_saturates_and_cu_never_beats_simd_when_memory_bound() {
    let spec = lenet5_spec();
    for p in platform_catalog() {
        for stage in StageName::ALL {
            let fp = kernel_footprint(&spec, stage, QFormat::Q16_8).unwrap();
            let times: Vec<f64> = (0..=12)
                .map(|k| estimate_time(&fp, &p, Schedule::new(Parallelism::Simd(1 << k), 1)).unwrap())
                .collect();
            assert!(times.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(times[11], times[12], "{stage} on {}", p.name);
            for lanes in [2u32, 4, 8, 16] {
                let simd = estimate_time(&fp, &p, Schedule::new(Parallelism::Simd(lanes), 1)).unwrap();
                let cu = estimate_time(&fp, &p, Schedule::new(Parallelism::None, lanes)).unwrap();
                assert!(cu >= simd);
            }
        }
    }
}

#[test]
fn bench_covers_every_cell() {
    let spec = lenet5_spec();
    let coeffs = default_coeffs();
    let cat = platform_catalog();
    for name in [XILINX, ALTERA] {
        let p = find_platform(&cat, name).unwrap();
        let rows = model_bench(&spec, QFormat::Q16_8, p, &coeffs, BenchModes::default()).unwrap();
        assert_eq!(rows.len(), 5);
        for r in &rows {
            for m in ModeKind::ALL {
                let cell = r.mode(m);
                assert!(cell.time_ms > 0.0 && cell.logic_k >= 0.0 && cell.dsp >= 0.0 && cell.bram_kb >= 0.0);
            }
            assert!(r.mode(ModeKind::Simd).time_ms <= r.mode(ModeKind::None).time_ms);
        }
    }
}

#[test]
fn stream_verdict_splits_the_boards() {
    let spec = lenet5_spec();
    let cat = platform_catalog();
    let t =
        |name| service_time_ms(&spec, QFormat::Q16_8, find_platform(&cat, name).unwrap(), Schedule::SERIAL).unwrap();
    let (fast, slow) = (t(XILINX), t(ALTERA));
    assert!(fast < slow);
    let interval = (fast + slow) / 2.0;
    assert_eq!(simulate_stream(fast, interval, 1000).unwrap().verdict(), Verdict::Constant);
    let s = simulate_stream(slow, interval, 1000).unwrap();
    assert_eq!(s.verdict(), Verdict::Growing);
    assert_eq!(s.slope_ps(), (s.service_ps - s.interval_ps) as i64);
}

#[test]
fn config_adds_a_platform() {
    let cfg = PerfConfig::parse("example.toml", EXAMPLE_CONF).unwrap();
    let small = find_platform(&cfg.platforms, "small_board").unwrap();
    assert_eq!(small.lane_budget, 256);
    assert_eq!(find_platform(&cfg.platforms, XILINX).unwrap().ddr_efficiency, 0.6);
    assert!(cfg.coeffs.get("small_board", StageName::ConvPool1).is_ok());
    assert!(cfg.coeffs.get("small_board", StageName::Conv2).is_ok());
    assert!(cfg.coeffs.get("small_board", StageName::Pool2).is_err());
    let fp = kernel_footprint(&lenet5_spec(), StageName::Conv2, QFormat::Q16_8).unwrap();
    assert!(estimate_time(&fp, small, Schedule::new(Parallelism::Simd(512), 1)).is_err());

    assert!(PerfConfig::parse("bad", "platform.new_board.lane_budget = 8").is_err());
    assert!(PerfConfig::parse("bad", "coeff.virtex7_690t_7v3.conv2.inc_dsp = -1").is_err());
    assert!(PerfConfig::parse("bad", "nonsense").is_err());
}
