use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand};

use kernelpipe::exec::Executor;
use kernelpipe::fixtures::{synthetic_images, synthetic_weights};
use kernelpipe::io::{self, CsvTable};
use kernelpipe::kernels::{argmax, oracle_forward, oracle_forward_quantized, Pipeline, WeightStore};
use kernelpipe::netdef::PoolOp;
use kernelpipe::ocl::{DeviceConfig, ModeKind, Schedule};
use kernelpipe::perf::{
    accel_table, find_platform, model_bench, render_report, service_time_ms, simulate_stream, AccelRecord, BenchModes,
    BenchRecord, PerfConfig, PlatformConfig, ALTERA, DEFAULT_LANE_BUDGET, XILINX,
};
use kernelpipe::quant::{sweep_precision, SweepSummary};
use kernelpipe::tensor::{QFormat, Tensor};

const CONFIG_ENV: &str = "KERNELPIPE_CONFIG";

#[derive(Parser)]
#[command(name = "kernelpipe", version, about = "LeNet-5 on an emulated OpenCL device, with FPGA timing estimates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify images and print the logits of each.
    Classify(ClassifyArgs),
    /// Modelled time and resources of every kernel on each platform.
    Bench(BenchArgs),
    /// Compare fixed-point formats against the float reference.
    Sweep(SweepArgs),
    /// Frame latency of a camera-style stream feeding the pipeline.
    Stream(StreamArgs),
    /// Write the seeded synthetic weights and images as text files.
    Fixture(FixtureArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Weight text file; seeded synthetic weights when absent.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Text or IDX image file; seeded synthetic images when absent.
    #[arg(long)]
    images: Option<PathBuf>,
    /// Number of images to use (default: all in the file, or 10 synthetic).
    #[arg(long)]
    count: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Pooling operator: max or average.
    #[arg(long, default_value = "max")]
    pool: PoolOp,
}

#[derive(Args, Clone, Copy)]
struct FormatArgs {
    #[arg(long, default_value_t = 16)]
    qbits: u32,
    #[arg(long, default_value_t = 8)]
    qfrac: u32,
}

impl FormatArgs {
    fn qformat(&self) -> Result<QFormat> {
        Ok(QFormat::new(self.qbits, self.qfrac)?)
    }
}

#[derive(Args, Clone, Copy)]
struct ModeArgs {
    #[arg(long, default_value = "none")]
    mode: ModeKind,
    /// Unroll factor for `--mode unroll`.
    #[arg(long, default_value_t = 4)]
    factor: u32,
    /// SIMD width for `--mode simd`.
    #[arg(long, default_value_t = 4)]
    width: u32,
    /// Compute units.
    #[arg(long, default_value_t = 1)]
    cu: u32,
}

impl ModeArgs {
    fn schedule(&self) -> Result<Schedule> {
        if self.factor == 0 || self.width == 0 || self.cu == 0 {
            bail!("--factor, --width and --cu must be at least 1");
        }
        Ok(Schedule::new(self.mode.with_param(self.factor, self.width), self.cu))
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    format: FormatArgs,
    #[command(flatten)]
    mode: ModeArgs,
    /// Platform whose lane budget bounds the schedule.
    #[arg(long)]
    platform: Option<String>,
    /// Also run the float64 reference and report agreement.
    #[arg(long)]
    oracle: bool,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Platforms to model, repeatable (default: both). With two, the second
    /// is the reference of the acceleration table.
    #[arg(long)]
    platform: Vec<String>,
    #[arg(long, default_value_t = 4)]
    factor: u32,
    #[arg(long, default_value_t = 4)]
    width: u32,
    #[arg(long, default_value_t = 1)]
    cu: u32,
    #[command(flatten)]
    format: FormatArgs,
    /// Replay a bench CSV instead of modelling.
    #[arg(long)]
    from_csv: Option<PathBuf>,
    /// Bench CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Acceleration CSV output.
    #[arg(long)]
    accel_out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Comma-separated `total:frac` formats.
    #[arg(long, default_value = "8:4,12:6,16:8,24:12,32:16")]
    grid: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StreamArgs {
    /// Platforms to simulate, repeatable (default: both).
    #[arg(long)]
    platform: Vec<String>,
    /// Capture interval in ms (default: midway between the platforms' service times).
    #[arg(long)]
    interval: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    frames: usize,
    #[command(flatten)]
    mode: ModeArgs,
    #[command(flatten)]
    format: FormatArgs,
    /// Latency series CSV output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FixtureArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: usize,
}

/// Converts a library result so that the exit code can tell user errors from
/// internal ones.
fn lib<T, E: Into<kernelpipe::Error>>(r: std::result::Result<T, E>) -> Result<T> {
    r.map_err(|e| anyhow::Error::new(e.into()))
}

fn perf_config() -> Result<PerfConfig> {
    match std::env::var_os(CONFIG_ENV) {
        Some(path) => {
            let path = PathBuf::from(path);
            let text =
                std::fs::read_to_string(&path).with_context(|| format!("{CONFIG_ENV}: reading {}", path.display()))?;
            lib(PerfConfig::parse(&path.display().to_string(), &text))
        }
        None => Ok(PerfConfig::default()),
    }
}

fn platforms<'a>(cfg: &'a PerfConfig, names: &[String]) -> Result<Vec<&'a PlatformConfig>> {
    let default = [XILINX.to_string(), ALTERA.to_string()];
    let names = if names.is_empty() { &default[..] } else { names };
    names.iter().map(|n| lib(find_platform(&cfg.platforms, n))).collect()
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_data(data: &DataArgs, default_count: usize) -> Result<(WeightStore, Vec<Tensor>)> {
    let weights = match &data.weights {
        Some(p) => lib(io::load_weights_text(p))?,
        None => synthetic_weights(data.seed),
    };
    let images = match &data.images {
        Some(p) => {
            let mut all = lib(io::load_images(p))?;
            if let Some(n) = data.count {
                if n > all.len() {
                    bail!("{}: requested {n} images, file holds {}", p.display(), all.len());
                }
                all.truncate(n);
            }
            all
        }
        None => synthetic_images(data.seed, data.count.unwrap_or(default_count)),
    };
    if images.is_empty() {
        bail!("no images to process");
    }
    Ok((weights, images))
}

fn fmt_row(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn cmd_classify(a: &ClassifyArgs) -> Result<()> {
    let q = a.format.qformat()?;
    let schedule = a.mode.schedule()?;
    let lane_budget = match &a.platform {
        Some(name) => lib(find_platform(&perf_config()?.platforms, name))?.lane_budget,
        None => DEFAULT_LANE_BUDGET,
    };
    let (weights, images) = load_data(&a.data, 10)?;
    let wq = lib(weights.quantized(q))?;
    let pipe = Pipeline::new(a.data.pool).with_device(DeviceConfig { lane_budget, ..DeviceConfig::default() });

    let header: Vec<String> = (0..10).map(|i| format!("logit{i}")).collect();
    let mut out = format!("index,winner,{}\n", header.join(","));
    let (mut exact, mut float_agree) = (0usize, 0usize);
    for (i, img) in images.iter().enumerate() {
        let r = lib(pipe.forward(img, &wq, schedule))?;
        let logits = r.logits.to_f64_vec();
        writeln!(out, "{i},{},{}", r.winner, fmt_row(&logits))?;
        if a.oracle {
            let step = lib(oracle_forward_quantized(img, &weights, a.data.pool, q))?;
            exact += usize::from(step.raw_stage(4, q) == r.logits.raw().expect("fixed logits"));
            let float = lib(oracle_forward(img, &weights, a.data.pool))?;
            float_agree += usize::from(argmax(&float) == r.winner);
        }
    }
    if a.oracle {
        let n = images.len() as f64;
        writeln!(out, "agreement,{}", exact as f64 / n)?;
        writeln!(out, "float_agreement,{}", float_agree as f64 / n)?;
    }
    emit(a.out.as_deref(), &out)
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let records: Vec<BenchRecord> = match &a.from_csv {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            lib(io::parse_bench_csv(&path.display().to_string(), &text))?
        }
        None => {
            let cfg = perf_config()?;
            let q = a.format.qformat()?;
            let modes = BenchModes { factor: a.factor, width: a.width, compute_units: a.cu };
            if modes.factor == 0 || modes.width == 0 || modes.compute_units == 0 {
                bail!("--factor, --width and --cu must be at least 1");
            }
            let spec = Pipeline::default().spec().clone();
            let mut all = Vec::new();
            for p in platforms(&cfg, &a.platform)? {
                all.extend(lib(model_bench(&spec, q, p, &cfg.coeffs, modes))?);
            }
            all
        }
    };
    let mut names: Vec<&str> = Vec::new();
    for r in &records {
        if !names.contains(&r.platform.as_str()) {
            names.push(&r.platform);
        }
    }
    let accel: Option<Vec<AccelRecord>> = match names.as_slice() {
        [first, second] => {
            let pick = |n: &str| records.iter().filter(|r| r.platform == n).cloned().collect::<Vec<_>>();
            Some(lib(accel_table(&pick(first), &pick(second)))?)
        }
        _ => None,
    };
    print!("{}", lib(render_report(&records, accel.as_deref()))?);
    if let Some(path) = &a.out {
        lib(io::write_results_csv(&records, path))?;
    }
    if let Some(path) = &a.accel_out {
        match &accel {
            Some(rows) => lib(io::write_results_csv(rows, path))?,
            None => bail!("--accel-out needs exactly two platforms"),
        }
    }
    Ok(())
}

fn parse_grid(grid: &str) -> Result<Vec<QFormat>> {
    let formats = grid
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|cell| {
            let (t, f) = cell.split_once(':').with_context(|| format!("grid entry `{cell}` is not total:frac"))?;
            let t: u32 = t.trim().parse().with_context(|| format!("grid entry `{cell}`: bad total bits"))?;
            let f: u32 = f.trim().parse().with_context(|| format!("grid entry `{cell}`: bad fraction bits"))?;
            lib(QFormat::new(t, f))
        })
        .collect::<Result<Vec<_>>>()?;
    if formats.is_empty() {
        bail!("--grid lists no formats");
    }
    Ok(formats)
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let grid = parse_grid(&a.grid)?;
    let (weights, images) = load_data(&a.data, 100)?;
    let results = lib(sweep_precision(&Pipeline::new(a.data.pool), &weights, &images, &grid, Executor::default()))?;
    let rows: Vec<SweepSummary> = results.iter().map(|r| r.summary()).collect();
    emit(a.out.as_deref(), &SweepSummary::render(&rows))
}

fn cmd_stream(a: &StreamArgs) -> Result<()> {
    let cfg = perf_config()?;
    let q = a.format.qformat()?;
    let schedule = a.mode.schedule()?;
    let spec = Pipeline::default().spec().clone();
    let selected = platforms(&cfg, &a.platform)?;
    let services: Vec<f64> =
        selected.iter().map(|p| lib(service_time_ms(&spec, q, p, schedule))).collect::<Result<_>>()?;
    let interval = match a.interval {
        Some(i) => i,
        None => {
            let lo = services.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = services.iter().copied().fold(0.0, f64::max);
            (lo + hi) / 2.0
        }
    };
    let mut summary = String::from("platform,service_ms,interval_ms,slope_ms,verdict\n");
    let mut series = String::from("platform,frame,latency_ms\n");
    for (p, &service) in selected.iter().zip(&services) {
        let r = lib(simulate_stream(service, interval, a.frames))?;
        writeln!(summary, "{},{},{},{},{}", p.name, service, interval, r.slope_ms(), r.verdict())?;
        for (i, l) in r.latencies_ms().iter().enumerate() {
            writeln!(series, "{},{i},{l}", p.name)?;
        }
    }
    print!("{summary}");
    if let Some(path) = &a.out {
        emit(Some(path), &series)?;
    }
    Ok(())
}

fn cmd_fixture(a: &FixtureArgs) -> Result<()> {
    std::fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let weights = a.out.join("weights.txt");
    let images = a.out.join("images.txt");
    lib(io::write_weights_text(&synthetic_weights(a.seed), &weights))?;
    lib(io::write_images_text(&synthetic_images(a.seed, a.count), &images))?;
    println!("{}\n{}", weights.display(), images.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Classify(a) => cmd_classify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Stream(a) => cmd_stream(a),
        Command::Fixture(a) => cmd_fixture(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e.downcast_ref::<kernelpipe::Error>().is_some_and(kernelpipe::Error::is_internal);
            ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}
