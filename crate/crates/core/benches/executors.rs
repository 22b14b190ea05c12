use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kernelpipe::exec::Executor;
use kernelpipe::fixtures::{synthetic_cases, synthetic_images, synthetic_weights};
use kernelpipe::kernels::Pipeline;
use kernelpipe::ocl::{DeviceConfig, Schedule};
use kernelpipe::quant::sweep_precision;
use kernelpipe::tensor::QFormat;

const EXECUTORS: [Executor; 2] = [Executor::Sequential, Executor::Parallel];

fn pipeline(executor: Executor) -> Pipeline {
    Pipeline::default().with_device(DeviceConfig { executor, ..DeviceConfig::default() })
}

fn forward(c: &mut Criterion) {
    let (w, img) = synthetic_cases(42, 1).remove(0);
    let wq = w.quantized(QFormat::Q16_8).unwrap();
    let mut g = c.benchmark_group("forward");
    g.sample_size(10);
    for ex in EXECUTORS {
        let p = pipeline(ex);
        g.bench_with_input(BenchmarkId::from_parameter(ex), &p, |b, p| {
            b.iter(|| p.forward(&img, &wq, Schedule::SERIAL).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let w = synthetic_weights(42);
    let imgs = synthetic_images(42, 4);
    let formats = [QFormat::Q16_8];
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    for ex in EXECUTORS {
        g.bench_function(BenchmarkId::from_parameter(ex), |b| {
            b.iter(|| sweep_precision(&pipeline(ex), &w, &imgs, &formats, ex).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, forward, sweep);
criterion_main!(benches);
