use kernelpipe::fixtures::{synthetic_cases, synthetic_weights};
use kernelpipe::kernels::{argmax, oracle_forward, oracle_forward_quantized, Pipeline, WeightStore};
use kernelpipe::netdef::{lenet5_spec, PoolOp, StageName};
use kernelpipe::ocl::{Parallelism, Schedule};
use kernelpipe::tensor::{QFormat, Shape, Tensor};

#[test]
fn zero_weights_pick_class_zero() {
    let img = Tensor::from_f64(Shape::new(&[1, 28, 28]).unwrap(), vec![0.5; 784]).unwrap();
    let w = WeightStore::zeros().quantized(QFormat::Q16_8).unwrap();
    let out = Pipeline::default().forward(&img, &w, Schedule::SERIAL).unwrap();
    assert!(out.logits.raw().unwrap().iter().all(|&v| v == 0));
    assert_eq!(out.winner, 0);
}

#[test]
fn stage_shapes_and_mac_counts() {
    let (w, img) = synthetic_cases(3, 1).remove(0);
    let out = Pipeline::default().forward(&img, &w.quantized(QFormat::Q16_8).unwrap(), Schedule::SERIAL).unwrap();
    let dims: Vec<Vec<usize>> = out.stages.iter().map(|s| s.output.shape().dims().to_vec()).collect();
    assert_eq!(dims, [vec![20, 12, 12], vec![50, 8, 8], vec![50, 4, 4], vec![500], vec![10]]);
    let macs: Vec<u64> = out.stages.iter().map(|s| s.macs()).collect();
    assert_eq!(macs, [288_000, 1_600_000, 0, 400_000, 5_000]);
    let spec: Vec<Vec<usize>> =
        lenet5_spec().stage_output_shapes().unwrap().iter().map(|s| s.dims().to_vec()).collect();
    assert_eq!(spec, dims);
}

#[test]
fn fixed_point_tracks_the_oracles() {
    let q = QFormat::Q16_8;
    let pipe = Pipeline::new(PoolOp::Max);
    for (w, img) in synthetic_cases(42, 4) {
        let out = pipe.forward(&img, &w.quantized(q).unwrap(), Schedule::SERIAL).unwrap();
        let stepped = oracle_forward_quantized(&img, &w, PoolOp::Max, q).unwrap();
        assert_eq!(out.logits.raw().unwrap(), stepped.raw_stage(4, q).as_slice());
        let float = oracle_forward(&img, &w, PoolOp::Max).unwrap();
        assert_eq!(out.winner, argmax(&float));
    }
}

#[test]
fn modes_do_not_change_logits() {
    let w = synthetic_weights(9).quantized(QFormat::Q16_8).unwrap();
    let img = &synthetic_cases(9, 1)[0].1;
    let pipe = Pipeline::default();
    let base = pipe.forward(img, &w, Schedule::SERIAL).unwrap().logits;
    for p in [Parallelism::Unroll(8), Parallelism::Simd(16)] {
        for cu in [2, 4] {
            assert_eq!(pipe.forward(img, &w, Schedule::new(p, cu)).unwrap().logits, base);
        }
    }
}

#[test]
fn stages_chain_by_hand() {
    let (w, img) = synthetic_cases(5, 1).remove(0);
    let wq = w.quantized(QFormat::new(12, 6).unwrap()).unwrap();
    let pipe = Pipeline::new(PoolOp::Average);
    let s = Schedule::SERIAL;
    let a = pipe.conv_pool1(&img, &wq, s).unwrap();
    let b = pipe.conv2(&a.output, &wq, s).unwrap();
    let c = pipe.pool2(&b.output, &wq, s).unwrap();
    let d = pipe.ip1_relu(&c.output, &wq, s).unwrap();
    let e = pipe.ip2(&d.output, &wq, s).unwrap();
    let full = pipe.forward(&img, &wq, s).unwrap();
    assert_eq!(e.output, full.logits);
    assert_eq!(e.stage, StageName::Ip2);
    assert!(d.output.raw().unwrap().iter().all(|&v| v >= 0));
}

#[test]
fn float_weights_are_rejected() {
    let (w, img) = synthetic_cases(1, 1).remove(0);
    assert!(Pipeline::default().forward(&img, &w, Schedule::SERIAL).is_err());
    let bad = Tensor::zeros(Shape::new(&[28, 28]).unwrap());
    assert!(Pipeline::default().forward(&bad, &w.quantized(QFormat::Q16_8).unwrap(), Schedule::SERIAL).is_err());
}
