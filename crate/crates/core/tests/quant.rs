use kernelpipe::exec::Executor;
use kernelpipe::fixtures::{synthetic_images, synthetic_weights};
use kernelpipe::kernels::Pipeline;
use kernelpipe::quant::{default_grid, sweep_precision, QuantError};
use kernelpipe::tensor::QFormat;

#[test]
fn wider_formats_track_the_float_reference() {
    let w = synthetic_weights(42);
    let imgs = synthetic_images(42, 6);
    let grid = default_grid();
    let results = sweep_precision(&Pipeline::default(), &w, &imgs, &grid, Executor::default()).unwrap();
    assert_eq!(results.len(), grid.len());
    for (r, q) in results.iter().zip(&grid) {
        assert_eq!(r.qformat, *q);
        assert_eq!(r.n_samples, 6);
        assert_eq!(r.records.len(), 6);
        assert!(r.mean_abs_logit_error <= r.max_abs_logit_error);
        assert!((0.0..=1.0).contains(&r.argmax_agreement));
    }
    let widest = results.last().unwrap();
    assert_eq!(widest.qformat, QFormat::new(32, 16).unwrap());
    assert_eq!(widest.argmax_agreement, 1.0);
    assert!(widest.max_abs_logit_error < results[0].max_abs_logit_error);
}

#[test]
fn executors_agree() {
    let w = synthetic_weights(3);
    let imgs = synthetic_images(3, 3);
    let grid = [QFormat::Q16_8];
    let seq = sweep_precision(&Pipeline::default(), &w, &imgs, &grid, Executor::Sequential).unwrap();
    let par = sweep_precision(&Pipeline::default(), &w, &imgs, &grid, Executor::default()).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn empty_inputs_are_errors() {
    let w = synthetic_weights(1);
    let imgs = synthetic_images(1, 1);
    let p = Pipeline::default();
    assert!(matches!(
        sweep_precision(&p, &w, &[], &default_grid(), Executor::Sequential),
        Err(QuantError::EmptyDataset)
    ));
    assert!(matches!(sweep_precision(&p, &w, &imgs, &[], Executor::Sequential), Err(QuantError::EmptyFormats)));
    let wq = w.quantized(QFormat::Q16_8).unwrap();
    assert!(matches!(
        sweep_precision(&p, &wq, &imgs, &default_grid(), Executor::Sequential),
        Err(QuantError::NotFloat)
    ));
}
