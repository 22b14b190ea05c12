//! Seeded synthetic weights and images.
//!
//! Weights and biases are uniform in ±sqrt(gain * 3 / fan_in). Pixels are
//! uniform in [0, 1).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kernels::{WeightBlock, WeightStore};
use crate::tensor::{Shape, Tensor};

pub const IMAGE_DIMS: [usize; 3] = [1, 28, 28];

fn fan_in(block: WeightBlock) -> usize {
    match block {
        WeightBlock::Conv1W | WeightBlock::Conv1B => 25,
        WeightBlock::Conv2W | WeightBlock::Conv2B => 500,
        WeightBlock::Ip1W | WeightBlock::Ip1B => 800,
        WeightBlock::Ip2W | WeightBlock::Ip2B => 500,
    }
}

/// Variance gain of the three hidden layers. Without it, the top two float
/// logits of some cases sit closer than the Q16.8 rounding noise.
fn gain(block: WeightBlock) -> f64 {
    match block {
        WeightBlock::Ip2W | WeightBlock::Ip2B => 1.0,
        _ => 4.0,
    }
}

fn weights_from(rng: &mut ChaCha8Rng) -> WeightStore {
    WeightStore::from_fn(|block, _| {
        let limit = (gain(block) * 3.0 / fan_in(block) as f64).sqrt();
        rng.random_range(-limit..limit)
    })
}

fn image_from(rng: &mut ChaCha8Rng) -> Tensor {
    let pixels = (0..784).map(|_| rng.random::<f64>()).collect();
    Tensor::from_f64(Shape::new(&IMAGE_DIMS).expect("static shape"), pixels).expect("784 pixels")
}

pub fn synthetic_weights(seed: u64) -> WeightStore {
    weights_from(&mut ChaCha8Rng::seed_from_u64(seed))
}

/// `n` images drawn from one stream, so a longer request extends a shorter one.
pub fn synthetic_images(seed: u64, n: usize) -> Vec<Tensor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1A6E_5EED);
    (0..n).map(|_| image_from(&mut rng)).collect()
}

/// `n` independent (weights, image) pairs.
pub fn synthetic_cases(seed: u64, n: usize) -> Vec<(WeightStore, Tensor)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let w = weights_from(&mut rng);
            (w, image_from(&mut rng))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        assert_eq!(synthetic_weights(7), synthetic_weights(7));
        assert_ne!(synthetic_weights(7), synthetic_weights(8));
        let w = synthetic_weights(1);
        let limit = (12.0f64 / 25.0).sqrt();
        assert!(w.get(WeightBlock::Conv1W).to_f64_vec().iter().all(|x| x.abs() < limit));
        let imgs = synthetic_images(3, 4);
        assert_eq!(imgs[..2], synthetic_images(3, 2)[..]);
        assert!(imgs.iter().flat_map(Tensor::to_f64_vec).all(|p| (0.0..1.0).contains(&p)));
    }

    #[test]
    fn cases_are_independent_pairs() {
        let cases = synthetic_cases(5, 2);
        assert_ne!(cases[0].0, cases[1].0);
        assert_ne!(cases[0].1, cases[1].1);
    }
}
