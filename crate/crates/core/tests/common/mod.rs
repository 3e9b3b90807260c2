#![allow(dead_code)]

use std::f64::consts::PI;

use halfinv::{GridSpec, SampledFunction};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random trigonometric polynomial on `grid`, rescaled to the given `L2` norm.
pub fn random_trig(rng: &mut ChaCha8Rng, grid: GridSpec, norm: f64) -> SampledFunction {
    let degree = rng.gen_range(1..=6);
    let a: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let raw = SampledFunction::from_fn(grid, |x| {
        (0..=degree)
            .map(|k| {
                let w = 2.0 * PI * k as f64 * x;
                a[k] * w.cos() + b[k] * w.sin()
            })
            .sum()
    });
    let scale = norm / raw.l2_norm();
    raw.map(|_, v| v * scale)
}
