//! Seeded random numbers used by the generators and tests.
//!
//! The generator is xoshiro256++ seeded through splitmix64 (as done by
//! `rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64`). Uniform variates on
//! `[0, 1)` take the top 53 bits of one output; normals use the basic
//! Box–Muller transform, one output pair consumed per variate.

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type Rand = Xoshiro256PlusPlus;

pub fn seeded(seed: u64) -> Rand {
    Xoshiro256PlusPlus::seed_from_u64(seed)
}

pub fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let u: f64 = rng.random();
    lo + (hi - lo) * u
}

pub fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Uniform point in the Euclidean ball of the given radius around `center`.
pub fn in_ball(rng: &mut impl Rng, center: &[f64], radius: f64) -> Vec<f64> {
    let dir: Vec<f64> = center.iter().map(|_| normal(rng)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let r = radius * rng.random::<f64>().powf(1.0 / center.len().max(1) as f64);
    center
        .iter()
        .zip(&dir)
        .map(|(c, d)| if norm > 0.0 { c + r * d / norm } else { *c })
        .collect()
}

/// Uniform point of the standard simplex of the given dimension.
pub fn on_simplex(rng: &mut impl Rng, dim: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}
