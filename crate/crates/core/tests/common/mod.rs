#![allow(dead_code)]

use expgeo::{center, CenteredRandomVariable, Density, FiniteSampleSpace, RandomVariable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Reference measure with masses in `[0.1, 1]`.
pub fn space(rng: &mut ChaCha8Rng, n: usize) -> FiniteSampleSpace<f64> {
    FiniteSampleSpace::new((0..n).map(|_| rng.gen_range(0.1..1.0)).collect()).unwrap()
}

/// Log-normal density values, normalized against `space`.
pub fn density(rng: &mut ChaCha8Rng, space: &FiniteSampleSpace<f64>, spread: f64) -> Density<f64> {
    let values = (0..space.len())
        .map(|_| (spread * rng.sample::<f64, _>(StandardNormal)).exp())
        .collect();
    Density::normalized(space.clone(), values).unwrap()
}

pub fn variable(rng: &mut ChaCha8Rng, space: &FiniteSampleSpace<f64>, scale: f64) -> RandomVariable<f64> {
    RandomVariable::new(
        space.clone(),
        (0..space.len()).map(|_| rng.gen_range(-scale..scale)).collect(),
    )
    .unwrap()
}

pub fn centered(rng: &mut ChaCha8Rng, p: &Density<f64>, scale: f64) -> CenteredRandomVariable<f64> {
    center(p, &variable(rng, p.space(), scale)).unwrap()
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn gaussian3(rng: &mut ChaCha8Rng, scale: f64) -> [f64; 3] {
    [
        scale * rng.sample::<f64, _>(StandardNormal),
        scale * rng.sample::<f64, _>(StandardNormal),
        scale * rng.sample::<f64, _>(StandardNormal),
    ]
}
