//! Seeded inputs shared by the benchmarks.

use fastrate_core::rng::rng_from;
use fastrate_core::{Dataset, Instance};
use rand::Rng;
use rand_distr::StandardNormal;

/// `n` points drawn uniformly from the unit sphere in `d` dimensions.
pub fn sphere_points(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from(seed);
    (0..n)
        .map(|_| {
            let x: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.into_iter().map(|v| v / norm).collect()
        })
        .collect()
}

/// Noisy linear responses `y = <u, x> + noise` for a fixed direction `u`.
pub fn linear_instances(n: usize, d: usize, noise: f64, seed: u64) -> Vec<Instance> {
    let xs = sphere_points(n, d, seed);
    let u = sphere_points(1, d, seed ^ 0x5eed).remove(0);
    let mut rng = rng_from(seed.wrapping_add(1));
    xs.into_iter()
        .map(|x| {
            let y = x.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() + noise * rng.random_range(-1.0..1.0);
            Instance::new(x, y)
        })
        .collect()
}

pub fn linear_dataset(n: usize, d: usize, noise: f64, seed: u64) -> Dataset {
    Dataset::new(linear_instances(n, d, noise, seed), seed, "bench".into()).expect("non-empty dataset")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_are_unit_and_seeded() {
        let a = sphere_points(20, 4, 3);
        assert_eq!(a, sphere_points(20, 4, 3));
        for x in &a {
            let n: f64 = x.iter().map(|v| v * v).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }
}
