#![allow(dead_code)]

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Haar-ish random orthogonal matrix (row-major) from Gram-Schmidt on a
/// Gaussian matrix.
pub fn random_orthogonal(amb: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(amb);
    while rows.len() < amb {
        let mut v: Vec<f64> = (0..amb).map(|_| StandardNormal.sample(&mut rng)).collect();
        for r in &rows {
            let dot: f64 = r.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(r).for_each(|(x, y)| *x -= dot * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            rows.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    rows.concat()
}

/// Energy of the n-th roots of unity, summed directly.
pub fn roots_energy(n: usize, s: f64) -> f64 {
    let nf = n as f64;
    nf * (1..n)
        .map(|k| (2.0 * (std::f64::consts::PI * k as f64 / nf).sin()).powf(-s))
        .sum::<f64>()
}

pub fn tetrahedron() -> Vec<f64> {
    let a = 1.0 / 3f64.sqrt();
    vec![a, a, a, a, -a, -a, -a, a, -a, -a, -a, a]
}

pub fn tetrahedron_energy() -> f64 {
    12.0 / (8.0f64 / 3.0).sqrt()
}
