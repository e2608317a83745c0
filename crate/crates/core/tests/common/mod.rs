#![allow(dead_code)]

use mincouple_core::Pmf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random pmf over `n` labels, mixing dense, sparse, tied and peaked shapes.
pub fn random_pmf(rng: &mut ChaCha8Rng, n: usize) -> Pmf {
    loop {
        let style = rng.random_range(0..4);
        let w: Vec<f64> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                match style {
                    0 => -(1.0 - u).ln(),
                    1 => {
                        if rng.random::<f64>() < 0.4 {
                            0.0
                        } else {
                            -(1.0 - u).ln()
                        }
                    }
                    2 => (u * 4.0).floor(),
                    _ => u.powi(6),
                }
            })
            .collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            return Pmf::new(w.iter().map(|x| x / s).collect()).unwrap();
        }
    }
}

pub fn random_collection(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Pmf> {
    (0..m).map(|_| random_pmf(rng, n)).collect()
}

/// Random vector of Bernoulli parameters, some degenerate.
pub fn random_rhos(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m)
        .map(|_| match rng.random_range(0..6) {
            0 => 0.0,
            1 => 1.0,
            _ => rng.random(),
        })
        .collect()
}

pub fn shannon(v: &[f64]) -> f64 {
    -v.iter()
        .filter(|&&x| x > 0.0)
        .map(|x| x * x.log2())
        .sum::<f64>()
}
