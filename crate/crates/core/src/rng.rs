//! Reproducible random streams.
//!
//! Every random draw in the crate comes from ChaCha20 keyed by a 64-bit seed,
//! with the 64-bit ChaCha stream id set to a call ordinal. Streams with the
//! same seed and different ordinals are independent, so work can be split
//! across threads and merged without changing any number.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::tensor::{vec_norm, ComplexMatrix, C64};

/// Identifier recorded in reports next to every seed.
pub const RNG_ALGORITHM: &str = "chacha20/seed_from_u64/stream=ordinal";

pub type StreamRng = ChaCha20Rng;

/// Stream keyed by `(seed, ordinal)`.
pub fn stream(seed: u64, ordinal: u64) -> StreamRng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(ordinal);
    rng
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector of length `n`.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random unitary via Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(n);
    while columns.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
        for _ in 0..2 {
            for c in &columns {
                let proj: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            columns.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_columns(&columns).expect("square by construction")
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(rng.sample(StandardNormal), 0.0);
        for j in (i + 1)..n {
            let z = complex_normal(rng) * std::f64::consts::FRAC_1_SQRT_2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}
