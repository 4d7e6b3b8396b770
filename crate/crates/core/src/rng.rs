//! Seeded, splittable random streams.
//!
//! Every random object is drawn from a ChaCha stream addressed by
//! `(seed, stream)`, so parallel tasks indexed by `stream` reproduce exactly
//! regardless of scheduling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;

pub type StreamRng = ChaCha8Rng;

/// Stream `stream` of the generator seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Entries i.i.d. complex standard normal (real and imaginary parts N(0, 1/2)).
pub fn ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| Complex64::new(gaussian(rng) * s, gaussian(rng) * s))
}

/// Haar-random unitary: Gram-Schmidt QR of a Ginibre matrix, which yields
/// the factorization whose R has a positive real diagonal.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<Complex64> = (0..n).map(|i| g[(i, j)]).collect();
        for q in &cols {
            let dot: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, qi) in v.iter_mut().zip(q) {
                *vi -= dot * qi;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| stream_rng(9, 3).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| stream_rng(9, 3).gen()).collect();
        assert_eq!(a, b);
        let x: u64 = stream_rng(9, 3).gen();
        let y: u64 = stream_rng(9, 4).gen();
        assert_ne!(x, y);
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = stream_rng(1, 0);
        for n in 1..6 {
            let u = haar_unitary(n, &mut rng);
            assert!(u.adjoint().matmul(&u).max_abs_diff(&ComplexMatrix::identity(n)) < 1e-12);
        }
    }
}
