//! Seeded random matrices: Ginibre, Haar unitaries and isometries, states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C64};
use super::state::DensityState;

/// Independent generator for `(seed, stream)`; streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random isometry `cols -> rows` (rows >= cols) by Gram-Schmidt on Ginibre columns.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = ginibre(rng, rows, cols);
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.col(j);
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for u in &q {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        q.push(v);
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i])
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    random_isometry(rng, d, d)
}

/// Full-rank random state from the Ginibre ensemble.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityState {
    DensityState::from_factor(&ginibre(rng, d, d)).expect("Ginibre factor is nonzero a.s.")
}

pub fn random_pure<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<C64> {
    random_isometry(rng, d, 1).col(0)
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, d: usize) -> ComplexMatrix {
    ginibre(rng, d, d).hermitian_part()
}

/// Uniform point on the probability simplex.
pub fn random_simplex<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isometries_are_isometric() {
        let mut rng = stream_rng(7, 0);
        for (r, c) in [(2, 2), (6, 2), (8, 8)] {
            assert!(random_isometry(&mut rng, r, c).is_isometry(1e-12));
        }
    }

    #[test]
    fn streams_are_reproducible() {
        let a = ginibre(&mut stream_rng(3, 5), 2, 2);
        let b = ginibre(&mut stream_rng(3, 5), 2, 2);
        let c = ginibre(&mut stream_rng(3, 6), 2, 2);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }
}
