//! Dense complex linear algebra: matrices, Hermitian eigendecomposition,
//! entropy, partial traces and distances.
//!
//! All logarithms are base 2.

mod eigen;
mod matrix;
pub mod random;
mod state;

pub use eigen::{herm_eig, herm_eigvals, HermEig, MAX_SWEEPS, OFF_DIAGONAL_THRESHOLD};
pub use matrix::{ComplexMatrix, C64};
pub use state::DensityState;

pub(crate) use matrix::{ONE, ZERO};

use crate::error::{Error, Result};

/// Eigenvalues in `[-ENTROPY_CLAMP, 0]` are treated as rounding noise.
pub const ENTROPY_CLAMP: f64 = 1e-8;

/// Which factor of a bipartite space to keep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// `-Σ λ log₂ λ` over the spectrum. Accepts subnormalized input.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    let vals = herm_eigvals(rho)?;
    entropy_of_spectrum(&vals)
}

pub fn entropy_of_spectrum(vals: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in vals {
        if l < -ENTROPY_CLAMP {
            return Err(Error::NegativeEigenvalue(l));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s)
}

/// Partial trace of `m` on `dims = (dA, dB)`, keeping the requested factor.
pub fn partial_trace(m: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if !m.is_square() || m.rows() != da * db {
        return Err(Error::dims(format!(
            "partial trace of a {}x{} matrix over dims ({da}, {db})",
            m.rows(),
            m.cols()
        )));
    }
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
        }),
    })
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// `½‖a − b‖₁`, from the spectrum of `a − b`.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::dims(format!(
            "trace distance between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let vals = herm_eigvals(&(a - b))?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// `(1/√d) Σ_a |a⟩|a⟩` as a d²×1 column.
pub fn max_entangled(d: usize) -> ComplexMatrix {
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; d * d];
    for a in 0..d {
        v[a * d + a] = amp;
    }
    ComplexMatrix::column(&v)
}

pub fn maximally_mixed(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d).scale_real(1.0 / d as f64)
}

/// Principal square root of a PSD matrix; tiny negative eigenvalues are clamped.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = herm_eig(m)?;
    if let Some(&min) = e.values.last() {
        if min < -ENTROPY_CLAMP {
            return Err(Error::NegativeEigenvalue(min));
        }
    }
    Ok(e.apply_fn(|x| x.max(0.0).sqrt()))
}

/// Operator (spectral) norm.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    let gram = m.dagger().matmul(m)?;
    let top = herm_eigvals(&gram)?.first().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt())
}

/// `-x log₂ x - (1-x) log₂(1-x)`
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(x) + term(1.0 - x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ket0() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, 0.0])
    }

    #[test]
    fn entropy_examples() {
        let mixed = ComplexMatrix::from_real_diag(&[0.5, 0.5]);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(von_neumann_entropy(&ket0()).unwrap(), 0.0);
        // -(3/4)log2(3/4) - (1/4)log2(1/4), evaluated independently.
        let biased = ComplexMatrix::from_real_diag(&[0.75, 0.25]);
        assert!((von_neumann_entropy(&biased).unwrap() - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn entropy_clamps_rounding_but_rejects_negative_input() {
        let tiny = ComplexMatrix::from_real_diag(&[1.0, -1e-9]);
        assert_eq!(von_neumann_entropy(&tiny).unwrap(), 0.0);
        let neg = ComplexMatrix::from_real_diag(&[1.1, -0.1]);
        assert!(matches!(
            von_neumann_entropy(&neg),
            Err(Error::NegativeEigenvalue(_))
        ));
    }

    #[test]
    fn partial_trace_examples() {
        let omega = maximally_mixed(2);
        let prod = omega.kron(&ket0());
        let a = partial_trace(&prod, (2, 2), Subsystem::A).unwrap();
        assert!(a.max_abs_diff(&omega) < 1e-15);

        let phi = max_entangled(2);
        let bell = &phi * &phi.dagger();
        let marg = partial_trace(&bell, (2, 2), Subsystem::A).unwrap();
        assert!(marg.max_abs_diff(&omega) < 1e-15);

        let (a, b, c, d) = (0.2, 0.7, 0.4, 0.9);
        let x = ComplexMatrix::from_real_diag(&[a, b]).kron(&ComplexMatrix::from_real_diag(&[c, d]));
        let kept = partial_trace(&x, (2, 2), Subsystem::B).unwrap();
        let expect = ComplexMatrix::from_real_diag(&[(a + b) * c, (a + b) * d]);
        assert!(kept.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let m = ComplexMatrix::identity(5);
        assert!(matches!(
            partial_trace(&m, (2, 2), Subsystem::A),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn max_entangled_amplitudes() {
        let v = max_entangled(2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [h, 0.0, 0.0, h];
        for (z, e) in v.data().iter().zip(expect) {
            assert!((z.re - e).abs() < 1e-15 && z.im == 0.0);
        }
    }

    #[test]
    fn trace_distance_examples() {
        let rho = ComplexMatrix::from_real_rows(&[&[0.6, 0.2], &[0.2, 0.4]]);
        assert!(trace_distance(&rho, &rho).unwrap().abs() < 1e-15);
        let one = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
        assert!((trace_distance(&ket0(), &one).unwrap() - 1.0).abs() < 1e-15);
        assert!(trace_distance(&ket0(), &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let r = psd_sqrt(&m).unwrap();
        assert!((&r * &r).max_abs_diff(&m) < 1e-13);
    }
}
