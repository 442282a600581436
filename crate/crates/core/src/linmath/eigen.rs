//! Cyclic Jacobi eigensolver for dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq`, turning the
//! 2x2 block real symmetric, then applies the classical Jacobi rotation. The
//! combined 2x2 unitary is accumulated into the eigenvector matrix.

use super::matrix::{ComplexMatrix, C64, ZERO};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Sweeps stop once the off-diagonal Frobenius norm falls below this
/// fraction of the full Frobenius norm.
pub const OFF_DIAGONAL_THRESHOLD: f64 = 1e-12;
/// Input must be Hermitian to this (scaled) tolerance.
pub const HERMITIAN_TOL: f64 = 1e-8;

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEig {
    /// `U diag(λ) U†`
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply_fn(|x| x)
    }

    /// `U diag(f(λ)) U†`
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        let fvals: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| u[(i, k)] * u[(j, k)].conj() * fvals[k])
                .sum()
        })
    }
}

/// Full Hermitian eigendecomposition.
pub fn herm_eig(m: &ComplexMatrix) -> Result<HermEig> {
    let (values, vectors) = jacobi(m, true)?;
    Ok(HermEig {
        values,
        vectors: vectors.expect("vectors requested"),
    })
}

/// Eigenvalues only, descending. Skips eigenvector accumulation.
pub fn herm_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(m, false)?.0)
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::dims(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let defect = m.hermiticity_defect();
    if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NonHermitian(defect));
    }
    Ok(())
}

fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    check_hermitian(m)?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));

    let scale = a.frobenius_norm();
    if n > 1 && scale > 0.0 {
        let mut converged = false;
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&a) <= OFF_DIAGONAL_THRESHOLD * scale {
                converged = true;
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, v.as_mut(), p, q);
                }
            }
        }
        if !converged && off_diagonal_norm(&a) > OFF_DIAGONAL_THRESHOLD * scale {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = v.map(|v| ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]));
    Ok((values, vectors))
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn rotate(a: &mut ComplexMatrix, v: Option<&mut ComplexMatrix>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 || !r.is_finite() {
        return;
    }
    let phase_conj = (apq / r).conj();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // U restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = phase_conj * (-s);
    let u_qq = phase_conj * c;

    let n = a.rows();
    // A <- A U
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    // A <- U† A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * u_pp + vkq * u_qp;
            v[(k, q)] = vkp * u_pq + vkq * u_qq;
        }
    }
}
