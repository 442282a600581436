use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::matrix::{ComplexMatrix, C64};
use super::{herm_eigvals, maximally_mixed};
use crate::error::{Error, Result};

/// Tolerance for Hermiticity, positivity and unit trace.
pub const STATE_TOL: f64 = 1e-10;

/// A positive, unit-trace, Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState(ComplexMatrix);

impl DensityState {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::InvalidState(format!(
                "{}x{} is not square",
                mat.rows(),
                mat.cols()
            )));
        }
        let defect = mat.hermiticity_defect();
        if defect > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min = herm_eigvals(&mat)?.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(mat))
    }

    /// Wrap a matrix known to be a state up to rounding (e.g. a channel output).
    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        Self(mat)
    }

    /// `T T† / Tr(T T†)`; any nonzero square `t` yields a valid state.
    pub fn from_factor(t: &ComplexMatrix) -> Result<Self> {
        if !t.is_square() {
            return Err(Error::dims("state factor must be square"));
        }
        let m = t.mul_unchecked(&t.dagger());
        let tr = m.trace().re;
        if tr.is_nan() || tr <= 0.0 {
            return Err(Error::InvalidState("zero factor".into()));
        }
        Ok(Self(m.hermitian_part().scale_real(1.0 / tr)))
    }

    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("vector norm² {norm} is not 1")));
        }
        Ok(Self(ComplexMatrix::projector(psi)))
    }

    pub fn basis(d: usize, k: usize) -> Self {
        Self(ComplexMatrix::unit(d, k, k))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self(maximally_mixed(d))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl AsRef<ComplexMatrix> for DensityState {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

impl Serialize for DensityState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(deserializer)?;
        DensityState::new(m).map_err(serde::de::Error::custom)
    }
}
