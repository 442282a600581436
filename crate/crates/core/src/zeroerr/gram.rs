use serde::Serialize;

use super::graph::{confusability_matrix, Graph};
use crate::channels::KrausChannel;
use crate::error::Result;
use crate::linmath::{herm_eig, ComplexMatrix, C64, ZERO};

/// Unit vectors whose Gram matrix is `(αI + A) / (1 + α)`.
#[derive(Clone, Debug, Serialize)]
pub struct GramSystem {
    /// `|λ_min|` of the confusability matrix.
    pub alpha: f64,
    /// One vector per vertex, each of length `n`.
    pub vectors: Vec<Vec<C64>>,
}

impl GramSystem {
    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn inner(&self, v: usize, w: usize) -> C64 {
        self.vectors[v]
            .iter()
            .zip(&self.vectors[w])
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest deviation from the target Gram matrix over all pairs.
    pub fn gram_defect(&self, g: &Graph) -> f64 {
        let edge = 1.0 / (1.0 + self.alpha);
        let mut worst: f64 = 0.0;
        for v in 0..self.n() {
            for w in v..self.n() {
                let target = if v == w {
                    1.0
                } else if g.adjacent(v, w) {
                    edge
                } else {
                    0.0
                };
                worst = worst.max((self.inner(v, w) - target).norm());
            }
        }
        worst
    }
}

/// Factor `αI + A = M†M` through its eigendecomposition and rescale.
pub fn gram_system(g: &Graph) -> Result<GramSystem> {
    let a = confusability_matrix(g);
    let eig = herm_eig(&a)?;
    let alpha = eig.values.last().copied().unwrap_or(0.0).abs();
    let scale = 1.0 / (1.0 + alpha).sqrt();
    let n = g.n();
    let roots: Vec<f64> = eig.values.iter().map(|l| (l + alpha).max(0.0).sqrt()).collect();
    let vectors = (0..n)
        .map(|v| {
            (0..n)
                .map(|k| eig.vectors[(v, k)].conj() * (roots[k] * scale))
                .collect()
        })
        .collect();
    Ok(GramSystem { alpha, vectors })
}

/// Classical-quantum channel `|v⟩⟨w| ↦ δ_vw |ψ_v⟩⟨ψ_v|`.
pub fn cq_channel(gs: &GramSystem) -> Result<KrausChannel> {
    let n = gs.n();
    let kraus = gs
        .vectors
        .iter()
        .enumerate()
        .map(|(v, psi)| ComplexMatrix::from_fn(n, n, |r, c| if c == v { psi[r] } else { ZERO }))
        .collect();
    KrausChannel::new(n, n, kraus)
}
