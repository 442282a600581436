//! Projective strategies for the independent-set game, their q-c encoders,
//! and the entanglement-assisted distinguishability certificate.

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::graph::Graph;
use super::gram::{cq_channel, gram_system};
use crate::channels::{compose, KrausChannel, DIM_CAP};
use crate::circuits::measurement_povm;
use crate::error::{Error, Result};
use crate::linmath::{operator_norm, psd_sqrt, ComplexMatrix, ZERO};

/// Tolerance for projectivity, completeness and cross-question orthogonality.
pub const PVM_TOL: f64 = 1e-8;
/// Largest local dimension for certificates.
pub const CERTIFICATE_DIM_CAP: usize = 8;
/// Overlap below which the messages count as perfectly distinguishable.
pub const OVERLAP_TOL: f64 = 1e-8;

/// One measurement per question, each with one outcome per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct PvmStrategy {
    t: usize,
    dim: usize,
    pvms: Vec<Vec<ComplexMatrix>>,
}

impl PvmStrategy {
    /// Shape checks only; [`check_pvm_strategy`] judges the operators.
    pub fn new(t: usize, dim: usize, pvms: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidStrategy("at least one question is required".into()));
        }
        if dim == 0 || dim > DIM_CAP {
            return Err(Error::InvalidStrategy(format!("dimension {dim} outside 1..={DIM_CAP}")));
        }
        if pvms.len() != t {
            return Err(Error::dims(format!("{} measurements for t = {t}", pvms.len())));
        }
        let n = pvms[0].len();
        if n == 0 {
            return Err(Error::InvalidStrategy("measurements have no outcomes".into()));
        }
        for (i, family) in pvms.iter().enumerate() {
            if family.len() != n {
                return Err(Error::dims(format!(
                    "question {i} has {} outcomes, question 0 has {n}",
                    family.len()
                )));
            }
            if let Some(v) = family.iter().position(|p| p.rows() != dim || p.cols() != dim) {
                return Err(Error::dims(format!("P[{i}][{v}] is not {dim}x{dim}")));
            }
        }
        Ok(Self { t, dim, pvms })
    }

    /// One-dimensional strategy answering vertex `answers[i]` to question `i`.
    pub fn classical(n: usize, answers: &[usize]) -> Result<Self> {
        if let Some(&v) = answers.iter().find(|&&v| v >= n) {
            return Err(Error::InvalidStrategy(format!("answer {v} outside 0..{n}")));
        }
        let pvms = answers
            .iter()
            .map(|&a| {
                (0..n)
                    .map(|v| ComplexMatrix::from_real_diag(&[if v == a { 1.0 } else { 0.0 }]))
                    .collect()
            })
            .collect();
        Self::new(answers.len(), 1, pvms)
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.pvms[0].len()
    }

    pub fn pvms(&self) -> &[Vec<ComplexMatrix>] {
        &self.pvms
    }

    /// Block-diagonal sum `P ⊕ Q`, question by question and vertex by vertex.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if self.t != other.t || self.n() != other.n() {
            return Err(Error::dims("direct sum needs equal question and vertex counts"));
        }
        let (d1, d2) = (self.dim, other.dim);
        let pvms = self
            .pvms
            .iter()
            .zip(&other.pvms)
            .map(|(a, b)| {
                a.iter()
                    .zip(b)
                    .map(|(p, q)| {
                        ComplexMatrix::from_fn(d1 + d2, d1 + d2, |r, c| match (r < d1, c < d1) {
                            (true, true) => p[(r, c)],
                            (false, false) => q[(r - d1, c - d1)],
                            _ => ZERO,
                        })
                    })
                    .collect()
            })
            .collect();
        Self::new(self.t, d1 + d2, pvms)
    }

    /// `U P U†` for every operator.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        let pvms = self
            .pvms
            .iter()
            .map(|family| family.iter().map(|p| u.conjugate(p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.t, self.dim, pvms)
    }
}

#[derive(Serialize, Deserialize)]
struct StrategyJson {
    t: usize,
    dim: usize,
    pvms: Vec<Vec<ComplexMatrix>>,
}

impl Serialize for PvmStrategy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StrategyJson {
            t: self.t,
            dim: self.dim,
            pvms: self.pvms.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PvmStrategy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = StrategyJson::deserialize(deserializer)?;
        PvmStrategy::new(raw.t, raw.dim, raw.pvms).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `Σ_v P^i_v ≠ I`.
    Incomplete { question: usize, defect: f64 },
    /// `P^i_v` is not an orthogonal projector (non-Hermitian or `P² ≠ P`).
    NonProjective {
        question: usize,
        vertex: usize,
        defect: f64,
    },
    /// Two outcomes of one measurement overlap.
    NonOrthogonal {
        question: usize,
        v: usize,
        w: usize,
        norm: f64,
    },
    /// `‖P^i_v P^j_w‖ > 0` for distinct questions with `v` and `w` confusable.
    Overlap {
        i: usize,
        j: usize,
        v: usize,
        w: usize,
        norm: f64,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct StrategyCheck {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

/// Operator norm, skipped when the Frobenius norm already certifies it small.
fn product_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let prod = a * b;
    if prod.frobenius_norm() <= PVM_TOL {
        return Ok(prod.frobenius_norm());
    }
    operator_norm(&prod)
}

/// Check that every family is a PVM and that answers to distinct questions
/// are orthogonal whenever the vertices are equal or adjacent.
pub fn check_pvm_strategy(s: &PvmStrategy, g: &Graph) -> Result<StrategyCheck> {
    if s.n() != g.n() {
        return Err(Error::dims(format!(
            "strategy has {} outcomes for a graph on {} vertices",
            s.n(),
            g.n()
        )));
    }
    let n = g.n();
    let id = ComplexMatrix::identity(s.dim());
    let mut violations = Vec::new();

    for (i, family) in s.pvms().iter().enumerate() {
        let mut sum = ComplexMatrix::zeros(s.dim(), s.dim());
        for (v, p) in family.iter().enumerate() {
            sum = &sum + p;
            let defect = p.hermiticity_defect().max((p * p).max_abs_diff(p));
            if defect > PVM_TOL {
                violations.push(Violation::NonProjective {
                    question: i,
                    vertex: v,
                    defect,
                });
            }
        }
        let defect = sum.max_abs_diff(&id);
        if defect > PVM_TOL {
            violations.push(Violation::Incomplete { question: i, defect });
        }
        for v in 0..n {
            for w in v + 1..n {
                let norm = product_norm(&family[v], &family[w])?;
                if norm > PVM_TOL {
                    violations.push(Violation::NonOrthogonal {
                        question: i,
                        v,
                        w,
                        norm,
                    });
                }
            }
        }
    }

    let pairs: Vec<(usize, usize)> = (0..s.t())
        .flat_map(|i| (i + 1..s.t()).map(move |j| (i, j)))
        .collect();
    let overlaps: Vec<Vec<Violation>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut found = Vec::new();
            for v in 0..n {
                for w in (0..n).filter(|&w| g.confusable(v, w)) {
                    let norm = product_norm(&s.pvms()[i][v], &s.pvms()[j][w])?;
                    if norm > PVM_TOL {
                        found.push(Violation::Overlap { i, j, v, w, norm });
                    }
                }
            }
            Ok(found)
        })
        .collect::<Result<_>>()?;
    violations.extend(overlaps.into_iter().flatten());

    Ok(StrategyCheck {
        valid: violations.is_empty(),
        violations,
    })
}

/// q-c channels `ρ ↦ Σ_v Tr(P^i_v ρ) |v⟩⟨v|`, one per question.
pub fn strategy_to_encoders(s: &PvmStrategy) -> Result<Vec<KrausChannel>> {
    let (n, dim) = (s.n(), s.dim());
    s.pvms()
        .iter()
        .map(|family| {
            let mut kraus = Vec::new();
            for (v, p) in family.iter().enumerate() {
                let root = psd_sqrt(&p.hermitian_part())?;
                for k in 0..dim {
                    let op = ComplexMatrix::from_fn(n, dim, |r, c| {
                        if r == v {
                            root[(k, c)]
                        } else {
                            ZERO
                        }
                    });
                    if op.max_abs() > 0.0 {
                        kraus.push(op);
                    }
                }
            }
            KrausChannel::new(dim, n, kraus)
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    /// `max_{i≠j} Tr(ρ_i ρ_j)`; zero when there is a single question.
    pub max_overlap: f64,
    /// `t` when the outputs are perfectly distinguishable, otherwise 1.
    pub certified_t: usize,
    pub certified_bits: f64,
    /// Smallest `Tr(ρ_i²)`, a sanity check that the outputs are states.
    pub min_purity: f64,
}

/// The state `(Φ_G ∘ E_i ⊗ id)(|τ⟩⟨τ|)` on `ℂⁿ ⊗ ℂ^dim`, with `|τ⟩`
/// maximally entangled: `(1/dim) Σ_k vec(K_k) vec(K_k)†` over the Kraus
/// operators of the composite, `vec` being row-major.
fn message_state(ch: &KrausChannel) -> ComplexMatrix {
    let size = ch.dim_out() * ch.dim_in();
    let mut rho = ComplexMatrix::zeros(size, size);
    let weight = 1.0 / ch.dim_in() as f64;
    for k in ch.kraus() {
        let v = k.data();
        for a in 0..size {
            if v[a] == ZERO {
                continue;
            }
            for b in 0..size {
                rho[(a, b)] += v[a] * v[b].conj() * weight;
            }
        }
    }
    rho
}

/// Send message `i` by measuring one half of a maximally entangled pair with
/// question `i`'s measurement and feeding the outcome through `Φ_G`.
pub fn distinguishability_certificate(g: &Graph, s: &PvmStrategy) -> Result<Certificate> {
    if s.dim() > CERTIFICATE_DIM_CAP {
        return Err(Error::SizeCap(format!(
            "certificate dimension {} exceeds {CERTIFICATE_DIM_CAP}",
            s.dim()
        )));
    }
    if s.n() != g.n() {
        return Err(Error::dims(format!(
            "strategy has {} outcomes for a graph on {} vertices",
            s.n(),
            g.n()
        )));
    }
    let phi = cq_channel(&gram_system(g)?)?;
    let states: Vec<ComplexMatrix> = strategy_to_encoders(s)?
        .iter()
        .map(|e| compose(&phi, e).map(|c| message_state(&c)))
        .collect::<Result<_>>()?;
    let mut max_overlap: f64 = 0.0;
    let mut min_purity = f64::INFINITY;
    for (i, a) in states.iter().enumerate() {
        min_purity = min_purity.min(a.trace_product(a).re);
        for b in &states[i + 1..] {
            max_overlap = max_overlap.max(a.trace_product(b).re);
        }
    }
    let certified_t = if max_overlap <= OVERLAP_TOL { s.t() } else { 1 };
    Ok(Certificate {
        max_overlap,
        certified_t,
        certified_bits: (certified_t as f64).log2(),
        min_purity,
    })
}

/// Measurement operators recovered from q-c encoders via `Δ ∘ E`.
pub fn extract_povms(encoders: &[KrausChannel]) -> Result<Vec<Vec<ComplexMatrix>>> {
    encoders
        .iter()
        .map(|e| {
            let dephased = compose(&KrausChannel::dephasing(e.dim_out()), e)?;
            Ok(measurement_povm(&dephased)?.elements().to_vec())
        })
        .collect()
}

/// Largest `‖P^i_v P^j_w‖` over distinct questions and confusable vertices.
pub fn max_confusable_overlap(g: &Graph, povms: &[Vec<ComplexMatrix>]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, a) in povms.iter().enumerate() {
        for b in &povms[i + 1..] {
            for (v, pv) in a.iter().enumerate().take(g.n()) {
                for w in (0..g.n()).filter(|&w| g.confusable(v, w)) {
                    worst = worst.max(operator_norm(&(pv * &b[w]))?);
                }
            }
        }
    }
    Ok(worst)
}
