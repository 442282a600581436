//! The projective direct sum `Φ₀ ⊕_{P₀,P₁} Φ₁` of two channels.
//!
//! For a fixed state `σ` on the measured space the realized channel is
//!
//! ```text
//! ρ ↦ w₀ Φ₀(ρ) ⊗ |0⟩⟨0| + w₁ Φ₁(ρ) ⊗ |1⟩⟨1|,   w_j = Tr(P_j σ)
//! ```
//!
//! on the common output space tensored with a flag qubit (flag last). Its
//! Kraus operators are `C_ij = √w_j K_{j,i} ⊗ |j⟩`, listed with the branch
//! Kraus index `i` as the major key and the branch `j` as the minor key. With
//! this environment order the complement of the sum is, operator for
//! operator, the sum of the complements.

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::capacity::{
    amplitude_damping_q1, maximize_over_states, one_shot_capacity_with, CoherentInfo,
    OptimizerConfig,
};
use crate::channels::{amplitude_damping_parameter, choi_distance, KrausChannel};
use crate::error::{Error, Result};
use crate::linmath::random::random_unitary;
use crate::linmath::{herm_eigvals, ComplexMatrix, DensityState};

pub const POVM_TOL: f64 = 1e-9;

/// Positive operators summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm("no elements".into()))?;
        let d = first.rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, e) in elements.iter().enumerate() {
            if !e.is_square() || e.rows() != d {
                return Err(Error::InvalidPovm(format!("element {k} has the wrong shape")));
            }
            if !e.is_hermitian(POVM_TOL) {
                return Err(Error::InvalidPovm(format!("element {k} is not Hermitian")));
            }
            let min = herm_eigvals(&e.hermitian_part())?.last().copied().unwrap_or(0.0);
            if min < -POVM_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has eigenvalue {min:e}"
                )));
            }
            sum = &sum + e;
        }
        let defect = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if defect > POVM_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {defect:e}"
            )));
        }
        Ok(Self { elements })
    }

    /// `{P, I − P}`
    pub fn binary(p: ComplexMatrix) -> Result<Self> {
        let rest = &ComplexMatrix::identity(p.rows()) - &p;
        Self::new(vec![p, rest])
    }

    /// `{P, I − P}` with `P = U diag(x) U†`, `U` Haar and `x` uniform in [0, 1].
    pub fn random_binary<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Self {
        let u = random_unitary(rng, d);
        let x: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let p = u
            .conjugate(&ComplexMatrix::from_real_diag(&x))
            .expect("square")
            .hermitian_part();
        Self::binary(p).expect("0 ≤ P ≤ I by construction")
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Outcome probabilities `Tr(P_k σ)`.
    pub fn probabilities(&self, sigma: &ComplexMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|p| p.trace_product(sigma).re)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct PovmJson {
    elements: Vec<ComplexMatrix>,
}

impl Serialize for Povm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PovmJson {
            elements: self.elements.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Povm {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Povm::new(PovmJson::deserialize(deserializer)?.elements).map_err(serde::de::Error::custom)
    }
}

/// A σ-instantiated member of the direct-sum family.
///
/// The branches are stored after padding to a common output dimension and a
/// common Kraus count, so their complements line up as well.
#[derive(Clone, Debug)]
pub struct ProjectiveDirectSum {
    phi0: KrausChannel,
    phi1: KrausChannel,
    povm: Povm,
    sigma: DensityState,
    weights: (f64, f64),
    /// `(original, padded)` output dimension when the branches had to be aligned.
    output_padding: Option<(usize, usize, usize)>,
}

impl ProjectiveDirectSum {
    pub fn new(
        phi0: &KrausChannel,
        phi1: &KrausChannel,
        povm: &Povm,
        sigma: &DensityState,
    ) -> Result<Self> {
        if phi0.dim_in() != phi1.dim_in() {
            return Err(Error::dims(format!(
                "branch input dimensions {} and {} differ",
                phi0.dim_in(),
                phi1.dim_in()
            )));
        }
        if povm.len() != 2 {
            return Err(Error::InvalidPovm(format!(
                "direct sum needs exactly 2 elements, got {}",
                povm.len()
            )));
        }
        if povm.dim() != sigma.dim() {
            return Err(Error::dims(format!(
                "POVM acts on dimension {} but σ has dimension {}",
                povm.dim(),
                sigma.dim()
            )));
        }
        let probs = povm.probabilities(sigma.matrix());
        let weights = (probs[0].max(0.0), probs[1].max(0.0));

        let dout = phi0.dim_out().max(phi1.dim_out());
        let output_padding = (phi0.dim_out() != phi1.dim_out())
            .then_some((phi0.dim_out(), phi1.dim_out(), dout));
        let nk = phi0.num_kraus().max(phi1.num_kraus());
        Ok(Self {
            phi0: phi0.pad_output(dout).pad_kraus(nk),
            phi1: phi1.pad_output(dout).pad_kraus(nk),
            povm: povm.clone(),
            sigma: sigma.clone(),
            weights,
            output_padding,
        })
    }

    pub fn weights(&self) -> (f64, f64) {
        self.weights
    }

    pub fn branches(&self) -> (&KrausChannel, &KrausChannel) {
        (&self.phi0, &self.phi1)
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn sigma(&self) -> &DensityState {
        &self.sigma
    }

    pub fn output_padding(&self) -> Option<(usize, usize, usize)> {
        self.output_padding
    }

    /// Common branch output dimension (before the flag).
    pub fn branch_dim_out(&self) -> usize {
        self.phi0.dim_out()
    }

    /// The realized channel on `output ⊗ flag`.
    pub fn channel(&self) -> KrausChannel {
        let (din, dout) = (self.phi0.dim_in(), self.phi0.dim_out());
        let amps = [self.weights.0.sqrt(), self.weights.1.sqrt()];
        let branches = [&self.phi0, &self.phi1];
        let nk = self.phi0.num_kraus();
        let mut kraus = Vec::with_capacity(2 * nk);
        for i in 0..nk {
            for (j, branch) in branches.iter().enumerate() {
                let k = &branch.kraus()[i];
                kraus.push(ComplexMatrix::from_fn(2 * dout, din, |row, a| {
                    if row % 2 == j {
                        k[(row / 2, a)] * amps[j]
                    } else {
                        crate::linmath::ZERO
                    }
                }));
            }
        }
        KrausChannel::from_parts(din, 2 * dout, kraus).expect("shapes are consistent")
    }

    /// The same family member built from the branch complements.
    pub fn of_complements(&self) -> Result<Self> {
        Self::new(
            &self.phi0.complement(),
            &self.phi1.complement(),
            &self.povm,
            &self.sigma,
        )
    }

    /// `w₀ I_c(Φ₀, ρ) + w₁ I_c(Φ₁, ρ)`
    pub fn weighted_coherent_information(&self, rho: &ComplexMatrix) -> Result<f64> {
        let (w0, w1) = self.weights;
        Ok(w0 * CoherentInfo::new(&self.phi0).eval(rho)?
            + w1 * CoherentInfo::new(&self.phi1).eval(rho)?)
    }
}

/// Build the realized direct-sum channel directly.
pub fn build(
    phi0: &KrausChannel,
    phi1: &KrausChannel,
    povm: &Povm,
    sigma: &DensityState,
) -> Result<KrausChannel> {
    Ok(ProjectiveDirectSum::new(phi0, phi1, povm, sigma)?.channel())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ComplementCheck {
    pub distance: f64,
    pub pass: bool,
}

/// Choi distance between `(Φ₀ ⊕ Φ₁)ᶜ` and `Φ₀ᶜ ⊕ Φ₁ᶜ`.
pub fn complement_identity_check(ds: &ProjectiveDirectSum, tol: f64) -> Result<ComplementCheck> {
    let lhs = ds.channel().complement();
    let rhs = ds.of_complements()?.channel();
    let distance = choi_distance(&lhs, &rhs)?;
    Ok(ComplementCheck {
        distance,
        pass: distance <= tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdditivityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// Compare `Q⁽¹⁾` of the realized channel against
/// `max_ρ w₀ I_c(Φ₀, ρ) + w₁ I_c(Φ₁, ρ)`, both optimized with the same
/// restart stream.
pub fn additivity_formula_check(
    ds: &ProjectiveDirectSum,
    cfg: &OptimizerConfig,
    tol: f64,
) -> Result<AdditivityCheck> {
    let lhs = one_shot_capacity_with(&ds.channel(), cfg)?.value;
    let (w0, w1) = ds.weights();
    let ic0 = CoherentInfo::new(&ds.phi0);
    let ic1 = CoherentInfo::new(&ds.phi1);
    let best = maximize_over_states(
        ds.phi0.dim_in(),
        |rho| w0 * ic0.eval_lenient(rho) + w1 * ic1.eval_lenient(rho),
        cfg,
    );
    let rhs = ds.weighted_coherent_information(best.best.state.matrix())?;
    Ok(AdditivityCheck {
        lhs,
        rhs,
        pass: (lhs - rhs).abs() <= tol,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Slack allowed above `w₀ Q⁽¹⁾(Φ₀) + w₁ Q⁽¹⁾(Φ₁)`.
pub const BOUND_SLACK: f64 = 1e-6;

/// Check `Q⁽¹⁾(Φ₀ ⊕ Φ₁) ≤ w₀ Q⁽¹⁾(Φ₀) + w₁ Q⁽¹⁾(Φ₁)` for amplitude damping
/// branches, whose one-shot capacities are known in closed form.
pub fn capacity_bound_check(ds: &ProjectiveDirectSum, cfg: &OptimizerConfig) -> Result<BoundCheck> {
    let eta = |ch: &KrausChannel, which: &str| {
        amplitude_damping_parameter(ch).ok_or_else(|| {
            Error::InvalidChannel(format!("{which} is not an amplitude damping channel"))
        })
    };
    let q0 = amplitude_damping_q1(eta(&ds.phi0, "phi0")?)?;
    let q1 = amplitude_damping_q1(eta(&ds.phi1, "phi1")?)?;
    let (w0, w1) = ds.weights();
    let bound = w0 * q0 + w1 * q1;
    let value = one_shot_capacity_with(&ds.channel(), cfg)?.value;
    Ok(BoundCheck {
        value,
        bound,
        pass: value <= bound + BOUND_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmath::{partial_trace, Subsystem};

    fn weighted(w0: f64) -> (Povm, DensityState) {
        let povm = Povm::binary(ComplexMatrix::unit(2, 0, 0)).unwrap();
        let sigma = DensityState::new(ComplexMatrix::from_real_diag(&[w0, 1.0 - w0])).unwrap();
        (povm, sigma)
    }

    #[test]
    fn degenerate_weights_keep_branch_zero() {
        let povm = Povm::new(vec![ComplexMatrix::identity(2), ComplexMatrix::zeros(2, 2)]).unwrap();
        let sigma = DensityState::maximally_mixed(2);
        let ad = KrausChannel::amplitude_damping(0.3).unwrap();
        let ch = build(&ad, &KrausChannel::identity(2), &povm, &sigma).unwrap();
        let rho = ComplexMatrix::from_real_rows(&[&[0.6, 0.1], &[0.1, 0.4]]);
        let expect = ad.apply_matrix(&rho).unwrap().kron(&ComplexMatrix::unit(2, 0, 0));
        assert!(ch.apply_matrix(&rho).unwrap().max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn block_traces_follow_weights() {
        let (povm, sigma) = weighted(0.75);
        let ds = ProjectiveDirectSum::new(
            &KrausChannel::identity(2),
            &KrausChannel::amplitude_damping(0.5).unwrap(),
            &povm,
            &sigma,
        )
        .unwrap();
        let ch = ds.channel();
        assert!(ch.tp_defect() < 1e-12);
        let out = ch
            .apply_matrix(&ComplexMatrix::from_real_diag(&[0.3, 0.7]))
            .unwrap();
        assert!((out.trace().re - 1.0).abs() < 1e-12);
        let flag = partial_trace(&out, (2, 2), Subsystem::B).unwrap();
        assert!((flag[(0, 0)].re - 0.75).abs() < 1e-12);
        assert!((flag[(1, 1)].re - 0.25).abs() < 1e-12);
    }

    #[test]
    fn unequal_output_dimensions_are_padded() {
        let (povm, sigma) = weighted(0.5);
        let ds = ProjectiveDirectSum::new(
            &KrausChannel::trace_out(2),
            &KrausChannel::identity(2),
            &povm,
            &sigma,
        )
        .unwrap();
        assert_eq!(ds.output_padding(), Some((1, 2, 2)));
        assert!(ds.channel().tp_defect() < 1e-12);
        assert!(complement_identity_check(&ds, 1e-12).unwrap().pass);
    }

    #[test]
    fn identical_identity_branches_complement() {
        let (povm, sigma) = weighted(0.3);
        let id = KrausChannel::identity(2);
        let ds = ProjectiveDirectSum::new(&id, &id, &povm, &sigma).unwrap();
        assert!(complement_identity_check(&ds, 1e-12).unwrap().distance <= 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (povm, sigma) = weighted(0.5);
        let id2 = KrausChannel::identity(2);
        let id3 = KrausChannel::identity(3);
        assert!(matches!(
            build(&id2, &id3, &povm, &sigma),
            Err(Error::DimensionMismatch(_))
        ));
        let three = Povm::new(vec![
            ComplexMatrix::unit(2, 0, 0),
            ComplexMatrix::unit(2, 1, 1).scale_real(0.5),
            ComplexMatrix::unit(2, 1, 1).scale_real(0.5),
        ])
        .unwrap();
        assert!(matches!(
            build(&id2, &id2, &three, &sigma),
            Err(Error::InvalidPovm(_))
        ));
        assert!(Povm::new(vec![ComplexMatrix::identity(2).scale_real(0.9)]).is_err());
        assert!(Povm::binary(ComplexMatrix::from_real_diag(&[1.5, 0.0])).is_err());
    }

    #[test]
    fn povm_json() {
        let p = Povm::binary(ComplexMatrix::unit(2, 0, 0)).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(serde_json::from_str::<Povm>(&s).unwrap(), p);
    }
}
