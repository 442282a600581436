//! The verifier-to-channel reduction.
//!
//! A verifier circuit maps a proof register to one decision qubit; outcome
//! |1⟩ means accept. Its measurement POVM selects between a perfect channel
//! (accept) and a zero-capacity channel (reject), so the one-shot capacity of
//! the resulting direct sum tracks the best acceptance probability.

use serde::Serialize;

use super::{compile, povm_from_measurement_channel, CircuitDesc};
use crate::capacity::{maximize_over_states, one_shot_capacity_with, OptimizerConfig, QUBIT_TOL};
use crate::channels::KrausChannel;
use crate::directsum::{Povm, ProjectiveDirectSum};
use crate::error::{Error, Result};
use crate::linmath::{herm_eig, psd_sqrt, ComplexMatrix, DensityState, ZERO};

/// Largest proof register handled by [`evaluate_reduction`].
pub const PROOF_DIM_CAP: usize = 16;
/// Largest joint input (proof ⊗ message) for the experimental optimizer.
pub const JOINT_DIM_CAP: usize = 8;

const ACCEPT_OUTCOME: usize = 1;
const REJECT_OUTCOME: usize = 0;

#[derive(Clone, Debug)]
pub struct ReductionInstance {
    verifier: CircuitDesc,
    measurement: KrausChannel,
    /// `[accept, reject]`, so element 0 gates the first branch.
    povm: Povm,
    phi_accept: KrausChannel,
    phi_reject: KrausChannel,
}

/// Compile the verifier and attach the accept/reject branches.
pub fn build_reduction(verifier: &CircuitDesc) -> Result<ReductionInstance> {
    let measurement = compile(verifier)?;
    let by_outcome = povm_from_measurement_channel(&measurement)?;
    let povm = Povm::new(vec![
        by_outcome.elements()[ACCEPT_OUTCOME].clone(),
        by_outcome.elements()[REJECT_OUTCOME].clone(),
    ])?;
    Ok(ReductionInstance {
        verifier: verifier.clone(),
        measurement,
        povm,
        phi_accept: KrausChannel::amplitude_damping(0.0)?,
        phi_reject: KrausChannel::amplitude_damping(0.5)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceSummary {
    pub proof_qubits: usize,
    pub instructions: usize,
    pub measurement_kraus: usize,
    pub accept_branch: &'static str,
    pub reject_branch: &'static str,
}

impl ReductionInstance {
    pub fn verifier(&self) -> &CircuitDesc {
        &self.verifier
    }

    pub fn measurement(&self) -> &KrausChannel {
        &self.measurement
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }

    pub fn accept_element(&self) -> &ComplexMatrix {
        &self.povm.elements()[0]
    }

    pub fn proof_dim(&self) -> usize {
        self.measurement.dim_in()
    }

    /// `(w_accept, w_reject)` for a proof state.
    pub fn weights(&self, sigma: &DensityState) -> (f64, f64) {
        let p = self.povm.probabilities(sigma.matrix());
        (p[0], p[1])
    }

    pub fn direct_sum(&self, sigma: &DensityState) -> Result<ProjectiveDirectSum> {
        ProjectiveDirectSum::new(&self.phi_accept, &self.phi_reject, &self.povm, sigma)
    }

    /// Best acceptance probability and a proof achieving it: the top
    /// eigenpair of the accept element.
    pub fn max_accept_weight(&self) -> Result<(f64, DensityState)> {
        let eig = herm_eig(self.accept_element())?;
        let top = eig.vectors.col(0);
        Ok((eig.values[0], DensityState::pure(&top)?))
    }

    pub fn summary(&self) -> InstanceSummary {
        InstanceSummary {
            proof_qubits: self.verifier.n_inputs(),
            instructions: self.verifier.steps().len(),
            measurement_kraus: self.measurement.num_kraus(),
            accept_branch: "amplitude damping, eta = 0",
            reject_branch: "amplitude damping, eta = 1/2",
        }
    }

    /// Proof register and message register fed jointly: the proof is
    /// measured with the Lüders instrument `√P_j`, its post-measurement state
    /// goes to the environment, and the outcome selects the branch applied
    /// to the message. Input order is proof ⊗ message.
    pub fn joint_channel(&self) -> Result<KrausChannel> {
        let ds = self.proof_dim();
        let dr = self.phi_accept.dim_in();
        if ds * dr > JOINT_DIM_CAP {
            return Err(Error::SizeCap(format!(
                "joint input dimension {} exceeds {JOINT_DIM_CAP}",
                ds * dr
            )));
        }
        let dout = self.phi_accept.dim_out();
        let roots = self
            .povm
            .elements()
            .iter()
            .map(psd_sqrt)
            .collect::<Result<Vec<_>>>()?;
        let mut kraus = Vec::new();
        for (j, branch) in [&self.phi_accept, &self.phi_reject].into_iter().enumerate() {
            for k in branch.kraus() {
                for row in 0..ds {
                    kraus.push(ComplexMatrix::from_fn(2 * dout, ds * dr, |of, sr| {
                        let (o, f) = (of / 2, of % 2);
                        let (s, r) = (sr / dr, sr % dr);
                        if f == j {
                            k[(o, r)] * roots[j][(row, s)]
                        } else {
                            ZERO
                        }
                    }));
                }
            }
        }
        KrausChannel::new(ds * dr, 2 * dout, kraus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaSource {
    ClosedForm,
    Optimizer,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionEvaluation {
    /// One-shot capacity estimate at the chosen proof state.
    pub capacity_estimate: f64,
    /// Top eigenvalue of the accept element.
    pub weight_accept_max: f64,
    /// Acceptance probability reached by the generic optimizer.
    pub weight_accept_optimized: f64,
    pub sigma_source: SigmaSource,
    pub sigma: DensityState,
    pub converged: bool,
}

/// Product-input evaluation: optimise the proof, then the message.
pub fn evaluate_reduction(
    r: &ReductionInstance,
    sigma_restarts: usize,
    rho_restarts: usize,
    seed: u64,
) -> Result<ReductionEvaluation> {
    if r.proof_dim() > PROOF_DIM_CAP {
        return Err(Error::SizeCap(format!(
            "proof register dimension {} exceeds {PROOF_DIM_CAP}",
            r.proof_dim()
        )));
    }
    let (weight_accept_max, closed_sigma) = r.max_accept_weight()?;
    let accept = r.accept_element();
    let sigma_cfg = OptimizerConfig::with_restarts(sigma_restarts, seed, QUBIT_TOL);
    let found = maximize_over_states(r.proof_dim(), |s| s.trace_product(accept).re, &sigma_cfg);
    let weight_accept_optimized = found.best.value;

    let (sigma, sigma_source) = if weight_accept_max >= weight_accept_optimized {
        (closed_sigma, SigmaSource::ClosedForm)
    } else {
        (found.best.state, SigmaSource::Optimizer)
    };
    let rho_cfg = OptimizerConfig::with_restarts(rho_restarts, seed, QUBIT_TOL);
    let est = one_shot_capacity_with(&r.direct_sum(&sigma)?.channel(), &rho_cfg)?;
    Ok(ReductionEvaluation {
        capacity_estimate: est.value,
        weight_accept_max,
        weight_accept_optimized,
        sigma_source,
        sigma,
        converged: found.converged && est.converged,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct JointEvaluation {
    pub capacity_estimate: f64,
    pub input_dim: usize,
    pub converged: bool,
}

/// Experimental: optimise over possibly entangled proof ⊗ message inputs.
pub fn evaluate_joint(r: &ReductionInstance, restarts: usize, seed: u64) -> Result<JointEvaluation> {
    let ch = r.joint_channel()?;
    let cfg = OptimizerConfig::with_restarts(restarts, seed, QUBIT_TOL);
    let est = one_shot_capacity_with(&ch, &cfg)?;
    Ok(JointEvaluation {
        capacity_estimate: est.value,
        input_dim: ch.dim_in(),
        converged: est.converged,
    })
}
