//! Small qubit circuits over {H, T, CNOT} with qubit preparation and
//! discarding, compiled to Kraus channels, plus the measurement-to-POVM
//! bridge and the verifier reduction built on top of it.
//!
//! # Text format
//!
//! One instruction per line (or separated by `;`), `#` starts a comment:
//!
//! ```text
//! INPUTS 1        # optional: qubits 0..n are the input register
//! PREP 1          # fresh qubit 1 in |0⟩
//! CNOT 0 1
//! TRACE 0         # discard qubit 0
//! OUTPUTS 1       # optional: output register order
//! ```
//!
//! Without `INPUTS`, the input register is `0..=q` where `q` is the largest
//! index whose first use is not a `PREP`. Without `OUTPUTS`, the qubits still
//! live at the end are the outputs in ascending order. A traced index may be
//! prepared again; it then names a fresh qubit.

mod compile;
mod parse;
mod reduction;

pub use compile::{compile, MAX_WIRES};
pub use parse::parse_circuit;
pub use reduction::{
    build_reduction, evaluate_joint, evaluate_reduction, JointEvaluation, ReductionEvaluation,
    ReductionInstance, SigmaSource, JOINT_DIM_CAP, PROOF_DIM_CAP,
};

use std::fmt;

use serde::Serialize;

use crate::channels::KrausChannel;
use crate::directsum::Povm;
use crate::error::{Error, Result};
use crate::linmath::ComplexMatrix;

/// Live qubits allowed at any point of a program (dimension 64).
pub const MAX_LIVE_QUBITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("line {line}: unknown gate `{name}`")]
    UnknownGate { line: usize, name: String },
    #[error("line {line}: qubit {qubit} is not live")]
    DeadQubit { line: usize, qubit: usize },
    #[error("line {line}: qubit {qubit} is already live")]
    AlreadyLive { line: usize, qubit: usize },
    #[error("line {line}: {live} live qubits exceed the cap of {MAX_LIVE_QUBITS}")]
    QubitCap { line: usize, live: usize },
    #[error("circuit needs {wires} wires, more than the compiler's {MAX_WIRES}")]
    WireCap { wires: usize },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Instruction {
    H(usize),
    T(usize),
    Cnot(usize, usize),
    Prep(usize),
    Trace(usize),
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::H(q) => write!(f, "H {q}"),
            Instruction::T(q) => write!(f, "T {q}"),
            Instruction::Cnot(a, b) => write!(f, "CNOT {a} {b}"),
            Instruction::Prep(q) => write!(f, "PREP {q}"),
            Instruction::Trace(q) => write!(f, "TRACE {q}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub instruction: Instruction,
    /// 1-based source line.
    pub line: usize,
}

/// A validated circuit: every gate acts on live qubits and the live count
/// never exceeds [`MAX_LIVE_QUBITS`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CircuitDesc {
    n_inputs: usize,
    steps: Vec<Step>,
    outputs: Vec<usize>,
}

impl CircuitDesc {
    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn instructions(&self) -> impl Iterator<Item = Instruction> + '_ {
        self.steps.iter().map(|s| s.instruction)
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn dim_in(&self) -> usize {
        1 << self.n_inputs
    }

    pub fn dim_out(&self) -> usize {
        1 << self.outputs.len()
    }

    /// Canonical text that parses back to the same circuit.
    pub fn to_text(&self) -> String {
        let mut s = format!("INPUTS {}\n", self.n_inputs);
        for step in &self.steps {
            s.push_str(&step.instruction.to_string());
            s.push('\n');
        }
        s.push_str("OUTPUTS");
        for q in &self.outputs {
            s.push_str(&format!(" {q}"));
        }
        s.push('\n');
        s
    }
}

impl std::str::FromStr for CircuitDesc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_circuit(s)
    }
}

/// `P_b = Σ_i K_i† |b⟩⟨b| K_i` for every output basis vector `b`.
pub fn measurement_povm(ch: &KrausChannel) -> Result<Povm> {
    let elements = (0..ch.dim_out())
        .map(|b| {
            let mut p = ComplexMatrix::zeros(ch.dim_in(), ch.dim_in());
            for k in ch.kraus() {
                for x in 0..ch.dim_in() {
                    let kbx = k[(b, x)].conj();
                    for y in 0..ch.dim_in() {
                        p[(x, y)] += kbx * k[(b, y)];
                    }
                }
            }
            p.hermitian_part()
        })
        .collect();
    Povm::new(elements)
}

/// The two-outcome POVM of a measurement channel with a qubit output.
pub fn povm_from_measurement_channel(ch: &KrausChannel) -> Result<Povm> {
    if ch.dim_out() != 2 {
        return Err(Error::dims(format!(
            "measurement channel must output one qubit, got dimension {}",
            ch.dim_out()
        )));
    }
    measurement_povm(ch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmath::random::{random_density, stream_rng};
    use crate::linmath::C64;

    #[test]
    fn computational_measurement() {
        let ch = KrausChannel::dephasing(2);
        let povm = povm_from_measurement_channel(&ch).unwrap();
        assert!(povm.elements()[0].max_abs_diff(&ComplexMatrix::unit(2, 0, 0)) < 1e-15);
    }

    #[test]
    fn hadamard_measurement() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = [C64::new(h, 0.0), C64::new(h, 0.0)];
        let minus = [C64::new(h, 0.0), C64::new(-h, 0.0)];
        let k0 = ComplexMatrix::from_fn(2, 2, |r, c| if r == 0 { plus[c].conj() } else { C64::new(0.0, 0.0) });
        let k1 = ComplexMatrix::from_fn(2, 2, |r, c| if r == 1 { minus[c].conj() } else { C64::new(0.0, 0.0) });
        let ch = KrausChannel::new(2, 2, vec![k0, k1]).unwrap();
        let povm = povm_from_measurement_channel(&ch).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        assert!(povm.elements()[0].max_abs_diff(&expect) < 1e-15);

        let mut rng = stream_rng(5, 0);
        for _ in 0..10 {
            let sigma = random_density(&mut rng, 2);
            let out = ch.apply(&sigma).unwrap();
            for (b, p) in povm.probabilities(sigma.matrix()).iter().enumerate() {
                assert!((p - out.matrix()[(b, b)].re).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_wide_output() {
        assert!(matches!(
            povm_from_measurement_channel(&KrausChannel::identity(4)),
            Err(Error::DimensionMismatch(_))
        ));
    }
}
