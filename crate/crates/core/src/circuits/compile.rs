//! Compilation through the canonical prepare → unitary → discard form.
//!
//! Every `PREP` gets its own wire initialised to |0⟩, so the whole program is
//! one unitary on `inputs + preps` wires followed by discarding every wire
//! that is not an output. The isometry from the input register is built by
//! applying gates to its columns directly; the discarded wires index the
//! Kraus operators.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use super::{CircuitDesc, CircuitError, Instruction};
use crate::channels::KrausChannel;
use crate::error::Result;
use crate::linmath::{ComplexMatrix, C64, ONE, ZERO};

/// Wires (inputs plus preparations) the compiler will simulate.
pub const MAX_WIRES: usize = 12;

/// Row-major `2^wires × dim_in` isometry, updated gate by gate.
struct Register {
    wires: usize,
    cols: usize,
    amps: Vec<C64>,
}

impl Register {
    fn new(wires: usize, n_inputs: usize) -> Self {
        let cols = 1 << n_inputs;
        let mut amps = vec![ZERO; (1 << wires) * cols];
        // Input wires come first, so input basis state a sits at row a << ancillas.
        let shift = wires - n_inputs;
        for a in 0..cols {
            amps[(a << shift) * cols + a] = ONE;
        }
        Self { wires, cols, amps }
    }

    fn mask(&self, wire: usize) -> usize {
        1 << (self.wires - 1 - wire)
    }

    fn hadamard(&mut self, wire: usize) {
        let m = self.mask(wire);
        for r in (0..1 << self.wires).filter(|r| r & m == 0) {
            for c in 0..self.cols {
                let (i, j) = (r * self.cols + c, (r | m) * self.cols + c);
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[j] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    fn t_gate(&mut self, wire: usize) {
        let m = self.mask(wire);
        let phase = C64::from_polar(1.0, FRAC_PI_4);
        for r in (0..1 << self.wires).filter(|r| r & m != 0) {
            for c in 0..self.cols {
                self.amps[r * self.cols + c] *= phase;
            }
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let (mc, mt) = (self.mask(control), self.mask(target));
        for r in (0..1 << self.wires).filter(|r| r & mc != 0 && r & mt == 0) {
            for c in 0..self.cols {
                self.amps.swap(r * self.cols + c, (r | mt) * self.cols + c);
            }
        }
    }
}

/// Compile a validated circuit to a Kraus channel on `2^inputs → 2^outputs`.
pub fn compile(c: &CircuitDesc) -> Result<KrausChannel> {
    let preps = c
        .instructions()
        .filter(|i| matches!(i, Instruction::Prep(_)))
        .count();
    let wires = c.n_inputs() + preps;
    if wires > MAX_WIRES {
        return Err(CircuitError::WireCap { wires }.into());
    }

    let mut wire_of: HashMap<usize, usize> = (0..c.n_inputs()).map(|q| (q, q)).collect();
    let mut next_wire = c.n_inputs();
    let mut reg = Register::new(wires, c.n_inputs());
    for ins in c.instructions() {
        match ins {
            Instruction::H(q) => reg.hadamard(wire_of[&q]),
            Instruction::T(q) => reg.t_gate(wire_of[&q]),
            Instruction::Cnot(a, b) => reg.cnot(wire_of[&a], wire_of[&b]),
            Instruction::Prep(q) => {
                wire_of.insert(q, next_wire);
                next_wire += 1;
            }
            Instruction::Trace(q) => {
                wire_of.remove(&q);
            }
        }
    }

    let out_wires: Vec<usize> = c.outputs().iter().map(|q| wire_of[q]).collect();
    let env_wires: Vec<usize> = (0..wires).filter(|w| !out_wires.contains(w)).collect();
    let place = |bits: usize, on: &[usize]| {
        on.iter().enumerate().fold(0, |acc, (p, &w)| {
            if bits >> (on.len() - 1 - p) & 1 == 1 {
                acc | reg.mask(w)
            } else {
                acc
            }
        })
    };

    let (dim_in, dim_out) = (c.dim_in(), c.dim_out());
    let out_rows: Vec<usize> = (0..dim_out).map(|o| place(o, &out_wires)).collect();
    let kraus: Vec<ComplexMatrix> = (0..1usize << env_wires.len())
        .map(|e| {
            let base = place(e, &env_wires);
            ComplexMatrix::from_fn(dim_out, dim_in, |o, a| {
                reg.amps[(base | out_rows[o]) * reg.cols + a]
            })
        })
        // Environment branches that are never populated contribute nothing.
        .filter(|k| k.max_abs() > 0.0)
        .collect();
    KrausChannel::from_parts(dim_in, dim_out, kraus)
}
