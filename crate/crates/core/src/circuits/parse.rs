use std::collections::{BTreeSet, HashSet};

use super::{CircuitDesc, CircuitError, Instruction, Step, MAX_LIVE_QUBITS};
use crate::error::Result;

enum Item {
    Inputs(usize),
    Outputs(Vec<usize>),
    Op(Instruction),
}

fn syntax(line: usize, message: impl Into<String>) -> CircuitError {
    CircuitError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_item(line: usize, stmt: &str) -> std::result::Result<Item, CircuitError> {
    let mut tokens = stmt.split_whitespace();
    let head = tokens.next().expect("statement is non-empty").to_ascii_uppercase();
    let args = tokens
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| syntax(line, format!("`{t}` is not a qubit index")))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(syntax(
                line,
                format!("{head} takes {n} operand(s), got {}", args.len()),
            ))
        }
    };
    Ok(match head.as_str() {
        "INPUTS" => {
            arity(1)?;
            Item::Inputs(args[0])
        }
        "OUTPUTS" => Item::Outputs(args),
        "H" => {
            arity(1)?;
            Item::Op(Instruction::H(args[0]))
        }
        "T" => {
            arity(1)?;
            Item::Op(Instruction::T(args[0]))
        }
        "CNOT" => {
            arity(2)?;
            if args[0] == args[1] {
                return Err(syntax(line, "CNOT control and target coincide"));
            }
            Item::Op(Instruction::Cnot(args[0], args[1]))
        }
        "PREP" => {
            arity(1)?;
            Item::Op(Instruction::Prep(args[0]))
        }
        "TRACE" => {
            arity(1)?;
            Item::Op(Instruction::Trace(args[0]))
        }
        _ => {
            return Err(CircuitError::UnknownGate { line, name: head });
        }
    })
}

fn operands(ins: Instruction) -> Vec<usize> {
    match ins {
        Instruction::H(q) | Instruction::T(q) | Instruction::Prep(q) | Instruction::Trace(q) => {
            vec![q]
        }
        Instruction::Cnot(a, b) => vec![a, b],
    }
}

/// Input register size implied by first uses.
fn inferred_inputs(steps: &[Step]) -> usize {
    let mut seen = HashSet::new();
    let mut top = None;
    for step in steps {
        let is_prep = matches!(step.instruction, Instruction::Prep(_));
        for q in operands(step.instruction) {
            if seen.insert(q) && !is_prep {
                top = top.max(Some(q));
            }
        }
    }
    top.map_or(0, |q| q + 1)
}

/// Parse and validate a circuit program.
pub fn parse_circuit(text: &str) -> Result<CircuitDesc> {
    let mut inputs: Option<(usize, usize)> = None;
    let mut outputs: Option<(usize, Vec<usize>)> = None;
    let mut steps = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let code = raw.split('#').next().unwrap_or("");
        for stmt in code.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            match parse_item(line, stmt)? {
                Item::Inputs(n) => {
                    if inputs.replace((line, n)).is_some() {
                        return Err(syntax(line, "INPUTS given twice").into());
                    }
                }
                Item::Outputs(qs) => {
                    if outputs.replace((line, qs)).is_some() {
                        return Err(syntax(line, "OUTPUTS given twice").into());
                    }
                }
                Item::Op(instruction) => steps.push(Step { instruction, line }),
            }
        }
    }

    let (input_line, n_inputs) = inputs.unwrap_or_else(|| (1, inferred_inputs(&steps)));
    if n_inputs > MAX_LIVE_QUBITS {
        return Err(CircuitError::QubitCap {
            line: input_line,
            live: n_inputs,
        }
        .into());
    }

    let mut live: BTreeSet<usize> = (0..n_inputs).collect();
    for step in &steps {
        let line = step.line;
        let dead = |qubit| CircuitError::DeadQubit { line, qubit };
        match step.instruction {
            Instruction::Prep(q) => {
                if !live.insert(q) {
                    return Err(CircuitError::AlreadyLive { line, qubit: q }.into());
                }
                if live.len() > MAX_LIVE_QUBITS {
                    return Err(CircuitError::QubitCap {
                        line,
                        live: live.len(),
                    }
                    .into());
                }
            }
            Instruction::Trace(q) => {
                if !live.remove(&q) {
                    return Err(dead(q).into());
                }
            }
            other => {
                if let Some(&q) = operands(other).iter().find(|q| !live.contains(q)) {
                    return Err(dead(q).into());
                }
            }
        }
    }

    let outputs = match outputs {
        None => live.into_iter().collect(),
        Some((line, qs)) => {
            let mut distinct = HashSet::new();
            for &q in &qs {
                if !distinct.insert(q) {
                    return Err(syntax(line, format!("qubit {q} listed twice in OUTPUTS")).into());
                }
                if !live.contains(&q) {
                    return Err(CircuitError::DeadQubit { line, qubit: q }.into());
                }
            }
            qs
        }
    };

    Ok(CircuitDesc {
        n_inputs,
        steps,
        outputs,
    })
}
