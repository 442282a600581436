//! The reproducible check suite behind `capq selftest`.
//!
//! Each check is a deterministic function of the seed: every check draws from
//! its own random stream and reports numbers only, never timings, so two
//! runs with the same seed serialize to identical bytes.

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::capacity::{
    coherent_information, one_shot_capacity_with, subnorm_entropy_identity, OptimizerConfig,
    QUBIT_TOL,
};
use crate::channels::{choi_distance, compose, KrausChannel};
use crate::circuits::{build_reduction, compile, evaluate_reduction, parse_circuit};
use crate::directsum::{
    additivity_formula_check, capacity_bound_check, complement_identity_check, Povm,
    ProjectiveDirectSum,
};
use crate::error::Result;
use crate::linmath::random::{ginibre, random_density, random_unitary, stream_rng};
use crate::linmath::{ComplexMatrix, DensityState};
use crate::zeroerr::{
    check_pvm_strategy, distinguishability_certificate, extract_povms, gram_system,
    independence_number, max_confusable_overlap, strategy_to_encoders, Graph, PvmStrategy,
    Violation,
};

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "entropy of subnormalized states"),
    (2, "known capacities"),
    (3, "complement of a direct sum"),
    (4, "additivity formula for direct sums"),
    (5, "capacity bound for identity versus amplitude damping"),
    (6, "reduction gap behaviour"),
    (7, "circuit compiler"),
    (8, "Gram vector construction"),
    (9, "zero-error certificates"),
    (10, "strategy checker"),
];

/// Toy verifiers used by the reduction check.
pub const ALWAYS_ACCEPT: &str = "INPUTS 1\nPREP 1\nH 1\nT 1\nT 1\nT 1\nT 1\nH 1\nTRACE 0\n";
pub const ALWAYS_REJECT: &str = "INPUTS 1\nPREP 1\nTRACE 0\n";

/// Fresh qubit rotated by `H T^k H`; accepts with probability `sin²(kπ/8)`.
pub fn rotation_verifier(k: usize) -> String {
    let mut s = String::from("INPUTS 1\nPREP 1\nH 1\n");
    for _ in 0..k {
        s.push_str("T 1\n");
    }
    s.push_str("H 1\nTRACE 0\n");
    s
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u32,
    pub title: String,
    pub pass: bool,
    pub metrics: Value,
}

fn report(id: u32, pass: bool, metrics: Value) -> CriterionReport {
    let title = CRITERIA
        .iter()
        .find(|(k, _)| *k == id)
        .map_or("", |(_, t)| t)
        .to_string();
    CriterionReport {
        id,
        title,
        pass,
        metrics,
    }
}

/// Run one check; errors become a failed report carrying the message.
pub fn run_criterion(id: u32, seed: u64) -> CriterionReport {
    let outcome = match id {
        1 => entropy_identity(seed),
        2 => known_capacities(seed),
        3 => complement_identity(seed),
        4 => additivity(seed),
        5 => capacity_bound(seed),
        6 => reduction_gap(seed),
        7 => circuit_compiler(seed),
        8 => gram_construction(seed),
        9 => zero_error_certificates(seed),
        10 => strategy_checker(seed),
        _ => return report(id, false, json!({ "error": "unknown criterion" })),
    };
    outcome.unwrap_or_else(|e| report(id, false, json!({ "error": e.to_string() })))
}

pub fn run_all(seed: u64) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, seed)).collect()
}

fn rng_for(seed: u64, id: u32) -> rand_chacha::ChaCha8Rng {
    stream_rng(seed, 1000 + id as u64)
}

/// A state of random rank: a Ginibre factor with trailing columns zeroed.
fn random_ranked_state<R: Rng + ?Sized>(rng: &mut R, d: usize) -> DensityState {
    let rank = rng.random_range(1..=d);
    let mut t = ginibre(rng, d, d);
    for r in 0..d {
        for c in rank..d {
            t[(r, c)] = 0.0.into();
        }
    }
    DensityState::from_factor(&t).expect("rank ≥ 1")
}

fn entropy_identity(seed: u64) -> Result<CriterionReport> {
    let mut rng = rng_for(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d = rng.random_range(1..=8);
        let p: f64 = rng.random();
        let omega = random_ranked_state(&mut rng, d);
        let (lhs, rhs) = subnorm_entropy_identity(p, &omega)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(report(
        1,
        worst <= 1e-9,
        json!({ "samples": 1000, "max_abs_difference": worst }),
    ))
}

fn known_capacities(seed: u64) -> Result<CriterionReport> {
    let mut rng = rng_for(seed, 2);
    let cfg = OptimizerConfig::with_restarts(16, seed, QUBIT_TOL);
    let id = one_shot_capacity_with(&KrausChannel::identity(2), &cfg)?;
    let half = KrausChannel::amplitude_damping(0.5)?;
    let ad = one_shot_capacity_with(&half, &cfg)?;
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let rho = random_density(&mut rng, 2);
        worst = worst.max(coherent_information(&half, &rho)?.abs());
    }
    let pass = (id.value - 1.0).abs() <= 1e-4 && ad.value.abs() <= 1e-4 && worst <= 1e-9;
    Ok(report(
        2,
        pass,
        json!({
            "identity_capacity": id.value,
            "half_damping_capacity": ad.value,
            "half_damping_max_abs_coherent_information": worst,
        }),
    ))
}

fn complement_identity(seed: u64) -> Result<CriterionReport> {
    let mut rng = rng_for(seed, 3);
    let mut worst: f64 = 0.0;
    let mut all_valid = true;
    for _ in 0..20 {
        let (k0, k1) = (rng.random_range(1..=3), rng.random_range(1..=3));
        let phi0 = KrausChannel::random(&mut rng, 2, 2, k0)?;
        let phi1 = KrausChannel::random(&mut rng, 2, 2, k1)?;
        let d = rng.random_range(2..=3);
        let povm = Povm::random_binary(&mut rng, d);
        let sigma = random_density(&mut rng, d);
        let ds = ProjectiveDirectSum::new(&phi0, &phi1, &povm, &sigma)?;
        all_valid &= ds.channel().validity()?.is_valid(1e-9);
        worst = worst.max(complement_identity_check(&ds, 1e-8)?.distance);
    }
    Ok(report(
        3,
        worst <= 1e-8 && all_valid,
        json!({ "pairs": 20, "max_choi_distance": worst, "all_valid": all_valid }),
    ))
}

/// Direct sum with weights `(w₀, 1 − w₀)` selected by a diagonal proof state.
fn weighted_sum(phi0: &KrausChannel, phi1: &KrausChannel, w0: f64) -> Result<ProjectiveDirectSum> {
    let povm = Povm::binary(ComplexMatrix::unit(2, 0, 0))?;
    let sigma = DensityState::new(ComplexMatrix::from_real_diag(&[w0, 1.0 - w0]))?;
    ProjectiveDirectSum::new(phi0, phi1, &povm, &sigma)
}

fn additivity(seed: u64) -> Result<CriterionReport> {
    let mut rng = rng_for(seed, 4);
    let cfg = OptimizerConfig::with_restarts(32, seed, QUBIT_TOL);
    let mut cases = Vec::new();
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let eta0 = 0.5 * rng.random::<f64>();
        let eta1 = 0.5 * rng.random::<f64>();
        let w0: f64 = rng.random();
        let ds = weighted_sum(
            &KrausChannel::amplitude_damping(eta0)?,
            &KrausChannel::amplitude_damping(eta1)?,
            w0,
        )?;
        let check = additivity_formula_check(&ds, &cfg, 2e-3)?;
        worst = worst.max((check.lhs - check.rhs).abs());
        cases.push(json!({ "eta0": eta0, "eta1": eta1, "w0": w0, "lhs": check.lhs, "rhs": check.rhs }));
    }
    Ok(report(
        4,
        worst <= 2e-3,
        json!({ "max_abs_difference": worst, "cases": cases }),
    ))
}

fn capacity_bound(seed: u64) -> Result<CriterionReport> {
    let cfg = OptimizerConfig::with_restarts(32, seed, QUBIT_TOL);
    let id = KrausChannel::identity(2);
    let half = KrausChannel::amplitude_damping(0.5)?;
    let mut pass = true;
    let mut cases = Vec::new();
    for w0 in [0.25, 0.5, 0.75] {
        let ds = weighted_sum(&id, &half, w0)?;
        let check = capacity_bound_check(&ds, &cfg)?;
        pass &= (check.value - w0).abs() <= 2e-3 && check.pass;
        cases.push(json!({ "w0": w0, "capacity": check.value, "bound": check.bound }));
    }
    Ok(report(5, pass, json!({ "cases": cases })))
}

fn reduction_gap(seed: u64) -> Result<CriterionReport> {
    let eval = |text: &str| -> Result<(f64, f64)> {
        let r = build_reduction(&parse_circuit(text)?)?;
        let e = evaluate_reduction(&r, 8, 16, seed)?;
        Ok((e.weight_accept_max, e.capacity_estimate))
    };
    let (_, accept) = eval(ALWAYS_ACCEPT)?;
    let (_, reject) = eval(ALWAYS_REJECT)?;
    let mut ladder = (0..=4)
        .map(|k| eval(&rotation_verifier(k)))
        .collect::<Result<Vec<_>>>()?;
    ladder.sort_by(|a, b| a.0.total_cmp(&b.0));
    let monotone = ladder.windows(2).all(|w| w[0].1 <= w[1].1 + 2e-3);
    let in_range = ladder
        .iter()
        .chain([&(1.0, accept), &(0.0, reject)])
        .all(|&(_, v)| (-1e-6..=1.0 + 1e-6).contains(&v));
    let pass = accept >= 0.999 && reject <= 0.001 && monotone && in_range;
    let ladder_json: Vec<Value> = ladder
        .iter()
        .map(|(p, v)| json!({ "weight_accept_max": p, "capacity_estimate": v }))
        .collect();
    Ok(report(
        6,
        pass,
        json!({
            "always_accept": accept,
            "always_reject": reject,
            "monotone": monotone,
            "ladder": ladder_json,
        }),
    ))
}

/// Random program on live qubits 0..3 that leaves exactly those live, using
/// at most three preparations.
fn random_fragment<R: Rng + ?Sized>(rng: &mut R) -> String {
    let mut out = String::new();
    let mut ancilla = false;
    let mut preps = 0;
    for _ in 0..rng.random_range(3..=9) {
        let live = if ancilla { 4 } else { 3 };
        match rng.random_range(0..6) {
            0 | 1 => {
                let q = rng.random_range(0..live);
                out.push_str(&format!("{} {q}\n", if rng.random_bool(0.5) { "H" } else { "T" }));
            }
            2 | 3 => {
                let a = rng.random_range(0..live);
                let b = (a + rng.random_range(1..live)) % live;
                out.push_str(&format!("CNOT {a} {b}\n"));
            }
            4 if ancilla => {
                out.push_str("TRACE 3\n");
                ancilla = false;
            }
            4 if preps < 3 => {
                out.push_str("PREP 3\n");
                ancilla = true;
                preps += 1;
            }
            5 if preps < 3 => {
                let q = rng.random_range(0..3);
                out.push_str(&format!("TRACE {q}\nPREP {q}\n"));
                preps += 1;
            }
            _ => out.push_str("H 0\n"),
        }
    }
    if ancilla {
        out.push_str("TRACE 3\n");
    }
    out
}

fn circuit_compiler(seed: u64) -> Result<CriterionReport> {
    let mut rng = rng_for(seed, 7);
    let copy = compile(&parse_circuit("PREP 1; CNOT 0 1; TRACE 1")?)?;
    let dephasing_distance = choi_distance(&copy, &KrausChannel::dephasing(2))?;
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (a, b) = (random_fragment(&mut rng), random_fragment(&mut rng));
        let first = compile(&parse_circuit(&format!("INPUTS 3\n{a}"))?)?;
        let second = compile(&parse_circuit(&format!("INPUTS 3\n{b}"))?)?;
        let whole = compile(&parse_circuit(&format!("INPUTS 3\n{a}{b}"))?)?;
        worst = worst.max(choi_distance(&compose(&second, &first)?, &whole)?);
    }
    Ok(report(
        7,
        dephasing_distance <= 1e-10 && worst <= 1e-10,
        json!({
            "dephasing_choi_distance": dephasing_distance,
            "fragment_pairs": 50,
            "max_composition_distance": worst,
        }),
    ))
}

fn gram_construction(seed: u64) -> Result<CriterionReport> {
    let mut rng = rng_for(seed, 8);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=12);
        let p: f64 = rng.random();
        let g = Graph::random(&mut rng, n, p)?;
        worst = worst.max(gram_system(&g)?.gram_defect(&g));
    }
    let c5 = gram_system(&Graph::cycle(5)?)?;
    let pass = worst <= 1e-8 && (c5.alpha - 0.618034).abs() <= 1e-6;
    Ok(report(
        8,
        pass,
        json!({ "graphs": 200, "max_gram_defect": worst, "c5_alpha": c5.alpha }),
    ))
}

fn zero_error_certificates(_seed: u64) -> Result<CriterionReport> {
    let graphs = [
        ("C5", Graph::cycle(5)?, 2),
        ("Petersen", Graph::petersen(), 4),
        ("K5", Graph::complete(5)?, 1),
        ("empty4", Graph::empty(4)?, 4),
    ];
    let mut pass = true;
    let mut rows = Vec::new();
    for (name, g, expected) in graphs {
        let is = independence_number(&g)?;
        let strategy = PvmStrategy::classical(g.n(), &is.witness)?;
        let cert = distinguishability_certificate(&g, &strategy)?;
        let converse = max_confusable_overlap(&g, &extract_povms(&strategy_to_encoders(&strategy)?)?)?;
        pass &= is.size == expected
            && cert.max_overlap <= 1e-8
            && cert.certified_t == expected
            && converse <= 1e-4;
        rows.push(json!({
            "graph": name,
            "independence_number": is.size,
            "witness": is.witness,
            "max_overlap": cert.max_overlap,
            "certified_bits": cert.certified_bits,
            "converse_max_overlap": converse,
        }));
    }
    Ok(report(9, pass, json!({ "graphs": rows })))
}

fn strategy_checker(seed: u64) -> Result<CriterionReport> {
    let mut rng = rng_for(seed, 10);
    let c5 = Graph::cycle(5)?;
    let corrupted = PvmStrategy::classical(5, &[0, 1])?;
    let check = check_pvm_strategy(&corrupted, &c5)?;
    let exact = matches!(
        check.violations.as_slice(),
        [Violation::Overlap { i: 0, j: 1, v: 0, w: 1, norm }] if (norm - 1.0).abs() < 1e-12
    );

    let mut compositions = 0;
    let mut all_valid = true;
    for g in [c5, Graph::petersen(), Graph::empty(4)?] {
        let witness = independence_number(&g)?.witness;
        let reversed: Vec<usize> = witness.iter().rev().copied().collect();
        let a = PvmStrategy::classical(g.n(), &witness)?;
        let b = PvmStrategy::classical(g.n(), &reversed)?;
        let ab = a.direct_sum(&b)?;
        let rotated = ab.conjugate(&random_unitary(&mut rng, 2))?;
        for s in [
            ab.clone(),
            rotated.direct_sum(&a)?,
            rotated.direct_sum(&rotated)?,
            b.direct_sum(&rotated)?.direct_sum(&ab)?,
        ] {
            compositions += 1;
            all_valid &= check_pvm_strategy(&s, &g)?.valid;
        }
    }
    Ok(report(
        10,
        exact && all_valid,
        json!({
            "corrupted_violations": check.violations,
            "exact_tuple_reported": exact,
            "block_compositions": compositions,
            "all_compositions_valid": all_valid,
        }),
    ))
}
