use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use capq_core::capacity::{probe_estimate, OptimizerConfig};
use capq_core::channels::KrausChannel;
use capq_core::circuits::{build_reduction, evaluate_joint, evaluate_reduction, parse_circuit};
use capq_core::directsum::{
    additivity_formula_check, capacity_bound_check, complement_identity_check, Povm,
    ProjectiveDirectSum,
};
use capq_core::linmath::DensityState;
use capq_core::zeroerr::{
    capacity_bounds, check_pvm_strategy, cq_channel, distinguishability_certificate, gram_system,
    Graph, PvmStrategy, CERTIFICATE_DIM_CAP,
};
use capq_core::{selftest, Error};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::{
    CapacityArgs, ChannelAction, Check, Command, DirectsumArgs, GraphArgs, ReduceArgs,
};

#[derive(Debug)]
pub enum Failure {
    /// Bad input: unreadable or malformed files, out-of-range parameters.
    Validation(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoConvergence(_) | Error::NegativeEigenvalue(_) => Failure::Internal(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

/// Command results plus whether every check they contain passed.
pub struct Outcome {
    pub results: Value,
    pub pass: bool,
}

impl Outcome {
    fn ok(results: Value) -> Self {
        Self {
            results,
            pass: true,
        }
    }
}

pub struct Context {
    pub seed: u64,
    pub inputs: BTreeMap<String, String>,
}

impl Context {
    fn read(&mut self, role: &str, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
        self.inputs
            .insert(role.to_string(), hex::encode(Sha256::digest(&bytes)));
        Ok(bytes)
    }

    fn read_text(&mut self, role: &str, path: &Path) -> Result<String, Failure> {
        String::from_utf8(self.read(role, path)?)
            .map_err(|_| Failure::Validation(format!("{} is not UTF-8", path.display())))
    }

    fn read_json<T: DeserializeOwned>(&mut self, role: &str, path: &Path) -> Result<T, Failure> {
        let bytes = self.read(role, path)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
    }
}

pub fn name(cmd: &Command) -> String {
    match cmd {
        Command::Channel { action } => match action {
            ChannelAction::Validate { .. } => "channel validate",
            ChannelAction::Choi { .. } => "channel choi",
            ChannelAction::Complement { .. } => "channel complement",
        }
        .to_string(),
        Command::Capacity(_) => "capacity".into(),
        Command::Directsum(_) => "directsum".into(),
        Command::Reduce(_) => "reduce".into(),
        Command::Graph(_) => "graph".into(),
        Command::Selftest => "selftest".into(),
    }
}

pub fn run(cmd: &Command, ctx: &mut Context) -> Result<Outcome, Failure> {
    match cmd {
        Command::Channel { action } => channel(action, ctx),
        Command::Capacity(a) => capacity(a, ctx),
        Command::Directsum(a) => directsum(a, ctx),
        Command::Reduce(a) => reduce(a, ctx),
        Command::Graph(a) => graph(a, ctx),
        Command::Selftest => {
            let criteria = selftest::run_all(ctx.seed);
            let pass = criteria.iter().all(|c| c.pass);
            Ok(Outcome {
                results: json!({ "all_pass": pass, "criteria": criteria }),
                pass,
            })
        }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value, Failure> {
    serde_json::to_value(x).map_err(|e| Failure::Internal(e.to_string()))
}

fn channel(action: &ChannelAction, ctx: &mut Context) -> Result<Outcome, Failure> {
    match action {
        ChannelAction::Validate { file } => {
            let ch: KrausChannel = ctx.read_json("channel", file)?;
            let v = ch.validity()?;
            let pass = v.is_valid(capq_core::channels::CHANNEL_TOL);
            Ok(Outcome {
                results: json!({
                    "valid": pass,
                    "dim_in": ch.dim_in(),
                    "dim_out": ch.dim_out(),
                    "num_kraus": ch.num_kraus(),
                    "tp_defect": v.tp_defect,
                    "choi_min_eigenvalue": v.choi_min_eigenvalue,
                }),
                pass,
            })
        }
        ChannelAction::Choi { file } => {
            let ch: KrausChannel = ctx.read_json("channel", file)?;
            let choi = ch.choi();
            Ok(Outcome::ok(json!({
                "dim_in": choi.dim_in,
                "dim_out": choi.dim_out,
                "choi": to_value(&choi.mat)?,
            })))
        }
        ChannelAction::Complement { file } => {
            let ch: KrausChannel = ctx.read_json("channel", file)?;
            Ok(Outcome::ok(json!({ "complement": to_value(&ch.complement())? })))
        }
    }
}

fn capacity(a: &CapacityArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let ch: KrausChannel = ctx.read_json("channel", &a.channel)?;
    if a.restarts == 0 {
        return Err(Failure::Validation("--restarts must be positive".into()));
    }
    let copies = a.copies as usize;
    let cfg = OptimizerConfig::with_restarts(a.restarts, ctx.seed, a.tol);
    let est = probe_estimate(&ch, copies, &cfg)?;
    Ok(Outcome::ok(json!({
        "value": est.value / copies as f64,
        "copies": copies,
        "argmax_state": to_value(&est.argmax_state)?,
        "restarts_used": est.restarts_used,
        "converged": est.converged,
    })))
}

fn directsum(a: &DirectsumArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let phi0: KrausChannel = ctx.read_json("phi0", &a.phi0)?;
    let phi1: KrausChannel = ctx.read_json("phi1", &a.phi1)?;
    let povm: Povm = ctx.read_json("povm", &a.povm)?;
    let sigma: DensityState = ctx.read_json("sigma", &a.sigma)?;
    let ds = ProjectiveDirectSum::new(&phi0, &phi1, &povm, &sigma)?;
    let ch = ds.channel();
    let (w0, w1) = ds.weights();
    let mut results = json!({
        "weights": [w0, w1],
        "output_padding": ds.output_padding(),
        "dim_in": ch.dim_in(),
        "dim_out": ch.dim_out(),
        "num_kraus": ch.num_kraus(),
    });
    let cfg = OptimizerConfig::with_restarts(a.restarts.max(1), ctx.seed, 1e-4);
    let (check, pass) = match a.check {
        None => {
            results["channel"] = to_value(&ch)?;
            return Ok(Outcome::ok(results));
        }
        Some(Check::Complement) => {
            let c = complement_identity_check(&ds, a.tol.unwrap_or(1e-8))?;
            (to_value(&c)?, c.pass)
        }
        Some(Check::Additivity) => {
            let c = additivity_formula_check(&ds, &cfg, a.tol.unwrap_or(2e-3))?;
            (to_value(&c)?, c.pass)
        }
        Some(Check::Bound) => {
            let c = capacity_bound_check(&ds, &cfg)?;
            (to_value(&c)?, c.pass)
        }
    };
    results["check"] = check;
    Ok(Outcome { results, pass })
}

fn reduce(a: &ReduceArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let text = ctx.read_text("verifier", &a.verifier)?;
    let r = build_reduction(&parse_circuit(&text)?)?;
    let e = evaluate_reduction(&r, a.sigma_restarts.max(1), a.restarts.max(1), ctx.seed)?;
    let mut results = json!({
        "capacity_estimate": e.capacity_estimate,
        "weight_accept_max": e.weight_accept_max,
        "weight_accept_optimized": e.weight_accept_optimized,
        "sigma_source": e.sigma_source,
        "converged": e.converged,
        "instance_summary": to_value(&r.summary())?,
    });
    if a.joint {
        results["joint_experimental"] = to_value(&evaluate_joint(&r, a.restarts.max(1), ctx.seed)?)?;
    }
    Ok(Outcome::ok(results))
}

fn graph(a: &GraphArgs, ctx: &mut Context) -> Result<Outcome, Failure> {
    let text = ctx.read_text("graph", &a.input)?;
    let g = Graph::parse(&text)?;
    if a.gram {
        let gs = gram_system(&g)?;
        return Ok(Outcome::ok(json!({
            "alpha": gs.alpha,
            "edge_inner_product": 1.0 / (1.0 + gs.alpha),
            "max_gram_defect": gs.gram_defect(&g),
            "vectors": to_value(&gs.vectors)?,
        })));
    }
    if let Some(out) = &a.channel {
        let ch = cq_channel(&gram_system(&g)?)?;
        let body = serde_json::to_string(&ch).map_err(|e| Failure::Internal(e.to_string()))?;
        fs::write(out, body)
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", out.display())))?;
        return Ok(Outcome::ok(json!({
            "written": out.display().to_string(),
            "dim": ch.dim_in(),
            "num_kraus": ch.num_kraus(),
        })));
    }
    if let Some(path) = &a.certify {
        let s: PvmStrategy = ctx.read_json("strategy", path)?;
        let check = check_pvm_strategy(&s, &g)?;
        let mut results = json!({ "check": to_value(&check)? });
        let mut pass = check.valid;
        if s.dim() <= CERTIFICATE_DIM_CAP {
            let cert = distinguishability_certificate(&g, &s)?;
            pass &= cert.certified_t == s.t();
            results["certificate"] = to_value(&cert)?;
        } else {
            results["certificate"] = json!(null);
            results["certificate_skipped"] =
                json!(format!("dimension {} exceeds {CERTIFICATE_DIM_CAP}", s.dim()));
        }
        return Ok(Outcome { results, pass });
    }
    let b = capacity_bounds(&g)?;
    Ok(Outcome::ok(json!({
        "lower_bits": b.lower_bits,
        "upper_bits": b.upper_bits,
        "independence_number": b.independent_set.size,
        "witness": b.independent_set.witness,
        "certificate": to_value(&b.certificate)?,
    })))
}
