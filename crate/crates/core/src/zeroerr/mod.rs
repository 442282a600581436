//! Zero-error communication over the classical-quantum channel of a graph.
//!
//! The pipeline runs from a graph file to the confusability matrix, the
//! Gram vectors and their c-q channel, then to an exact independence number
//! and a checked certificate that the corresponding messages stay perfectly
//! distinguishable with entanglement assistance. Lower bounds are only
//! reported once the certificate has been verified numerically.

mod graph;
mod gram;
mod mis;
mod strategy;

pub use graph::{confusability_matrix, Graph};
pub use gram::{cq_channel, gram_system, GramSystem};
pub use mis::{
    independence_number, independence_number_exhaustive, IndependentSet, EXHAUSTIVE_CAP, MIS_CAP,
};
pub use strategy::{
    check_pvm_strategy, distinguishability_certificate, extract_povms, max_confusable_overlap,
    strategy_to_encoders, Certificate, PvmStrategy, StrategyCheck, Violation,
    CERTIFICATE_DIM_CAP, OVERLAP_TOL, PVM_TOL,
};

use serde::Serialize;

use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct CapacityBounds {
    /// `log₂` of the certified message count.
    pub lower_bits: f64,
    /// `log₂ n`, the trivial bound.
    pub upper_bits: f64,
    pub independent_set: IndependentSet,
    pub certificate: Certificate,
}

/// Certified `[log₂ α(G), log₂ n]` bracket on the one-shot
/// entanglement-assisted zero-error capacity of the graph's c-q channel.
pub fn capacity_bounds(g: &Graph) -> Result<CapacityBounds> {
    let independent_set = independence_number(g)?;
    let strategy = PvmStrategy::classical(g.n(), &independent_set.witness)?;
    let certificate = distinguishability_certificate(g, &strategy)?;
    Ok(CapacityBounds {
        lower_bits: certificate.certified_bits,
        upper_bits: (g.n() as f64).log2(),
        independent_set,
        certificate,
    })
}
