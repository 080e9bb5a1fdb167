//! Whole-backend assembly from pools of derived subgraphs, and projection
//! of a shared (multi-tenant) derivation onto one user's qubits.

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use thiserror::Error;

use crate::graph::{edge_coverage_percent, CouplingGraph, GraphError};
use crate::qasm::Layout;

#[derive(Clone, Debug, PartialEq)]
pub struct AssemblyReport {
    pub assembled: CouplingGraph,
    pub per_circuit: Vec<(String, CouplingGraph)>,
    /// `(circuits_used, percent)`; present only when a truth graph was given.
    pub coverage_curve: Option<Vec<(usize, f64)>>,
}

/// Unions the pool. The coverage curve follows pool order.
pub fn assemble(pool: &[(String, CouplingGraph)], truth: Option<&CouplingGraph>) -> Result<AssemblyReport, GraphError> {
    let mut assembled = CouplingGraph::new();
    let mut curve = truth.map(|_| Vec::with_capacity(pool.len()));
    for (k, (_, g)) in pool.iter().enumerate() {
        assembled.union_with(g);
        if let (Some(curve), Some(truth)) = (curve.as_mut(), truth) {
            curve.push((k + 1, edge_coverage_percent(&assembled, truth)?));
        }
    }
    if pool.is_empty() {
        curve = None;
    }
    Ok(AssemblyReport {
        assembled,
        per_circuit: pool.to_vec(),
        coverage_curve: curve,
    })
}

/// Deterministic shuffle of a pool, for averaging curves over random orders.
pub fn shuffled<T: Clone>(pool: &[T], seed: u64) -> Vec<T> {
    let mut out = pool.to_vec();
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    out
}

impl AssemblyReport {
    pub fn final_coverage(&self) -> Option<f64> {
        self.coverage_curve.as_ref().and_then(|c| c.last()).map(|&(_, p)| p)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let per_circuit: Vec<_> = self
            .per_circuit
            .iter()
            .map(|(name, g)| json!({ "source_name": name, "graph": g }))
            .collect();
        let mut v = json!({
            "assembled": self.assembled,
            "per_circuit": per_circuit,
        });
        if let Some(curve) = &self.coverage_curve {
            v["coverage_curve"] = json!(curve.iter().map(|&(k, p)| json!([k, p])).collect::<Vec<_>>());
        }
        v
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    /// `circuits_used,percent` rows for plotting.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("circuits_used,percent\n");
        for &(k, p) in self.coverage_curve.iter().flatten() {
            let _ = writeln!(out, "{k},{p:.4}");
        }
        out
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("logical qubit {0} is not in the layout")]
    MissingLogical(u32),
}

/// Induced subgraph of `derived` on the physical qubits that `layout`
/// assigns to `user_logical`.
pub fn project_user_subgraph(
    derived: &CouplingGraph,
    layout: &Layout,
    user_logical: &BTreeSet<u32>,
) -> Result<CouplingGraph, ProjectionError> {
    let physical = user_logical
        .iter()
        .map(|l| layout.get(l).copied().ok_or(ProjectionError::MissingLogical(*l)))
        .collect::<Result<BTreeSet<_>, _>>()?;
    Ok(derived.induced(&physical))
}
