//! Backend registry and tracing by labeled edge containment.
//!
//! A derived graph is attributed to every registry backend whose coupling
//! map contains all of its edges under the exact physical labels. No
//! isomorphism search is done.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::extract::extract_pool;
use crate::graph::CouplingGraph;
use crate::qasm::ParsedCircuit;
use crate::swap::RecognizerConfig;

const IBM_STYLE_REGISTRY: &str = include_str!("../data/ibm_registry.json");
const T_SHAPE_REGISTRY: &str = include_str!("../data/burlington_vigo.json");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("backend registry is empty")]
    EmptyRegistry,
    #[error("duplicate backend name `{0}` in registry")]
    DuplicateBackend(String),
    #[error("backend `{name}`: {msg}")]
    InvalidBackend { name: String, msg: String },
    #[error("malformed registry JSON: {0}")]
    Json(String),
    #[error("label refers to unknown circuit `{0}`")]
    UnknownSource(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct RecordWire {
    name: String,
    num_qubits: u32,
    edges: Vec<[u32; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackendRecord {
    pub name: String,
    pub num_qubits: u32,
    pub topology: CouplingGraph,
}

impl BackendRecord {
    pub fn new(name: impl Into<String>, topology: CouplingGraph) -> Result<Self, TraceError> {
        let name = name.into();
        let num_qubits = topology.universe();
        Self::with_num_qubits(name, num_qubits, topology)
    }

    pub fn with_num_qubits(name: impl Into<String>, num_qubits: u32, mut topology: CouplingGraph) -> Result<Self, TraceError> {
        let name = name.into();
        topology.set_num_qubits(Some(num_qubits));
        topology.validate().map_err(|e| TraceError::InvalidBackend {
            name: name.clone(),
            msg: e.to_string(),
        })?;
        Ok(Self {
            name,
            num_qubits,
            topology,
        })
    }

    fn contains(&self, derived: &CouplingGraph) -> bool {
        derived.edges().all(|e| e.high() < self.num_qubits) && derived.is_subgraph_of(&self.topology)
    }
}

/// Candidate backends, immutable once built. Names are unique.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Registry {
    backends: Vec<BackendRecord>,
}

impl Registry {
    pub fn new(backends: Vec<BackendRecord>) -> Result<Self, TraceError> {
        let mut seen = BTreeSet::new();
        for b in &backends {
            if !seen.insert(b.name.as_str()) {
                return Err(TraceError::DuplicateBackend(b.name.clone()));
            }
        }
        Ok(Self { backends })
    }

    pub fn from_json(text: &str) -> Result<Self, TraceError> {
        let wire: Vec<RecordWire> = serde_json::from_str(text).map_err(|e| TraceError::Json(e.to_string()))?;
        let backends = wire
            .into_iter()
            .map(|r| {
                let g = CouplingGraph::from_pairs(r.edges.iter().map(|&[a, b]| (a, b))).map_err(|e| {
                    TraceError::InvalidBackend {
                        name: r.name.clone(),
                        msg: e.to_string(),
                    }
                })?;
                BackendRecord::with_num_qubits(r.name, r.num_qubits, g)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(backends)
    }

    pub fn to_json(&self) -> String {
        let wire: Vec<RecordWire> = self
            .backends
            .iter()
            .map(|b| RecordWire {
                name: b.name.clone(),
                num_qubits: b.num_qubits,
                edges: b.topology.edges().map(|e| [e.low(), e.high()]).collect(),
            })
            .collect();
        serde_json::to_string(&wire).expect("registry serialization is infallible")
    }

    /// Heavy-hex style `cambridge`, `paris` and `singapore` coupling maps.
    pub fn ibm_style() -> Self {
        Self::from_json(IBM_STYLE_REGISTRY).expect("bundled registry is valid")
    }

    /// Two 5-qubit backends sharing the same T-shaped map.
    pub fn burlington_vigo() -> Self {
        Self::from_json(T_SHAPE_REGISTRY).expect("bundled registry is valid")
    }

    pub fn backends(&self) -> &[BackendRecord] {
        &self.backends
    }

    pub fn get(&self, name: &str) -> Option<&BackendRecord> {
        self.backends.iter().find(|b| b.name == name)
    }

    pub fn len(&self) -> usize {
        self.backends.len()
    }

    pub fn is_empty(&self) -> bool {
        self.backends.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Unique(String),
    /// Two or more candidates, sorted by name.
    Ambiguous(Vec<String>),
    Unmatched,
}

impl Verdict {
    pub fn candidates(&self) -> Vec<&str> {
        match self {
            Verdict::Unique(n) => vec![n.as_str()],
            Verdict::Ambiguous(ns) => ns.iter().map(String::as_str).collect(),
            Verdict::Unmatched => vec![],
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Unique(_) => "unique",
            Verdict::Ambiguous(_) => "ambiguous",
            Verdict::Unmatched => "unmatched",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceOutcome {
    pub verdict: Verdict,
    /// Largest number of derived edges found in any single backend.
    pub matched_edges: usize,
}

pub fn trace(derived: &CouplingGraph, registry: &Registry) -> Result<TraceOutcome, TraceError> {
    if registry.is_empty() {
        return Err(TraceError::EmptyRegistry);
    }
    let mut candidates: Vec<String> = registry
        .backends
        .iter()
        .filter(|b| b.contains(derived))
        .map(|b| b.name.clone())
        .collect();
    candidates.sort();
    let matched_edges = registry
        .backends
        .iter()
        .map(|b| derived.intersection_len(&b.topology))
        .max()
        .unwrap_or(0);
    let verdict = match candidates.len() {
        0 => Verdict::Unmatched,
        1 => Verdict::Unique(candidates.pop().expect("one candidate")),
        _ => Verdict::Ambiguous(candidates),
    };
    Ok(TraceOutcome { verdict, matched_edges })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoolTraceReport {
    pub outcomes: Vec<(String, TraceOutcome)>,
    pub accuracy_percent: Option<f64>,
    pub per_backend_accuracy: Option<BTreeMap<String, f64>>,
}

/// Traces already-derived graphs. A labeled circuit counts as correct only
/// when its verdict is `Unique` with the labeled backend.
pub fn trace_graphs(
    graphs: &[(String, CouplingGraph)],
    registry: &Registry,
    truth_labels: Option<&BTreeMap<String, String>>,
) -> Result<PoolTraceReport, TraceError> {
    if registry.is_empty() {
        return Err(TraceError::EmptyRegistry);
    }
    if let Some(labels) = truth_labels {
        let known: BTreeSet<&str> = graphs.iter().map(|(n, _)| n.as_str()).collect();
        if let Some(missing) = labels.keys().find(|k| !known.contains(k.as_str())) {
            return Err(TraceError::UnknownSource(missing.clone()));
        }
    }
    let outcomes = graphs
        .par_iter()
        .map(|(name, g)| trace(g, registry).map(|o| (name.clone(), o)))
        .collect::<Result<Vec<_>, _>>()?;

    let (mut accuracy_percent, mut per_backend_accuracy) = (None, None);
    if let Some(labels) = truth_labels.filter(|l| !l.is_empty()) {
        let mut tally: BTreeMap<String, (usize, usize)> = BTreeMap::new();
        for (name, outcome) in &outcomes {
            let Some(label) = labels.get(name) else { continue };
            let entry = tally.entry(label.clone()).or_default();
            entry.1 += 1;
            if outcome.verdict == Verdict::Unique(label.clone()) {
                entry.0 += 1;
            }
        }
        let (correct, total) = tally.values().fold((0, 0), |(c, t), &(c2, t2)| (c + c2, t + t2));
        accuracy_percent = Some(100.0 * correct as f64 / total as f64);
        per_backend_accuracy = Some(
            tally
                .into_iter()
                .map(|(b, (c, t))| (b, 100.0 * c as f64 / t as f64))
                .collect(),
        );
    }
    Ok(PoolTraceReport {
        outcomes,
        accuracy_percent,
        per_backend_accuracy,
    })
}

/// Extracts then traces every circuit, keyed by `source_name`.
pub fn trace_pool(
    circuits: &[ParsedCircuit],
    registry: &Registry,
    config: &RecognizerConfig,
    truth_labels: Option<&BTreeMap<String, String>>,
) -> Result<PoolTraceReport, TraceError> {
    if registry.is_empty() {
        return Err(TraceError::EmptyRegistry);
    }
    let graphs = extract_pool(circuits, config, false);
    trace_graphs(&graphs, registry, truth_labels)
}

impl PoolTraceReport {
    pub fn count(&self, label: &str) -> usize {
        self.outcomes.iter().filter(|(_, o)| o.verdict.label() == label).count()
    }

    /// Circuits traced uniquely to a backend other than their label.
    pub fn wrong_unique(&self, labels: &BTreeMap<String, String>) -> usize {
        self.outcomes
            .iter()
            .filter(|(name, o)| match (&o.verdict, labels.get(name)) {
                (Verdict::Unique(got), Some(want)) => got != want,
                _ => false,
            })
            .count()
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let outcomes: Vec<_> = self
            .outcomes
            .iter()
            .map(|(name, o)| {
                json!({
                    "source_name": name,
                    "verdict": o.verdict.label(),
                    "backends": o.verdict.candidates(),
                    "matched_edges": o.matched_edges,
                })
            })
            .collect();
        let mut v = json!({ "outcomes": outcomes });
        if let Some(a) = self.accuracy_percent {
            v["accuracy_percent"] = json!(a);
        }
        if let Some(per) = &self.per_backend_accuracy {
            v["per_backend_accuracy"] = json!(per);
        }
        v
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn to_table(&self) -> String {
        let width = self.outcomes.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(7);
        let mut out = format!("{:<width$}  {:<9}  {:>7}  backends\n", "circuit", "verdict", "matched");
        for (name, o) in &self.outcomes {
            let _ = writeln!(
                out,
                "{:<width$}  {:<9}  {:>7}  {}",
                name,
                o.verdict.label(),
                o.matched_edges,
                o.verdict.candidates().join(",")
            );
        }
        if let Some(a) = self.accuracy_percent {
            let _ = writeln!(out, "accuracy: {a:.2}%");
        }
        for (b, a) in self.per_backend_accuracy.iter().flatten() {
            let _ = writeln!(out, "  {b}: {a:.2}%");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(pairs: &[(u32, u32)]) -> CouplingGraph {
        CouplingGraph::from_pairs(pairs.iter().copied()).unwrap()
    }

    fn registry() -> Registry {
        Registry::new(vec![
            BackendRecord::new("alpha", g(&[(3, 4), (3, 5), (3, 7), (0, 1)])).unwrap(),
            BackendRecord::new("beta", g(&[(3, 4), (3, 5), (0, 1)])).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn unique_ambiguous_unmatched() {
        let r = registry();
        let o = trace(&g(&[(3, 4), (3, 5), (3, 7)]), &r).unwrap();
        assert_eq!(o.verdict, Verdict::Unique("alpha".into()));
        assert_eq!(o.matched_edges, 3);
        assert_eq!(
            trace(&g(&[(0, 1)]), &r).unwrap().verdict,
            Verdict::Ambiguous(vec!["alpha".into(), "beta".into()])
        );
        let o = trace(&g(&[(1000, 1001)]), &r).unwrap();
        assert_eq!(o.verdict, Verdict::Unmatched);
        assert_eq!(o.matched_edges, 0);
    }

    #[test]
    fn empty_derived_is_ambiguous_over_all() {
        assert_eq!(
            trace(&CouplingGraph::new(), &registry()).unwrap().verdict,
            Verdict::Ambiguous(vec!["alpha".into(), "beta".into()])
        );
    }

    #[test]
    fn registry_order_is_irrelevant() {
        let mut backends = registry().backends().to_vec();
        backends.reverse();
        let reversed = Registry::new(backends).unwrap();
        for d in [g(&[(0, 1)]), g(&[(3, 7)]), g(&[(9, 10)])] {
            assert_eq!(trace(&d, &registry()).unwrap(), trace(&d, &reversed).unwrap());
        }
    }

    #[test]
    fn registry_errors() {
        assert_eq!(trace(&g(&[(0, 1)]), &Registry::default()), Err(TraceError::EmptyRegistry));
        let dup = Registry::new(vec![
            BackendRecord::new("a", g(&[(0, 1)])).unwrap(),
            BackendRecord::new("a", g(&[(1, 2)])).unwrap(),
        ]);
        assert_eq!(dup, Err(TraceError::DuplicateBackend("a".into())));
        assert!(matches!(
            Registry::from_json(r#"[{"name":"x","num_qubits":2,"edges":[[0,5]]}]"#),
            Err(TraceError::InvalidBackend { .. })
        ));
        assert!(matches!(Registry::from_json("{"), Err(TraceError::Json(_))));
    }

    #[test]
    fn registry_json_round_trip() {
        let r = registry();
        assert_eq!(Registry::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn bundled_registries() {
        let ibm = Registry::ibm_style();
        let sizes: Vec<_> = ibm.backends().iter().map(|b| (b.name.as_str(), b.num_qubits, b.topology.len())).collect();
        assert_eq!(sizes, vec![("cambridge", 28, 30), ("paris", 27, 28), ("singapore", 20, 23)]);
        let tv = Registry::burlington_vigo();
        assert_eq!(tv.len(), 2);
        assert_eq!(tv.backends()[0].topology, tv.backends()[1].topology);
    }

    #[test]
    fn pool_accuracy_counts_only_unique_correct() {
        let r = registry();
        let graphs = vec![
            ("c0".to_string(), g(&[(3, 7)])),
            ("c1".to_string(), g(&[(0, 1)])),
            ("c2".to_string(), g(&[(8, 9)])),
        ];
        let labels: BTreeMap<String, String> =
            [("c0", "alpha"), ("c1", "beta"), ("c2", "beta")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let report = trace_graphs(&graphs, &r, Some(&labels)).unwrap();
        assert!((report.accuracy_percent.unwrap() - 100.0 / 3.0).abs() < 1e-12);
        let per = report.per_backend_accuracy.as_ref().unwrap();
        assert_eq!(per["alpha"], 100.0);
        assert_eq!(per["beta"], 0.0);
        assert_eq!(report.wrong_unique(&labels), 0);
        assert_eq!((report.count("unique"), report.count("ambiguous"), report.count("unmatched")), (1, 1, 1));
    }

    #[test]
    fn unknown_label_source() {
        let labels: BTreeMap<String, String> = [("nope".to_string(), "alpha".to_string())].into_iter().collect();
        assert_eq!(
            trace_graphs(&[], &registry(), Some(&labels)),
            Err(TraceError::UnknownSource("nope".into()))
        );
    }
}
