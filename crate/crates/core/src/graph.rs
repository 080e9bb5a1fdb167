//! Undirected coupling graphs over physical qubit indices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Qubit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("self-loop edge on qubit {0}")]
    SelfLoop(Qubit),
    #[error("edge ({a}, {b}) exceeds declared universe of {num_qubits} qubits")]
    OutOfRange { a: Qubit, b: Qubit, num_qubits: u32 },
    #[error("coverage is undefined against an empty reference graph")]
    EmptyTruth,
    #[error("malformed coupling graph JSON: {0}")]
    Json(String),
}

/// An undirected edge stored as `(min, max)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(Qubit, Qubit);

impl Edge {
    /// Canonicalizes `(a, b)`; self-loops are rejected.
    pub fn new(a: Qubit, b: Qubit) -> Result<Self, GraphError> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Edge(a, b)),
            std::cmp::Ordering::Greater => Ok(Edge(b, a)),
            std::cmp::Ordering::Equal => Err(GraphError::SelfLoop(a)),
        }
    }

    pub fn low(self) -> Qubit {
        self.0
    }

    pub fn high(self) -> Qubit {
        self.1
    }

    pub fn contains(self, q: Qubit) -> bool {
        self.0 == q || self.1 == q
    }

    pub fn pair(self) -> (Qubit, Qubit) {
        (self.0, self.1)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0, self.1)
    }
}

/// A set of undirected edges, optionally tagged with the size of the
/// physical qubit universe it was drawn from.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CouplingGraph {
    edges: BTreeSet<Edge>,
    num_qubits: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct GraphWire {
    edges: Vec<[Qubit; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    num_qubits: Option<u32>,
}

impl CouplingGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_num_qubits(num_qubits: u32) -> Self {
        Self {
            edges: BTreeSet::new(),
            num_qubits: Some(num_qubits),
        }
    }

    pub fn from_pairs<I>(pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Qubit, Qubit)>,
    {
        let mut g = Self::new();
        for (a, b) in pairs {
            g.insert(a, b)?;
        }
        Ok(g)
    }

    pub fn from_edges<I: IntoIterator<Item = Edge>>(edges: I) -> Self {
        Self {
            edges: edges.into_iter().collect(),
            num_qubits: None,
        }
    }

    pub fn num_qubits(&self) -> Option<u32> {
        self.num_qubits
    }

    pub fn set_num_qubits(&mut self, num_qubits: Option<u32>) {
        self.num_qubits = num_qubits;
    }

    /// Size of the qubit universe: the declared size, or one past the
    /// largest endpoint when nothing was declared.
    pub fn universe(&self) -> u32 {
        let max_end = self.edges.iter().map(|e| e.high() + 1).max().unwrap_or(0);
        self.num_qubits.unwrap_or(0).max(max_end)
    }

    pub fn insert(&mut self, a: Qubit, b: Qubit) -> Result<bool, GraphError> {
        Ok(self.edges.insert(Edge::new(a, b)?))
    }

    pub fn insert_edge(&mut self, edge: Edge) -> bool {
        self.edges.insert(edge)
    }

    pub fn contains(&self, edge: Edge) -> bool {
        self.edges.contains(&edge)
    }

    pub fn contains_pair(&self, a: Qubit, b: Qubit) -> bool {
        Edge::new(a, b).map(|e| self.contains(e)).unwrap_or(false)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_set(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Qubits that appear as an endpoint of at least one edge.
    pub fn active_qubits(&self) -> BTreeSet<Qubit> {
        self.edges.iter().flat_map(|e| [e.low(), e.high()]).collect()
    }

    pub fn union_with(&mut self, other: &CouplingGraph) {
        self.edges.extend(other.edges.iter().copied());
        self.num_qubits = match (self.num_qubits, other.num_qubits) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }

    pub fn is_subgraph_of(&self, other: &CouplingGraph) -> bool {
        self.edges.is_subset(&other.edges)
    }

    pub fn intersection_len(&self, other: &CouplingGraph) -> usize {
        self.edges.intersection(&other.edges).count()
    }

    /// Edges with both endpoints in `qubits`.
    pub fn induced(&self, qubits: &BTreeSet<Qubit>) -> CouplingGraph {
        CouplingGraph {
            edges: self
                .edges
                .iter()
                .filter(|e| qubits.contains(&e.low()) && qubits.contains(&e.high()))
                .copied()
                .collect(),
            num_qubits: self.num_qubits,
        }
    }

    pub fn adjacency(&self) -> BTreeMap<Qubit, BTreeSet<Qubit>> {
        let mut adj: BTreeMap<Qubit, BTreeSet<Qubit>> = BTreeMap::new();
        for e in &self.edges {
            adj.entry(e.low()).or_default().insert(e.high());
            adj.entry(e.high()).or_default().insert(e.low());
        }
        adj
    }

    /// Checks every edge endpoint against the declared universe.
    pub fn validate(&self) -> Result<(), GraphError> {
        if let Some(n) = self.num_qubits {
            if let Some(e) = self.edges.iter().find(|e| e.high() >= n) {
                return Err(GraphError::OutOfRange {
                    a: e.low(),
                    b: e.high(),
                    num_qubits: n,
                });
            }
        }
        Ok(())
    }

    /// Compact canonical JSON: `{"edges":[[a,b],...],"num_qubits":n}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        serde_json::from_str(text).map_err(|e| GraphError::Json(e.to_string()))
    }
}

impl Serialize for CouplingGraph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphWire {
            edges: self.edges.iter().map(|e| [e.low(), e.high()]).collect(),
            num_qubits: self.num_qubits,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CouplingGraph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let wire = GraphWire::deserialize(deserializer)?;
        let mut g = CouplingGraph::from_pairs(wire.edges.into_iter().map(|[a, b]| (a, b)))
            .map_err(serde::de::Error::custom)?;
        g.num_qubits = wire.num_qubits;
        g.validate().map_err(serde::de::Error::custom)?;
        Ok(g)
    }
}

impl FromIterator<Edge> for CouplingGraph {
    fn from_iter<T: IntoIterator<Item = Edge>>(iter: T) -> Self {
        Self::from_edges(iter)
    }
}

/// Number of edges present in exactly one of the two graphs.
pub fn hamming_distance(g1: &CouplingGraph, g2: &CouplingGraph) -> usize {
    g1.edges.symmetric_difference(&g2.edges).count()
}

/// Percentage of `truth` edges that also appear in `derived`.
pub fn edge_coverage_percent(derived: &CouplingGraph, truth: &CouplingGraph) -> Result<f64, GraphError> {
    if truth.is_empty() {
        return Err(GraphError::EmptyTruth);
    }
    Ok(100.0 * derived.intersection_len(truth) as f64 / truth.len() as f64)
}
