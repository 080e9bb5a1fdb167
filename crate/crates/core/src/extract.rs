//! Coupling-map extraction from a single transpiled circuit.
//!
//! Two-qubit gates reveal physical connectivity, except between qubits
//! that have already been swapped: once a pair has seen a SWAP, later
//! two-qubit gates on it are not trusted as edges. The history is never
//! cleared.

use rayon::prelude::*;

use crate::graph::{CouplingGraph, Edge};
use crate::qasm::ParsedCircuit;
use crate::swap::{scan_swaps, RecognizerConfig, SwapEvent};
use crate::{Diagnostic, Qubit};

/// Symmetric flag matrix over the physical qubit universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapHistory {
    n: usize,
    flags: Vec<bool>,
}

impl SwapHistory {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            n: num_qubits,
            flags: vec![false; num_qubits * num_qubits],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn mark(&mut self, a: Qubit, b: Qubit) {
        let (a, b) = (a as usize, b as usize);
        if a != b {
            self.flags[a * self.n + b] = true;
            self.flags[b * self.n + a] = true;
        }
    }

    pub fn is_marked(&self, a: Qubit, b: Qubit) -> bool {
        let (a, b) = (a as usize, b as usize);
        a < self.n && b < self.n && self.flags[a * self.n + b]
    }

    pub fn marked_pairs(&self) -> Vec<Edge> {
        let n = self.n as Qubit;
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| self.is_marked(a, b))
            .map(|(a, b)| Edge::new(a, b).expect("a < b"))
            .collect()
    }

    /// The sub-matrix over `order`, e.g. a circuit's active qubits.
    pub fn restricted(&self, order: &[Qubit]) -> Vec<Vec<bool>> {
        order
            .iter()
            .map(|&r| order.iter().map(|&c| self.is_marked(r, c)).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extraction {
    pub graph: CouplingGraph,
    pub history: SwapHistory,
    pub events: Vec<SwapEvent>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Derives the coupling subgraph `circuit` was routed on.
///
/// With `include_swap_edges`, each recognized SWAP also contributes its pair
/// as an edge.
pub fn extract(circuit: &ParsedCircuit, config: &RecognizerConfig, include_swap_edges: bool) -> Extraction {
    let scan = scan_swaps(circuit, config);
    let mut diagnostics = scan.diagnostics;
    let universe = circuit
        .instructions
        .iter()
        .flat_map(|i| i.qubits.iter().map(|&q| q + 1))
        .max()
        .unwrap_or(0)
        .max(circuit.num_qubits);
    let mut history = SwapHistory::new(universe as usize);
    let mut graph = CouplingGraph::with_num_qubits(universe);

    let mut events = scan.events.iter().peekable();
    let mut i = 0;
    while i < circuit.instructions.len() {
        if let Some(ev) = events.next_if(|ev| ev.span.start == i) {
            let (a, b) = ev.pair.pair();
            history.mark(a, b);
            if include_swap_edges {
                graph.insert_edge(ev.pair);
            }
            i = ev.span.end;
            continue;
        }
        let inst = &circuit.instructions[i];
        match inst.qubits.as_slice() {
            &[a, b] => {
                if !history.is_marked(a, b) {
                    if let Ok(edge) = Edge::new(a, b) {
                        graph.insert_edge(edge);
                    }
                }
            }
            [_, _, _] => diagnostics.push(Diagnostic::new(
                i,
                format!("three-qubit gate `{}` contributes no edges; input may not be transpiled", inst.name),
            )),
            _ => {}
        }
        i += 1;
    }
    diagnostics.sort_by_key(|d| d.index);

    Extraction {
        graph,
        history,
        events: scan.events,
        diagnostics,
    }
}

pub fn derive_coupling_map(circuit: &ParsedCircuit, config: &RecognizerConfig, include_swap_edges: bool) -> CouplingGraph {
    extract(circuit, config, include_swap_edges).graph
}

/// Extracts every circuit in parallel; output order follows input order.
pub fn extract_pool(
    circuits: &[ParsedCircuit],
    config: &RecognizerConfig,
    include_swap_edges: bool,
) -> Vec<(String, CouplingGraph)> {
    circuits
        .par_iter()
        .map(|c| (c.source_name.clone(), derive_coupling_map(c, config, include_swap_edges)))
        .collect()
}
