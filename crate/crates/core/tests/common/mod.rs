#![allow(dead_code)]

use std::collections::BTreeSet;

use qforensics::synth::{synthesize, LayoutMode, SynthConfig, SynthOutput};
use qforensics::{CouplingGraph, Edge, SwapKind, TopologySpec};

pub fn graph(pairs: &[(u32, u32)]) -> CouplingGraph {
    CouplingGraph::from_pairs(pairs.iter().copied()).unwrap()
}

/// Direct `cx` pairs emitted at or after `from`, skipping any pair that a
/// recorded routing SWAP touched earlier in the stream.
pub fn brute_force_edges(out: &SynthOutput, from: usize) -> CouplingGraph {
    let mut g = CouplingGraph::new();
    let in_swap = |i: usize| out.routing_swaps.iter().any(|s| s.span.contains(&i));
    for (i, inst) in out.circuit.instructions.iter().enumerate().skip(from) {
        if inst.name != "cx" || in_swap(i) {
            continue;
        }
        let e = Edge::new(inst.qubits[0], inst.qubits[1]).unwrap();
        let swapped_before = out.routing_swaps.iter().any(|s| s.span.end <= i && s.pair == e);
        if !swapped_before {
            g.insert_edge(e);
        }
    }
    g
}

/// Every two-qubit instruction acts on a topology edge.
pub fn all_interactions_on_edges(out: &SynthOutput) -> bool {
    out.circuit
        .instructions
        .iter()
        .filter_map(|i| i.pair())
        .all(|(a, b)| out.ground_truth.contains_pair(a, b))
}

pub fn shapes(n: u32) -> Vec<TopologySpec> {
    vec![TopologySpec::Linear(n), TopologySpec::TShape(n), TopologySpec::HShape(n)]
}

/// Fraction of each backend's edges found in no other backend.
pub fn distinct_fractions(graphs: &[CouplingGraph]) -> Vec<f64> {
    graphs
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let others: BTreeSet<Edge> = graphs
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .flat_map(|(_, h)| h.edges())
                .collect();
            g.edges().filter(|e| !others.contains(e)).count() as f64 / g.len() as f64
        })
        .collect()
}

/// A random routed circuit on `topology`.
pub fn random_fixture(topology: &TopologySpec, logical: u32, ops: usize, seed: u64) -> SynthOutput {
    let cfg = SynthConfig::new(logical, ops)
        .with_seed(seed)
        .with_layout(LayoutMode::Random(seed ^ 0x5eed))
        .with_disguise(SwapKind::ALL);
    synthesize(topology, &cfg).unwrap()
}
