//! Input generators shared by the benchmarks.

use qforensics::synth::{synthesize, LayoutMode, SynthConfig};
use qforensics::{CouplingGraph, ParsedCircuit, Registry, SwapKind, TopologySpec};

/// A routed circuit on a 27-qubit heavy-hex style map with roughly
/// `target_len` instructions.
pub fn long_circuit(target_len: usize, seed: u64) -> ParsedCircuit {
    let topology = TopologySpec::Explicit(paris());
    let cfg = SynthConfig::new(20, target_len / 4)
        .with_seed(seed)
        .with_layout(LayoutMode::Random(seed))
        .with_disguise(SwapKind::ALL);
    synthesize(&topology, &cfg).expect("valid config").circuit
}

/// `size` labeled circuits spread round-robin over the bundled registry.
pub fn labeled_pool(size: usize) -> (Vec<ParsedCircuit>, Registry) {
    let registry = Registry::ibm_style();
    let circuits = (0..size)
        .map(|i| {
            let backend = &registry.backends()[i % registry.len()];
            let cfg = SynthConfig::new(12, 30)
                .with_seed(i as u64)
                .with_layout(LayoutMode::Random(i as u64));
            synthesize(&TopologySpec::Explicit(backend.topology.clone()), &cfg)
                .expect("valid config")
                .circuit
                .with_source_name(format!("c{i}"))
        })
        .collect();
    (circuits, registry)
}

fn paris() -> CouplingGraph {
    Registry::ibm_style().get("paris").expect("bundled").topology.clone()
}
