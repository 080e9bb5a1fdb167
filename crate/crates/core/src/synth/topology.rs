use std::collections::{BTreeSet, VecDeque};

use crate::graph::CouplingGraph;
use crate::Qubit;

use super::SynthError;

/// Shape of a generated backend topology.
#[derive(Clone, Debug, PartialEq)]
pub enum TopologySpec {
    /// Path `0 - 1 - ... - n-1`.
    Linear(u32),
    /// A bar of `(n+1)/2` qubits with the rest chained off its middle qubit.
    TShape(u32),
    /// Two columns joined by a crossbar between their middle qubits.
    HShape(u32),
    /// Ring; needs `n >= 3`.
    Loop(u32),
    Explicit(CouplingGraph),
}

impl TopologySpec {
    pub fn graph(&self) -> Result<CouplingGraph, SynthError> {
        let g = match *self {
            TopologySpec::Linear(n) => {
                need(n >= 1, "linear topology needs at least 1 qubit")?;
                chain(n, &(0..n).collect::<Vec<_>>())
            }
            TopologySpec::Loop(n) => {
                need(n >= 3, "loop topology needs at least 3 qubits")?;
                let mut g = chain(n, &(0..n).collect::<Vec<_>>());
                add(&mut g, 0, n - 1);
                g
            }
            TopologySpec::TShape(n) => {
                need(n >= 2, "T-shaped topology needs at least 2 qubits")?;
                let bar = n.div_ceil(2);
                let mut g = chain(n, &(0..bar).collect::<Vec<_>>());
                let stem: Vec<Qubit> = std::iter::once((bar - 1) / 2).chain(bar..n).collect();
                g.union_with(&chain(n, &stem));
                g
            }
            TopologySpec::HShape(n) => {
                need(n >= 4, "H-shaped topology needs at least 4 qubits")?;
                let side = (n / 3).max(2);
                let left: Vec<Qubit> = (0..side).collect();
                let right: Vec<Qubit> = (side..2 * side).collect();
                let mut g = chain(n, &left);
                g.union_with(&chain(n, &right));
                let bridge: Vec<Qubit> = std::iter::once(left[left.len() / 2])
                    .chain(2 * side..n)
                    .chain(std::iter::once(right[right.len() / 2]))
                    .collect();
                g.union_with(&chain(n, &bridge));
                g
            }
            TopologySpec::Explicit(ref g) => {
                g.validate().map_err(|e| SynthError::InvalidTopology(e.to_string()))?;
                let mut g = g.clone();
                g.set_num_qubits(Some(g.universe()));
                g
            }
        };
        let all: BTreeSet<Qubit> = (0..g.universe()).collect();
        if !is_connected(&g, &all) {
            return Err(SynthError::Disconnected);
        }
        Ok(g)
    }

    pub fn num_qubits(&self) -> u32 {
        match self {
            TopologySpec::Linear(n) | TopologySpec::TShape(n) | TopologySpec::HShape(n) | TopologySpec::Loop(n) => *n,
            TopologySpec::Explicit(g) => g.universe(),
        }
    }

    /// Builds a named shape: `linear`, `tshape`, `hshape` or `loop`.
    pub fn from_name(name: &str, n: u32) -> Result<Self, SynthError> {
        match name.to_ascii_lowercase().as_str() {
            "linear" | "path" => Ok(TopologySpec::Linear(n)),
            "tshape" | "t" => Ok(TopologySpec::TShape(n)),
            "hshape" | "h" => Ok(TopologySpec::HShape(n)),
            "loop" | "ring" => Ok(TopologySpec::Loop(n)),
            other => Err(SynthError::InvalidTopology(format!("unknown topology `{other}`"))),
        }
    }
}

fn need(ok: bool, msg: &str) -> Result<(), SynthError> {
    if ok {
        Ok(())
    } else {
        Err(SynthError::InvalidTopology(msg.to_string()))
    }
}

fn add(g: &mut CouplingGraph, a: Qubit, b: Qubit) {
    g.insert(a, b).expect("generated endpoints are distinct");
}

fn chain(n: u32, qubits: &[Qubit]) -> CouplingGraph {
    let mut g = CouplingGraph::with_num_qubits(n);
    for w in qubits.windows(2) {
        add(&mut g, w[0], w[1]);
    }
    g
}

/// Whether `nodes` induce a connected subgraph of `g`. Empty sets count as connected.
pub(crate) fn is_connected(g: &CouplingGraph, nodes: &BTreeSet<Qubit>) -> bool {
    let Some(&start) = nodes.iter().next() else {
        return true;
    };
    let adj = g.induced(nodes).adjacency();
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(q) = queue.pop_front() {
        for &r in adj.get(&q).into_iter().flatten() {
            if seen.insert(r) {
                queue.push_back(r);
            }
        }
    }
    seen.len() == nodes.len()
}
