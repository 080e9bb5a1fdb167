//! Ground-truth generator of transpiled-like circuits.
//!
//! Random two-qubit operations between logical qubits are routed on a
//! chosen topology by shortest-path SWAP insertion. SWAPs can be emitted in
//! any of the recognized disguises, so every recognizer path is exercised.

mod emit;
mod topology;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fs;
use std::io;
use std::ops::Range;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{CouplingGraph, Edge};
use crate::qasm::{layout_to_json, GateDefinition, GateTemplate, Instruction, Layout, ParsedCircuit};
use crate::swap::SwapKind;
use crate::unitary::Mat4;
use crate::Qubit;

pub use emit::{emit_qasm, EmitError};
pub use topology::TopologySpec;

/// Name of the custom gate used for the named-alias disguise.
pub const ALIAS_GATE: &str = "swap_route";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("topology is disconnected")]
    Disconnected,
    #[error("invalid topology: {0}")]
    InvalidTopology(String),
    #[error("{logical} logical qubits do not fit on {qubits} physical qubits")]
    TooManyLogical { logical: u32, qubits: u32 },
    #[error("disguise set is empty")]
    EmptyDisguise,
    #[error("invalid layout: {0}")]
    BadLayout(String),
    #[error("user boundary {boundary} must lie strictly between 0 and {num_logical}")]
    BadBoundary { boundary: u32, num_logical: u32 },
    #[error("{0} is not an edge of the routing graph")]
    NotAnEdge(Edge),
}

/// Initial placement of logical qubits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LayoutMode {
    /// Logical `i` on physical `i`.
    Identity,
    /// Seeded random placement.
    Random(u64),
    /// Logical `i` on `region[i]`. Routing stays inside the region.
    Region(Vec<Qubit>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub num_logical: u32,
    /// Random operations per program.
    pub num_2q_ops: usize,
    pub layout_mode: LayoutMode,
    /// Used round-robin for routing SWAPs.
    pub disguise: Vec<SwapKind>,
    /// Logical qubits `0..k` form a dummy program and `k..` the user
    /// program. Each is routed on its own connected region; dummy
    /// operations come first.
    pub user_boundary: Option<u32>,
    pub seed: u64,
    /// Start with one direct `cx` on every routing-graph edge.
    pub enumerate_edges: bool,
    /// Edges left out of the enumeration and exercised once by a routing
    /// SWAP right after it.
    pub swap_only_edges: Vec<Edge>,
    /// Insert a random single-qubit gate after each operation. Without
    /// these, consecutive direct `cx` gates can happen to form a SWAP pattern.
    pub single_qubit_gates: bool,
}

impl SynthConfig {
    pub fn new(num_logical: u32, num_2q_ops: usize) -> Self {
        Self {
            num_logical,
            num_2q_ops,
            layout_mode: LayoutMode::Identity,
            disguise: vec![SwapKind::Direct],
            user_boundary: None,
            seed: 0,
            enumerate_edges: false,
            swap_only_edges: Vec::new(),
            single_qubit_gates: true,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_layout(mut self, mode: LayoutMode) -> Self {
        self.layout_mode = mode;
        self
    }

    pub fn with_disguise(mut self, kinds: impl IntoIterator<Item = SwapKind>) -> Self {
        self.disguise = kinds.into_iter().collect();
        self
    }

    pub fn with_user_boundary(mut self, boundary: u32) -> Self {
        self.user_boundary = Some(boundary);
        self
    }

    pub fn enumerating_edges(mut self, on: bool) -> Self {
        self.enumerate_edges = on;
        self
    }

    pub fn with_swap_only_edges(mut self, edges: impl IntoIterator<Item = Edge>) -> Self {
        self.swap_only_edges = edges.into_iter().collect();
        self
    }

    pub fn with_single_qubit_gates(mut self, on: bool) -> Self {
        self.single_qubit_gates = on;
        self
    }
}

/// A SWAP inserted by routing, as emitted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoutingSwap {
    pub span: Range<usize>,
    pub pair: Edge,
    pub kind: SwapKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthOutput {
    pub circuit: ParsedCircuit,
    pub ground_truth: CouplingGraph,
    /// Initial logical to physical placement.
    pub layout: Layout,
    pub routing_swaps: Vec<RoutingSwap>,
    /// Index of the first user-program instruction in a tenant split.
    pub user_segment_start: Option<usize>,
}

impl SynthOutput {
    /// Writes `<name>.qasm`, `<name>.layout.json` and `<name>.topology.json`.
    pub fn write_fixture(&self, dir: &Path, name: &str) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let qasm = emit_qasm(&self.circuit).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        let files = [
            (format!("{name}.qasm"), qasm),
            (format!("{name}.layout.json"), layout_to_json(&self.layout) + "\n"),
            (format!("{name}.topology.json"), self.ground_truth.to_json() + "\n"),
        ];
        let mut paths = Vec::new();
        for (file, text) in files {
            let path = dir.join(file);
            fs::write(&path, text)?;
            paths.push(path);
        }
        Ok(paths)
    }

    /// Physical qubits initially holding the user program, if split.
    pub fn user_physical_qubits(&self, config: &SynthConfig) -> Option<BTreeSet<Qubit>> {
        let k = config.user_boundary?;
        Some(self.layout.range(k..).map(|(_, &p)| p).collect())
    }
}

struct Program {
    logicals: Range<u32>,
    graph: CouplingGraph,
    adjacency: BTreeMap<Qubit, BTreeSet<Qubit>>,
}

struct Emitter {
    out: Vec<Instruction>,
    swaps: Vec<RoutingSwap>,
    disguise: Vec<SwapKind>,
    next_kind: usize,
    rng: ChaCha8Rng,
    noise: bool,
    /// Physical qubit to logical occupant.
    occupant: BTreeMap<Qubit, u32>,
    position: BTreeMap<u32, Qubit>,
}

pub fn synthesize(topology: &TopologySpec, config: &SynthConfig) -> Result<SynthOutput, SynthError> {
    let truth = topology.graph()?;
    let n_phys = truth.universe();
    if config.disguise.is_empty() {
        return Err(SynthError::EmptyDisguise);
    }
    if config.num_logical > n_phys {
        return Err(SynthError::TooManyLogical {
            logical: config.num_logical,
            qubits: n_phys,
        });
    }
    let rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (layout, programs) = place(&truth, config)?;

    let routing: CouplingGraph = programs.iter().fold(CouplingGraph::new(), |mut g, p| {
        g.union_with(&p.graph);
        g
    });
    for e in &config.swap_only_edges {
        if !routing.contains(*e) {
            return Err(SynthError::NotAnEdge(*e));
        }
    }

    let mut em = Emitter {
        out: Vec::new(),
        swaps: Vec::new(),
        disguise: config.disguise.clone(),
        next_kind: 0,
        rng,
        noise: config.single_qubit_gates,
        occupant: layout.iter().map(|(&l, &p)| (p, l)).collect(),
        position: layout.clone(),
    };

    if config.enumerate_edges {
        let skip: BTreeSet<Edge> = config.swap_only_edges.iter().copied().collect();
        for e in routing.edges().filter(|e| !skip.contains(e)) {
            em.out.push(Instruction::new("cx", vec![e.low(), e.high()]));
        }
        if !em.out.is_empty() {
            em.separator(routing.edges().last().map_or(0, |e| e.high()));
        }
    }
    for e in &config.swap_only_edges {
        em.swap(e.low(), e.high());
    }

    let mut user_segment_start = None;
    for (i, program) in programs.iter().enumerate() {
        if i == 1 {
            user_segment_start = Some(em.out.len());
        }
        if program.logicals.len() < 2 {
            continue;
        }
        for _ in 0..config.num_2q_ops {
            let a = em.rng.gen_range(program.logicals.clone());
            let b = loop {
                let b = em.rng.gen_range(program.logicals.clone());
                if b != a {
                    break b;
                }
            };
            em.operation(program, a, b);
        }
    }

    let mut circuit = ParsedCircuit::new(n_phys, em.out);
    if config.disguise.contains(&SwapKind::NamedAlias) {
        circuit.definitions = alias_definition();
    }
    Ok(SynthOutput {
        circuit,
        ground_truth: truth,
        layout,
        routing_swaps: em.swaps,
        user_segment_start,
    })
}

fn place(truth: &CouplingGraph, config: &SynthConfig) -> Result<(Layout, Vec<Program>), SynthError> {
    let n = config.num_logical;
    let n_phys = truth.universe();
    let split = match config.user_boundary {
        Some(k) if k == 0 || k >= n => {
            return Err(SynthError::BadBoundary {
                boundary: k,
                num_logical: n,
            })
        }
        Some(k) => Some(k),
        None => None,
    };

    let physical: Vec<Qubit> = match (&config.layout_mode, split) {
        (LayoutMode::Identity, _) => (0..n).collect(),
        (LayoutMode::Region(region), _) => {
            if (region.len() as u32) < n {
                return Err(SynthError::BadLayout(format!(
                    "region has {} qubits for {n} logical qubits",
                    region.len()
                )));
            }
            if let Some(&q) = region.iter().find(|&&q| q >= n_phys) {
                return Err(SynthError::BadLayout(format!("physical qubit {q} is out of range")));
            }
            if region.iter().collect::<BTreeSet<_>>().len() != region.len() {
                return Err(SynthError::BadLayout("region repeats a physical qubit".into()));
            }
            region.clone()
        }
        (LayoutMode::Random(seed), None) => {
            let mut all: Vec<Qubit> = (0..n_phys).collect();
            all.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            all.truncate(n as usize);
            all
        }
        (LayoutMode::Random(seed), Some(k)) => random_regions(truth, k, n, *seed)?,
    };
    let layout: Layout = (0..n).zip(physical.iter().copied()).collect();

    let program = |logicals: Range<u32>, region: BTreeSet<Qubit>| -> Result<Program, SynthError> {
        if !topology::is_connected(truth, &region) {
            return Err(SynthError::BadLayout(format!(
                "qubits {region:?} do not form a connected region"
            )));
        }
        let graph = truth.induced(&region);
        let adjacency = graph.adjacency();
        Ok(Program {
            logicals,
            graph,
            adjacency,
        })
    };

    let programs = match split {
        None => {
            let region: BTreeSet<Qubit> = match &config.layout_mode {
                LayoutMode::Region(r) => r.iter().copied().collect(),
                _ => (0..n_phys).collect(),
            };
            vec![program(0..n, region)?]
        }
        Some(k) => vec![
            program(0..k, physical[..k as usize].iter().copied().collect())?,
            program(k..n, physical[k as usize..n as usize].iter().copied().collect())?,
        ],
    };
    Ok((layout, programs))
}

/// Two disjoint connected regions of sizes `k` and `n - k`, grown randomly.
fn random_regions(truth: &CouplingGraph, k: u32, n: u32, seed: u64) -> Result<Vec<Qubit>, SynthError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let adjacency = truth.adjacency();
    let all: BTreeSet<Qubit> = (0..truth.universe()).collect();
    for _ in 0..64 {
        let Some(mut first) = grow(&adjacency, &all, k as usize, &mut rng) else {
            continue;
        };
        let rest: BTreeSet<Qubit> = all.difference(&first.iter().copied().collect()).copied().collect();
        let Some(mut second) = grow(&adjacency, &rest, (n - k) as usize, &mut rng) else {
            continue;
        };
        first.shuffle(&mut rng);
        second.shuffle(&mut rng);
        first.extend(second);
        return Ok(first);
    }
    Err(SynthError::BadLayout(
        "could not find two disjoint connected regions for the tenant split".into(),
    ))
}

fn grow(
    adjacency: &BTreeMap<Qubit, BTreeSet<Qubit>>,
    allowed: &BTreeSet<Qubit>,
    size: usize,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Qubit>> {
    let pool: Vec<Qubit> = allowed.iter().copied().collect();
    let &start = pool.choose(rng)?;
    let mut region = vec![start];
    let mut inside = BTreeSet::from([start]);
    while region.len() < size {
        let frontier: Vec<Qubit> = region
            .iter()
            .flat_map(|q| adjacency.get(q).into_iter().flatten().copied())
            .filter(|q| allowed.contains(q) && !inside.contains(q))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let &next = frontier.choose(rng)?;
        inside.insert(next);
        region.push(next);
    }
    Some(region)
}

/// Shortest path from `from` to `to`; among equal-length paths, each step
/// takes the smallest-index neighbor.
fn shortest_path(adjacency: &BTreeMap<Qubit, BTreeSet<Qubit>>, from: Qubit, to: Qubit) -> Vec<Qubit> {
    let mut dist = BTreeMap::from([(to, 0usize)]);
    let mut queue = VecDeque::from([to]);
    while let Some(q) = queue.pop_front() {
        if q == from {
            break;
        }
        let d = dist[&q];
        for &r in adjacency.get(&q).into_iter().flatten() {
            dist.entry(r).or_insert_with(|| {
                queue.push_back(r);
                d + 1
            });
        }
    }
    let mut path = vec![from];
    let mut cur = from;
    while cur != to {
        let d = dist[&cur];
        cur = *adjacency[&cur]
            .iter()
            .find(|r| dist.get(r) == Some(&(d - 1)))
            .expect("a neighbor one step closer exists");
        path.push(cur);
    }
    path
}

impl Emitter {
    fn operation(&mut self, program: &Program, a: u32, b: u32) {
        let path = shortest_path(&program.adjacency, self.position[&a], self.position[&b]);
        for w in path.windows(2).take(path.len().saturating_sub(2)) {
            self.swap(w[0], w[1]);
        }
        let (p, q) = (path[path.len() - 2], path[path.len() - 1]);
        self.out.push(Instruction::new("cx", vec![p, q]));
        let target = if self.rng.gen() { p } else { q };
        self.separator(target);
    }

    fn separator(&mut self, q: Qubit) {
        if !self.noise {
            return;
        }
        let inst = match self.rng.gen_range(0..4) {
            0 => Instruction::new("h", vec![q]),
            1 => Instruction::new("t", vec![q]),
            2 => Instruction::new("rz", vec![q]).with_params(vec![self.rng.gen_range(-PI..PI)]),
            _ => Instruction::new("ry", vec![q]).with_params(vec![self.rng.gen_range(-PI..PI)]),
        };
        self.out.push(inst);
    }

    fn swap(&mut self, p: Qubit, q: Qubit) {
        let kind = self.disguise[self.next_kind % self.disguise.len()];
        self.next_kind += 1;
        let start = self.out.len();
        match kind {
            SwapKind::Direct => self.out.push(Instruction::new("swap", vec![p, q])),
            SwapKind::NamedAlias => self.out.push(Instruction::new(ALIAS_GATE, vec![p, q])),
            SwapKind::UnitaryMatch => {
                let phase = Complex64::from_polar(1.0, self.rng.gen_range(-PI..PI));
                self.out.push(Instruction::unitary(Mat4::swap().scale(phase), p, q));
            }
            SwapKind::ThreeCnot => {
                // Orient so a preceding reversed cx cannot join the pattern.
                let (u, v) = match self.out.last() {
                    Some(last) if last.name == "cx" && last.qubits == [q, p] => (q, p),
                    _ => (p, q),
                };
                for (c, t) in [(u, v), (v, u), (u, v)] {
                    self.out.push(Instruction::new("cx", vec![c, t]));
                }
            }
            SwapKind::IswapPhase => {
                self.out.push(Instruction::new("iswap", vec![p, q]));
                self.out.push(Instruction::new("sdg", vec![p]));
                self.out.push(Instruction::new("sdg", vec![q]));
            }
            SwapKind::PauliRotationTriple => {
                for name in ["rxx", "ryy", "rzz"] {
                    self.out.push(Instruction::new(name, vec![p, q]).with_params(vec![FRAC_PI_2]));
                }
            }
        }
        self.swaps.push(RoutingSwap {
            span: start..self.out.len(),
            pair: Edge::new(p, q).expect("routing pairs are distinct"),
            kind,
        });
        let (lp, lq) = (self.occupant.remove(&p), self.occupant.remove(&q));
        if let Some(l) = lp {
            self.occupant.insert(q, l);
            self.position.insert(l, q);
        }
        if let Some(l) = lq {
            self.occupant.insert(p, l);
            self.position.insert(l, p);
        }
    }
}

fn alias_definition() -> IndexMap<String, GateDefinition> {
    let cx = |c: usize, t: usize| GateTemplate {
        name: "cx".into(),
        qubits: vec![c, t],
        params: vec![],
    };
    let defn = GateDefinition {
        name: ALIAS_GATE.into(),
        formal_params: vec![],
        formal_qubits: vec!["a".into(), "b".into()],
        body: vec![cx(0, 1), cx(1, 0), cx(0, 1)],
    };
    IndexMap::from([(ALIAS_GATE.to_string(), defn)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::derive_coupling_map;
    use crate::qasm::parse_qasm;
    use crate::swap::{scan_swaps, RecognizerConfig};

    fn pairs(c: &ParsedCircuit) -> Vec<(&str, Vec<Qubit>)> {
        c.instructions.iter().map(|i| (i.name.as_str(), i.qubits.clone())).collect()
    }

    #[test]
    fn adjacent_op_needs_no_swap() {
        let out = synthesize(&TopologySpec::Linear(2), &SynthConfig::new(2, 1).with_single_qubit_gates(false)).unwrap();
        let ops = pairs(&out.circuit);
        assert!(ops == vec![("cx", vec![0, 1])] || ops == vec![("cx", vec![1, 0])]);
        assert!(out.routing_swaps.is_empty());
    }

    #[test]
    fn endpoints_of_three_need_one_swap() {
        let cfg = SynthConfig::new(3, 1).with_single_qubit_gates(false).with_layout(LayoutMode::Region(vec![0, 2, 1]));
        let mut seen_swap = false;
        for seed in 0..20 {
            let out = synthesize(&TopologySpec::Linear(3), &cfg.clone().with_seed(seed)).unwrap();
            for inst in &out.circuit.instructions {
                let (a, b) = inst.pair().unwrap();
                assert!(out.ground_truth.contains_pair(a, b));
            }
            if out.circuit.instructions.len() == 2 {
                assert_eq!(out.circuit.instructions[0].name, "swap");
                seen_swap = true;
            }
        }
        assert!(seen_swap);
    }

    #[test]
    fn tie_break_prefers_small_neighbor() {
        let ring = TopologySpec::Loop(4).graph().unwrap().adjacency();
        assert_eq!(shortest_path(&ring, 0, 2), vec![0, 1, 2]);
        assert_eq!(shortest_path(&ring, 2, 0), vec![2, 1, 0]);
        assert_eq!(shortest_path(&ring, 3, 3), vec![3]);
    }

    #[test]
    fn reproducible() {
        let cfg = SynthConfig::new(6, 40).with_seed(9).with_layout(LayoutMode::Random(3)).with_disguise(SwapKind::ALL);
        let a = synthesize(&TopologySpec::HShape(10), &cfg).unwrap();
        let b = synthesize(&TopologySpec::HShape(10), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_disguise_is_recognized() {
        let cfg = SynthConfig::new(8, 60).with_seed(4).with_disguise(SwapKind::ALL);
        let out = synthesize(&TopologySpec::TShape(12), &cfg).unwrap();
        let scan = scan_swaps(&out.circuit, &RecognizerConfig::default());
        let found: Vec<_> = scan.events.iter().map(|e| (e.span.clone(), e.pair, e.kind)).collect();
        let planted: Vec<_> = out.routing_swaps.iter().map(|s| (s.span.clone(), s.pair, s.kind)).collect();
        assert_eq!(found, planted);
        let kinds: BTreeSet<_> = planted.iter().map(|p| p.2).collect();
        assert_eq!(kinds.len(), 6);
    }

    #[test]
    fn enumeration_gives_full_map() {
        let cfg = SynthConfig::new(5, 30).with_seed(1).enumerating_edges(true).with_disguise([SwapKind::ThreeCnot]);
        let out = synthesize(&TopologySpec::HShape(9), &cfg).unwrap();
        let derived = derive_coupling_map(&out.circuit, &RecognizerConfig::default(), false);
        assert_eq!(derived.edge_set(), out.ground_truth.edge_set());
    }

    #[test]
    fn tenant_split_stays_in_regions() {
        let cfg = SynthConfig::new(15, 40).with_seed(2).with_user_boundary(10).with_layout(LayoutMode::Random(5));
        let out = synthesize(&TopologySpec::HShape(20), &cfg).unwrap();
        let user = out.user_physical_qubits(&cfg).unwrap();
        assert_eq!(user.len(), 5);
        let start = out.user_segment_start.unwrap();
        for (i, inst) in out.circuit.instructions.iter().enumerate() {
            assert_eq!(i >= start, inst.qubits.iter().all(|q| user.contains(q)), "instruction {i}");
        }
    }

    #[test]
    fn fixture_files_parse_back() {
        let dir = std::env::temp_dir().join(format!("qforensics-synth-{}", std::process::id()));
        let cfg = SynthConfig::new(4, 10).with_disguise(SwapKind::ALL);
        let out = synthesize(&TopologySpec::Linear(5), &cfg).unwrap();
        let files = out.write_fixture(&dir, "lin").unwrap();
        let parsed = parse_qasm(&fs::read_to_string(&files[0]).unwrap()).unwrap();
        assert_eq!(parsed.instructions, out.circuit.instructions);
        let truth = CouplingGraph::from_json(&fs::read_to_string(&files[2]).unwrap()).unwrap();
        assert_eq!(truth, out.ground_truth);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn config_errors() {
        let t = TopologySpec::Linear(4);
        assert_eq!(
            synthesize(&t, &SynthConfig::new(5, 1)),
            Err(SynthError::TooManyLogical { logical: 5, qubits: 4 })
        );
        assert_eq!(synthesize(&t, &SynthConfig::new(2, 1).with_disguise([])), Err(SynthError::EmptyDisguise));
        assert!(matches!(
            synthesize(&t, &SynthConfig::new(4, 1).with_user_boundary(4)),
            Err(SynthError::BadBoundary { .. })
        ));
        assert!(matches!(
            synthesize(&t, &SynthConfig::new(3, 1).with_layout(LayoutMode::Region(vec![0, 2, 3]))),
            Err(SynthError::BadLayout(_))
        ));
        let e = Edge::new(0, 3).unwrap();
        assert_eq!(
            synthesize(&t, &SynthConfig::new(2, 1).with_swap_only_edges([e])),
            Err(SynthError::NotAnEdge(e))
        );
    }
}
