use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use qforensics::assembly::shuffled;
use qforensics::backend::trace_graphs;
use qforensics::extract::extract;
use qforensics::synth::{LayoutMode, SynthConfig};
use qforensics::{
    assemble, hamming_distance, parse_layout_sidecar, parse_qasm, project_user_subgraph, synthesize, CouplingGraph,
    ParsedCircuit, RecognizerConfig, Registry, SwapKind, TopologySpec, Verdict,
};

#[derive(Parser)]
#[command(name = "qforensics", version, about = "Coupling-map forensics for transpiled OpenQASM 2.0 circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the coupling subgraph of each circuit.
    Extract {
        #[command(flatten)]
        recognizer: RecognizerArgs,
        /// Project onto these logical qubits using the `.layout.json` sidecar.
        #[arg(long, value_delimiter = ',')]
        project: Option<Vec<u32>>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Union the derived subgraphs of a pool of circuits.
    Assemble {
        #[command(flatten)]
        recognizer: RecognizerArgs,
        /// Ground-truth graph JSON; enables the coverage curve.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Shuffle the pool with this seed before assembling.
        #[arg(long)]
        shuffle: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Also write `assembly.json` and `coverage.csv` here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Attribute circuits to registry backends by labeled containment.
    Trace {
        #[command(flatten)]
        recognizer: RecognizerArgs,
        /// JSON array of `{"name", "num_qubits", "edges"}` records.
        #[arg(long)]
        registry: PathBuf,
        /// JSON object mapping circuit file names to backend names.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Exit with status 1 when any circuit matches no backend.
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Size of the symmetric difference of two graphs' edge sets.
    Hamming { g1: PathBuf, g2: PathBuf },
    /// Generate a routed ground-truth fixture.
    Synth(SynthArgs),
}

#[derive(Args)]
struct RecognizerArgs {
    /// File of extra gate names to treat as SWAP, one per line.
    #[arg(long)]
    aliases: Option<PathBuf>,
    /// Verify pattern-matched SWAPs by unitary composition.
    #[arg(long)]
    strict_unitary: bool,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Count recognized SWAP pairs as edges.
    #[arg(long)]
    include_swap_edges: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// `linear`, `tshape`, `hshape` or `loop`.
    #[arg(long, default_value = "linear")]
    topology: String,
    #[arg(long, required_unless_present = "graph")]
    qubits: Option<u32>,
    /// Use this graph JSON as the topology instead of a named shape.
    #[arg(long, conflicts_with_all = ["topology", "qubits"])]
    graph: Option<PathBuf>,
    /// Logical qubits; defaults to all physical qubits.
    #[arg(long)]
    logical: Option<u32>,
    #[arg(long, default_value_t = 20)]
    ops: usize,
    /// Comma-separated SWAP disguises, e.g. `direct,three-cnot`.
    #[arg(long, value_delimiter = ',', default_value = "direct")]
    disguise: Vec<SwapKind>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = LayoutArg::Identity)]
    layout: LayoutArg,
    /// Start with a direct cx on every edge.
    #[arg(long)]
    enumerate_edges: bool,
    /// Edges `a-b` exercised only by a routing SWAP, comma-separated.
    #[arg(long, value_delimiter = ',')]
    swap_only: Vec<String>,
    /// Logical index where the user program begins.
    #[arg(long)]
    user_boundary: Option<u32>,
    #[arg(long, default_value = "fixture")]
    name: String,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum LayoutArg {
    Identity,
    Random,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Extract {
            recognizer,
            project,
            format,
            files,
        } => {
            let config = recognizer.config()?;
            let circuits = load_circuits(&files)?;
            for circuit in &circuits {
                let ex = extract(circuit, &config, recognizer.include_swap_edges);
                for d in &ex.diagnostics {
                    eprintln!("{}: {d}", circuit.source_name);
                }
                let mut graph = match &project {
                    Some(logicals) => {
                        let layout = circuit
                            .layout
                            .as_ref()
                            .with_context(|| format!("{}: --project needs a layout sidecar", circuit.source_name))?;
                        let logicals: BTreeSet<u32> = logicals.iter().copied().collect();
                        project_user_subgraph(&ex.graph, layout, &logicals)
                            .with_context(|| circuit.source_name.clone())?
                    }
                    None => ex.graph,
                };
                graph.set_num_qubits(None);
                match format {
                    Format::Json => println!("{}", graph.to_json()),
                    Format::Table => println!("{}\t{}", circuit.source_name, edge_list(&graph)),
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Assemble {
            recognizer,
            truth,
            shuffle,
            format,
            out_dir,
            files,
        } => {
            let config = recognizer.config()?;
            let truth = truth.as_deref().map(load_graph).transpose()?;
            let circuits = load_circuits(&files)?;
            let mut pool = derive_all(&circuits, &config, recognizer.include_swap_edges);
            if let Some(seed) = shuffle {
                pool = shuffled(&pool, seed);
            }
            let report = assemble(&pool, truth.as_ref())?;
            if let Some(dir) = out_dir {
                fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
                fs::write(dir.join("assembly.json"), report.to_json() + "\n")?;
                if report.coverage_curve.is_some() {
                    fs::write(dir.join("coverage.csv"), report.curve_csv())?;
                }
            }
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Table => {
                    println!("assembled\t{}", edge_list(&report.assembled));
                    for (name, g) in &report.per_circuit {
                        println!("{name}\t{}", edge_list(g));
                    }
                    if report.coverage_curve.is_some() {
                        print!("{}", report.curve_csv());
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Trace {
            recognizer,
            registry,
            labels,
            strict,
            format,
            files,
        } => {
            let config = recognizer.config()?;
            let registry_text = read(&registry)?;
            let registry = Registry::from_json(&registry_text).with_context(|| format!("loading registry {}", registry.display()))?;
            let labels: Option<BTreeMap<String, String>> = labels
                .as_deref()
                .map(|p| -> Result<_> {
                    serde_json::from_str(&read(p)?).with_context(|| format!("parsing labels {}", p.display()))
                })
                .transpose()?;
            let circuits = load_circuits(&files)?;
            let graphs = derive_all(&circuits, &config, recognizer.include_swap_edges);
            let report = trace_graphs(&graphs, &registry, labels.as_ref())?;
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Table => print!("{}", report.to_table()),
            }
            let unmatched = report.outcomes.iter().any(|(_, o)| o.verdict == Verdict::Unmatched);
            Ok(if strict && unmatched {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Hamming { g1, g2 } => {
            println!("{}", hamming_distance(&load_graph(&g1)?, &load_graph(&g2)?));
            Ok(ExitCode::SUCCESS)
        }
        Command::Synth(args) => {
            let topology = match (&args.graph, args.qubits) {
                (Some(path), _) => TopologySpec::Explicit(load_graph(path)?),
                (None, Some(n)) => TopologySpec::from_name(&args.topology, n)?,
                (None, None) => bail!("--qubits is required"),
            };
            let swap_only = args.swap_only.iter().map(|s| parse_edge(s)).collect::<Result<Vec<_>>>()?;
            let mut cfg = SynthConfig::new(args.logical.unwrap_or(topology.num_qubits()), args.ops)
                .with_seed(args.seed)
                .with_disguise(args.disguise.iter().copied())
                .with_layout(match args.layout {
                    LayoutArg::Identity => LayoutMode::Identity,
                    LayoutArg::Random => LayoutMode::Random(args.seed),
                })
                .enumerating_edges(args.enumerate_edges)
                .with_swap_only_edges(swap_only);
            if let Some(k) = args.user_boundary {
                cfg = cfg.with_user_boundary(k);
            }
            let out = synthesize(&topology, &cfg)?;
            for path in out.write_fixture(&args.out_dir, &args.name)? {
                println!("{}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

impl RecognizerArgs {
    fn config(&self) -> Result<RecognizerConfig> {
        let mut config = RecognizerConfig::default()
            .with_tolerance(self.tolerance)?
            .with_strict_unitary(self.strict_unitary);
        if let Some(path) = &self.aliases {
            config = config.with_alias_file_text(&read(path)?);
        }
        Ok(config)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_graph(path: &Path) -> Result<CouplingGraph> {
    CouplingGraph::from_json(&read(path)?).with_context(|| format!("parsing graph {}", path.display()))
}

/// Parses each file and attaches a `<stem>.layout.json` sidecar if present.
fn load_circuits(files: &[PathBuf]) -> Result<Vec<ParsedCircuit>> {
    files
        .iter()
        .map(|path| {
            let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
            let mut circuit = parse_qasm(&read(path)?)
                .with_context(|| format!("parsing {}", path.display()))?
                .with_source_name(name);
            let sidecar = path.with_extension("layout.json");
            if sidecar.is_file() {
                let layout = parse_layout_sidecar(&read(&sidecar)?)
                    .with_context(|| format!("parsing {}", sidecar.display()))?;
                circuit
                    .attach_layout(layout)
                    .with_context(|| format!("checking {}", sidecar.display()))?;
            }
            Ok(circuit)
        })
        .collect()
}

fn derive_all(circuits: &[ParsedCircuit], config: &RecognizerConfig, include_swap_edges: bool) -> Vec<(String, CouplingGraph)> {
    let mut graphs = qforensics::extract::extract_pool(circuits, config, include_swap_edges);
    for (_, g) in &mut graphs {
        g.set_num_qubits(None);
    }
    graphs
}

fn edge_list(g: &CouplingGraph) -> String {
    g.edges().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_edge(s: &str) -> Result<qforensics::Edge> {
    let Some((a, b)) = s.split_once('-') else {
        bail!("edge `{s}` should look like `a-b`");
    };
    let (a, b) = (a.trim().parse()?, b.trim().parse()?);
    Ok(qforensics::Edge::new(a, b)?)
}
