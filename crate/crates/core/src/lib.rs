//! Forensics for transpiled quantum circuits.
//!
//! Given transpiled OpenQASM 2.0 text, this crate recovers the physical
//! coupling subgraph each circuit was routed on, assembles whole-backend
//! maps from pools of circuits, and traces circuits back to the backend
//! in a registry whose labeled coupling map contains them.
//!
//! ```
//! use qforensics::{derive_coupling_map, parse_qasm, RecognizerConfig};
//!
//! let circuit = parse_qasm(
//!     "OPENQASM 2.0; include \"qelib1.inc\"; qreg q[8];
//!      cx q[4],q[3]; cx q[3],q[5]; swap q[3],q[5]; cx q[3],q[7];",
//! )
//! .unwrap();
//! let graph = derive_coupling_map(&circuit, &RecognizerConfig::default(), false);
//! assert_eq!(graph.to_json(), r#"{"edges":[[3,4],[3,5],[3,7]],"num_qubits":8}"#);
//! ```

pub mod assembly;
pub mod backend;
pub mod extract;
pub mod gates;
pub mod graph;
pub mod qasm;
pub mod swap;
pub mod synth;
pub mod unitary;

use std::fmt;

use serde::Serialize;

/// Physical qubit index.
pub type Qubit = u32;

/// A non-fatal finding attached to an instruction position.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub index: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(index: usize, message: impl Into<String>) -> Self {
        Self {
            index,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instruction {}: {}", self.index, self.message)
    }
}

pub use assembly::{assemble, project_user_subgraph, AssemblyReport};
pub use backend::{trace, trace_pool, BackendRecord, PoolTraceReport, Registry, TraceOutcome, Verdict};
pub use extract::{derive_coupling_map, extract, Extraction, SwapHistory};
pub use graph::{edge_coverage_percent, hamming_distance, CouplingGraph, Edge, GraphError};
pub use qasm::{parse_layout_sidecar, parse_qasm, Instruction, ParseError, ParsedCircuit};
pub use swap::{scan_swaps, RecognizerConfig, SwapEvent, SwapKind};
pub use synth::{emit_qasm, synthesize, SynthConfig, SynthOutput, TopologySpec};
pub use unitary::{compose_span_unitary, unitary_equals_swap, Mat4};
