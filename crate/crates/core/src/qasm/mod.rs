//! OpenQASM 2.0 frontend producing a flat physical-qubit instruction stream.

mod expr;
mod inline;
mod layout;
mod lexer;
mod parser;

use indexmap::IndexMap;
use thiserror::Error;

use crate::unitary::Mat4;
use crate::Qubit;

pub(crate) use expr::format_real;
pub use expr::Expr;
pub use inline::{inline_definition, InlineError};
pub use layout::{layout_to_json, parse_layout_sidecar, physical_set, Layout, LayoutError};
pub use parser::parse_qasm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: undeclared register `{name}`")]
    UndeclaredRegister { line: usize, col: usize, name: String },
    #[error("{line}:{col}: undeclared gate `{name}`")]
    UndeclaredGate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: index {index} out of bounds for register `{name}` of size {size}")]
    IndexOutOfBounds {
        line: usize,
        col: usize,
        name: String,
        index: u64,
        size: u32,
    },
    #[error("{line}:{col}: gate `{name}` acts on {arity} qubits; at most 3 are supported")]
    GateArity {
        line: usize,
        col: usize,
        name: String,
        arity: usize,
    },
    #[error("{line}:{col}: gate `{name}` expects {expected} {what}, got {found}")]
    ArgumentCount {
        line: usize,
        col: usize,
        name: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: unsupported parameter expression: {msg}")]
    UnsupportedExpression { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {msg}")]
    Semantic { line: usize, col: usize, msg: String },
}

/// One gate application on physical qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub name: String,
    pub qubits: Vec<Qubit>,
    pub params: Vec<f64>,
    pub matrix: Option<Box<Mat4>>,
}

impl Instruction {
    pub fn new(name: impl Into<String>, qubits: Vec<Qubit>) -> Self {
        Self {
            name: name.into(),
            qubits,
            params: Vec::new(),
            matrix: None,
        }
    }

    pub fn with_params(mut self, params: Vec<f64>) -> Self {
        self.params = params;
        self
    }

    /// Explicit two-qubit unitary instruction.
    pub fn unitary(matrix: Mat4, a: Qubit, b: Qubit) -> Self {
        Self {
            name: crate::gates::UNITARY_GATE.to_string(),
            qubits: vec![a, b],
            params: Vec::new(),
            matrix: Some(Box::new(matrix)),
        }
    }

    pub fn touches(&self, q: Qubit) -> bool {
        self.qubits.contains(&q)
    }

    pub fn pair(&self) -> Option<(Qubit, Qubit)> {
        match self.qubits.as_slice() {
            [a, b] => Some((*a, *b)),
            _ => None,
        }
    }
}

/// A gate body instruction over formal parameters and qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct GateTemplate {
    pub name: String,
    /// Indices into [`GateDefinition::formal_qubits`].
    pub qubits: Vec<usize>,
    pub params: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateDefinition {
    pub name: String,
    pub formal_params: Vec<String>,
    pub formal_qubits: Vec<String>,
    pub body: Vec<GateTemplate>,
}

pub type GateTable = IndexMap<String, GateDefinition>;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParsedCircuit {
    pub instructions: Vec<Instruction>,
    pub num_qubits: u32,
    pub layout: Option<Layout>,
    pub source_name: String,
    /// Custom gate definitions in declaration order.
    pub definitions: GateTable,
}

impl ParsedCircuit {
    pub fn new(num_qubits: u32, instructions: Vec<Instruction>) -> Self {
        Self {
            instructions,
            num_qubits,
            ..Self::default()
        }
    }

    pub fn with_source_name(mut self, name: impl Into<String>) -> Self {
        self.source_name = name.into();
        self
    }

    /// Qubits touched by at least one instruction, ascending.
    pub fn active_qubits(&self) -> Vec<Qubit> {
        let mut qs: Vec<Qubit> = self.instructions.iter().flat_map(|i| i.qubits.iter().copied()).collect();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    /// Attaches a layout after checking that it is injective and in range.
    pub fn attach_layout(&mut self, layout: Layout) -> Result<(), LayoutError> {
        layout::check_layout(&layout, Some(self.num_qubits))?;
        self.layout = Some(layout);
        Ok(())
    }

    pub fn definition(&self, name: &str) -> Option<&GateDefinition> {
        self.definitions.get(name)
    }
}
