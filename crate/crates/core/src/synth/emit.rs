use std::fmt::Write;

use thiserror::Error;

use crate::gates::{standard_gate, UNITARY_GATE};
use crate::qasm::{format_real, GateDefinition, ParsedCircuit};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmitError {
    #[error("instruction {index}: gate `{name}` is neither standard nor defined")]
    UnknownGate { index: usize, name: String },
    #[error("instruction {index}: gate `{name}` expects {expected} {what}, got {found}")]
    Signature {
        index: usize,
        name: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("instruction {index}: `unitary` needs a 4x4 matrix on two qubits")]
    BadUnitary { index: usize },
}

/// Renders `circuit` as OpenQASM 2.0 over a single register `q`.
pub fn emit_qasm(circuit: &ParsedCircuit) -> Result<String, EmitError> {
    let mut out = String::from("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    for defn in circuit.definitions.values() {
        write_definition(&mut out, defn);
    }
    let width = circuit
        .instructions
        .iter()
        .flat_map(|i| i.qubits.iter().map(|&q| q + 1))
        .max()
        .unwrap_or(0)
        .max(circuit.num_qubits);
    let _ = writeln!(out, "qreg q[{width}];");

    for (index, inst) in circuit.instructions.iter().enumerate() {
        let params: Vec<f64> = if inst.name == UNITARY_GATE && circuit.definition(UNITARY_GATE).is_none() {
            match (&inst.matrix, inst.qubits.len()) {
                (Some(m), 2) => m.to_real_parts(),
                _ => return Err(EmitError::BadUnitary { index }),
            }
        } else {
            let (nparams, nqubits) = match circuit.definition(&inst.name) {
                Some(d) => (d.formal_params.len(), d.formal_qubits.len()),
                None => match standard_gate(&inst.name) {
                    Some(sig) => (sig.num_params, sig.num_qubits),
                    None => {
                        return Err(EmitError::UnknownGate {
                            index,
                            name: inst.name.clone(),
                        })
                    }
                },
            };
            check(index, &inst.name, "parameters", nparams, inst.params.len())?;
            check(index, &inst.name, "qubits", nqubits, inst.qubits.len())?;
            inst.params.clone()
        };

        out.push_str(&inst.name);
        if !params.is_empty() {
            let rendered: Vec<String> = params.iter().map(|&p| format_real(p)).collect();
            let _ = write!(out, "({})", rendered.join(","));
        }
        let operands: Vec<String> = inst.qubits.iter().map(|q| format!("q[{q}]")).collect();
        let _ = writeln!(out, " {};", operands.join(","));
    }
    Ok(out)
}

fn check(index: usize, name: &str, what: &'static str, expected: usize, found: usize) -> Result<(), EmitError> {
    if expected == found {
        Ok(())
    } else {
        Err(EmitError::Signature {
            index,
            name: name.to_string(),
            what,
            expected,
            found,
        })
    }
}

fn write_definition(out: &mut String, defn: &GateDefinition) {
    out.push_str("gate ");
    out.push_str(&defn.name);
    if !defn.formal_params.is_empty() {
        let _ = write!(out, "({})", defn.formal_params.join(","));
    }
    let _ = write!(out, " {} {{", defn.formal_qubits.join(","));
    for t in &defn.body {
        out.push(' ');
        out.push_str(&t.name);
        if !t.params.is_empty() {
            let ps: Vec<String> = t.params.iter().map(|e| e.to_qasm(&defn.formal_params)).collect();
            let _ = write!(out, "({})", ps.join(","));
        }
        let qs: Vec<&str> = t.qubits.iter().map(|&i| defn.formal_qubits[i].as_str()).collect();
        let _ = write!(out, " {};", qs.join(","));
    }
    out.push_str(" }\n");
}
