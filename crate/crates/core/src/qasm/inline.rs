use thiserror::Error;

use super::{GateDefinition, GateTable, Instruction};
use crate::gates;
use crate::Qubit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InlineError {
    #[error("recursive gate definition: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("gate `{name}` expects {expected} {what}, got {found}")]
    ArityMismatch {
        name: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("gate `{0}` is neither standard nor defined")]
    UnknownGate(String),
}

/// Expands `defn` applied to `params`/`qubits` down to standard gates,
/// resolving nested custom gates through `table`.
pub fn inline_definition(
    table: &GateTable,
    defn: &GateDefinition,
    params: &[f64],
    qubits: &[Qubit],
) -> Result<Vec<Instruction>, InlineError> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    expand(table, defn, params, qubits, &mut stack, &mut out)?;
    Ok(out)
}

fn expand(
    table: &GateTable,
    defn: &GateDefinition,
    params: &[f64],
    qubits: &[Qubit],
    stack: &mut Vec<String>,
    out: &mut Vec<Instruction>,
) -> Result<(), InlineError> {
    check_arity(&defn.name, "parameters", defn.formal_params.len(), params.len())?;
    check_arity(&defn.name, "qubits", defn.formal_qubits.len(), qubits.len())?;
    if stack.contains(&defn.name) {
        let mut cycle = stack.clone();
        cycle.push(defn.name.clone());
        return Err(InlineError::Cycle(cycle));
    }
    stack.push(defn.name.clone());

    for tmpl in &defn.body {
        let actual_params: Vec<f64> = tmpl.params.iter().map(|e| e.eval(params)).collect();
        let actual_qubits: Vec<Qubit> = tmpl.qubits.iter().map(|&i| qubits[i]).collect();
        if stack.contains(&tmpl.name) {
            let mut cycle = stack.clone();
            cycle.push(tmpl.name.clone());
            return Err(InlineError::Cycle(cycle));
        }
        if let Some(inner) = table.get(&tmpl.name) {
            expand(table, inner, &actual_params, &actual_qubits, stack, out)?;
        } else if let Some(sig) = gates::standard_gate(&tmpl.name) {
            check_arity(&tmpl.name, "parameters", sig.num_params, actual_params.len())?;
            check_arity(&tmpl.name, "qubits", sig.num_qubits, actual_qubits.len())?;
            out.push(Instruction::new(tmpl.name.clone(), actual_qubits).with_params(actual_params));
        } else {
            return Err(InlineError::UnknownGate(tmpl.name.clone()));
        }
    }

    stack.pop();
    Ok(())
}

fn check_arity(name: &str, what: &'static str, expected: usize, found: usize) -> Result<(), InlineError> {
    if expected == found {
        Ok(())
    } else {
        Err(InlineError::ArityMismatch {
            name: name.to_string(),
            what,
            expected,
            found,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Expr, GateTemplate};
    use super::*;

    fn tmpl(name: &str, qubits: &[usize]) -> GateTemplate {
        GateTemplate {
            name: name.into(),
            qubits: qubits.to_vec(),
            params: vec![],
        }
    }

    fn defn(name: &str, nq: usize, body: Vec<GateTemplate>) -> GateDefinition {
        GateDefinition {
            name: name.into(),
            formal_params: vec![],
            formal_qubits: (0..nq).map(|i| format!("q{i}")).collect(),
            body,
        }
    }

    #[test]
    fn three_cnot_body() {
        let d = defn("myswap", 2, vec![tmpl("cx", &[0, 1]), tmpl("cx", &[1, 0]), tmpl("cx", &[0, 1])]);
        let got = inline_definition(&GateTable::new(), &d, &[], &[3, 5]).unwrap();
        let names: Vec<_> = got.iter().map(|i| (i.name.as_str(), i.qubits.clone())).collect();
        assert_eq!(names, vec![("cx", vec![3, 5]), ("cx", vec![5, 3]), ("cx", vec![3, 5])]);
    }

    #[test]
    fn wrapping_standard_swap() {
        let d = defn("wrap", 2, vec![tmpl("swap", &[0, 1])]);
        let got = inline_definition(&GateTable::new(), &d, &[], &[0, 1]).unwrap();
        assert_eq!(got, vec![Instruction::new("swap", vec![0, 1])]);
    }

    #[test]
    fn nested_with_params() {
        let mut table = GateTable::new();
        let inner = GateDefinition {
            name: "half".into(),
            formal_params: vec!["t".into()],
            formal_qubits: vec!["a".into()],
            body: vec![GateTemplate {
                name: "rz".into(),
                qubits: vec![0],
                params: vec![Expr::binary('/', Expr::Param(0), Expr::Const(2.0))],
            }],
        };
        table.insert("half".into(), inner);
        let outer = GateDefinition {
            name: "outer".into(),
            formal_params: vec!["x".into()],
            formal_qubits: vec!["a".into(), "b".into()],
            body: vec![
                GateTemplate {
                    name: "half".into(),
                    qubits: vec![1],
                    params: vec![Expr::Param(0)],
                },
                tmpl("cx", &[0, 1]),
            ],
        };
        let got = inline_definition(&table, &outer, &[3.0], &[7, 2]).unwrap();
        assert_eq!(got, vec![
            Instruction::new("rz", vec![2]).with_params(vec![1.5]),
            Instruction::new("cx", vec![7, 2])
        ]);
    }

    #[test]
    fn self_reference_is_a_cycle() {
        let d = defn("loop", 2, vec![tmpl("loop", &[0, 1])]);
        assert!(matches!(
            inline_definition(&GateTable::new(), &d, &[], &[0, 1]),
            Err(InlineError::Cycle(_))
        ));
        let mut table = GateTable::new();
        table.insert("a".into(), defn("a", 1, vec![tmpl("b", &[0])]));
        table.insert("b".into(), defn("b", 1, vec![tmpl("a", &[0])]));
        let err = inline_definition(&table, &table["a"], &[], &[0]).unwrap_err();
        assert_eq!(err, InlineError::Cycle(vec!["a".into(), "b".into(), "a".into()]));
    }

    #[test]
    fn arity_mismatch() {
        let d = defn("g", 2, vec![tmpl("cx", &[0, 1])]);
        assert!(matches!(
            inline_definition(&GateTable::new(), &d, &[], &[0]),
            Err(InlineError::ArityMismatch { what: "qubits", .. })
        ));
        assert!(matches!(
            inline_definition(&GateTable::new(), &d, &[1.0], &[0, 1]),
            Err(InlineError::ArityMismatch { what: "parameters", .. })
        ));
    }
}
