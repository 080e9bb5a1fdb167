use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::Qubit;

/// Logical qubit index to physical qubit index.
pub type Layout = BTreeMap<u32, Qubit>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LayoutError {
    #[error("malformed layout JSON: {0}")]
    Json(String),
    #[error("layout key `{0}` is not a non-negative integer")]
    BadKey(String),
    #[error("layout value for logical {logical} is not a non-negative integer")]
    NegativeIndex { logical: String },
    #[error("physical qubit {physical} is assigned to both logical {first} and {second}")]
    DuplicatePhysical { physical: Qubit, first: u32, second: u32 },
    #[error("physical qubit {physical} is outside the {num_qubits}-qubit circuit")]
    OutOfRange { physical: Qubit, num_qubits: u32 },
}

/// Parses a `{"0": 12, "1": 15}` sidecar.
pub fn parse_layout_sidecar(text: &str) -> Result<Layout, LayoutError> {
    let raw: BTreeMap<String, serde_json::Value> =
        serde_json::from_str(text).map_err(|e| LayoutError::Json(e.to_string()))?;
    let mut layout = Layout::new();
    let mut owner: BTreeMap<Qubit, u32> = BTreeMap::new();
    // Sort by numeric key so duplicate reports name the lower logical first.
    let mut entries = Vec::with_capacity(raw.len());
    for (k, v) in raw {
        let logical: u32 = k.trim().parse().map_err(|_| LayoutError::BadKey(k.clone()))?;
        entries.push((logical, k, v));
    }
    entries.sort_by_key(|(l, _, _)| *l);
    for (logical, key, v) in entries {
        let physical = v
            .as_u64()
            .and_then(|p| Qubit::try_from(p).ok())
            .ok_or(LayoutError::NegativeIndex { logical: key })?;
        if let Some(&first) = owner.get(&physical) {
            return Err(LayoutError::DuplicatePhysical {
                physical,
                first,
                second: logical,
            });
        }
        owner.insert(physical, logical);
        layout.insert(logical, physical);
    }
    Ok(layout)
}

pub(crate) fn check_layout(layout: &Layout, num_qubits: Option<u32>) -> Result<(), LayoutError> {
    let mut seen: BTreeMap<Qubit, u32> = BTreeMap::new();
    for (&logical, &physical) in layout {
        if let Some(n) = num_qubits {
            if physical >= n {
                return Err(LayoutError::OutOfRange { physical, num_qubits: n });
            }
        }
        if let Some(&first) = seen.get(&physical) {
            return Err(LayoutError::DuplicatePhysical {
                physical,
                first,
                second: logical,
            });
        }
        seen.insert(physical, logical);
    }
    Ok(())
}

/// Renders a layout as a sidecar JSON object with numeric-order keys.
pub fn layout_to_json(layout: &Layout) -> String {
    let body: Vec<String> = layout.iter().map(|(l, p)| format!("\"{l}\":{p}")).collect();
    format!("{{{}}}", body.join(","))
}

pub fn physical_set(layout: &Layout, logicals: &BTreeSet<u32>) -> Option<BTreeSet<Qubit>> {
    logicals.iter().map(|l| layout.get(l).copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routed_example_layout() {
        let layout = parse_layout_sidecar(r#"{"0":4,"1":3,"2":5,"3":7}"#).unwrap();
        assert_eq!(layout, [(0, 4), (1, 3), (2, 5), (3, 7)].into_iter().collect());
        assert_eq!(layout_to_json(&layout), r#"{"0":4,"1":3,"2":5,"3":7}"#);
    }

    #[test]
    fn empty_layout() {
        assert!(parse_layout_sidecar("{}").unwrap().is_empty());
    }

    #[test]
    fn layout_errors() {
        assert_eq!(
            parse_layout_sidecar(r#"{"0":1,"1":1}"#),
            Err(LayoutError::DuplicatePhysical {
                physical: 1,
                first: 0,
                second: 1
            })
        );
        assert!(matches!(parse_layout_sidecar(r#"{"0":-3}"#), Err(LayoutError::NegativeIndex { .. })));
        assert!(matches!(parse_layout_sidecar(r#"{"x":3}"#), Err(LayoutError::BadKey(_))));
        assert!(matches!(parse_layout_sidecar(r#"{"0":"#), Err(LayoutError::Json(_))));
        assert!(matches!(parse_layout_sidecar("[1,2]"), Err(LayoutError::Json(_))));
    }

    #[test]
    fn key_order_is_numeric() {
        let layout = parse_layout_sidecar(r#"{"10":0,"2":1}"#).unwrap();
        assert_eq!(layout_to_json(&layout), r#"{"2":1,"10":0}"#);
    }
}
