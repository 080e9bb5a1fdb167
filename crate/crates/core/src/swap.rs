//! Recognition of SWAP operations in an instruction stream.
//!
//! Six manifestations are detected: an explicit `swap`, a gate named (or
//! defined) as a swap, an explicit unitary equal to SWAP up to phase, the
//! three-CNOT decomposition, iSWAP followed by phase correction, and the
//! RXX/RYY/RZZ(pi/2) triple. Multi-instruction patterns must be contiguous.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;
use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::graph::Edge;
use crate::qasm::{inline_definition, Instruction, ParsedCircuit};
use crate::unitary::{compose_span_unitary, unitary_equals_swap};
use crate::{Diagnostic, Qubit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SwapKind {
    Direct,
    NamedAlias,
    UnitaryMatch,
    ThreeCnot,
    IswapPhase,
    PauliRotationTriple,
}

impl SwapKind {
    pub const ALL: [SwapKind; 6] = [
        SwapKind::Direct,
        SwapKind::NamedAlias,
        SwapKind::UnitaryMatch,
        SwapKind::ThreeCnot,
        SwapKind::IswapPhase,
        SwapKind::PauliRotationTriple,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SwapKind::Direct => "direct",
            SwapKind::NamedAlias => "named-alias",
            SwapKind::UnitaryMatch => "unitary-match",
            SwapKind::ThreeCnot => "three-cnot",
            SwapKind::IswapPhase => "iswap-phase",
            SwapKind::PauliRotationTriple => "pauli-rotation-triple",
        }
    }

    fn is_pattern(self) -> bool {
        matches!(
            self,
            SwapKind::ThreeCnot | SwapKind::IswapPhase | SwapKind::PauliRotationTriple
        )
    }
}

impl std::str::FromStr for SwapKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SwapKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown swap kind `{s}`"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapEvent {
    pub pair: Edge,
    /// Instructions consumed by the event.
    pub span: Range<usize>,
    pub kind: SwapKind,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unitary tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecognizerConfig {
    aliases: BTreeSet<String>,
    unitary_tolerance: f64,
    pub strict_unitary: bool,
}

impl Default for RecognizerConfig {
    fn default() -> Self {
        Self {
            aliases: BTreeSet::new(),
            unitary_tolerance: 1e-6,
            strict_unitary: false,
        }
    }
}

impl RecognizerConfig {
    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self, ConfigError> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(ConfigError::BadTolerance(tolerance));
        }
        self.unitary_tolerance = tolerance;
        Ok(self)
    }

    pub fn with_strict_unitary(mut self, strict: bool) -> Self {
        self.strict_unitary = strict;
        self
    }

    pub fn with_aliases<I, S>(mut self, aliases: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        self.aliases
            .extend(aliases.into_iter().map(|a| a.as_ref().trim().to_ascii_lowercase()));
        self
    }

    /// Reads one gate name per line; blank lines and `#` comments are skipped.
    pub fn with_alias_file_text(self, text: &str) -> Self {
        self.with_aliases(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn aliases(&self) -> &BTreeSet<String> {
        &self.aliases
    }

    pub fn unitary_tolerance(&self) -> f64 {
        self.unitary_tolerance
    }

    fn is_alias(&self, name: &str) -> bool {
        !self.aliases.is_empty() && self.aliases.contains(&name.to_ascii_lowercase())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SwapScan {
    pub events: Vec<SwapEvent>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Finds SWAP events left to right, taking the longest match at each start.
pub fn scan_swaps(circuit: &ParsedCircuit, config: &RecognizerConfig) -> SwapScan {
    let mut scanner = Scanner {
        circuit,
        config,
        diagnostics: Vec::new(),
    };
    let events = scanner.scan(&circuit.instructions, true);
    SwapScan {
        events,
        diagnostics: scanner.diagnostics,
    }
}

struct Scanner<'a> {
    circuit: &'a ParsedCircuit,
    config: &'a RecognizerConfig,
    diagnostics: Vec<Diagnostic>,
}

impl Scanner<'_> {
    fn scan(&mut self, stream: &[Instruction], top_level: bool) -> Vec<SwapEvent> {
        let mut events = Vec::new();
        let mut i = 0;
        while i < stream.len() {
            match self.match_at(stream, i, top_level) {
                Some(ev) => {
                    i = ev.span.end;
                    events.push(ev);
                }
                None => i += 1,
            }
        }
        events
    }

    fn match_at(&mut self, stream: &[Instruction], i: usize, top_level: bool) -> Option<SwapEvent> {
        let candidates = [
            three_cnot(stream, i),
            pauli_triple(stream, i, self.config.unitary_tolerance),
            iswap_phase(stream, i, 2, self.config.unitary_tolerance),
            iswap_phase(stream, i, 1, self.config.unitary_tolerance),
        ];
        let mut rejected = None;
        for ev in candidates.into_iter().flatten() {
            if self.verify(stream, &ev) {
                return Some(ev);
            }
            rejected.get_or_insert(ev);
        }
        // One diagnostic per position, for the longest rejected pattern.
        if let (Some(ev), true) = (rejected, top_level) {
            self.diagnostics.push(Diagnostic::new(
                ev.span.start,
                format!(
                    "{} pattern on {} at [{}, {}) is not SWAP up to global phase; not treated as a swap",
                    ev.kind.as_str(),
                    ev.pair,
                    ev.span.start,
                    ev.span.end
                ),
            ));
        }
        self.single(stream, i, top_level)
    }

    /// Strict mode: multiply out a pattern match and demote it when the
    /// product is not SWAP up to phase.
    fn verify(&self, stream: &[Instruction], ev: &SwapEvent) -> bool {
        if !self.config.strict_unitary || !ev.kind.is_pattern() {
            return true;
        }
        let pair = stream[ev.span.start].pair().expect("patterns start on a two-qubit gate");
        compose_span_unitary(&stream[ev.span.clone()], pair)
            .and_then(|u| unitary_equals_swap(&u, self.config.unitary_tolerance))
            .unwrap_or(false)
    }

    fn single(&mut self, stream: &[Instruction], i: usize, top_level: bool) -> Option<SwapEvent> {
        let inst = &stream[i];
        let (a, b) = inst.pair()?;
        let pair = Edge::new(a, b).ok()?;
        let event = |kind| {
            Some(SwapEvent {
                pair,
                span: i..i + 1,
                kind,
            })
        };

        if let Some(m) = &inst.matrix {
            return match unitary_equals_swap(m, self.config.unitary_tolerance) {
                Ok(true) => event(SwapKind::UnitaryMatch),
                Ok(false) => None,
                Err(e) => {
                    if top_level {
                        self.diagnostics.push(Diagnostic::new(i, format!("explicit unitary: {e}")));
                    }
                    None
                }
            };
        }
        if inst.name == "swap" {
            return event(SwapKind::Direct);
        }
        if self.config.is_alias(&inst.name) {
            return event(SwapKind::NamedAlias);
        }
        if top_level && self.custom_is_swap(inst, i) {
            return event(SwapKind::NamedAlias);
        }
        None
    }

    /// A custom two-qubit gate counts as a swap when its inlined body is a
    /// single recognized SWAP spanning the whole body, or when the body
    /// multiplies out to SWAP up to phase.
    fn custom_is_swap(&mut self, inst: &Instruction, index: usize) -> bool {
        let Some(defn) = self.circuit.definition(&inst.name) else {
            return false;
        };
        let (a, b) = inst.pair().expect("checked by caller");
        let body = match inline_definition(&self.circuit.definitions, defn, &inst.params, &inst.qubits) {
            Ok(body) => body,
            Err(e) => {
                self.diagnostics
                    .push(Diagnostic::new(index, format!("cannot inline `{}`: {e}", inst.name)));
                return false;
            }
        };
        let inner = self.scan(&body, false);
        if let [only] = inner.as_slice() {
            if only.span == (0..body.len()) && only.pair == Edge::new(a, b).expect("distinct operands") {
                return true;
            }
        }
        compose_span_unitary(&body, (a, b))
            .and_then(|u| unitary_equals_swap(&u, self.config.unitary_tolerance))
            .unwrap_or(false)
    }
}

fn two_qubit(stream: &[Instruction], i: usize, name: &str) -> Option<(Qubit, Qubit)> {
    let inst = stream.get(i)?;
    if inst.name == name && inst.matrix.is_none() {
        inst.pair()
    } else {
        None
    }
}

fn three_cnot(stream: &[Instruction], i: usize) -> Option<SwapEvent> {
    let (a, b) = two_qubit(stream, i, "cx")?;
    if two_qubit(stream, i + 1, "cx")? == (b, a) && two_qubit(stream, i + 2, "cx")? == (a, b) {
        Some(SwapEvent {
            pair: Edge::new(a, b).ok()?,
            span: i..i + 3,
            kind: SwapKind::ThreeCnot,
        })
    } else {
        None
    }
}

fn pauli_triple(stream: &[Instruction], i: usize, tol: f64) -> Option<SwapEvent> {
    let window = stream.get(i..i + 3)?;
    let pair = Edge::new(window[0].pair()?.0, window[0].pair()?.1).ok()?;
    let mut seen = BTreeSet::new();
    for inst in window {
        let (x, y) = inst.pair()?;
        let is_rotation = matches!(inst.name.as_str(), "rxx" | "ryy" | "rzz") && inst.matrix.is_none();
        if !is_rotation || Edge::new(x, y).ok()? != pair || (inst.params.first()? - FRAC_PI_2).abs() > tol {
            return None;
        }
        seen.insert(inst.name.as_str());
    }
    (seen.len() == 3).then(|| SwapEvent {
        pair,
        span: i..i + 3,
        kind: SwapKind::PauliRotationTriple,
    })
}

fn is_phase_gate(inst: &Instruction, tol: f64) -> bool {
    match inst.name.as_str() {
        "s" | "sdg" => inst.qubits.len() == 1,
        "rz" => inst.qubits.len() == 1 && inst.params.first().is_some_and(|t| (t.abs() - FRAC_PI_2).abs() <= tol),
        _ => false,
    }
}

/// `iswap(a, b)` followed immediately by exactly `phases` phase gates on `a`/`b`.
fn iswap_phase(stream: &[Instruction], i: usize, phases: usize, tol: f64) -> Option<SwapEvent> {
    let (a, b) = two_qubit(stream, i, "iswap")?;
    let tail = stream.get(i + 1..i + 1 + phases)?;
    if !tail.iter().all(|p| is_phase_gate(p, tol) && (p.touches(a) || p.touches(b))) {
        return None;
    }
    Some(SwapEvent {
        pair: Edge::new(a, b).ok()?,
        span: i..i + 1 + phases,
        kind: SwapKind::IswapPhase,
    })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::qasm::parse_qasm;
    use crate::unitary::Mat4;

    fn i(name: &str, q: &[Qubit]) -> Instruction {
        Instruction::new(name, q.to_vec())
    }

    fn ip(name: &str, q: &[Qubit], p: f64) -> Instruction {
        Instruction::new(name, q.to_vec()).with_params(vec![p])
    }

    fn scan(stream: Vec<Instruction>) -> Vec<SwapEvent> {
        scan_swaps(&ParsedCircuit::new(8, stream), &RecognizerConfig::default()).events
    }

    fn ev(a: Qubit, b: Qubit, span: Range<usize>, kind: SwapKind) -> SwapEvent {
        SwapEvent {
            pair: Edge::new(a, b).unwrap(),
            span,
            kind,
        }
    }

    #[test]
    fn routed_example_direct_swap() {
        let events = scan(vec![i("cx", &[4, 3]), i("cx", &[3, 5]), i("swap", &[3, 5]), i("cx", &[3, 7])]);
        assert_eq!(events, vec![ev(3, 5, 2..3, SwapKind::Direct)]);
    }

    #[test]
    fn three_cnot_pattern() {
        let events = scan(vec![i("cx", &[0, 1]), i("cx", &[1, 0]), i("cx", &[0, 1])]);
        assert_eq!(events, vec![ev(0, 1, 0..3, SwapKind::ThreeCnot)]);
    }

    #[test]
    fn intervening_gate_breaks_three_cnot() {
        assert!(scan(vec![i("cx", &[0, 1]), i("h", &[1]), i("cx", &[1, 0]), i("cx", &[0, 1])]).is_empty());
    }

    #[test]
    fn four_cnots_take_the_first_three() {
        let events = scan(vec![i("cx", &[0, 1]), i("cx", &[1, 0]), i("cx", &[0, 1]), i("cx", &[1, 0])]);
        assert_eq!(events, vec![ev(0, 1, 0..3, SwapKind::ThreeCnot)]);
    }

    #[test]
    fn pauli_triple_any_order() {
        let events = scan(vec![ip("rzz", &[2, 6], PI / 2.0), ip("rxx", &[6, 2], PI / 2.0), ip("ryy", &[2, 6], PI / 2.0)]);
        assert_eq!(events, vec![ev(2, 6, 0..3, SwapKind::PauliRotationTriple)]);
        assert!(scan(vec![ip("rxx", &[2, 6], PI / 2.0), ip("ryy", &[2, 6], PI / 2.0), ip("rzz", &[2, 6], PI / 3.0)])
            .is_empty());
        assert!(scan(vec![ip("rxx", &[2, 6], PI / 2.0), ip("rxx", &[2, 6], PI / 2.0), ip("rzz", &[2, 6], PI / 2.0)])
            .is_empty());
    }

    #[test]
    fn iswap_followed_by_phase() {
        let events = scan(vec![i("iswap", &[1, 2]), i("s", &[1]), i("s", &[2]), i("cx", &[1, 2])]);
        assert_eq!(events, vec![ev(1, 2, 0..3, SwapKind::IswapPhase)]);
        let events = scan(vec![i("iswap", &[1, 2]), ip("rz", &[2], -PI / 2.0), i("h", &[1])]);
        assert_eq!(events, vec![ev(1, 2, 0..2, SwapKind::IswapPhase)]);
        assert!(scan(vec![i("iswap", &[1, 2])]).is_empty());
        assert!(scan(vec![i("iswap", &[1, 2]), i("s", &[3])]).is_empty());
    }

    #[test]
    fn strict_mode_demotes_iswap_phase() {
        let c = ParsedCircuit::new(3, vec![i("iswap", &[1, 2]), i("sdg", &[1]), i("sdg", &[2])]);
        let scan = scan_swaps(&c, &RecognizerConfig::default().with_strict_unitary(true));
        assert!(scan.events.is_empty());
        assert_eq!(scan.diagnostics.len(), 1, "{:?}", scan.diagnostics);
        assert_eq!(scan.diagnostics[0].index, 0);
        // Exact patterns survive strict mode.
        let c = ParsedCircuit::new(2, vec![i("cx", &[0, 1]), i("cx", &[1, 0]), i("cx", &[0, 1])]);
        let scan = scan_swaps(&c, &RecognizerConfig::default().with_strict_unitary(true));
        assert_eq!(scan.events.len(), 1);
        assert!(scan.diagnostics.is_empty());
    }

    #[test]
    fn aliases_are_case_insensitive() {
        let c = ParsedCircuit::new(4, vec![i("route_swap", &[0, 3]), i("cx", &[0, 3])]);
        let cfg = RecognizerConfig::default().with_alias_file_text("# routing\nROUTE_SWAP\n\n");
        assert_eq!(scan_swaps(&c, &cfg).events, vec![ev(0, 3, 0..1, SwapKind::NamedAlias)]);
        assert!(scan_swaps(&c, &RecognizerConfig::default()).events.is_empty());
    }

    #[test]
    fn custom_definitions_are_inspected() {
        let src = "OPENQASM 2.0; include \"qelib1.inc\";
            gate myswap a,b { cx a,b; cx b,a; cx a,b; }
            gate wrap a,b { swap a,b; }
            gate notswap a,b { cx a,b; h a; }
            gate decomposed a,b { cx a,b; h a; h b; cx a,b; h a; h b; cx a,b; }
            qreg q[4];
            myswap q[0],q[1]; wrap q[2],q[3]; notswap q[0],q[2]; decomposed q[1],q[3];";
        let c = parse_qasm(src).unwrap();
        let events = scan_swaps(&c, &RecognizerConfig::default()).events;
        assert_eq!(events, vec![
            ev(0, 1, 0..1, SwapKind::NamedAlias),
            ev(2, 3, 1..2, SwapKind::NamedAlias),
            ev(1, 3, 3..4, SwapKind::NamedAlias),
        ]);
    }

    #[test]
    fn explicit_unitary_match() {
        let phased = Mat4::swap().scale(num_complex::Complex64::from_polar(1.0, 0.3));
        let events = scan(vec![Instruction::unitary(phased, 5, 2), Instruction::unitary(Mat4::identity(), 1, 2)]);
        assert_eq!(events, vec![ev(2, 5, 0..1, SwapKind::UnitaryMatch)]);
    }

    #[test]
    fn bad_tolerance_rejected() {
        assert!(RecognizerConfig::default().with_tolerance(0.0).is_err());
        assert!(RecognizerConfig::default().with_tolerance(f64::NAN).is_err());
        assert!(RecognizerConfig::default().with_tolerance(1e-3).is_ok());
    }

    #[test]
    fn kind_names_round_trip() {
        for k in SwapKind::ALL {
            assert_eq!(k.as_str().parse::<SwapKind>().unwrap(), k);
        }
    }
}
