//! Recursive-descent parser for the supported OpenQASM 2.0 subset.
//!
//! Registers are flattened in declaration order, so the physical index of
//! `r[i]` is the total size of the registers declared before `r`, plus `i`.
//! `barrier`, `measure` and `reset` are validated and then dropped.

use indexmap::IndexMap;

use super::expr::Expr;
use super::lexer::{tokenize, Tok, Token};
use super::{GateDefinition, GateTable, GateTemplate, Instruction, ParseError, ParsedCircuit};
use crate::gates::{self, UNITARY_GATE};
use crate::unitary::{Mat4, UNITARITY_TOLERANCE};
use crate::Qubit;

const MAX_ARITY: usize = 3;

/// Parses OpenQASM 2.0 text into a flat instruction stream.
pub fn parse_qasm(text: &str) -> Result<ParsedCircuit, ParseError> {
    let mut p = Parser {
        toks: tokenize(text)?,
        pos: 0,
        qregs: IndexMap::new(),
        cregs: IndexMap::new(),
        num_qubits: 0,
        qelib: false,
        defs: GateTable::new(),
        out: Vec::new(),
    };
    p.header()?;
    while p.peek() != &Tok::Eof {
        p.statement()?;
    }
    Ok(ParsedCircuit {
        instructions: p.out,
        num_qubits: p.num_qubits,
        layout: None,
        source_name: String::new(),
        definitions: p.defs,
    })
}

#[derive(Clone, Copy)]
enum GateRef {
    Standard,
    Custom,
    Unitary,
}

struct Resolved {
    name: String,
    kind: GateRef,
    num_params: usize,
    num_qubits: usize,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qregs: IndexMap<String, (u32, u32)>,
    cregs: IndexMap<String, u32>,
    num_qubits: u32,
    qelib: bool,
    defs: GateTable,
    out: Vec<Instruction>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn semantic<T>(at: &Token, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Semantic {
            line: at.line,
            col: at.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> Result<Token, ParseError> {
        if *self.peek() == want {
            Ok(self.next())
        } else {
            self.syntax(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn ident(&mut self) -> Result<(String, Token), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => Ok((s, self.next())),
            other => self.syntax(format!("expected identifier, found {}", other.describe())),
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        match *self.peek() {
            Tok::Int(v) => {
                self.next();
                Ok(v)
            }
            ref other => self.syntax(format!("expected integer, found {}", other.describe())),
        }
    }

    fn header(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "OPENQASM" => {}
            _ => return self.syntax("expected `OPENQASM 2.0;` header"),
        }
        self.next();
        let at = self.toks[self.pos].clone();
        let version = match at.tok {
            Tok::Real(v) => v,
            Tok::Int(v) => v as f64,
            _ => return self.syntax("expected version number"),
        };
        self.next();
        if version != 2.0 {
            return Self::semantic(&at, format!("unsupported OpenQASM version {version}; only 2.0 is accepted"));
        }
        self.expect(Tok::Semi)?;
        Ok(())
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let (word, at) = self.ident()?;
        match word.as_str() {
            "include" => {
                let file = match self.next().tok {
                    Tok::Str(s) => s,
                    _ => return Self::semantic(&at, "expected file name after include"),
                };
                self.expect(Tok::Semi)?;
                if file != "qelib1.inc" {
                    return Self::semantic(&at, format!("unsupported include \"{file}\""));
                }
                self.qelib = true;
            }
            "qreg" | "creg" => {
                let (name, name_at) = self.ident()?;
                self.expect(Tok::LBracket)?;
                let size = self.int()?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::Semi)?;
                if self.qregs.contains_key(&name) || self.cregs.contains_key(&name) {
                    return Self::semantic(&name_at, format!("register `{name}` already declared"));
                }
                let size = u32::try_from(size).or_else(|_| Self::semantic(&name_at, "register too large"))?;
                if word == "qreg" {
                    self.qregs.insert(name, (self.num_qubits, size));
                    self.num_qubits = self
                        .num_qubits
                        .checked_add(size)
                        .map_or_else(|| Self::semantic(&name_at, "too many qubits"), Ok)?;
                } else {
                    self.cregs.insert(name, size);
                }
            }
            "gate" => self.gate_definition()?,
            "opaque" => return Self::semantic(&at, "opaque gate declarations are not supported"),
            "if" => return Self::semantic(&at, "classical control (`if`) is not supported"),
            "barrier" => {
                self.qubit_args()?;
                self.expect(Tok::Semi)?;
            }
            "reset" => {
                self.qubit_arg()?;
                self.expect(Tok::Semi)?;
            }
            "measure" => {
                let q = self.qubit_arg()?;
                self.expect(Tok::Arrow)?;
                let c = self.classical_arg()?;
                self.expect(Tok::Semi)?;
                if q.len() != c {
                    return Self::semantic(&at, "measure operands differ in size");
                }
            }
            _ => self.gate_application(word, at)?,
        }
        Ok(())
    }

    fn resolve(&self, raw: &str, at: &Token, in_body: bool) -> Result<Resolved, ParseError> {
        let r = |name: &str, kind, num_params, num_qubits| {
            Ok(Resolved {
                name: name.to_string(),
                kind,
                num_params,
                num_qubits,
            })
        };
        match raw {
            "U" => return r("u3", GateRef::Standard, 3, 1),
            "CX" => return r("cx", GateRef::Standard, 0, 2),
            _ => {}
        }
        let name = raw.to_ascii_lowercase();
        if let Some(d) = self.defs.get(&name) {
            return r(&name, GateRef::Custom, d.formal_params.len(), d.formal_qubits.len());
        }
        if self.qelib {
            if let Some(sig) = gates::standard_gate(&name) {
                return r(&name, GateRef::Standard, sig.num_params, sig.num_qubits);
            }
        }
        if name == UNITARY_GATE && !in_body {
            return r(&name, GateRef::Unitary, 32, 2);
        }
        Err(ParseError::UndeclaredGate {
            line: at.line,
            col: at.col,
            name: raw.to_string(),
        })
    }

    fn check_counts(res: &Resolved, at: &Token, params: usize, qubits: usize) -> Result<(), ParseError> {
        if qubits > MAX_ARITY {
            return Err(ParseError::GateArity {
                line: at.line,
                col: at.col,
                name: res.name.clone(),
                arity: qubits,
            });
        }
        for (what, expected, found) in [("parameters", res.num_params, params), ("qubits", res.num_qubits, qubits)] {
            if expected != found {
                return Err(ParseError::ArgumentCount {
                    line: at.line,
                    col: at.col,
                    name: res.name.clone(),
                    what,
                    expected,
                    found,
                });
            }
        }
        Ok(())
    }

    fn gate_application(&mut self, raw: String, at: Token) -> Result<(), ParseError> {
        let res = self.resolve(&raw, &at, false)?;
        let params: Vec<f64> = self
            .param_list(None)?
            .into_iter()
            .map(|e| e.as_const().expect("no formals outside gate bodies"))
            .collect();
        let args = self.qubit_args()?;
        self.expect(Tok::Semi)?;
        Self::check_counts(&res, &at, params.len(), args.len())?;

        let width = args.iter().map(Vec::len).filter(|&n| n != 1).max().unwrap_or(1);
        if args.iter().any(|a| a.len() != 1 && a.len() != width) {
            return Self::semantic(&at, "register arguments differ in size");
        }
        for k in 0..width {
            let qubits: Vec<Qubit> = args.iter().map(|a| if a.len() == 1 { a[0] } else { a[k] }).collect();
            if has_duplicates(&qubits) {
                return Self::semantic(&at, format!("duplicate qubit operand in `{}`", res.name));
            }
            let inst = match res.kind {
                GateRef::Unitary => {
                    let m = Mat4::from_real_parts(&params).expect("32 parameters checked");
                    if !m.is_unitary(UNITARITY_TOLERANCE) {
                        return Self::semantic(&at, "explicit unitary matrix is not unitary");
                    }
                    Instruction::unitary(m, qubits[0], qubits[1])
                }
                _ => Instruction::new(res.name.clone(), qubits).with_params(params.clone()),
            };
            self.out.push(inst);
        }
        Ok(())
    }

    fn gate_definition(&mut self) -> Result<(), ParseError> {
        let (raw, at) = self.ident()?;
        let name = raw.to_ascii_lowercase();
        if self.defs.contains_key(&name)
            || (self.qelib && gates::is_standard(&name))
            || raw == "U"
            || raw == "CX"
        {
            return Self::semantic(&at, format!("gate `{raw}` already declared"));
        }
        let mut formal_params = Vec::new();
        if *self.peek() == Tok::LParen {
            self.next();
            if *self.peek() != Tok::RParen {
                formal_params = self.ident_list()?;
            }
            self.expect(Tok::RParen)?;
        }
        let formal_qubits = self.ident_list()?;
        if formal_qubits.len() > MAX_ARITY {
            return Err(ParseError::GateArity {
                line: at.line,
                col: at.col,
                name,
                arity: formal_qubits.len(),
            });
        }
        if has_duplicates(&formal_params) || has_duplicates(&formal_qubits) {
            return Self::semantic(&at, format!("duplicate formal argument in gate `{raw}`"));
        }

        self.expect(Tok::LBrace)?;
        let mut body = Vec::new();
        while *self.peek() != Tok::RBrace {
            let (word, inner_at) = self.ident()?;
            if word == "barrier" {
                self.formal_qubit_list(&formal_qubits)?;
                self.expect(Tok::Semi)?;
                continue;
            }
            let res = self.resolve(&word, &inner_at, true)?;
            let params = self.param_list(Some(&formal_params))?;
            let qubits = self.formal_qubit_list(&formal_qubits)?;
            self.expect(Tok::Semi)?;
            Self::check_counts(&res, &inner_at, params.len(), qubits.len())?;
            if has_duplicates(&qubits) {
                return Self::semantic(&inner_at, format!("duplicate qubit operand in `{}`", res.name));
            }
            body.push(GateTemplate {
                name: res.name,
                qubits,
                params,
            });
        }
        self.expect(Tok::RBrace)?;
        self.defs.insert(
            name.clone(),
            GateDefinition {
                name,
                formal_params,
                formal_qubits,
                body,
            },
        );
        Ok(())
    }

    fn ident_list(&mut self) -> Result<Vec<String>, ParseError> {
        let mut out = vec![self.ident()?.0];
        while *self.peek() == Tok::Comma {
            self.next();
            out.push(self.ident()?.0);
        }
        Ok(out)
    }

    fn formal_qubit_list(&mut self, formals: &[String]) -> Result<Vec<usize>, ParseError> {
        let mut out = Vec::new();
        loop {
            let (name, at) = self.ident()?;
            match formals.iter().position(|f| *f == name) {
                Some(i) => out.push(i),
                None => return Self::semantic(&at, format!("`{name}` is not a formal qubit of this gate")),
            }
            if *self.peek() != Tok::Comma {
                return Ok(out);
            }
            self.next();
        }
    }

    fn qubit_args(&mut self) -> Result<Vec<Vec<Qubit>>, ParseError> {
        let mut out = vec![self.qubit_arg()?];
        while *self.peek() == Tok::Comma {
            self.next();
            out.push(self.qubit_arg()?);
        }
        Ok(out)
    }

    fn qubit_arg(&mut self) -> Result<Vec<Qubit>, ParseError> {
        let (name, at) = self.ident()?;
        let Some(&(offset, size)) = self.qregs.get(&name) else {
            return Err(ParseError::UndeclaredRegister {
                line: at.line,
                col: at.col,
                name,
            });
        };
        match self.index(&name, size)? {
            Some(i) => Ok(vec![offset + i]),
            None => Ok((offset..offset + size).collect()),
        }
    }

    fn classical_arg(&mut self) -> Result<usize, ParseError> {
        let (name, at) = self.ident()?;
        let Some(&size) = self.cregs.get(&name) else {
            return Err(ParseError::UndeclaredRegister {
                line: at.line,
                col: at.col,
                name,
            });
        };
        Ok(match self.index(&name, size)? {
            Some(_) => 1,
            None => size as usize,
        })
    }

    fn index(&mut self, name: &str, size: u32) -> Result<Option<u32>, ParseError> {
        if *self.peek() != Tok::LBracket {
            return Ok(None);
        }
        self.next();
        let (line, col) = self.here();
        let index = self.int()?;
        self.expect(Tok::RBracket)?;
        if index >= size as u64 {
            return Err(ParseError::IndexOutOfBounds {
                line,
                col,
                name: name.to_string(),
                index,
                size,
            });
        }
        Ok(Some(index as u32))
    }

    fn param_list(&mut self, formals: Option<&[String]>) -> Result<Vec<Expr>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() != Tok::LParen {
            return Ok(out);
        }
        self.next();
        if *self.peek() != Tok::RParen {
            loop {
                let (line, col) = self.here();
                let e = self.expr(formals)?;
                if e.as_const().is_some_and(|v| !v.is_finite()) {
                    return Err(ParseError::UnsupportedExpression {
                        line,
                        col,
                        msg: "expression does not evaluate to a finite number".into(),
                    });
                }
                out.push(e);
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.next();
            }
        }
        self.expect(Tok::RParen)?;
        Ok(out)
    }

    fn expr(&mut self, formals: Option<&[String]>) -> Result<Expr, ParseError> {
        let mut lhs = self.term(formals)?;
        loop {
            let op = match self.peek() {
                Tok::Plus => '+',
                Tok::Minus => '-',
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term(formals)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self, formals: Option<&[String]>) -> Result<Expr, ParseError> {
        let mut lhs = self.unary(formals)?;
        loop {
            let op = match self.peek() {
                Tok::Star => '*',
                Tok::Slash => '/',
                Tok::Caret => return self.unsupported("the `^` operator"),
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary(formals)?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self, formals: Option<&[String]>) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.next();
                Ok(Expr::neg(self.unary(formals)?))
            }
            Tok::Plus => {
                self.next();
                self.unary(formals)
            }
            _ => self.primary(formals),
        }
    }

    fn primary(&mut self, formals: Option<&[String]>) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.next();
                Ok(Expr::Const(v as f64))
            }
            Tok::Real(v) => {
                self.next();
                Ok(Expr::Const(v))
            }
            Tok::LParen => {
                self.next();
                let e = self.expr(formals)?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if name == "pi" {
                    self.next();
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                if let Some(i) = formals.and_then(|f| f.iter().position(|p| *p == name)) {
                    self.next();
                    return Ok(Expr::Param(i));
                }
                if self.toks.get(self.pos + 1).is_some_and(|t| t.tok == Tok::LParen) {
                    return self.unsupported(&format!("function call `{name}(...)`"));
                }
                self.unsupported(&format!("identifier `{name}`"))
            }
            other => self.syntax(format!("expected expression, found {}", other.describe())),
        }
    }

    fn unsupported<T>(&self, what: &str) -> Result<T, ParseError> {
        let (line, col) = self.here();
        Err(ParseError::UnsupportedExpression {
            line,
            col,
            msg: format!("{what} is outside the literal/pi arithmetic subset"),
        })
    }
}

fn has_duplicates<T: PartialEq>(items: &[T]) -> bool {
    items.iter().enumerate().any(|(i, a)| items[..i].contains(a))
}
