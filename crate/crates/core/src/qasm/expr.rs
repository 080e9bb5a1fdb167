use std::fmt::Write;

/// Parameter expression inside a gate body. Constant subtrees are folded
/// at parse time, so only expressions mentioning a formal parameter
/// survive as trees.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Index into the enclosing definition's formal parameters.
    Param(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, params: &[f64]) -> f64 {
        match self {
            Expr::Const(v) => *v,
            Expr::Param(i) => params[*i],
            Expr::Neg(e) => -e.eval(params),
            Expr::Add(a, b) => a.eval(params) + b.eval(params),
            Expr::Sub(a, b) => a.eval(params) - b.eval(params),
            Expr::Mul(a, b) => a.eval(params) * b.eval(params),
            Expr::Div(a, b) => a.eval(params) / b.eval(params),
        }
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(v) => Some(*v),
            _ => None,
        }
    }

    pub fn max_param(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Param(i) => Some(*i),
            Expr::Neg(e) => e.max_param(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.max_param().max(b.max_param())
            }
        }
    }

    pub(crate) fn neg(e: Expr) -> Expr {
        match e {
            Expr::Const(v) => Expr::Const(-v),
            e => Expr::Neg(Box::new(e)),
        }
    }

    pub(crate) fn binary(op: char, a: Expr, b: Expr) -> Expr {
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            return Expr::Const(match op {
                '+' => x + y,
                '-' => x - y,
                '*' => x * y,
                _ => x / y,
            });
        }
        let (a, b) = (Box::new(a), Box::new(b));
        match op {
            '+' => Expr::Add(a, b),
            '-' => Expr::Sub(a, b),
            '*' => Expr::Mul(a, b),
            _ => Expr::Div(a, b),
        }
    }

    /// Renders as QASM source using `names` for formal parameters.
    pub fn to_qasm(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.write_qasm(names, &mut s);
        s
    }

    fn write_qasm(&self, names: &[String], out: &mut String) {
        match self {
            Expr::Const(v) => {
                let _ = write!(out, "{}", format_real(*v));
            }
            Expr::Param(i) => out.push_str(&names[*i]),
            Expr::Neg(e) => {
                out.push_str("-(");
                e.write_qasm(names, out);
                out.push(')');
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => '+',
                    Expr::Sub(..) => '-',
                    Expr::Mul(..) => '*',
                    _ => '/',
                };
                out.push('(');
                a.write_qasm(names, out);
                let _ = write!(out, " {op} ");
                b.write_qasm(names, out);
                out.push(')');
            }
        }
    }
}

/// Shortest decimal text that parses back to exactly `v`.
pub(crate) fn format_real(v: f64) -> String {
    let s = format!("{v:?}");
    // `{:?}` yields e.g. `1e-7`; QASM accepts that form, but a negative
    // literal must be parenthesized by the caller when it follows an operator.
    if v < 0.0 {
        format!("({s})")
    } else {
        s
    }
}
