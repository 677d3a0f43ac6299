//! Closed-form payoff expressions: parsing, evaluation, and exact
//! first derivatives via forward-mode dual numbers.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' ['-'] number)?
//! atom   := number | ident | func '(' expr ')' | '(' expr ')'
//! func   := sqrt | ln | exp
//! ```
//!
//! Exponents must be numeric literals so the power rule applies exactly.
//! `-x^2` means `-(x^2)`. U+2212 is accepted as minus and U+00B7 as times.
//! Domain violations (sqrt/ln out of range, division by zero) are hard
//! errors rather than NaN so solvers can treat them as infeasible points.

use std::fmt;
use thiserror::Error;

/// Parse failure with a character offset into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at position {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

/// Evaluation or differentiation failure at a concrete point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("sqrt of negative value {0}")]
    SqrtNegative(f64),
    #[error("ln of non-positive value {0}")]
    LnNonpositive(f64),
    #[error("{base}^{exponent} is undefined")]
    PowDomain { base: f64, exponent: f64 },
    #[error("derivative of {op} undefined at {at}")]
    DerivativeUndefined { op: &'static str, at: f64 },
    #[error("expression value is not finite")]
    NonFinite,
}

/// Value and first derivative carried together through arithmetic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub deriv: f64,
}

impl Dual {
    /// A constant: derivative zero.
    pub fn constant(value: f64) -> Self {
        Dual { value, deriv: 0.0 }
    }

    /// The variable of differentiation: derivative one.
    pub fn variable(value: f64) -> Self {
        Dual { value, deriv: 1.0 }
    }

    fn add(self, rhs: Dual) -> Dual {
        Dual { value: self.value + rhs.value, deriv: self.deriv + rhs.deriv }
    }

    fn sub(self, rhs: Dual) -> Dual {
        Dual { value: self.value - rhs.value, deriv: self.deriv - rhs.deriv }
    }

    fn mul(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value * rhs.value,
            deriv: self.deriv * rhs.value + self.value * rhs.deriv,
        }
    }

    fn div(self, rhs: Dual) -> Result<Dual, EvalError> {
        if rhs.value == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok(Dual {
            value: self.value / rhs.value,
            deriv: (self.deriv * rhs.value - self.value * rhs.deriv) / (rhs.value * rhs.value),
        })
    }

    fn neg(self) -> Dual {
        Dual { value: -self.value, deriv: -self.deriv }
    }

    fn sqrt(self) -> Result<Dual, EvalError> {
        if self.value < 0.0 {
            return Err(EvalError::SqrtNegative(self.value));
        }
        if self.value == 0.0 {
            if self.deriv == 0.0 {
                return Ok(Dual { value: 0.0, deriv: 0.0 });
            }
            return Err(EvalError::DerivativeUndefined { op: "sqrt", at: 0.0 });
        }
        let root = self.value.sqrt();
        Ok(Dual { value: root, deriv: self.deriv / (2.0 * root) })
    }

    fn ln(self) -> Result<Dual, EvalError> {
        if self.value <= 0.0 {
            return Err(EvalError::LnNonpositive(self.value));
        }
        Ok(Dual { value: self.value.ln(), deriv: self.deriv / self.value })
    }

    fn exp(self) -> Dual {
        let e = self.value.exp();
        Dual { value: e, deriv: self.deriv * e }
    }

    /// Power with a constant exponent, by the power rule.
    fn powc(self, c: f64) -> Result<Dual, EvalError> {
        if c == 0.0 {
            return Ok(Dual { value: 1.0, deriv: 0.0 });
        }
        let v = self.value;
        if v < 0.0 && c.fract() != 0.0 {
            return Err(EvalError::PowDomain { base: v, exponent: c });
        }
        if v == 0.0 {
            if c < 0.0 {
                return Err(EvalError::PowDomain { base: v, exponent: c });
            }
            if c >= 1.0 {
                let deriv = if c == 1.0 { self.deriv } else { 0.0 };
                return Ok(Dual { value: 0.0, deriv });
            }
            // 0 < c < 1: value is 0 but the slope blows up.
            if self.deriv == 0.0 {
                return Ok(Dual { value: 0.0, deriv: 0.0 });
            }
            return Err(EvalError::DerivativeUndefined { op: "pow", at: 0.0 });
        }
        Ok(Dual { value: v.powf(c), deriv: c * v.powf(c - 1.0) * self.deriv })
    }
}

/// One node of a parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    Pow(Box<Node>, f64),
    Sqrt(Box<Node>),
    Ln(Box<Node>),
    Exp(Box<Node>),
}

/// A parsed expression over a fixed, ordered set of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    vars: Vec<String>,
    root: Node,
}

impl Expr {
    /// Parses `src` over the declared variables; any other identifier
    /// (besides the function names) is rejected with its position.
    pub fn parse(src: &str, vars: &[&str]) -> Result<Expr, ParseError> {
        let tokens = lex(src)?;
        let mut parser = Parser { tokens, pos: 0, vars };
        let root = parser.expr()?;
        parser.expect_end()?;
        Ok(Expr { vars: vars.iter().map(|v| v.to_string()).collect(), root })
    }

    /// Declared variable names, in slot order.
    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    /// Root of the tree, for inspection.
    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Evaluates with variables bound by name. Extra bindings are
    /// ignored; a missing one is an error.
    pub fn evaluate(&self, bindings: &[(&str, f64)]) -> Result<f64, EvalError> {
        let slots = self.slots(bindings)?;
        self.eval_slots(&slots)
    }

    /// Derivative with respect to `wrt` at the bound point.
    pub fn differentiate(&self, wrt: &str, bindings: &[(&str, f64)]) -> Result<f64, EvalError> {
        if !self.vars.iter().any(|v| v == wrt) {
            return Err(EvalError::UnboundVariable(wrt.to_string()));
        }
        let slots = self.slots(bindings)?;
        let duals: Vec<Dual> = self
            .vars
            .iter()
            .zip(&slots)
            .map(|(name, &v)| if name == wrt { Dual::variable(v) } else { Dual::constant(v) })
            .collect();
        Ok(self.eval_dual_slots(&duals)?.deriv)
    }

    fn slots(&self, bindings: &[(&str, f64)]) -> Result<Vec<f64>, EvalError> {
        self.vars
            .iter()
            .map(|name| {
                bindings
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|&(_, v)| v)
                    .ok_or_else(|| EvalError::UnboundVariable(name.clone()))
            })
            .collect()
    }

    /// Evaluates with variables bound positionally (slot order).
    pub fn eval_slots(&self, slots: &[f64]) -> Result<f64, EvalError> {
        let v = eval_node(&self.root, slots)?;
        if !v.is_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(v)
    }

    /// Dual evaluation with variables bound positionally.
    pub fn eval_dual_slots(&self, slots: &[Dual]) -> Result<Dual, EvalError> {
        let d = eval_dual_node(&self.root, slots)?;
        if !d.value.is_finite() || !d.deriv.is_finite() {
            return Err(EvalError::NonFinite);
        }
        Ok(d)
    }
}

fn eval_node(node: &Node, slots: &[f64]) -> Result<f64, EvalError> {
    Ok(match node {
        Node::Const(c) => *c,
        Node::Var(i) => slots[*i],
        Node::Add(l, r) => eval_node(l, slots)? + eval_node(r, slots)?,
        Node::Sub(l, r) => eval_node(l, slots)? - eval_node(r, slots)?,
        Node::Mul(l, r) => eval_node(l, slots)? * eval_node(r, slots)?,
        Node::Div(l, r) => {
            let den = eval_node(r, slots)?;
            if den == 0.0 {
                return Err(EvalError::DivisionByZero);
            }
            eval_node(l, slots)? / den
        }
        Node::Neg(c) => -eval_node(c, slots)?,
        Node::Pow(b, c) => {
            let base = eval_node(b, slots)?;
            if base < 0.0 && c.fract() != 0.0 {
                return Err(EvalError::PowDomain { base, exponent: *c });
            }
            if base == 0.0 && *c < 0.0 {
                return Err(EvalError::PowDomain { base, exponent: *c });
            }
            base.powf(*c)
        }
        Node::Sqrt(c) => {
            let v = eval_node(c, slots)?;
            if v < 0.0 {
                return Err(EvalError::SqrtNegative(v));
            }
            v.sqrt()
        }
        Node::Ln(c) => {
            let v = eval_node(c, slots)?;
            if v <= 0.0 {
                return Err(EvalError::LnNonpositive(v));
            }
            v.ln()
        }
        Node::Exp(c) => eval_node(c, slots)?.exp(),
    })
}

fn eval_dual_node(node: &Node, slots: &[Dual]) -> Result<Dual, EvalError> {
    Ok(match node {
        Node::Const(c) => Dual::constant(*c),
        Node::Var(i) => slots[*i],
        Node::Add(l, r) => eval_dual_node(l, slots)?.add(eval_dual_node(r, slots)?),
        Node::Sub(l, r) => eval_dual_node(l, slots)?.sub(eval_dual_node(r, slots)?),
        Node::Mul(l, r) => eval_dual_node(l, slots)?.mul(eval_dual_node(r, slots)?),
        Node::Div(l, r) => eval_dual_node(l, slots)?.div(eval_dual_node(r, slots)?)?,
        Node::Neg(c) => eval_dual_node(c, slots)?.neg(),
        Node::Pow(b, c) => eval_dual_node(b, slots)?.powc(*c)?,
        Node::Sqrt(c) => eval_dual_node(c, slots)?.sqrt()?,
        Node::Ln(c) => eval_dual_node(c, slots)?.ln()?,
        Node::Exp(c) => eval_dual_node(c, slots)?.exp(),
    })
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let pos = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                out.push((Tok::Plus, pos));
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push((Tok::Minus, pos));
                i += 1;
            }
            '*' | '\u{00b7}' => {
                out.push((Tok::Star, pos));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, pos));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, pos));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, pos));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, pos));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    i += 1;
                    if i >= chars.len() || !chars[i].is_ascii_digit() {
                        return Err(ParseError {
                            position: i.min(chars.len()),
                            message: "expected digits after decimal point".into(),
                        });
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text.parse().map_err(|_| ParseError {
                    position: start,
                    message: format!("invalid number `{text}`"),
                })?;
                out.push((Tok::Number(value), start));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                out.push((Tok::Ident(text), start));
            }
            _ => {
                return Err(ParseError {
                    position: pos,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [&'a str],
}

const FUNCS: [&str; 3] = ["sqrt", "ln", "exp"];

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|&(_, p)| p).unwrap_or_else(|| {
            self.tokens.last().map(|&(_, p)| p + 1).unwrap_or(0)
        })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        if self.pos < self.tokens.len() {
            return Err(ParseError {
                position: self.here(),
                message: "unexpected trailing input".into(),
            });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    node = Node::Add(Box::new(node), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    node = Node::Sub(Box::new(node), Box::new(self.term()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut node = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    node = Node::Mul(Box::new(node), Box::new(self.factor()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    node = Node::Div(Box::new(node), Box::new(self.factor()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            let mut sign = 1.0;
            if matches!(self.peek(), Some(Tok::Minus)) {
                self.bump();
                sign = -1.0;
            }
            let pos = self.here();
            match self.bump() {
                Some(Tok::Number(n)) => return Ok(Node::Pow(Box::new(base), sign * n)),
                _ => {
                    return Err(ParseError {
                        position: pos,
                        message: "exponent must be a numeric literal".into(),
                    })
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Number(n)) => Ok(Node::Const(n)),
            Some(Tok::Ident(name)) => {
                if FUNCS.contains(&name.as_str()) {
                    let open = self.here();
                    match self.bump() {
                        Some(Tok::LParen) => {}
                        _ => {
                            return Err(ParseError {
                                position: open,
                                message: format!("expected `(` after `{name}`"),
                            })
                        }
                    }
                    let arg = self.expr()?;
                    let close = self.here();
                    match self.bump() {
                        Some(Tok::RParen) => {}
                        _ => {
                            return Err(ParseError {
                                position: close,
                                message: "expected `)`".into(),
                            })
                        }
                    }
                    let arg = Box::new(arg);
                    Ok(match name.as_str() {
                        "sqrt" => Node::Sqrt(arg),
                        "ln" => Node::Ln(arg),
                        _ => Node::Exp(arg),
                    })
                } else if let Some(slot) = self.vars.iter().position(|v| *v == name) {
                    Ok(Node::Var(slot))
                } else {
                    Err(ParseError {
                        position: pos,
                        message: format!("unknown identifier `{name}`"),
                    })
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                let close = self.here();
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => Err(ParseError { position: close, message: "expected `)`".into() }),
                }
            }
            _ => Err(ParseError { position: pos, message: "expected an expression".into() }),
        }
    }
}

// Printing precedence; parenthesize a child whenever its level is
// below what its position requires, so reparsing rebuilds the same tree.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_NEG: u8 = 3;
const PREC_POW: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => PREC_ADD,
        Node::Mul(..) | Node::Div(..) => PREC_MUL,
        Node::Neg(..) => PREC_NEG,
        Node::Pow(..) => PREC_POW,
        _ => PREC_ATOM,
    }
}

fn fmt_node(node: &Node, vars: &[String], f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
    let this = prec(node);
    if this < min {
        write!(f, "(")?;
        fmt_node(node, vars, f, 0)?;
        return write!(f, ")");
    }
    match node {
        Node::Const(c) => write!(f, "{c}"),
        Node::Var(i) => write!(f, "{}", vars[*i]),
        Node::Add(l, r) => {
            fmt_node(l, vars, f, PREC_ADD)?;
            write!(f, " + ")?;
            fmt_node(r, vars, f, PREC_ADD + 1)
        }
        Node::Sub(l, r) => {
            fmt_node(l, vars, f, PREC_ADD)?;
            write!(f, " - ")?;
            fmt_node(r, vars, f, PREC_ADD + 1)
        }
        Node::Mul(l, r) => {
            fmt_node(l, vars, f, PREC_MUL)?;
            write!(f, " * ")?;
            fmt_node(r, vars, f, PREC_MUL + 1)
        }
        Node::Div(l, r) => {
            fmt_node(l, vars, f, PREC_MUL)?;
            write!(f, " / ")?;
            fmt_node(r, vars, f, PREC_MUL + 1)
        }
        Node::Neg(c) => {
            write!(f, "-")?;
            fmt_node(c, vars, f, PREC_NEG)
        }
        Node::Pow(b, e) => {
            fmt_node(b, vars, f, PREC_ATOM)?;
            write!(f, "^{e}")
        }
        Node::Sqrt(c) => {
            write!(f, "sqrt(")?;
            fmt_node(c, vars, f, 0)?;
            write!(f, ")")
        }
        Node::Ln(c) => {
            write!(f, "ln(")?;
            fmt_node(c, vars, f, 0)?;
            write!(f, ")")
        }
        Node::Exp(c) => {
            write!(f, "exp(")?;
            fmt_node(c, vars, f, 0)?;
            write!(f, ")")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_node(&self.root, &self.vars, f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse2(src: &str) -> Expr {
        Expr::parse(src, &["own", "other"]).unwrap()
    }

    #[test]
    fn evaluates_linear_quadratic_payoff() {
        let e = parse2("own + other - own^2/2");
        let v = e.evaluate(&[("own", 1.0), ("other", 2.0)]).unwrap();
        assert!((v - 2.5).abs() < 1e-15);
    }

    #[test]
    fn differentiates_public_good_payoff() {
        let e = parse2("sqrt(1 - own) + sqrt(own + other)");
        let d = e.differentiate("other", &[("own", 1.0 / 3.0), ("other", 1.0 / 3.0)]).unwrap();
        let expected = 1.0 / (2.0 * (2.0f64 / 3.0).sqrt());
        assert!((d - expected).abs() < 1e-14, "got {d}, want {expected}");
    }

    #[test]
    fn power_rule_with_fractional_exponent() {
        let e = parse2("own^2.5");
        let d = e.differentiate("own", &[("own", 2.0), ("other", 0.0)]).unwrap();
        assert!((d - 2.5 * 2.0f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn reports_parse_error_position() {
        let err = Expr::parse("own + * 2", &["own", "other"]).unwrap_err();
        assert_eq!(err.position, 6);
    }

    #[test]
    fn rejects_unknown_identifier() {
        let err = Expr::parse("own + price", &["own", "other"]).unwrap_err();
        assert!(err.message.contains("price"));
    }

    #[test]
    fn rejects_non_constant_exponent() {
        let err = Expr::parse("own^other", &["own", "other"]).unwrap_err();
        assert!(err.message.contains("exponent"));
    }

    #[test]
    fn sqrt_domain_violation_is_hard_error() {
        let e = parse2("sqrt(own - 2)");
        let err = e.evaluate(&[("own", 1.0), ("other", 0.0)]).unwrap_err();
        assert_eq!(err, EvalError::SqrtNegative(-1.0));
    }

    #[test]
    fn ln_and_division_domain_errors() {
        let e = parse2("ln(own)");
        assert!(matches!(
            e.evaluate(&[("own", 0.0), ("other", 0.0)]),
            Err(EvalError::LnNonpositive(_))
        ));
        let e = parse2("1/(own - 1)");
        assert!(matches!(
            e.evaluate(&[("own", 1.0), ("other", 0.0)]),
            Err(EvalError::DivisionByZero)
        ));
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let e = parse2("own + other");
        assert_eq!(
            e.evaluate(&[("own", 1.0)]).unwrap_err(),
            EvalError::UnboundVariable("other".into())
        );
    }

    #[test]
    fn derivative_undefined_at_sqrt_zero() {
        let e = parse2("sqrt(own + other)");
        let err = e.differentiate("own", &[("own", 0.0), ("other", 0.0)]).unwrap_err();
        assert!(matches!(err, EvalError::DerivativeUndefined { .. }));
        // But a constant-zero argument has a well-defined zero slope.
        let d = e.differentiate("other", &[("own", 0.25), ("other", 0.0)]).unwrap();
        assert!((d - 1.0).abs() < 1e-14);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = parse2("-(own - 1)^2 - (other - 1)^2");
        let v = e.evaluate(&[("own", 3.0), ("other", 2.0)]).unwrap();
        assert!((v - (-5.0)).abs() < 1e-15);
        let e = parse2("-own^2");
        assert!((e.evaluate(&[("own", 3.0), ("other", 0.0)]).unwrap() + 9.0).abs() < 1e-15);
    }

    #[test]
    fn accepts_unicode_minus_and_middle_dot() {
        let e = Expr::parse("own \u{2212} 2\u{00b7}other", &["own", "other"]).unwrap();
        let v = e.evaluate(&[("own", 5.0), ("other", 2.0)]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn print_parse_print_is_fixed_point_on_samples() {
        for src in [
            "own + other - own^2/2",
            "sqrt(1 - own) + sqrt(own + other)",
            "-(own - 1)^2 - (other - 1)^2",
            "own/(other + 1)/2",
            "a - (b - c)",
            "-(a * b)^2 + exp(ln(b))",
            "a^-1 + b^0.5",
        ] {
            let vars: &[&str] = if src.contains("own") { &["own", "other"] } else { &["a", "b", "c"] };
            let e = Expr::parse(src, vars).unwrap();
            let printed = e.to_string();
            let reparsed = Expr::parse(&printed, vars).unwrap();
            assert_eq!(e, reparsed, "src `{src}` printed `{printed}`");
            assert_eq!(printed, reparsed.to_string());
        }
    }

    // Random tree generator used by the structural and derivative properties.
    fn node_strategy() -> impl Strategy<Value = Node> {
        let leaf = prop_oneof![
            (0.1f64..4.0).prop_map(Node::Const),
            (0usize..2).prop_map(Node::Var),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Node::Add(Box::new(l), Box::new(r))),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Node::Sub(Box::new(l), Box::new(r))),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Node::Mul(Box::new(l), Box::new(r))),
                (inner.clone(), inner.clone())
                    .prop_map(|(l, r)| Node::Div(Box::new(l), Box::new(r))),
                inner.clone().prop_map(|c| Node::Neg(Box::new(c))),
                (inner.clone(), prop_oneof![Just(2.0), Just(3.0), Just(0.5), Just(1.5), Just(-1.0)])
                    .prop_map(|(b, e)| Node::Pow(Box::new(b), e)),
                inner.clone().prop_map(|c| Node::Sqrt(Box::new(c))),
                inner.clone().prop_map(|c| Node::Ln(Box::new(c))),
                inner.prop_map(|c| Node::Exp(Box::new(c))),
            ]
        })
    }

    fn expr_of(root: Node) -> Expr {
        Expr { vars: vec!["own".into(), "other".into()], root }
    }

    proptest! {
        #[test]
        fn random_trees_round_trip_through_printing(root in node_strategy()) {
            let e = expr_of(root);
            let printed = e.to_string();
            let reparsed = Expr::parse(&printed, &["own", "other"]).unwrap();
            prop_assert_eq!(&e, &reparsed);
            prop_assert_eq!(printed, reparsed.to_string());
        }

        #[test]
        fn dual_derivative_matches_central_difference(
            root in node_strategy(),
            x in 0.3f64..2.5,
            y in 0.3f64..2.5,
        ) {
            let e = expr_of(root);
            let h = 1e-6;
            let at = |own: f64| e.eval_slots(&[own, y]);
            let (f0, fp, fm) = match (at(x), at(x + h), at(x - h)) {
                (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                _ => return Ok(()), // point infeasible for this tree
            };
            let ad = match e.eval_dual_slots(&[Dual::variable(x), Dual::constant(y)]) {
                Ok(d) => d.deriv,
                Err(_) => return Ok(()),
            };
            let fd = (fp - fm) / (2.0 * h);
            let curvature = (fp - 2.0 * f0 + fm) / (h * h);
            // Skip points where the finite-difference stencil is ill-conditioned.
            if f0.abs() > 1e3 || fp.abs() > 1e3 || fm.abs() > 1e3
                || ad.abs() > 1e3 || curvature.abs() > 1e4 {
                return Ok(());
            }
            let tol = 1e-5 * (1.0 + ad.abs().max(fd.abs()));
            prop_assert!((ad - fd).abs() <= tol, "ad {ad} vs fd {fd} on {e}");
        }
    }
}
