//! Arithmetic expressions for user-defined immersions and loops.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | base ("^" factor)?
//! base   := number | ident | func "(" expr ")" | "(" expr ")"
//! func   := sin | cos | exp | log | sqrt
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so
//! `-a^b = -(a^b)`. Identifiers are resolved against a [`Scope`] at parse
//! time: variables become evaluation slots, declared parameters are folded
//! into named constants, and `pi` is always available.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("evaluation error at line {line}, column {column}: {message}")]
pub struct EvalError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
struct Loc {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var { slot: usize, name: String },
    Const { name: String, value: f64 },
    Neg(Box<Node>),
    Bin { op: BinOp, lhs: Box<Node>, rhs: Box<Node>, loc: Loc },
    Call { func: Func, arg: Box<Node>, loc: Loc },
}

/// Names an expression may refer to.
#[derive(Debug, Clone, Default)]
pub struct Scope {
    vars: Vec<String>,
    consts: Vec<(String, f64)>,
}

impl Scope {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parameter coordinates `u1..un` as slots `0..n`.
    pub fn coordinates(n: usize) -> Self {
        Self::new().with_vars((1..=n).map(|k| format!("u{k}")))
    }

    /// The single loop parameter `t`.
    pub fn loop_parameter() -> Self {
        Self::new().with_vars(["t"])
    }

    pub fn with_vars<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.vars.extend(names.into_iter().map(Into::into));
        self
    }

    pub fn with_param(mut self, name: impl Into<String>, value: f64) -> Self {
        self.consts.push((name.into(), value));
        self
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    fn slot(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    fn constant(&self, name: &str) -> Option<f64> {
        if name == "pi" {
            return Some(std::f64::consts::PI);
        }
        self.consts.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// A parsed expression ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    arity: usize,
}

pub fn parse_expression(src: &str, scope: &Scope) -> Result<Expr, ParseError> {
    Expr::parse(src, scope)
}

impl Expr {
    pub fn parse(src: &str, scope: &Scope) -> Result<Self, ParseError> {
        let tokens = lex(src)?;
        if tokens.len() == 1 {
            return Err(ParseError {
                message: "empty expression".into(),
                line: 1,
                column: 1,
            });
        }
        let mut parser = Parser {
            tokens,
            pos: 0,
            scope,
        };
        let root = parser.expr()?;
        let tok = parser.peek();
        if tok.kind != Tok::End {
            return Err(parser.error_at(tok, format!("unexpected {}", tok.kind.describe())));
        }
        Ok(Self {
            root,
            arity: scope.vars.len(),
        })
    }

    /// Number of variable slots expected by [`Expr::eval`].
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn eval(&self, vars: &[f64]) -> Result<f64, EvalError> {
        debug_assert!(vars.len() >= self.arity);
        let value = eval_node(&self.root, vars)?;
        if !value.is_finite() {
            return Err(EvalError {
                message: format!("non-finite result {value}"),
                line: 1,
                column: 1,
            });
        }
        Ok(value)
    }

    pub fn depends_on(&self, slot: usize) -> bool {
        depends(&self.root, slot)
    }

    /// Symbolic partial derivative with respect to variable `slot`.
    pub fn derivative(&self, slot: usize) -> Self {
        Self {
            root: diff(&self.root, slot),
            arity: self.arity,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(&self.root, f)
    }
}

fn write_node(node: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        Node::Num(x) => write!(f, "{x:?}"),
        Node::Var { name, .. } | Node::Const { name, .. } => f.write_str(name),
        Node::Neg(a) => {
            f.write_str("(-")?;
            write_node(a, f)?;
            f.write_str(")")
        }
        Node::Bin { op, lhs, rhs, .. } => {
            f.write_str("(")?;
            write_node(lhs, f)?;
            write!(f, " {} ", op.symbol())?;
            write_node(rhs, f)?;
            f.write_str(")")
        }
        Node::Call { func, arg, .. } => {
            write!(f, "{}(", func.name())?;
            write_node(arg, f)?;
            f.write_str(")")
        }
    }
}

fn eval_node(node: &Node, vars: &[f64]) -> Result<f64, EvalError> {
    let fail = |loc: &Loc, message: String| EvalError {
        message,
        line: loc.line,
        column: loc.column,
    };
    Ok(match node {
        Node::Num(x) => *x,
        Node::Var { slot, .. } => vars[*slot],
        Node::Const { value, .. } => *value,
        Node::Neg(a) => -eval_node(a, vars)?,
        Node::Bin { op, lhs, rhs, loc } => {
            let a = eval_node(lhs, vars)?;
            let b = eval_node(rhs, vars)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(fail(loc, "division by zero".into()));
                    }
                    a / b
                }
                BinOp::Pow => {
                    let p = a.powf(b);
                    if p.is_nan() {
                        return Err(fail(loc, format!("{a} ^ {b} is undefined")));
                    }
                    p
                }
            }
        }
        Node::Call { func, arg, loc } => {
            let x = eval_node(arg, vars)?;
            match func {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(fail(loc, format!("log of non-positive value {x}")));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(fail(loc, format!("sqrt of negative value {x}")));
                    }
                    x.sqrt()
                }
            }
        }
    })
}

fn depends(node: &Node, slot: usize) -> bool {
    match node {
        Node::Num(_) | Node::Const { .. } => false,
        Node::Var { slot: s, .. } => *s == slot,
        Node::Neg(a) | Node::Call { arg: a, .. } => depends(a, slot),
        Node::Bin { lhs, rhs, .. } => depends(lhs, slot) || depends(rhs, slot),
    }
}

fn is_num(node: &Node, x: f64) -> bool {
    matches!(node, Node::Num(v) if *v == x)
}

fn bin(op: BinOp, lhs: Node, rhs: Node, loc: Loc) -> Node {
    match op {
        BinOp::Add if is_num(&lhs, 0.0) => rhs,
        BinOp::Add | BinOp::Sub if is_num(&rhs, 0.0) => lhs,
        BinOp::Sub if is_num(&lhs, 0.0) => neg(rhs),
        BinOp::Mul if is_num(&lhs, 0.0) || is_num(&rhs, 0.0) => Node::Num(0.0),
        BinOp::Mul if is_num(&lhs, 1.0) => rhs,
        BinOp::Mul | BinOp::Div if is_num(&rhs, 1.0) => lhs,
        _ => Node::Bin {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
            loc,
        },
    }
}

fn neg(a: Node) -> Node {
    match a {
        Node::Num(0.0) => Node::Num(0.0),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

fn call(func: Func, arg: Node, loc: Loc) -> Node {
    Node::Call {
        func,
        arg: Box::new(arg),
        loc,
    }
}

fn diff(node: &Node, slot: usize) -> Node {
    if !depends(node, slot) {
        return Node::Num(0.0);
    }
    match node {
        Node::Num(_) | Node::Const { .. } => Node::Num(0.0),
        Node::Var { .. } => Node::Num(1.0),
        Node::Neg(a) => neg(diff(a, slot)),
        Node::Bin { op, lhs, rhs, loc } => {
            let (a, b) = (lhs.as_ref().clone(), rhs.as_ref().clone());
            let (da, db) = (diff(lhs, slot), diff(rhs, slot));
            let loc = *loc;
            match op {
                BinOp::Add => bin(BinOp::Add, da, db, loc),
                BinOp::Sub => bin(BinOp::Sub, da, db, loc),
                BinOp::Mul => bin(
                    BinOp::Add,
                    bin(BinOp::Mul, da, b.clone(), loc),
                    bin(BinOp::Mul, a, db, loc),
                    loc,
                ),
                BinOp::Div => bin(
                    BinOp::Div,
                    bin(
                        BinOp::Sub,
                        bin(BinOp::Mul, da, b.clone(), loc),
                        bin(BinOp::Mul, a, db, loc),
                        loc,
                    ),
                    bin(BinOp::Mul, b.clone(), b, loc),
                    loc,
                ),
                BinOp::Pow if !depends(rhs, slot) => {
                    // b·a^(b−1)·a'
                    let lowered = bin(BinOp::Sub, b.clone(), Node::Num(1.0), loc);
                    bin(
                        BinOp::Mul,
                        bin(BinOp::Mul, b, bin(BinOp::Pow, a, lowered, loc), loc),
                        da,
                        loc,
                    )
                }
                BinOp::Pow => {
                    // a^b·(b'·log a + b·a'/a)
                    let log_a = call(Func::Log, a.clone(), loc);
                    let inner = bin(
                        BinOp::Add,
                        bin(BinOp::Mul, db, log_a, loc),
                        bin(BinOp::Div, bin(BinOp::Mul, b.clone(), da, loc), a.clone(), loc),
                        loc,
                    );
                    bin(BinOp::Mul, bin(BinOp::Pow, a, b, loc), inner, loc)
                }
            }
        }
        Node::Call { func, arg, loc } => {
            let a = arg.as_ref().clone();
            let da = diff(arg, slot);
            let loc = *loc;
            let outer = match func {
                Func::Sin => call(Func::Cos, a, loc),
                Func::Cos => neg(call(Func::Sin, a, loc)),
                Func::Exp => call(Func::Exp, a, loc),
                Func::Log => return bin(BinOp::Div, da, a, loc),
                Func::Sqrt => {
                    let twice = bin(BinOp::Mul, Node::Num(2.0), call(Func::Sqrt, a, loc), loc);
                    return bin(BinOp::Div, da, twice, loc);
                }
            };
            bin(BinOp::Mul, outer, da, loc)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(x) => format!("number {x}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    loc: Loc,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let loc = Loc { line, column };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            column += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
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
            let value = text.parse::<f64>().map_err(|_| ParseError {
                message: format!("malformed number `{text}`"),
                line,
                column,
            })?;
            Tok::Num(value)
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            i += 1;
            match c {
                '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                other => {
                    return Err(ParseError {
                        message: format!("unexpected character `{other}`"),
                        line,
                        column,
                    })
                }
            }
        };
        column += i - start;
        tokens.push(Token { kind, loc });
    }
    tokens.push(Token {
        kind: Tok::End,
        loc: Loc { line, column },
    });
    Ok(tokens)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    scope: &'a Scope,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if tok.kind != Tok::End {
            self.pos += 1;
        }
        tok
    }

    fn error_at(&self, tok: &Token, message: String) -> ParseError {
        ParseError {
            message,
            line: tok.loc.line,
            column: tok.loc.column,
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.peek().kind {
            let loc = self.next().loc;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                loc,
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        while let Tok::Op(c @ ('*' | '/')) = self.peek().kind {
            let loc = self.next().loc;
            let rhs = self.factor()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                loc,
            };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if self.peek().kind == Tok::Op('-') {
            self.next();
            return Ok(Node::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if self.peek().kind == Tok::Op('^') {
            let loc = self.next().loc;
            let exponent = self.factor()?;
            return Ok(Node::Bin {
                op: BinOp::Pow,
                lhs: Box::new(base),
                rhs: Box::new(exponent),
                loc,
            });
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Node, ParseError> {
        let tok = self.next();
        match &tok.kind {
            Tok::Num(x) => Ok(Node::Num(*x)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(name) {
                    if self.peek().kind != Tok::LParen {
                        return Err(self.error_at(&tok, format!("function `{name}` needs `(`")));
                    }
                    self.next();
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call {
                        func,
                        arg: Box::new(arg),
                        loc: tok.loc,
                    });
                }
                if let Some(slot) = self.scope.slot(name) {
                    return Ok(Node::Var {
                        slot,
                        name: name.clone(),
                    });
                }
                if let Some(value) = self.scope.constant(name) {
                    return Ok(Node::Const {
                        name: name.clone(),
                        value,
                    });
                }
                Err(self.error_at(&tok, format!("unknown identifier `{name}`")))
            }
            other => Err(self.error_at(&tok, format!("unexpected {}", other.describe()))),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        let tok = self.next();
        if tok.kind != Tok::RParen {
            return Err(self.error_at(&tok, format!("expected `)`, found {}", tok.kind.describe())));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn eval1(src: &str, scope: &Scope, vars: &[f64]) -> f64 {
        Expr::parse(src, scope).unwrap().eval(vars).unwrap()
    }

    #[test]
    fn documented_examples() {
        let scope = Scope::coordinates(1).with_param("r", 0.5);
        assert_eq!(eval1("sin(u1) * 2 + r", &scope, &[0.0]), 0.5);
        for &u in &[-3.0, 0.0, 1.7, 12.5] {
            assert_eq!(eval1("u1 ^ 2 - u1^2", &scope, &[u]), 0.0);
        }
        assert_eq!(eval1("cos(u1 + pi)", &scope, &[0.0]), -1.0);
    }

    #[test]
    fn precedence_and_associativity() {
        let s = Scope::new();
        assert_eq!(eval1("2 ^ 3 ^ 2", &s, &[]), 512.0);
        assert_eq!(eval1("-2 ^ 2", &s, &[]), -4.0);
        assert_eq!(eval1("2 ^ -1", &s, &[]), 0.5);
        assert_eq!(eval1("1 - 2 - 3", &s, &[]), -4.0);
        assert_eq!(eval1("8 / 4 / 2", &s, &[]), 1.0);
        assert_eq!(eval1("1 + 2 * 3", &s, &[]), 7.0);
        assert_eq!(eval1("(1 + 2) * 3", &s, &[]), 9.0);
        assert_eq!(eval1("1.5e2 + .5", &s, &[]), 150.5);
        assert_eq!(eval1("  sqrt( 16 )\n+ exp(0) + log(1)", &s, &[]), 5.0);
    }

    #[test]
    fn unknown_identifier_reports_position() {
        let err = Expr::parse("u1 +\n  foo", &Scope::coordinates(1)).unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        assert!(err.message.contains("foo"));
    }

    #[test]
    fn syntax_errors() {
        let s = Scope::coordinates(2);
        assert!(Expr::parse("", &s).is_err());
        assert!(Expr::parse("   ", &s).is_err());
        assert!(Expr::parse("u1 +", &s).is_err());
        assert!(Expr::parse("(u1", &s).is_err());
        assert!(Expr::parse("sin u1", &s).is_err());
        assert!(Expr::parse("u1 u2", &s).is_err());
        assert!(Expr::parse("u1 # 2", &s).is_err());
        assert!(Expr::parse("u3", &s).is_err());
        assert!(Expr::parse("t", &s).is_err());
    }

    #[test]
    fn division_by_zero_is_located() {
        let e = Expr::parse("1 + u1 / (u1 - 1)", &Scope::coordinates(1)).unwrap();
        let err = e.eval(&[1.0]).unwrap_err();
        assert_eq!((err.line, err.column), (1, 8));
        assert!(err.message.contains("division by zero"));
        assert!(e.eval(&[2.0]).is_ok());
        let e = Expr::parse("log(u1)", &Scope::coordinates(1)).unwrap();
        assert!(e.eval(&[-1.0]).is_err());
    }

    #[test]
    fn derivatives_match_calculus() {
        let s = Scope::coordinates(2).with_param("a", 1.3);
        type Case = (&'static str, fn(f64, f64) -> f64);
        let cases: &[Case] = &[
            ("u1^3 * u2", |x, y| 3.0 * x * x * y),
            ("sin(a * u1) / (1 + u2^2)", |x, y| 1.3 * (1.3 * x).cos() / (1.0 + y * y)),
            ("exp(u1) * cos(u2)", |x, y| x.exp() * y.cos()),
            ("sqrt(1 + u1^2) - log(2 + u1)", |x, _| x / (1.0 + x * x).sqrt() - 1.0 / (2.0 + x)),
            ("u1 ^ u2", |x, y| y * x.powf(y - 1.0)),
            ("-u1 - (-u1)", |_, _| 0.0),
        ];
        for (src, exact) in cases {
            let d = Expr::parse(src, &s).unwrap().derivative(0);
            for &(x, y) in &[(0.3, 0.7), (1.2, -0.4), (0.9, 2.0)] {
                let got = d.eval(&[x, y]).unwrap();
                assert!((got - exact(x, y)).abs() < 1e-12, "{src}: {got} vs {}", exact(x, y));
            }
        }
        let d = Expr::parse("u1 ^ u2", &s).unwrap().derivative(1);
        let got = d.eval(&[1.5, 0.5]).unwrap();
        assert!((got - 1.5f64.powf(0.5) * 1.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn printed_form_is_parseable() {
        let s = Scope::coordinates(2).with_param("r", 2.0);
        let e = Expr::parse("-r*cos(u1)^2 / (1 + u2) - 2^-u1^2", &s).unwrap();
        let again = Expr::parse(&e.to_string(), &s).unwrap();
        assert_eq!(e.to_string(), again.to_string());
    }

    fn arb_source() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("u1".to_string()),
            Just("u2".to_string()),
            Just("pi".to_string()),
            Just("r".to_string()),
            (0.0f64..10.0).prop_map(|x| format!("{x}")),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + ({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} * ({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) / (2 + ({b})^2)")),
                inner.clone().prop_map(|a| format!("sin({a})")),
                inner.clone().prop_map(|a| format!("cos({a}) ^ 2")),
                inner.clone().prop_map(|a| format!("-{a}")),
                inner.prop_map(|a| format!("exp(-({a})^2)")),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_reparse_evaluates_identically(
            src in arb_source(),
            points in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 100),
        ) {
            let scope = Scope::coordinates(2).with_param("r", 0.75);
            let e = Expr::parse(&src, &scope).unwrap();
            let again = Expr::parse(&e.to_string(), &scope).unwrap();
            for (x, y) in points {
                match (e.eval(&[x, y]), again.eval(&[x, y])) {
                    (Ok(a), Ok(b)) => prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0)),
                    (Err(_), Err(_)) => {}
                    (a, b) => prop_assert!(false, "mismatch {a:?} vs {b:?}"),
                }
            }
        }
    }
}
