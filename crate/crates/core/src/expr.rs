//! Hamiltonian expressions in a parenthesized prefix syntax.
//!
//! Grammar (whitespace separated, `;` starts a comment running to end of line):
//!
//! ```text
//! expr   := number | ident | "(" head expr* ")"
//! head   := "+" | "*" | "-" | "/" | "^" | "sqrt"
//! ```
//!
//! * `(+ a b ...)` sum of one or more terms, `(* a b ...)` product.
//! * `(- a)` negation (unary only).
//! * `(/ a b)` quotient.
//! * `(^ a n)` power with integer literal `n >= 1`.
//! * `(sqrt a)` square root, defined for strictly positive arguments.
//!
//! Identifiers name either a phase-space coordinate or a parameter; the
//! distinction is made when the expression is compiled into a [`Tape`].

use std::collections::BTreeMap;
use std::fmt;

use crate::autodiff::Scalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Ident(String),
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Sqrt(Box<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn ident(name: &str) -> Self {
        Expr::Ident(name.to_string())
    }

    pub fn sum(terms: Vec<Expr>) -> Self {
        Expr::Sum(terms)
    }

    pub fn product(factors: Vec<Expr>) -> Self {
        Expr::Product(factors)
    }

    pub fn pow(base: Expr, n: u32) -> Self {
        Expr::Pow(Box::new(base), n)
    }

    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let expr = parse_expr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            let t = &tokens[pos];
            return Err(parse_err(
                t.line,
                t.column,
                "trailing input after expression",
            ));
        }
        Ok(expr)
    }

    /// Identifiers referenced anywhere in the tree, sorted.
    pub fn identifiers(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_idents(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_idents(&self, out: &mut Vec<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Ident(name) => out.push(name.clone()),
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().for_each(|x| x.collect_idents(out)),
            Expr::Pow(x, _) | Expr::Sqrt(x) | Expr::Neg(x) => x.collect_idents(out),
            Expr::Div(a, b) => {
                a.collect_idents(out);
                b.collect_idents(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Debug formatting of f64 is the shortest string that parses back exactly.
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Ident(name) => write!(f, "{name}"),
            Expr::Sum(xs) => write_list(f, "+", xs),
            Expr::Product(xs) => write_list(f, "*", xs),
            Expr::Pow(x, n) => write!(f, "(^ {x} {n})"),
            Expr::Sqrt(x) => write!(f, "(sqrt {x})"),
            Expr::Neg(x) => write!(f, "(- {x})"),
            Expr::Div(a, b) => write!(f, "(/ {a} {b})"),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, head: &str, xs: &[Expr]) -> fmt::Result {
    write!(f, "({head}")?;
    for x in xs {
        write!(f, " {x}")?;
    }
    write!(f, ")")
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn parse_err(line: usize, column: usize, message: &str) -> Error {
    Error::ParseError {
        line,
        column,
        message: message.to_string(),
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                column = 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            c if c.is_whitespace() => {
                chars.next();
                column += 1;
            }
            '(' | ')' => {
                chars.next();
                tokens.push(Token {
                    tok: if c == '(' { Tok::Open } else { Tok::Close },
                    line,
                    column,
                });
                column += 1;
            }
            _ => {
                let start = column;
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                    column += 1;
                }
                tokens.push(Token {
                    tok: Tok::Atom(atom),
                    line,
                    column: start,
                });
            }
        }
    }
    Ok(tokens)
}

fn is_number(atom: &str) -> bool {
    let mut chars = atom.chars();
    match chars.next() {
        Some(c) if c.is_ascii_digit() || c == '.' => true,
        Some('-') | Some('+') => chars.next().is_some_and(|c| c.is_ascii_digit() || c == '.'),
        _ => false,
    }
}

fn is_ident(atom: &str) -> bool {
    let mut chars = atom.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn parse_expr(tokens: &[Token], pos: &mut usize) -> Result<Expr> {
    let Some(t) = tokens.get(*pos) else {
        let (line, column) = tokens.last().map_or((1, 1), |t| (t.line, t.column));
        return Err(parse_err(line, column, "unexpected end of input"));
    };
    *pos += 1;
    match &t.tok {
        Tok::Close => Err(parse_err(t.line, t.column, "unexpected `)`")),
        Tok::Atom(a) if is_number(a) => a
            .parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| parse_err(t.line, t.column, &format!("invalid number `{a}`"))),
        Tok::Atom(a) if is_ident(a) => Ok(Expr::Ident(a.clone())),
        Tok::Atom(a) => Err(parse_err(t.line, t.column, &format!("invalid atom `{a}`"))),
        Tok::Open => {
            let Some(head) = tokens.get(*pos) else {
                return Err(parse_err(t.line, t.column, "unterminated `(`"));
            };
            *pos += 1;
            let Tok::Atom(op) = &head.tok else {
                return Err(parse_err(
                    head.line,
                    head.column,
                    "expected operator after `(`",
                ));
            };
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos) {
                    None => return Err(parse_err(t.line, t.column, "unterminated `(`")),
                    Some(Token {
                        tok: Tok::Close, ..
                    }) => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => args.push(parse_expr(tokens, pos)?),
                }
            }
            build_node(op, args, head)
        }
    }
}

fn build_node(op: &str, mut args: Vec<Expr>, at: &Token) -> Result<Expr> {
    let arity = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(parse_err(
                at.line,
                at.column,
                &format!("`{op}` takes {n} argument(s), got {}", args.len()),
            ))
        }
    };
    match op {
        "+" | "*" => {
            if args.is_empty() {
                return Err(parse_err(
                    at.line,
                    at.column,
                    &format!("`{op}` needs at least one argument"),
                ));
            }
            Ok(if op == "+" {
                Expr::Sum(args)
            } else {
                Expr::Product(args)
            })
        }
        "-" => {
            arity(1)?;
            Ok(Expr::Neg(Box::new(args.remove(0))))
        }
        "sqrt" => {
            arity(1)?;
            Ok(Expr::Sqrt(Box::new(args.remove(0))))
        }
        "/" => {
            arity(2)?;
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Ok(Expr::Div(Box::new(a), Box::new(b)))
        }
        "^" => {
            arity(2)?;
            let n = match args.pop().unwrap() {
                Expr::Const(c) if c >= 1.0 && c.fract() == 0.0 && c <= u32::MAX as f64 => c as u32,
                _ => {
                    return Err(parse_err(
                        at.line,
                        at.column,
                        "`^` exponent must be an integer literal >= 1",
                    ))
                }
            };
            Ok(Expr::Pow(Box::new(args.pop().unwrap()), n))
        }
        _ => Err(parse_err(
            at.line,
            at.column,
            &format!("unknown operator `{op}`"),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Sum(Vec<usize>),
    Product(Vec<usize>),
    Pow(usize, u32),
    Sqrt(usize),
    Neg(usize),
    Div(usize, usize),
}

/// An expression compiled against a fixed variable ordering, with
/// parameters substituted. Nodes are stored in evaluation order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tape {
    nodes: Vec<Node>,
    n_vars: usize,
    degree: Option<u32>,
}

impl Tape {
    pub fn compile(
        expr: &Expr,
        variables: &[String],
        parameters: &BTreeMap<String, f64>,
    ) -> Result<Self> {
        let mut tape = Tape {
            nodes: Vec::new(),
            n_vars: variables.len(),
            degree: None,
        };
        let mut degrees = Vec::new();
        tape.emit(expr, variables, parameters, &mut degrees)?;
        tape.degree = degrees.last().copied().flatten();
        Ok(tape)
    }

    fn push(&mut self, node: Node, degree: Option<u32>, degrees: &mut Vec<Option<u32>>) -> usize {
        self.nodes.push(node);
        degrees.push(degree);
        self.nodes.len() - 1
    }

    fn emit(
        &mut self,
        expr: &Expr,
        variables: &[String],
        parameters: &BTreeMap<String, f64>,
        degrees: &mut Vec<Option<u32>>,
    ) -> Result<usize> {
        let idx = match expr {
            Expr::Const(c) => self.push(Node::Const(*c), Some(0), degrees),
            Expr::Ident(name) => {
                if let Some(i) = variables.iter().position(|v| v == name) {
                    self.push(Node::Var(i), Some(1), degrees)
                } else if let Some(&p) = parameters.get(name) {
                    self.push(Node::Const(p), Some(0), degrees)
                } else {
                    return Err(Error::ValidationError {
                        check: "hamiltonian_identifiers".into(),
                        detail: format!("`{name}` is neither a coordinate nor a parameter"),
                    });
                }
            }
            Expr::Sum(xs) | Expr::Product(xs) => {
                let kids: Vec<usize> = xs
                    .iter()
                    .map(|x| self.emit(x, variables, parameters, degrees))
                    .collect::<Result<_>>()?;
                let ds: Option<Vec<u32>> = kids.iter().map(|&k| degrees[k]).collect();
                if matches!(expr, Expr::Sum(_)) {
                    let d = ds.map(|d| d.into_iter().max().unwrap_or(0));
                    self.push(Node::Sum(kids), d, degrees)
                } else if kids.iter().any(|&k| self.nodes[k] == Node::Const(0.0)) {
                    // a vanishing coefficient (typically a parameter set to 0) kills the term
                    self.push(Node::Product(kids), Some(0), degrees)
                } else {
                    let d = ds.map(|d| d.into_iter().sum());
                    self.push(Node::Product(kids), d, degrees)
                }
            }
            Expr::Pow(x, n) => {
                let k = self.emit(x, variables, parameters, degrees)?;
                let d = degrees[k].map(|d| d * n);
                self.push(Node::Pow(k, *n), d, degrees)
            }
            Expr::Sqrt(x) => {
                let k = self.emit(x, variables, parameters, degrees)?;
                let d = if degrees[k] == Some(0) { Some(0) } else { None };
                self.push(Node::Sqrt(k), d, degrees)
            }
            Expr::Neg(x) => {
                let k = self.emit(x, variables, parameters, degrees)?;
                let d = degrees[k];
                self.push(Node::Neg(k), d, degrees)
            }
            Expr::Div(a, b) => {
                let ka = self.emit(a, variables, parameters, degrees)?;
                let kb = self.emit(b, variables, parameters, degrees)?;
                let d = if degrees[kb] == Some(0) {
                    degrees[ka]
                } else {
                    None
                };
                self.push(Node::Div(ka, kb), d, degrees)
            }
        };
        Ok(idx)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    /// Polynomial degree, or `None` when the expression is not a polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.degree
    }

    /// Evaluate over any scalar type; fails on a nonpositive `sqrt` argument
    /// or a zero divisor.
    pub fn eval<T: Scalar>(&self, x: &[T]) -> Result<T> {
        debug_assert_eq!(x.len(), self.n_vars);
        let mut vals: Vec<T> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match node {
                Node::Const(c) => T::constant(*c),
                Node::Var(i) => x[*i],
                Node::Sum(ks) => ks[1..].iter().fold(vals[ks[0]], |acc, &k| acc + vals[k]),
                Node::Product(ks) => ks[1..].iter().fold(vals[ks[0]], |acc, &k| acc * vals[k]),
                Node::Pow(k, n) => vals[*k].powi(*n),
                Node::Sqrt(k) => {
                    let a = vals[*k];
                    if !(a.real() > 0.0) {
                        return Err(Error::DomainError(format!(
                            "sqrt of nonpositive value {}",
                            a.real()
                        )));
                    }
                    a.sqrt()
                }
                Node::Neg(k) => -vals[*k],
                Node::Div(a, b) => {
                    let d = vals[*b];
                    if d.real() == 0.0 {
                        return Err(Error::DomainError("division by zero".into()));
                    }
                    vals[*a] * d.recip()
                }
            };
            vals.push(v);
        }
        Ok(*vals.last().expect("tape is never empty"))
    }
}
