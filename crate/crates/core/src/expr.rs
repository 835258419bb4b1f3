//! A small expression language for formal series and vertex operators.
//!
//! ```text
//! Res_x2(x2^-1 * delta((x1 - x0)/x2))
//! Taylor[y, x](x^(1/2))
//! <{t^5}, Y({t}, x1) Y({t}, x2) {t}>
//! ```

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::grading::{pair, Vector};
use crate::kernel::{
    binom_expand, delta, delta3, delta_ratio, derivative, formal_taylor, multiply, residue, BinomArg, DeltaSigns,
    Monomial, Series, Window,
};
use crate::modules::{opposite_op, Module};
use crate::scalar::{Exponent, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigInt),
    /// The imaginary unit.
    I,
    Var(String),
    /// A basis vector of the loaded structure, written `{name}`.
    Vector(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Exponent),
    Delta(Box<Expr>),
    /// out⁻¹ δ((a − b)/out)
    Delta3 { out: String, a: String, b: String },
    Res(String, Box<Expr>),
    Deriv(String, Box<Expr>),
    /// e^{y d/dx} applied to the body.
    Taylor { y: String, x: String, body: Box<Expr> },
    Y { v: Box<Expr>, var: String, arg: Box<Expr> },
    Yo { v: Box<Expr>, var: String, arg: Box<Expr> },
    Pair(Box<Expr>, Box<Expr>),
}

/// The formal variables an expression may use.
#[derive(Clone, Debug)]
pub struct Alphabet(Vec<String>);

impl Alphabet {
    pub fn new(names: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Alphabet(names.into_iter().map(Into::into).collect())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|n| n == name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl Default for Alphabet {
    /// x, y and x0..x9, y0..y9.
    fn default() -> Self {
        let mut names = vec!["x".to_string(), "y".to_string()];
        for base in ["x", "y"] {
            names.extend((0..10).map(|i| format!("{base}{i}")));
        }
        Alphabet(names)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Vector(String),
    Sym(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {n}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Vector(s) => format!("{{{s}}}"),
            Tok::Sym(c) => format!("'{c}'"),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    let err = |line, column, expected: &str| Error::Syntax { line, column, expected: expected.into() };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            Tok::Num(s.parse().expect("digits"))
        } else if c.is_alphabetic() {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c == '{' {
            i += 1;
            while i < chars.len() && chars[i] != '}' && chars[i] != '\n' {
                i += 1;
            }
            if i >= chars.len() || chars[i] != '}' {
                return Err(err(line, col + (i - start), "'}'"));
            }
            i += 1;
            let name: String = chars[start + 1..i - 1].iter().collect::<String>().trim().to_string();
            if name.is_empty() {
                return Err(err(l0, c0 + 1, "a basis vector name"));
            }
            Tok::Vector(name)
        } else if "+-*/^()[],;<>".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(err(line, col, "a number, variable, operator or bracket"));
        };
        col += i - start;
        out.push(Spanned { tok, line: l0, column: c0 });
    }
    out.push(Spanned { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: impl Into<String>) -> Error {
        let s = &self.toks[self.pos];
        Error::Syntax { line: s.line, column: s.column, expected: expected.into() }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("'{c}'")))
        }
    }

    fn variable(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(name) if self.alphabet.contains(&name) => {
                self.bump();
                Ok(name)
            }
            _ => Err(self.error("a formal variable")),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let e = self.exponent()?;
        Ok(Expr::Pow(Box::new(base), e))
    }

    fn exponent(&mut self) -> Result<Exponent> {
        let negative = self.eat('-');
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                let v = i64::try_from(&n).map_err(|_| self.error("a smaller exponent"))?;
                Ok(Exponent::int(if negative { -v } else { v }))
            }
            Tok::Sym('(') if !negative => {
                let (line, column) = (self.toks[self.pos].line, self.toks[self.pos].column);
                self.bump();
                let inner = self.expr()?;
                self.expect(')')?;
                let bad = || Error::Syntax { line, column, expected: "a constant rational exponent".into() };
                let value = fold_constant(&inner).ok_or_else(bad)?;
                Exponent::from_scalar(&value).map_err(|_| bad())
            }
            _ => Err(self.error("an exponent")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Num(n))
            }
            Tok::Vector(name) => {
                self.bump();
                Ok(Expr::Vector(name))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Sym('<') => {
                self.bump();
                let a = self.expr()?;
                self.expect(',')?;
                let b = self.expr()?;
                self.expect('>')?;
                Ok(Expr::Pair(Box::new(a), Box::new(b)))
            }
            Tok::Ident(name) => self.named(name),
            _ => Err(self.error("an expression")),
        }
    }

    fn named(&mut self, name: String) -> Result<Expr> {
        if self.alphabet.contains(&name) {
            self.bump();
            return Ok(Expr::Var(name));
        }
        match name.as_str() {
            "i" => {
                self.bump();
                Ok(Expr::I)
            }
            "delta" => {
                self.bump();
                self.expect('(')?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(Expr::Delta(Box::new(e)))
            }
            "delta3" => {
                self.bump();
                self.expect('(')?;
                let out = self.variable()?;
                self.expect(';')?;
                let a = self.variable()?;
                self.expect(',')?;
                let b = self.variable()?;
                self.expect(')')?;
                Ok(Expr::Delta3 { out, a, b })
            }
            "Taylor" => {
                self.bump();
                self.expect('[')?;
                let y = self.variable()?;
                self.expect(',')?;
                let x = self.variable()?;
                self.expect(']')?;
                let body = self.parenthesized()?;
                Ok(Expr::Taylor { y, x, body: Box::new(body) })
            }
            "Y" | "Yo" => {
                self.bump();
                self.expect('(')?;
                let v = self.expr()?;
                self.expect(',')?;
                let var = self.variable()?;
                self.expect(')')?;
                let arg = self.operand()?;
                let (v, arg) = (Box::new(v), Box::new(arg));
                Ok(if name == "Y" { Expr::Y { v, var, arg } } else { Expr::Yo { v, var, arg } })
            }
            "d" if *self.peek_at(1) == Tok::Sym('/') => {
                self.bump();
                self.bump();
                let var = match self.peek().clone() {
                    Tok::Ident(s) => s.strip_prefix('d').filter(|v| self.alphabet.contains(v)).map(String::from),
                    _ => None,
                }
                .ok_or_else(|| self.error("d followed by a formal variable"))?;
                self.bump();
                let body = self.parenthesized()?;
                Ok(Expr::Deriv(var, Box::new(body)))
            }
            _ => {
                if let Some(var) = name.strip_prefix("Res_") {
                    if !self.alphabet.contains(var) {
                        return Err(self.error("a formal variable after Res_"));
                    }
                    let var = var.to_string();
                    self.bump();
                    let body = self.parenthesized()?;
                    return Ok(Expr::Res(var, Box::new(body)));
                }
                Err(self.error("a formal variable or function name"))
            }
        }
    }

    fn parenthesized(&mut self) -> Result<Expr> {
        self.expect('(')?;
        let e = self.expr()?;
        self.expect(')')?;
        Ok(e)
    }

    /// What a vertex operator acts on: a vector, another operator, or a parenthesized expression.
    fn operand(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Vector(_) | Tok::Sym('(') => self.atom(),
            Tok::Ident(n) if n == "Y" || n == "Yo" => self.atom(),
            _ => Err(self.error("a vector, a vertex operator or '('")),
        }
    }
}

/// Parses an expression over the default alphabet.
pub fn parse_expr(text: &str) -> Result<Expr> {
    parse_expr_with(text, &Alphabet::default())
}

pub fn parse_expr_with(text: &str, alphabet: &Alphabet) -> Result<Expr> {
    let mut p = Parser { toks: lex(text)?, pos: 0, alphabet };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("end of input, found {}", p.peek().describe())));
    }
    Ok(e)
}

fn fold_constant(e: &Expr) -> Option<Scalar> {
    Some(match e {
        Expr::Num(n) => Scalar::real(BigRational::from_integer(n.clone())),
        Expr::I => Scalar::i(),
        Expr::Neg(a) => -fold_constant(a)?,
        Expr::Add(a, b) => fold_constant(a)? + fold_constant(b)?,
        Expr::Sub(a, b) => fold_constant(a)? - fold_constant(b)?,
        Expr::Mul(a, b) => fold_constant(a)? * fold_constant(b)?,
        Expr::Div(a, b) => fold_constant(a)?.checked_div(&fold_constant(b)?)?,
        Expr::Pow(a, e) => fold_constant(a)?.powi(e.as_integer()?)?,
        _ => return None,
    })
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        // juxtaposed operator application binds like a product
        Expr::Y { .. } | Expr::Yo { .. } => 2,
        _ => 5,
    }
}

fn wrap(e: &Expr, min: u8) -> String {
    if prec(e) < min {
        format!("({e})")
    } else {
        e.to_string()
    }
}

fn fmt_exponent(e: &Exponent) -> String {
    if let Some(k) = e.as_integer() {
        return k.to_string();
    }
    let s = e.to_scalar();
    let re = Scalar::real(s.re.clone());
    let im = Scalar::real(s.im.clone());
    if im.is_zero() {
        format!("({re})")
    } else if re.is_zero() {
        format!("({im}*i)")
    } else if s.im < BigRational::from_integer(0.into()) {
        format!("({re} - {}*i)", -im)
    } else {
        format!("({re} + {im}*i)")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{n}"),
            Expr::I => write!(f, "i"),
            Expr::Var(x) => write!(f, "{x}"),
            Expr::Vector(name) => write!(f, "{{{name}}}"),
            Expr::Neg(a) => write!(f, "-{}", wrap(a, 3)),
            Expr::Add(a, b) => write!(f, "{} + {}", wrap(a, 1), wrap(b, 2)),
            Expr::Sub(a, b) => write!(f, "{} - {}", wrap(a, 1), wrap(b, 2)),
            Expr::Mul(a, b) => write!(f, "{} * {}", wrap(a, 2), wrap(b, 3)),
            Expr::Div(a, b) => write!(f, "{}/{}", wrap(a, 2), wrap(b, 3)),
            Expr::Pow(a, e) => write!(f, "{}^{}", wrap(a, 5), fmt_exponent(e)),
            Expr::Delta(a) => write!(f, "delta({a})"),
            Expr::Delta3 { out, a, b } => write!(f, "delta3({out}; {a}, {b})"),
            Expr::Res(x, a) => write!(f, "Res_{x}({a})"),
            Expr::Deriv(x, a) => write!(f, "d/d{x}({a})"),
            Expr::Taylor { y, x, body } => write!(f, "Taylor[{y}, {x}]({body})"),
            Expr::Y { v, var, arg } => write!(f, "Y({v}, {var}) {}", operand_text(arg)),
            Expr::Yo { v, var, arg } => write!(f, "Yo({v}, {var}) {}", operand_text(arg)),
            Expr::Pair(a, b) => write!(f, "<{a}, {b}>"),
        }
    }
}

fn operand_text(e: &Expr) -> String {
    match e {
        Expr::Vector(_) | Expr::Y { .. } | Expr::Yo { .. } => e.to_string(),
        _ => format!("({e})"),
    }
}

/// A value: a scalar series or a series with vector coefficients.
#[derive(Clone, Debug)]
pub enum Value {
    Scalar(Series),
    Vector(Series<Vector>),
}

impl Value {
    pub fn render(&self, window: &Window, module: Option<&Module>) -> Result<String> {
        match self {
            Value::Scalar(s) => s.render(window),
            Value::Vector(s) => {
                let Some(m) = module else {
                    return s.render(window);
                };
                let terms = s.materialize(window)?;
                if terms.is_empty() {
                    return Ok("0".into());
                }
                Ok(terms
                    .iter()
                    .map(|(mono, v)| {
                        let vt = v.render(&m.space);
                        if mono.is_one() {
                            format!("({vt})")
                        } else {
                            format!("({vt})*{mono}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" + "))
            }
        }
    }
}

/// Evaluation context: the window for lazy series and an optional structure for Y.
pub struct Env {
    pub window: Window,
    pub module: Option<Arc<Module>>,
}

fn eval_err(msg: impl Into<String>) -> Error {
    Error::Eval(msg.into())
}

fn single_term(s: &Series) -> Option<(Monomial, Scalar)> {
    let terms = s.terms()?;
    match terms.len() {
        0 => Some((Monomial::one(), Scalar::zero())),
        1 => terms.iter().next().map(|(m, c)| (m.clone(), c.clone())),
        _ => None,
    }
}

fn binom_arg(e: &Expr) -> Option<BinomArg> {
    match e {
        Expr::Var(x) => Some(BinomArg::var(x)),
        Expr::Neg(inner) => match inner.as_ref() {
            Expr::Var(x) => Some(BinomArg::neg(x)),
            other => fold_constant(other).map(|c| BinomArg::Num(-c)),
        },
        other => fold_constant(other).map(BinomArg::Num),
    }
}

fn negate_arg(a: BinomArg) -> BinomArg {
    match a {
        BinomArg::Var(x) => BinomArg::NegVar(x),
        BinomArg::NegVar(x) => BinomArg::Var(x),
        BinomArg::Num(c) => BinomArg::Num(-c),
    }
}

impl Env {
    pub fn new(window: Window) -> Self {
        Env { window, module: None }
    }

    pub fn with_module(mut self, m: Arc<Module>) -> Self {
        self.module = Some(m);
        self
    }

    fn module(&self) -> Result<&Module> {
        self.module.as_deref().ok_or_else(|| eval_err("vectors and vertex operators need a loaded structure"))
    }

    pub fn eval(&self, e: &Expr) -> Result<Value> {
        use Value::Scalar as S;
        Ok(match e {
            Expr::Num(_) | Expr::I => S(Series::constant(fold_constant(e).expect("constant"))),
            Expr::Var(x) => S(Series::term(Monomial::var(x), Scalar::one())),
            Expr::Vector(name) => {
                let m = self.module()?;
                // {v*} is the dual basis vector, identified with {v} by the pairing.
                let bare = name.strip_suffix('*').unwrap_or(name);
                let id = m.space.id_of(bare).ok_or_else(|| eval_err(format!("no basis vector named {bare}")))?;
                Value::Vector(Series::constant(Vector::basis(id)))
            }
            Expr::Neg(a) => match self.eval(a)? {
                S(s) => S(s.neg()),
                Value::Vector(s) => Value::Vector(s.neg()),
            },
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let sub = matches!(e, Expr::Sub(..));
                match (self.eval(a)?, self.eval(b)?) {
                    (S(x), S(y)) => S(if sub { x.sub(&y) } else { x.add(&y) }),
                    (Value::Vector(x), Value::Vector(y)) => Value::Vector(if sub { x.sub(&y) } else { x.add(&y) }),
                    _ => return Err(eval_err("cannot add a scalar series to a vector series")),
                }
            }
            Expr::Mul(a, b) => match (self.eval(a)?, self.eval(b)?) {
                (S(x), S(y)) => S(multiply(&x, &y)?),
                (S(x), Value::Vector(y)) | (Value::Vector(y), S(x)) => Value::Vector(multiply(&x, &y)?),
                _ => return Err(eval_err("cannot multiply two vectors")),
            },
            Expr::Div(a, b) => {
                let S(den) = self.eval(b)? else {
                    return Err(eval_err("cannot divide by a vector"));
                };
                let (m, c) = single_term(&den).ok_or_else(|| eval_err("division only by a single monomial"))?;
                let inv = c.inv().ok_or_else(|| eval_err("division by zero"))?;
                let factor = Series::term(Monomial::one().div(&m), inv);
                match self.eval(a)? {
                    S(x) => S(multiply(&factor, &x)?),
                    Value::Vector(x) => Value::Vector(multiply(&factor, &x)?),
                }
            }
            Expr::Pow(base, lambda) => S(self.power(base, *lambda)?),
            Expr::Delta(arg) => S(self.delta(arg)?),
            Expr::Delta3 { out, a, b } => S(delta3(out, a, b, DeltaSigns::STANDARD)?),
            Expr::Res(x, a) => match self.eval(a)? {
                S(s) => S(residue(&s, x)),
                Value::Vector(s) => Value::Vector(residue(&s, x)),
            },
            Expr::Deriv(x, a) => match self.eval(a)? {
                S(s) => S(derivative(&s, x)),
                Value::Vector(s) => Value::Vector(derivative(&s, x)),
            },
            Expr::Taylor { y, x, body } => match self.eval(body)? {
                S(s) => S(formal_taylor(&s, x, y)?),
                Value::Vector(s) => Value::Vector(formal_taylor(&s, x, y)?),
            },
            Expr::Y { v, var, arg } | Expr::Yo { v, var, arg } => {
                let opposite = matches!(e, Expr::Yo { .. });
                let m = self.module()?;
                let v = self.constant_vector(v)?;
                let Value::Vector(w) = self.eval(arg)? else {
                    return Err(eval_err("a vertex operator acts on vectors"));
                };
                if w.vars().iter().any(|x| x == var) {
                    return Err(Error::VariableCollision(var.clone()));
                }
                let mut out = Series::zero();
                for (mono, wv) in w.materialize(&self.window)? {
                    let s = if opposite {
                        opposite_op(m, &v, &wv, var, &self.window)?
                    } else {
                        m.module_action(&v, &wv, var, &self.window)?
                    };
                    out = out.add(&s.shift(&mono));
                }
                Value::Vector(out)
            }
            Expr::Pair(a, b) => {
                let wp = self.constant_vector(a)?;
                let Value::Vector(s) = self.eval(b)? else {
                    return Err(eval_err("the second slot of a pairing must be a vector"));
                };
                S(Series::from_terms(s.materialize(&self.window)?.into_iter().map(|(m, v)| (m, pair(&wp, &v)))))
            }
        })
    }

    fn constant_vector(&self, e: &Expr) -> Result<Vector> {
        let Value::Vector(s) = self.eval(e)? else {
            return Err(eval_err(format!("{e} is not a vector")));
        };
        let terms = s.terms().ok_or_else(|| eval_err(format!("{e} is not a constant vector")))?;
        let mut out = Vector::zero();
        for (m, v) in terms {
            if !m.is_one() {
                return Err(eval_err(format!("{e} is not a constant vector")));
            }
            out = out.add(v);
        }
        Ok(out)
    }

    fn power(&self, base: &Expr, lambda: Exponent) -> Result<Series> {
        if let Expr::Var(x) = base {
            return Ok(Series::term(Monomial::single(x, lambda), Scalar::one()));
        }
        if let Expr::Add(a, b) | Expr::Sub(a, b) = base {
            if let (Some(first), Some(second)) = (binom_arg(a), binom_arg(b)) {
                if first.name().is_some() || second.name().is_some() {
                    let second = if matches!(base, Expr::Sub(..)) { negate_arg(second) } else { second };
                    return binom_expand(first, second, lambda);
                }
            }
        }
        let Value::Scalar(s) = self.eval(base)? else {
            return Err(eval_err("cannot raise a vector to a power"));
        };
        if let Some((m, c)) = single_term(&s) {
            let mono = Monomial::from_pairs(m.pairs().iter().map(|(v, e)| Ok((v.clone(), mul_exponent(e, &lambda)?))).collect::<Result<_>>()?);
            let coeff = match lambda.as_integer() {
                Some(k) => c.powi(k).ok_or_else(|| eval_err("zero to a negative power"))?,
                None if c.is_one() => Scalar::one(),
                None => return Err(eval_err("non-integral power of a coefficient other than 1")),
            };
            return Ok(Series::term(mono, coeff));
        }
        match lambda.as_integer() {
            Some(k) if k >= 0 => (0..k).try_fold(Series::constant(Scalar::one()), |acc, _| multiply(&acc, &s)),
            _ => Err(eval_err("only sums of two terms take negative or fractional powers")),
        }
    }

    fn delta(&self, arg: &Expr) -> Result<Series> {
        let unsupported = || eval_err(format!("unsupported delta argument {arg}; use a variable or (a ± b)/(±c)"));
        match arg {
            Expr::Var(x) => Ok(delta(x)),
            Expr::Div(num, den) => {
                let (out, minus_out) = match den.as_ref() {
                    Expr::Var(x) => (x.clone(), false),
                    Expr::Neg(inner) => match inner.as_ref() {
                        Expr::Var(x) => (x.clone(), true),
                        _ => return Err(unsupported()),
                    },
                    _ => return Err(unsupported()),
                };
                let (a, b, plus_b) = match num.as_ref() {
                    Expr::Sub(a, b) => (a, b, false),
                    Expr::Add(a, b) => (a, b, true),
                    _ => return Err(unsupported()),
                };
                match (a.as_ref(), b.as_ref()) {
                    (Expr::Var(a), Expr::Var(b)) => delta_ratio(&out, a, b, DeltaSigns { plus_b, minus_out }),
                    _ => Err(unsupported()),
                }
            }
            _ => Err(unsupported()),
        }
    }
}

fn mul_exponent(e: &Exponent, lambda: &Exponent) -> Result<Exponent> {
    Exponent::from_scalar(&(e.to_scalar() * lambda.to_scalar()))
}
