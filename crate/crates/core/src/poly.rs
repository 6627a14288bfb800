//! Sparse multivariate polynomials over exact rationals, with a strict parser.
//!
//! Variables are positional: `X1`, `X2`, `X3` for the first three slots and
//! `Y` for the optional fourth. Coefficients are arbitrary-precision
//! rationals; no floating point is involved anywhere.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// A polynomial in `arity` variables: a map from exponent vectors to nonzero
/// rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

impl MultiPoly {
    /// The zero polynomial.
    pub fn zero(arity: usize) -> Self {
        MultiPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial.
    pub fn constant(arity: usize, c: BigRational) -> Self {
        let mut p = MultiPoly::zero(arity);
        if !c.is_zero() {
            p.terms.insert(vec![0; arity], c);
        }
        p
    }

    /// The monomial for variable slot `idx` (0-based). Panics if out of range.
    pub fn var(arity: usize, idx: usize) -> Self {
        assert!(idx < arity, "variable index out of range");
        let mut exps = vec![0u32; arity];
        exps[idx] = 1;
        let mut p = MultiPoly::zero(arity);
        p.terms.insert(exps, BigRational::one());
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    /// Terms as (exponent vector, coefficient) pairs in deterministic order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    fn insert_term(&mut self, exps: Vec<u32>, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        assert_eq!(self.arity, other.arity, "arity mismatch");
        let mut out = MultiPoly::zero(self.arity);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u32> = ea.iter().zip(eb).map(|(&a, &b)| a + b).collect();
                out.insert_term(exps, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MultiPoly {
        let mut out = MultiPoly::constant(self.arity, BigRational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Extends to a larger arity, keeping existing variable positions.
    pub fn lift_arity(&self, arity: usize) -> MultiPoly {
        assert!(arity >= self.arity);
        let mut out = MultiPoly::zero(arity);
        for (e, c) in &self.terms {
            let mut exps = e.clone();
            exps.resize(arity, 0);
            out.terms.insert(exps, c.clone());
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> BigRational {
        assert_eq!(point.len(), self.arity, "evaluation point arity mismatch");
        let mut acc = BigRational::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (&e, p) in exps.iter().zip(point) {
                if e > 0 {
                    term *= rat_pow(p, e);
                }
            }
            acc += term;
        }
        acc
    }
}

fn rat_pow(base: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        b = &b * &b;
        e >>= 1;
    }
    acc
}

/// Syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            b'-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            b'*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            b'^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            b'/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            b'(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let digits = &text[start..i];
                toks.push((Tok::Int(digits.parse().unwrap()), start));
            }
            b'A'..=b'Z' | b'a'..=b'z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(ParseError {
                    position: i,
                    message: format!("unexpected character {:?}", b as char),
                });
            }
        }
    }
    Ok(Lexer {
        toks,
        pos: 0,
        end: bytes.len(),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.pos)
    }

    fn next_pos(&self) -> usize {
        self.peek().map_or(self.end, |t| t.1)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek().map(|(t, _)| t == want).unwrap_or(false) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
}

/// Parses a polynomial over `X1..X<arity>` (and `Y` as the fourth variable
/// when `arity` is 4). Grammar: `+ - * ^` with parentheses; rational literals
/// `a/b` where `/` may appear only between two integer literals; explicit `*`
/// required for every product.
pub fn parse_polynomial(text: &str, arity: usize) -> Result<MultiPoly, ParseError> {
    assert!((1..=4).contains(&arity), "supported arities are 1 through 4");
    let mut lx = lex(text)?;
    let p = parse_expr(&mut lx, arity)?;
    if let Some((tok, pos)) = lx.peek() {
        return Err(ParseError {
            position: *pos,
            message: format!("expected operator or end of input, found {}", tok_name(tok)),
        });
    }
    Ok(p)
}

fn tok_name(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("integer {n}"),
        Tok::Ident(s) => format!("identifier {s}"),
        Tok::Plus => "'+'".into(),
        Tok::Minus => "'-'".into(),
        Tok::Star => "'*'".into(),
        Tok::Caret => "'^'".into(),
        Tok::Slash => "'/'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
    }
}

fn parse_expr(lx: &mut Lexer, arity: usize) -> Result<MultiPoly, ParseError> {
    let mut negate = false;
    if lx.eat(&Tok::Minus) {
        negate = true;
    } else {
        lx.eat(&Tok::Plus);
    }
    let mut acc = parse_term(lx, arity)?;
    if negate {
        acc = acc.neg();
    }
    loop {
        if lx.eat(&Tok::Plus) {
            acc = acc.add(&parse_term(lx, arity)?);
        } else if lx.eat(&Tok::Minus) {
            acc = acc.sub(&parse_term(lx, arity)?);
        } else {
            break;
        }
    }
    Ok(acc)
}

fn parse_term(lx: &mut Lexer, arity: usize) -> Result<MultiPoly, ParseError> {
    let mut acc = parse_factor(lx, arity)?;
    while lx.eat(&Tok::Star) {
        acc = acc.mul(&parse_factor(lx, arity)?);
    }
    Ok(acc)
}

fn parse_factor(lx: &mut Lexer, arity: usize) -> Result<MultiPoly, ParseError> {
    let base = parse_atom(lx, arity)?;
    if lx.eat(&Tok::Caret) {
        let pos = lx.next_pos();
        match lx.bump() {
            Some((Tok::Int(n), _)) => {
                let e: u32 = n.try_into().map_err(|_| ParseError {
                    position: pos,
                    message: "exponent does not fit in 32 bits".into(),
                })?;
                Ok(base.pow(e))
            }
            other => Err(ParseError {
                position: pos,
                message: match other {
                    Some((t, _)) => format!("expected integer exponent, found {}", tok_name(&t)),
                    None => "expected integer exponent, found end of input".into(),
                },
            }),
        }
    } else {
        Ok(base)
    }
}

fn parse_atom(lx: &mut Lexer, arity: usize) -> Result<MultiPoly, ParseError> {
    let pos = lx.next_pos();
    match lx.bump() {
        Some((Tok::Int(numer), _)) => {
            // A '/' is permitted only here: between two integer literals.
            if lx.eat(&Tok::Slash) {
                let dpos = lx.next_pos();
                match lx.bump() {
                    Some((Tok::Int(denom), _)) => {
                        if denom.is_zero() {
                            return Err(ParseError {
                                position: dpos,
                                message: "zero denominator in rational literal".into(),
                            });
                        }
                        Ok(MultiPoly::constant(arity, BigRational::new(numer, denom)))
                    }
                    other => Err(ParseError {
                        position: dpos,
                        message: match other {
                            Some((t, _)) => format!(
                                "'/' is only allowed between integer literals, found {}",
                                tok_name(&t)
                            ),
                            None => "'/' is only allowed between integer literals, found end of input"
                                .into(),
                        },
                    }),
                }
            } else {
                Ok(MultiPoly::constant(arity, BigRational::from(numer)))
            }
        }
        Some((Tok::Ident(name), ipos)) => match variable_index(&name, arity) {
            Some(idx) => Ok(MultiPoly::var(arity, idx)),
            None => Err(ParseError {
                position: ipos,
                message: format!("unknown variable '{name}' (expected {})", variable_list(arity)),
            }),
        },
        Some((Tok::LParen, _)) => {
            let inner = parse_expr(lx, arity)?;
            let cpos = lx.next_pos();
            if !lx.eat(&Tok::RParen) {
                return Err(ParseError {
                    position: cpos,
                    message: "expected ')'".into(),
                });
            }
            Ok(inner)
        }
        Some((t, tpos)) => Err(ParseError {
            position: tpos,
            message: format!("expected a number, variable, or '(', found {}", tok_name(&t)),
        }),
        None => Err(ParseError {
            position: pos,
            message: "expected a number, variable, or '(', found end of input".into(),
        }),
    }
}

fn variable_index(name: &str, arity: usize) -> Option<usize> {
    match name {
        "X1" if arity >= 1 => Some(0),
        "X2" if arity >= 2 => Some(1),
        "X3" if arity >= 3 => Some(2),
        "Y" if arity == 4 => Some(3),
        _ => None,
    }
}

fn variable_list(arity: usize) -> &'static str {
    match arity {
        1 => "X1",
        2 => "X1, X2",
        3 => "X1, X2, X3",
        _ => "X1, X2, X3, Y",
    }
}
