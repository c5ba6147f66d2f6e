//! Noncommutative operator-expression engine.
//!
//! Expressions are flat sums of complex-scalar coefficients times words of
//! generator letters. Coefficients carry powers of the deformation parameter
//! `q` symbolically (in half-integer units), so argument scalings such as
//! `G(B, B+) -> G(qB, qB+)` and fermion-number shifts `M -> M - 1` stay exact
//! and adjoints conjugate `q`-powers correctly when `q` is complex.
//!
//! Grammar (UTF-8 text, whitespace insignificant, `*` required):
//!
//! ```text
//! expr    := term (('+'|'-') term)*
//! term    := factor ('*' factor)*
//! factor  := primary ('^' INT)?
//! primary := NAME | SCALAR | '(' expr ')' | '-' primary
//! SCALAR  := DECIMAL | '(' DECIMAL ',' DECIMAL ')'      -- complex (re, im)
//!          | ('q'|'qbar') ('^' '(' INT ('/2')? ')')?
//! ```
//!
//! `q` and `qbar` (its complex conjugate) are reserved. Unary minus and the
//! `qbar` form are accepted as printable extensions; everything the printer
//! emits reparses to an equal expression.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::CMat;

/// Scalar coefficient `value * q^(qpow/2) * conj(q)^(qbarpow/2)`.
///
/// The `q`-powers are never folded into `value` before evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QScalar {
    pub value: Complex64,
    pub qpow: i64,
    pub qbarpow: i64,
}

impl QScalar {
    pub fn new(value: Complex64, qpow: i64) -> Self {
        QScalar { value, qpow, qbarpow: 0 }
    }

    pub fn one() -> Self {
        QScalar::new(Complex64::new(1.0, 0.0), 0)
    }

    pub fn real(x: f64) -> Self {
        QScalar::new(Complex64::new(x, 0.0), 0)
    }

    pub fn complex(re: f64, im: f64) -> Self {
        QScalar::new(Complex64::new(re, im), 0)
    }

    /// `q^(half/2)`, e.g. `q_half(2)` is `q` and `q_half(-1)` is `q^(-1/2)`.
    pub fn q_half(half: i64) -> Self {
        QScalar { value: Complex64::new(1.0, 0.0), qpow: half, qbarpow: 0 }
    }

    pub fn mul(&self, other: &QScalar) -> QScalar {
        QScalar {
            value: self.value * other.value,
            qpow: self.qpow + other.qpow,
            qbarpow: self.qbarpow + other.qbarpow,
        }
    }

    /// Adjoint: conjugate the value and swap `q`-powers with `conj(q)`-powers.
    pub fn adjoint(&self) -> QScalar {
        QScalar { value: self.value.conj(), qpow: self.qbarpow, qbarpow: self.qpow }
    }

    pub fn is_zero(&self) -> bool {
        self.value == Complex64::new(0.0, 0.0)
    }

    /// Numeric value at a concrete `q` (principal branch for half powers).
    pub fn eval(&self, q: Complex64) -> Complex64 {
        self.value * half_power(q, self.qpow) * half_power(q.conj(), self.qbarpow)
    }
}

fn half_power(q: Complex64, half: i64) -> Complex64 {
    if half == 0 {
        Complex64::new(1.0, 0.0)
    } else if half % 2 == 0 {
        q.powi((half / 2) as i32)
    } else {
        q.powf(half as f64 / 2.0)
    }
}

/// Ordered sequence of generator names; empty means the identity operator.
pub type Word = Vec<String>;

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: QScalar,
    pub word: Word,
}

/// Parity grading of a generator letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Declares the generator alphabet: the adjoint involution (e.g. `B <-> Bd`)
/// and the parity of each letter.
#[derive(Debug, Clone, Default)]
pub struct LetterTable {
    adjoint: BTreeMap<String, String>,
    parity: BTreeMap<String, Parity>,
}

impl LetterTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declare `a` and `b` as adjoint partners with common parity.
    pub fn pair(mut self, a: &str, b: &str, parity: Parity) -> Self {
        self.adjoint.insert(a.to_string(), b.to_string());
        self.adjoint.insert(b.to_string(), a.to_string());
        self.parity.insert(a.to_string(), parity);
        self.parity.insert(b.to_string(), parity);
        self
    }

    /// Declare a self-adjoint letter.
    pub fn self_adjoint(mut self, a: &str, parity: Parity) -> Self {
        self.adjoint.insert(a.to_string(), a.to_string());
        self.parity.insert(a.to_string(), parity);
        self
    }

    pub fn contains(&self, name: &str) -> bool {
        self.adjoint.contains_key(name)
    }

    pub fn adjoint_of(&self, name: &str) -> Result<&str> {
        self.adjoint
            .get(name)
            .map(|s| s.as_str())
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn parity_of(&self, name: &str) -> Result<Parity> {
        self.parity
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLetter(name.to_string()))
    }

    pub fn letters(&self) -> impl Iterator<Item = &str> {
        self.adjoint.keys().map(|s| s.as_str())
    }
}

/// Anything that binds letters to square complex matrices at a concrete `q`.
pub trait LetterBindings {
    fn binding(&self, name: &str) -> Option<&CMat>;
    fn q(&self) -> Complex64;
    fn total_dim(&self) -> usize;
}

/// Noncommutative polynomial: a merged, sorted sum of `(coefficient, word)`
/// terms. Zero-coefficient terms are dropped; no two terms share the same
/// `(word, qpow, qbarpow)` key.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NCExpr {
    terms: Vec<Term>,
}

impl NCExpr {
    pub fn zero() -> Self {
        NCExpr { terms: Vec::new() }
    }

    pub fn one() -> Self {
        NCExpr::scalar(QScalar::one())
    }

    pub fn scalar(c: QScalar) -> Self {
        NCExpr { terms: vec![Term { coeff: c, word: Vec::new() }] }.normalized()
    }

    pub fn letter(name: &str) -> Self {
        NCExpr {
            terms: vec![Term { coeff: QScalar::one(), word: vec![name.to_string()] }],
        }
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        NCExpr { terms }.normalized()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn normalized(mut self) -> Self {
        self.terms.sort_by(|a, b| {
            a.word
                .cmp(&b.word)
                .then(a.coeff.qpow.cmp(&b.coeff.qpow))
                .then(a.coeff.qbarpow.cmp(&b.coeff.qbarpow))
        });
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.into_iter() {
            if let Some(last) = merged.last_mut() {
                if last.word == t.word
                    && last.coeff.qpow == t.coeff.qpow
                    && last.coeff.qbarpow == t.coeff.qbarpow
                {
                    last.coeff.value += t.coeff.value;
                    continue;
                }
            }
            merged.push(t);
        }
        merged.retain(|t| !t.coeff.is_zero());
        NCExpr { terms: merged }
    }

    pub fn add(&self, other: &NCExpr) -> NCExpr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        NCExpr { terms }.normalized()
    }

    pub fn sub(&self, other: &NCExpr) -> NCExpr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NCExpr {
        self.scaled(QScalar::real(-1.0))
    }

    pub fn scaled(&self, c: QScalar) -> NCExpr {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coeff: t.coeff.mul(&c), word: t.word.clone() })
            .collect();
        NCExpr { terms }.normalized()
    }

    pub fn mul(&self, other: &NCExpr) -> NCExpr {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut word = a.word.clone();
                word.extend(b.word.iter().cloned());
                terms.push(Term { coeff: a.coeff.mul(&b.coeff), word });
            }
        }
        NCExpr { terms }.normalized()
    }

    pub fn pow(&self, k: i64) -> Result<NCExpr> {
        if k >= 0 {
            let mut acc = NCExpr::one();
            for _ in 0..k {
                acc = acc.mul(self);
            }
            Ok(acc)
        } else if self.terms.len() == 1 && self.terms[0].word.is_empty() {
            let c = self.terms[0].coeff;
            if c.value == Complex64::new(0.0, 0.0) {
                return Err(Error::BadExponent("negative power of zero".into()));
            }
            Ok(NCExpr::scalar(QScalar {
                value: c.value.powi(k as i32),
                qpow: c.qpow * k,
                qbarpow: c.qbarpow * k,
            }))
        } else {
            Err(Error::BadExponent(format!("negative exponent {k} on a non-scalar expression")))
        }
    }

    /// Names of all letters appearing in the expression, deduplicated.
    pub fn letters_used(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .terms
            .iter()
            .flat_map(|t| t.word.iter().map(|s| s.as_str()))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Largest per-word sum of `weight(letter)`; used to size truncation masks.
    pub fn max_word_weight(&self, weight: impl Fn(&str) -> usize) -> usize {
        self.terms
            .iter()
            .map(|t| t.word.iter().map(|l| weight(l)).sum())
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for NCExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let rendered: Vec<String> = self.terms.iter().map(render_term).collect();
        write!(f, "{}", rendered.join(" + "))
    }
}

fn render_term(t: &Term) -> String {
    let mut parts: Vec<String> = Vec::new();
    let c = &t.coeff;
    let value_is_one = c.value == Complex64::new(1.0, 0.0);
    let has_tail = c.qpow != 0 || c.qbarpow != 0 || !t.word.is_empty();
    if !value_is_one || !has_tail {
        if c.value.im == 0.0 {
            parts.push(format!("{}", c.value.re));
        } else {
            parts.push(format!("({},{})", c.value.re, c.value.im));
        }
    }
    if c.qpow != 0 {
        parts.push(render_q_power("q", c.qpow));
    }
    if c.qbarpow != 0 {
        parts.push(render_q_power("qbar", c.qbarpow));
    }
    parts.extend(t.word.iter().cloned());
    parts.join("*")
}

fn render_q_power(base: &str, half: i64) -> String {
    if half % 2 == 0 {
        format!("{base}^({})", half / 2)
    } else {
        format!("{base}^({half}/2)")
    }
}

/// Adjoint of an expression: each word is reversed with letters mapped
/// through the table involution; scalar values are conjugated; `q`-powers
/// become `conj(q)`-powers (identical for real `q`).
pub fn adjoint(e: &NCExpr, table: &LetterTable) -> Result<NCExpr> {
    let mut terms = Vec::with_capacity(e.terms.len());
    for t in &e.terms {
        let mut word = Vec::with_capacity(t.word.len());
        for letter in t.word.iter().rev() {
            word.push(table.adjoint_of(letter)?.to_string());
        }
        terms.push(Term { coeff: t.coeff.adjoint(), word });
    }
    Ok(NCExpr::from_terms(terms))
}

/// Multiplies the coefficient of every term by `factor^k` where `k` counts
/// occurrences of the scaled letter in the word. Words are unchanged.
pub fn scale_letter(e: &NCExpr, factors: &BTreeMap<String, QScalar>) -> NCExpr {
    let terms = e
        .terms
        .iter()
        .map(|t| {
            let mut coeff = t.coeff;
            for letter in &t.word {
                if let Some(fac) = factors.get(letter) {
                    coeff = coeff.mul(fac);
                }
            }
            Term { coeff, word: t.word.clone() }
        })
        .collect();
    NCExpr::from_terms(terms)
}

/// Replaces every occurrence of `name` in place by the replacement word,
/// multiplying the term coefficient once per occurrence.
pub fn substitute_letter(e: &NCExpr, name: &str, replacement: &(QScalar, Word)) -> NCExpr {
    let (rc, rword) = replacement;
    let terms = e
        .terms
        .iter()
        .map(|t| {
            let mut coeff = t.coeff;
            let mut word = Vec::with_capacity(t.word.len());
            for letter in &t.word {
                if letter == name {
                    coeff = coeff.mul(rc);
                    word.extend(rword.iter().cloned());
                } else {
                    word.push(letter.clone());
                }
            }
            Term { coeff, word }
        })
        .collect();
    NCExpr::from_terms(terms)
}

/// Evaluates the expression against bound matrices:
/// `sum coeff * q^(qpow/2) * (product of bindings, left to right)`.
pub fn evaluate<B: LetterBindings>(e: &NCExpr, rep: &B) -> Result<CMat> {
    let dim = rep.total_dim();
    let q = rep.q();
    let mut acc = CMat::zeros(dim, dim);
    for t in &e.terms {
        let scale = t.coeff.eval(q);
        let mut m: Option<CMat> = None;
        for letter in &t.word {
            let bound = rep
                .binding(letter)
                .ok_or_else(|| Error::UnboundLetter(letter.clone()))?;
            if bound.nrows() != dim || bound.ncols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "letter `{letter}` is {}x{}, expected {dim}x{dim}",
                    bound.nrows(),
                    bound.ncols()
                )));
            }
            m = Some(match m {
                None => bound.clone(),
                Some(prev) => prev * bound,
            });
        }
        match m {
            None => {
                for i in 0..dim {
                    acc[(i, i)] += scale;
                }
            }
            Some(mat) => {
                acc += mat * scale;
            }
        }
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Name(String),
    Num(f64),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
    Comma,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, i));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, i));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Name(text[start..i].to_string()), start));
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let val: f64 = lit.parse().map_err(|_| Error::SyntaxError {
                    position: start,
                    message: format!("bad number literal `{lit}`"),
                })?;
                toks.push((Tok::Num(val), start));
            }
            _ => {
                return Err(Error::SyntaxError {
                    position: i,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<()> {
        let pos = self.here();
        match self.bump() {
            Some(ref t) if t == want => Ok(()),
            _ => Err(Error::SyntaxError { position: pos, message: format!("expected {what}") }),
        }
    }

    fn parse_expr(&mut self) -> Result<NCExpr> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    acc = acc.add(&self.parse_term()?);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    acc = acc.sub(&self.parse_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<NCExpr> {
        let mut acc = self.parse_factor()?;
        while self.peek() == Some(&Tok::Star) {
            self.bump();
            acc = acc.mul(&self.parse_factor()?);
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<NCExpr> {
        let base = self.parse_primary()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let k = self.parse_signed_int()?;
            return base.pow(k);
        }
        Ok(base)
    }

    fn parse_signed_int(&mut self) -> Result<i64> {
        let parenthesized = if self.peek() == Some(&Tok::LParen) {
            self.bump();
            true
        } else {
            false
        };
        let neg = if self.peek() == Some(&Tok::Minus) {
            self.bump();
            true
        } else {
            false
        };
        let pos = self.here();
        let k = match self.bump() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && v.abs() <= 1e15 => {
                let k = v as i64;
                if neg {
                    -k
                } else {
                    k
                }
            }
            Some(Tok::Num(v)) => return Err(Error::BadExponent(format!("non-integer exponent {v}"))),
            _ => {
                return Err(Error::SyntaxError {
                    position: pos,
                    message: "expected integer exponent".into(),
                })
            }
        };
        if parenthesized {
            self.expect(&Tok::RParen, "`)`")?;
        }
        Ok(k)
    }

    /// `'^' '(' INT ('/2')? ')'` following `q` or `qbar`; returns half-units.
    fn parse_q_exponent(&mut self) -> Result<i64> {
        self.expect(&Tok::Caret, "`^`")?;
        self.expect(&Tok::LParen, "`(`")?;
        let k = self.parse_signed_int()?;
        let half = if self.peek() == Some(&Tok::Slash) {
            self.bump();
            let pos = self.here();
            match self.bump() {
                Some(Tok::Num(v)) if v == 2.0 => k,
                _ => {
                    return Err(Error::SyntaxError {
                        position: pos,
                        message: "only `/2` denominators are allowed in q powers".into(),
                    })
                }
            }
        } else {
            k.checked_mul(2)
                .ok_or_else(|| Error::BadExponent(format!("q power overflow: {k}")))?
        };
        self.expect(&Tok::RParen, "`)`")?;
        Ok(half)
    }

    fn parse_primary(&mut self) -> Result<NCExpr> {
        let pos = self.here();
        match self.peek().cloned() {
            Some(Tok::Minus) => {
                self.bump();
                Ok(self.parse_primary()?.neg())
            }
            Some(Tok::Num(v)) => {
                self.bump();
                Ok(NCExpr::scalar(QScalar::real(v)))
            }
            Some(Tok::Name(name)) if name == "q" || name == "qbar" => {
                self.bump();
                let half = if self.peek() == Some(&Tok::Caret) && self.peek2() == Some(&Tok::LParen)
                {
                    self.parse_q_exponent()?
                } else {
                    2
                };
                let c = if name == "q" {
                    QScalar { value: Complex64::new(1.0, 0.0), qpow: half, qbarpow: 0 }
                } else {
                    QScalar { value: Complex64::new(1.0, 0.0), qpow: 0, qbarpow: half }
                };
                Ok(NCExpr::scalar(c))
            }
            Some(Tok::Name(name)) => {
                self.bump();
                Ok(NCExpr::letter(&name))
            }
            Some(Tok::LParen) => {
                self.bump();
                if let Some(c) = self.try_complex_literal()? {
                    return Ok(NCExpr::scalar(c));
                }
                let e = self.parse_expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(Error::SyntaxError { position: pos, message: "expected a value".into() }),
        }
    }

    /// Attempts `DECIMAL ',' DECIMAL ')'` right after an opening paren.
    fn try_complex_literal(&mut self) -> Result<Option<QScalar>> {
        let save = self.pos;
        let read_decimal = |p: &mut Self| -> Option<f64> {
            let neg = if p.peek() == Some(&Tok::Minus) {
                p.bump();
                true
            } else {
                false
            };
            match p.peek().cloned() {
                Some(Tok::Num(v)) => {
                    p.bump();
                    Some(if neg { -v } else { v })
                }
                _ => None,
            }
        };
        let re = match read_decimal(self) {
            Some(v) => v,
            None => {
                self.pos = save;
                return Ok(None);
            }
        };
        if self.peek() != Some(&Tok::Comma) {
            self.pos = save;
            return Ok(None);
        }
        self.bump();
        let im = match read_decimal(self) {
            Some(v) => v,
            None => {
                self.pos = save;
                return Ok(None);
            }
        };
        if self.peek() != Some(&Tok::RParen) {
            self.pos = save;
            return Ok(None);
        }
        self.bump();
        Ok(Some(QScalar::complex(re, im)))
    }
}

/// Parses `text` into a normalized expression; every identifier must be
/// declared in `table`.
pub fn parse(text: &str, table: &LetterTable) -> Result<NCExpr> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len() };
    let e = p.parse_expr()?;
    if p.pos != p.toks.len() {
        return Err(Error::SyntaxError {
            position: p.here(),
            message: "trailing input after expression".into(),
        });
    }
    for letter in e.letters_used() {
        if !table.contains(letter) {
            return Err(Error::UnknownLetter(letter.to_string()));
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn table() -> LetterTable {
        LetterTable::new()
            .pair("B", "Bd", Parity::Even)
            .pair("F", "Fd", Parity::Odd)
    }

    #[test]
    fn parse_single_letter() {
        let e = parse("F", &table()).unwrap();
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.terms()[0].coeff, QScalar::one());
        assert_eq!(e.terms()[0].word, vec!["F".to_string()]);
    }

    #[test]
    fn parse_q_half_word() {
        let e = parse("q^(1/2)*Bd*B", &table()).unwrap();
        assert_eq!(e.terms().len(), 1);
        let t = &e.terms()[0];
        assert_eq!(t.coeff.value, c(1.0, 0.0));
        assert_eq!(t.coeff.qpow, 1);
        assert_eq!(t.word, vec!["Bd".to_string(), "B".to_string()]);
    }

    #[test]
    fn parse_sum_with_complex_literal() {
        let e = parse("1 + (0,1)*F", &table()).unwrap();
        assert_eq!(e.terms().len(), 2);
        let unit = e.terms().iter().find(|t| t.word.is_empty()).unwrap();
        assert_eq!(unit.coeff.value, c(1.0, 0.0));
        let f = e.terms().iter().find(|t| !t.word.is_empty()).unwrap();
        assert_eq!(f.coeff.value, c(0.0, 1.0));
        assert_eq!(f.word, vec!["F".to_string()]);
    }

    #[test]
    fn parse_exponents() {
        let e = parse("B^3", &table()).unwrap();
        assert_eq!(e.terms()[0].word.len(), 3);
        let e = parse("q^(-1)*B", &table()).unwrap();
        assert_eq!(e.terms()[0].coeff.qpow, -2);
        let e = parse("q^2", &table()).unwrap();
        assert_eq!(e.terms()[0].coeff.qpow, 4);
        assert!(matches!(parse("B^(-1)", &table()), Err(Error::BadExponent(_))));
        assert!(matches!(parse("B^1.5", &table()), Err(Error::BadExponent(_))));
    }

    #[test]
    fn parse_rejects_unknown_letters_and_garbage() {
        assert!(matches!(parse("X", &table()), Err(Error::UnknownLetter(_))));
        assert!(matches!(parse("B *", &table()), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse("B B", &table()), Err(Error::SyntaxError { .. })));
    }

    #[test]
    fn adjoint_examples() {
        let t = table();
        let e = adjoint(&parse("B", &t).unwrap(), &t).unwrap();
        assert_eq!(e, parse("Bd", &t).unwrap());
        let e = adjoint(&parse("Bd*B", &t).unwrap(), &t).unwrap();
        assert_eq!(e, parse("Bd*B", &t).unwrap());
        let e = adjoint(&parse("(0,1)*F", &t).unwrap(), &t).unwrap();
        assert_eq!(e, parse("(0,-1)*Fd", &t).unwrap());
    }

    #[test]
    fn adjoint_is_involutive() {
        let t = table();
        let e = parse("q^(1/2)*Bd*B + (0,2)*F*B - 3", &t).unwrap();
        let back = adjoint(&adjoint(&e, &t).unwrap(), &t).unwrap();
        assert_eq!(e, back);
    }

    #[test]
    fn scale_letter_examples() {
        let t = table();
        let mut factors = BTreeMap::new();
        factors.insert("B".to_string(), QScalar::q_half(2));
        let e = scale_letter(&parse("B", &t).unwrap(), &factors);
        assert_eq!(e.terms()[0].coeff.qpow, 2);

        factors.insert("Bd".to_string(), QScalar::q_half(2));
        let e = scale_letter(&parse("Bd*B", &t).unwrap(), &factors);
        assert_eq!(e.terms()[0].coeff.qpow, 4); // q^2: one per occurrence

        let f = parse("F", &t).unwrap();
        assert_eq!(scale_letter(&f, &factors), f);
    }

    #[test]
    fn scale_by_one_is_identity() {
        let t = table();
        let e = parse("q^(3/2)*Bd*B*F + (2,-1)*B", &t).unwrap();
        let mut factors = BTreeMap::new();
        factors.insert("B".to_string(), QScalar::one());
        assert_eq!(scale_letter(&e, &factors), e);
    }

    #[test]
    fn substitute_examples() {
        let t = LetterTable::new()
            .pair("B", "Bd", Parity::Even)
            .pair("b", "bd", Parity::Even)
            .self_adjoint("qN2i", Parity::Even)
            .self_adjoint("qM2i", Parity::Even);
        let repl = (
            QScalar::one(),
            vec!["qN2i".to_string(), "qM2i".to_string(), "qM2i".to_string(), "b".to_string()],
        );
        let e = substitute_letter(&parse("B", &t).unwrap(), "B", &repl);
        assert_eq!(e.terms()[0].word, repl.1);

        let untouched = parse("b", &t).unwrap();
        assert_eq!(substitute_letter(&untouched, "B", &repl), untouched);

        // substituting B -> q*B coincides with scale_letter
        let e = parse("Bd*B*B", &t).unwrap();
        let sub = substitute_letter(&e, "B", &(QScalar::q_half(2), vec!["B".to_string()]));
        let mut factors = BTreeMap::new();
        factors.insert("B".to_string(), QScalar::q_half(2));
        assert_eq!(sub, scale_letter(&e, &factors));
    }

    #[test]
    fn print_reparse_identity() {
        let t = table();
        for src in [
            "0",
            "1",
            "F",
            "q^(1/2)*Bd*B",
            "1 + (0,1)*F",
            "2.5*B - q^(-3/2)*Bd + qbar^(1)*F*Fd",
            "-B + (0.125,-7)*F",
        ] {
            let e = parse(src, &t).unwrap();
            let printed = e.to_string();
            let back = parse(&printed, &t).unwrap();
            assert_eq!(e, back, "print/reparse mismatch for `{src}` -> `{printed}`");
        }
    }

    #[test]
    fn qscalar_eval_complex_q() {
        let q = Complex64::from_polar(1.0, std::f64::consts::PI / 5.0);
        let s = QScalar::q_half(1); // q^(1/2)
        let v = s.eval(q);
        assert!((v - q.powf(0.5)).norm() < 1e-15);
        // adjoint evaluates to the conjugate
        let va = s.adjoint().eval(q);
        assert!((va - v.conj()).norm() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn prop_print_reparse(seed in 0u64..500) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let t = table();
            let letters = ["B", "Bd", "F", "Fd"];
            let nterms = rng.random_range(0..5usize);
            let mut e = NCExpr::zero();
            for _ in 0..nterms {
                let wlen = rng.random_range(0..4usize);
                let word: Vec<String> = (0..wlen)
                    .map(|_| letters[rng.random_range(0..4)].to_string())
                    .collect();
                let coeff = QScalar {
                    value: c(rng.random_range(-4..4) as f64 * 0.25,
                             rng.random_range(-4..4) as f64 * 0.5),
                    qpow: rng.random_range(-4..5),
                    qbarpow: rng.random_range(-2..3),
                };
                e = e.add(&NCExpr::from_terms(vec![Term { coeff, word }]));
            }
            let printed = e.to_string();
            let back = parse(&printed, &t).unwrap();
            proptest::prop_assert_eq!(e, back);
        }
    }
}
