//! Rational expressions in z and z̄, complex polynomials and root finding.
//!
//! The expression grammar is a stable public contract (curve files and CLI
//! flags use it):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := atom ('^' int)?
//! atom   := number | 'i' | 'z' | 'zb' | 'conj' '(' expr ')' | '(' expr ')' | '-' factor
//! ```
//!
//! Numbers are decimals with an optional trailing `i` (`2i`, `1.5i`).
//! Implicit multiplication is not allowed. `conj(E)` is rewritten by
//! structural conjugation (z ↔ zb, constants conjugated), so parsed trees
//! contain no conj nodes.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::wjet::{seed_jets, WJet, POLE_EPS};

const MAX_DEPTH: usize = 128;
const MAX_EXPONENT: i64 = 64;

/// Parse failure with byte offset and a description of what was expected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at byte {}: expected {}",
            self.offset, self.expected
        )
    }
}

impl std::error::Error for ParseError {}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse {
            offset: e.offset,
            expected: e.expected,
        }
    }
}

/// Expression tree over z and zb with complex constants.
#[derive(Debug, Clone, PartialEq)]
pub enum RatExpr {
    Const(Complex64),
    Z,
    Zb,
    Add(Box<RatExpr>, Box<RatExpr>),
    Sub(Box<RatExpr>, Box<RatExpr>),
    Mul(Box<RatExpr>, Box<RatExpr>),
    Div(Box<RatExpr>, Box<RatExpr>),
    Powi(Box<RatExpr>, i32),
}

impl RatExpr {
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let mut p = Parser {
            input: text.as_bytes(),
            pos: 0,
        };
        p.skip_ws();
        let e = p.expr(0)?;
        p.skip_ws();
        if p.pos != p.input.len() {
            return Err(p.err("end of input or an operator"));
        }
        Ok(e)
    }

    /// Structural conjugation: z ↔ zb, constants conjugated.
    pub fn conj(&self) -> Self {
        match self {
            RatExpr::Const(c) => RatExpr::Const(c.conj()),
            RatExpr::Z => RatExpr::Zb,
            RatExpr::Zb => RatExpr::Z,
            RatExpr::Add(a, b) => RatExpr::Add(Box::new(a.conj()), Box::new(b.conj())),
            RatExpr::Sub(a, b) => RatExpr::Sub(Box::new(a.conj()), Box::new(b.conj())),
            RatExpr::Mul(a, b) => RatExpr::Mul(Box::new(a.conj()), Box::new(b.conj())),
            RatExpr::Div(a, b) => RatExpr::Div(Box::new(a.conj()), Box::new(b.conj())),
            RatExpr::Powi(e, n) => RatExpr::Powi(Box::new(e.conj()), *n),
        }
    }

    /// Formal ∂z derivative; zb is treated as an independent variable.
    pub fn deriv_z(&self) -> Self {
        match self {
            RatExpr::Const(_) | RatExpr::Zb => RatExpr::Const(Complex64::ZERO),
            RatExpr::Z => RatExpr::Const(Complex64::ONE),
            RatExpr::Add(a, b) => fold_add(a.deriv_z(), b.deriv_z()),
            RatExpr::Sub(a, b) => fold_sub(a.deriv_z(), b.deriv_z()),
            RatExpr::Mul(a, b) => fold_add(
                fold_mul(a.deriv_z(), (**b).clone()),
                fold_mul((**a).clone(), b.deriv_z()),
            ),
            RatExpr::Div(a, b) => fold_div(
                fold_sub(
                    fold_mul(a.deriv_z(), (**b).clone()),
                    fold_mul((**a).clone(), b.deriv_z()),
                ),
                fold_powi((**b).clone(), 2),
            ),
            RatExpr::Powi(_, 0) => RatExpr::Const(Complex64::ZERO),
            RatExpr::Powi(e, n) => fold_mul(
                fold_mul(
                    RatExpr::Const(Complex64::new(*n as f64, 0.0)),
                    fold_powi((**e).clone(), n - 1),
                ),
                e.deriv_z(),
            ),
        }
    }

    /// True when the tree contains a zb node.
    pub fn has_zb(&self) -> bool {
        match self {
            RatExpr::Zb => true,
            RatExpr::Const(_) | RatExpr::Z => false,
            RatExpr::Add(a, b) | RatExpr::Sub(a, b) | RatExpr::Mul(a, b) | RatExpr::Div(a, b) => {
                a.has_zb() || b.has_zb()
            }
            RatExpr::Powi(e, _) => e.has_zb(),
        }
    }

    /// Direct complex evaluation (no derivatives).
    pub fn eval_value(&self, z: Complex64) -> Result<Complex64> {
        match self {
            RatExpr::Const(c) => Ok(*c),
            RatExpr::Z => Ok(z),
            RatExpr::Zb => Ok(z.conj()),
            RatExpr::Add(a, b) => Ok(a.eval_value(z)? + b.eval_value(z)?),
            RatExpr::Sub(a, b) => Ok(a.eval_value(z)? - b.eval_value(z)?),
            RatExpr::Mul(a, b) => Ok(a.eval_value(z)? * b.eval_value(z)?),
            RatExpr::Div(a, b) => {
                let d = b.eval_value(z)?;
                if d.norm() <= POLE_EPS {
                    return Err(Error::PoleAtPoint(z));
                }
                Ok(a.eval_value(z)? / d)
            }
            RatExpr::Powi(e, n) => {
                let v = e.eval_value(z)?;
                if *n < 0 && v.norm() <= POLE_EPS {
                    return Err(Error::PoleAtPoint(z));
                }
                Ok(v.powi(*n))
            }
        }
    }

    /// Jet of the expression by structural recursion over seeded jets.
    pub fn eval_jet(&self, jz: &WJet, jzb: &WJet) -> Result<WJet> {
        match self {
            RatExpr::Const(c) => Ok(WJet::constant(*c, jz.order())),
            RatExpr::Z => Ok(*jz),
            RatExpr::Zb => Ok(*jzb),
            RatExpr::Add(a, b) => Ok(a.eval_jet(jz, jzb)?.add(&b.eval_jet(jz, jzb)?)),
            RatExpr::Sub(a, b) => Ok(a.eval_jet(jz, jzb)?.sub(&b.eval_jet(jz, jzb)?)),
            RatExpr::Mul(a, b) => Ok(a.eval_jet(jz, jzb)?.mul(&b.eval_jet(jz, jzb)?)),
            RatExpr::Div(a, b) => a.eval_jet(jz, jzb)?.div(&b.eval_jet(jz, jzb)?),
            RatExpr::Powi(e, n) => e.eval_jet(jz, jzb)?.powi(*n),
        }
    }

    /// Jet at a point; pole errors carry the base point.
    pub fn eval_jet_at(&self, z0: Complex64, order: usize) -> Result<WJet> {
        let (jz, jzb) = seed_jets(z0, order)?;
        self.eval_jet(&jz, &jzb).map_err(|e| e.at_point(z0))
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn fmt_const(c: Complex64) -> String {
    if c == Complex64::ZERO {
        return "0".into();
    }
    if c.im == 0.0 {
        if c.re >= 0.0 {
            return fmt_f64(c.re);
        }
        return format!("({})", fmt_f64(c.re));
    }
    if c.re == 0.0 {
        if c.im >= 0.0 {
            return format!("{}i", fmt_f64(c.im));
        }
        return format!("({}i)", fmt_f64(c.im));
    }
    let sign = if c.im >= 0.0 { "+" } else { "-" };
    format!("({}{}{}i)", fmt_f64(c.re), sign, fmt_f64(c.im.abs()))
}

impl fmt::Display for RatExpr {
    /// Canonical printing: composites are fully parenthesized, so printing
    /// a parsed tree and reparsing yields a structurally equal tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatExpr::Const(c) => write!(f, "{}", fmt_const(*c)),
            RatExpr::Z => write!(f, "z"),
            RatExpr::Zb => write!(f, "zb"),
            RatExpr::Sub(a, b) if **a == RatExpr::Const(Complex64::ZERO) => {
                write!(f, "(-{b})")
            }
            RatExpr::Add(a, b) => write!(f, "({a}+{b})"),
            RatExpr::Sub(a, b) => write!(f, "({a}-{b})"),
            RatExpr::Mul(a, b) => write!(f, "({a}*{b})"),
            RatExpr::Div(a, b) => write!(f, "({a}/{b})"),
            RatExpr::Powi(e, n) => write!(f, "({e}^{n})"),
        }
    }
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, expected: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            expected: expected.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self, depth: usize) -> std::result::Result<RatExpr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.err("shallower expression (depth limit 128)"));
        }
        let mut acc = self.term(depth + 1)?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term(depth + 1)?;
                    acc = fold_add(acc, rhs);
                }
                Some(b'-') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.term(depth + 1)?;
                    acc = fold_sub(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self, depth: usize) -> std::result::Result<RatExpr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.err("shallower expression (depth limit 128)"));
        }
        let mut acc = self.factor(depth + 1)?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.factor(depth + 1)?;
                    acc = fold_mul(acc, rhs);
                }
                Some(b'/') => {
                    self.pos += 1;
                    self.skip_ws();
                    let rhs = self.factor(depth + 1)?;
                    acc = fold_div(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self, depth: usize) -> std::result::Result<RatExpr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.err("shallower expression (depth limit 128)"));
        }
        let base = self.atom(depth + 1)?;
        self.skip_ws();
        if self.eat(b'^') {
            self.skip_ws();
            let n = self.integer()?;
            return Ok(fold_powi(base, n));
        }
        Ok(base)
    }

    fn atom(&mut self, depth: usize) -> std::result::Result<RatExpr, ParseError> {
        if depth > MAX_DEPTH {
            return Err(self.err("shallower expression (depth limit 128)"));
        }
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr(depth + 1)?;
                self.skip_ws();
                if !self.eat(b')') {
                    return Err(self.err("')'"));
                }
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                self.skip_ws();
                let f = self.factor(depth + 1)?;
                Ok(fold_neg(f))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .peek()
                    .map(|b| b.is_ascii_alphabetic())
                    .unwrap_or(false)
                {
                    self.pos += 1;
                }
                let word = &self.input[start..self.pos];
                match word {
                    b"z" => Ok(RatExpr::Z),
                    b"zb" => Ok(RatExpr::Zb),
                    b"i" => Ok(RatExpr::Const(Complex64::i())),
                    b"conj" => {
                        self.skip_ws();
                        if !self.eat(b'(') {
                            return Err(self.err("'(' after conj"));
                        }
                        let e = self.expr(depth + 1)?;
                        self.skip_ws();
                        if !self.eat(b')') {
                            return Err(self.err("')'"));
                        }
                        Ok(e.conj())
                    }
                    _ => {
                        self.pos = start;
                        Err(self.err("'z', 'zb', 'i' or 'conj'"))
                    }
                }
            }
            _ => Err(self.err("a number, 'i', 'z', 'zb', 'conj(...)', '(' or '-'")),
        }
    }

    fn number(&mut self) -> std::result::Result<RatExpr, ParseError> {
        let start = self.pos;
        while self.peek().map(|b| b.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.eat(b'.') {
            while self.peek().map(|b| b.is_ascii_digit()).unwrap_or(false) {
                self.pos += 1;
            }
        }
        if self.pos == start || &self.input[start..self.pos] == b"." {
            self.pos = start;
            return Err(self.err("a decimal number"));
        }
        let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        let value: f64 = text.parse().map_err(|_| ParseError {
            offset: start,
            expected: "a decimal number".into(),
        })?;
        // trailing 'i' makes the literal imaginary, unless it starts a word
        // like 'i' followed by more letters (which would be a parse error
        // anyway since implicit multiplication is not allowed)
        if self.peek() == Some(b'i')
            && !self
                .input
                .get(self.pos + 1)
                .map(|b| b.is_ascii_alphabetic())
                .unwrap_or(false)
        {
            self.pos += 1;
            return Ok(RatExpr::Const(Complex64::new(0.0, value)));
        }
        Ok(RatExpr::Const(Complex64::new(value, 0.0)))
    }

    fn integer(&mut self) -> std::result::Result<i32, ParseError> {
        let start = self.pos;
        let neg = self.eat(b'-');
        let dstart = self.pos;
        while self.peek().map(|b| b.is_ascii_digit()).unwrap_or(false) {
            self.pos += 1;
        }
        if self.pos == dstart {
            return Err(self.err("an integer exponent"));
        }
        let text = std::str::from_utf8(&self.input[dstart..self.pos]).unwrap();
        let mag: i64 = text.parse().map_err(|_| ParseError {
            offset: start,
            expected: format!("integer exponent with |n| <= {MAX_EXPONENT}"),
        })?;
        if mag > MAX_EXPONENT {
            return Err(ParseError {
                offset: start,
                expected: format!("integer exponent with |n| <= {MAX_EXPONENT}"),
            });
        }
        Ok(if neg { -mag as i32 } else { mag as i32 })
    }
}

// Constant folding keeps printed trees reparseable to structural equality:
// "(-1.5+2i)" must come back as one constant, not a Sub of two.
fn consts(a: &RatExpr, b: &RatExpr) -> Option<(Complex64, Complex64)> {
    match (a, b) {
        (RatExpr::Const(x), RatExpr::Const(y)) => Some((*x, *y)),
        _ => None,
    }
}

fn fold_add(a: RatExpr, b: RatExpr) -> RatExpr {
    match consts(&a, &b) {
        Some((x, y)) => RatExpr::Const(x + y),
        None => RatExpr::Add(Box::new(a), Box::new(b)),
    }
}

fn fold_sub(a: RatExpr, b: RatExpr) -> RatExpr {
    match consts(&a, &b) {
        Some((x, y)) => RatExpr::Const(x - y),
        None => RatExpr::Sub(Box::new(a), Box::new(b)),
    }
}

fn fold_mul(a: RatExpr, b: RatExpr) -> RatExpr {
    match consts(&a, &b) {
        Some((x, y)) => RatExpr::Const(x * y),
        None => RatExpr::Mul(Box::new(a), Box::new(b)),
    }
}

fn fold_div(a: RatExpr, b: RatExpr) -> RatExpr {
    if let Some((x, y)) = consts(&a, &b) {
        if y.norm() > 0.0 {
            return RatExpr::Const(x / y);
        }
    }
    RatExpr::Div(Box::new(a), Box::new(b))
}

fn fold_powi(e: RatExpr, n: i32) -> RatExpr {
    if let RatExpr::Const(c) = &e {
        if n >= 0 || c.norm() > 0.0 {
            return RatExpr::Const(c.powi(n));
        }
    }
    RatExpr::Powi(Box::new(e), n)
}

fn fold_neg(e: RatExpr) -> RatExpr {
    match e {
        RatExpr::Const(c) => RatExpr::Const(-c),
        other => RatExpr::Sub(Box::new(RatExpr::Const(Complex64::ZERO)), Box::new(other)),
    }
}

/// Convenience wrapper around [`RatExpr::parse`].
pub fn parse_expr(text: &str) -> std::result::Result<RatExpr, ParseError> {
    RatExpr::parse(text)
}

/// Complex-coefficient polynomial, ascending degree, trailing zeros stripped.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    coeffs: Vec<Complex64>,
}

impl CPoly {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last() == Some(&Complex64::ZERO) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn deriv(&self) -> CPoly {
        if self.coeffs.len() <= 1 {
            return CPoly::new(vec![]);
        }
        CPoly::new(
            self.coeffs[1..]
                .iter()
                .enumerate()
                .map(|(k, c)| c * (k as f64 + 1.0))
                .collect(),
        )
    }

    /// All roots with multiplicities. Aberth–Ehrlich iteration seeded on a
    /// perturbed circle; companion-matrix eigenvalues as fallback when the
    /// iteration stalls. Roots within 1e-6 of each other merge into one
    /// record with summed multiplicity.
    pub fn roots(&self) -> Result<Vec<(Complex64, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut coeffs = self.coeffs.clone();
        let mut zero_mult = 0usize;
        while coeffs.first() == Some(&Complex64::ZERO) && coeffs.len() > 1 {
            coeffs.remove(0);
            zero_mult += 1;
        }
        let n = coeffs.len() - 1;
        let mut simple = Vec::new();
        if n == 1 {
            simple.push(-coeffs[0] / coeffs[1]);
        } else if n >= 2 {
            simple = match aberth(&coeffs) {
                Some(r) => r,
                None => companion_roots(&coeffs)?,
            };
        }
        let mut clustered = cluster(simple, 1e-6);
        if zero_mult > 0 {
            // combine an exact zero root with any cluster that landed on it
            if let Some(entry) = clustered.iter_mut().find(|(r, _)| r.norm() < 1e-6) {
                entry.1 += zero_mult;
                entry.0 = Complex64::ZERO;
            } else {
                clustered.push((Complex64::ZERO, zero_mult));
            }
        }
        Ok(clustered)
    }
}

fn cluster(mut roots: Vec<Complex64>, tol: f64) -> Vec<(Complex64, usize)> {
    roots.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut out: Vec<(Complex64, usize)> = Vec::new();
    for r in roots {
        if let Some((c, m)) = out.iter_mut().find(|(c, _)| (*c - r).norm() <= tol) {
            // running centroid
            let k = *m as f64;
            *c = (*c * k + r) / (k + 1.0);
            *m += 1;
        } else {
            out.push((r, 1));
        }
    }
    out
}

fn aberth(coeffs: &[Complex64]) -> Option<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return None;
    }
    let poly = CPoly::new(coeffs.to_vec());
    let dpoly = poly.deriv();
    let radius = 1.0
        + coeffs[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    // perturbed circle: golden-angle spacing breaks root symmetries
    let golden = 2.0 * std::f64::consts::PI * 0.618_033_988_749_894_9;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = golden * (k as f64 + 1.0) + 0.3;
            let r = radius * (0.6 + 0.25 * (((k * 7 + 3) % 11) as f64 / 11.0));
            Complex64::from_polar(r, theta)
        })
        .collect();
    for _sweep in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..n {
            let p = poly.eval(z[i]);
            let dp = dpoly.eval(z[i]);
            if dp.norm() == 0.0 {
                z[i] += Complex64::new(1e-6, 1e-6);
                max_step = f64::MAX;
                continue;
            }
            let newton = p / dp;
            let mut s = Complex64::ZERO;
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        s += Complex64::new(1e12, 0.0);
                    } else {
                        s += 1.0 / d;
                    }
                }
            }
            let denom = Complex64::ONE - newton * s;
            let w = if denom.norm() < 1e-300 {
                newton
            } else {
                newton / denom
            };
            z[i] -= w;
            let rel = w.norm() / (1.0 + z[i].norm());
            max_step = max_step.max(rel);
        }
        if max_step < 1e-14 {
            return Some(z);
        }
    }
    None
}

fn companion_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lead = coeffs[n];
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = Complex64::ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i] / lead;
    }
    let schur = m.schur();
    let eig = schur.eigenvalues().ok_or(Error::RootsDiverged)?;
    let poly = CPoly::new(coeffs.to_vec());
    let dpoly = poly.deriv();
    // polish with a few Newton steps
    let mut out = Vec::with_capacity(n);
    for mut z in eig.iter().copied() {
        for _ in 0..5 {
            let dp = dpoly.eval(z);
            if dp.norm() == 0.0 {
                break;
            }
            let step = poly.eval(z) / dp;
            if step.norm() > 1.0 + z.norm() {
                break;
            }
            z -= step;
        }
        out.push(z);
    }
    Ok(out)
}

/// Roots of a polynomial with multiplicities; free-function form.
pub fn poly_roots(p: &CPoly) -> Result<Vec<(Complex64, usize)>> {
    p.roots()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn parse_and_eval_polynomial() {
        let e = parse_expr("z^2+1").unwrap();
        assert_eq!(e.eval_value(c(2.0, 0.0)).unwrap(), c(5.0, 0.0));
    }

    #[test]
    fn parse_and_eval_rational_with_complex_constant() {
        let e = parse_expr("(3+2i)*z/(z-1)").unwrap();
        let v = e.eval_value(c(2.0, 0.0)).unwrap();
        assert!((v - c(6.0, 4.0)).norm() < 1e-14);
    }

    #[test]
    fn parse_conj_rewrites_structurally() {
        let e = parse_expr("conj(z)*z - i").unwrap();
        assert!(!format!("{e}").contains("conj"));
        let v = e.eval_value(c(1.0, 1.0)).unwrap();
        assert!((v - c(2.0, -1.0)).norm() < 1e-14);
        assert_eq!(parse_expr("conj(z)").unwrap(), RatExpr::Zb);
        assert_eq!(parse_expr("conj(zb)").unwrap(), RatExpr::Z);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = parse_expr("z^2 + * 3").unwrap_err();
        assert_eq!(err.offset, 6);
        let err = parse_expr("z^99999").unwrap_err();
        assert!(err.expected.contains("64"));
        let err = parse_expr("q+1").unwrap_err();
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn implicit_multiplication_is_rejected() {
        assert!(parse_expr("2z").is_err());
        assert!(parse_expr("z zb").is_err());
    }

    #[test]
    fn jet_of_cube_at_one() {
        let e = parse_expr("z^3").unwrap();
        let j = e.eval_jet_at(c(1.0, 0.0), 2).unwrap();
        assert!((j.value() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((j.deriv(1, 0) - c(3.0, 0.0)).norm() < 1e-15);
        assert!((j.deriv(2, 0) - c(6.0, 0.0)).norm() < 1e-14);
        assert!(j.is_holomorphic());
    }

    #[test]
    fn jet_of_zb_square() {
        let e = parse_expr("zb^2").unwrap();
        let j = e.eval_jet_at(c(2.0, 0.0), 2).unwrap();
        assert!((j.value() - c(4.0, 0.0)).norm() < 1e-15);
        assert!((j.deriv(0, 1) - c(4.0, 0.0)).norm() < 1e-15);
        assert!((j.deriv(0, 2) - c(2.0, 0.0)).norm() < 1e-14);
        assert_eq!(j.deriv(1, 0), Complex64::ZERO);
    }

    #[test]
    fn jet_at_pole_flags_the_point() {
        let e = parse_expr("z/(z-1)").unwrap();
        match e.eval_jet_at(c(1.0, 0.0), 1) {
            Err(Error::PoleAtPoint(z)) => assert!((z - c(1.0, 0.0)).norm() < 1e-15),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn second_derivative_slot_agrees_with_fd_oracle() {
        // 1/z at z0 = i: jet ∂zz = 2i; centered FD with h = 1e-4 agrees to 1e-6
        let e = parse_expr("1/z").unwrap();
        let j = e.eval_jet_at(c(0.0, 1.0), 2).unwrap();
        let h = 1e-4;
        let f = |z: Complex64| 1.0 / z;
        let z0 = c(0.0, 1.0);
        let fxx = (f(z0 + c(h, 0.0)) - 2.0 * f(z0) + f(z0 - c(h, 0.0))) / (h * h);
        let fyy = (f(z0 + c(0.0, h)) - 2.0 * f(z0) + f(z0 - c(0.0, h))) / (h * h);
        let fxy = (f(z0 + c(h, h)) - f(z0 + c(h, -h)) - f(z0 + c(-h, h)) + f(z0 + c(-h, -h)))
            / (4.0 * h * h);
        let dzz = (fxx - fyy) / 4.0 - Complex64::i() * fxy / 2.0;
        assert!((j.deriv(2, 0) - c(0.0, 2.0)).norm() < 1e-13);
        assert!((j.deriv(2, 0) - dzz).norm() < 1e-6);
    }

    #[test]
    fn roots_of_quadratics_and_cubics() {
        let p = CPoly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let mut r = p.roots().unwrap();
        r.sort_by(|a, b| a.0.im.partial_cmp(&b.0.im).unwrap());
        assert_eq!(r.len(), 2);
        assert!((r[0].0 - c(0.0, -1.0)).norm() < 1e-9);
        assert!((r[1].0 - c(0.0, 1.0)).norm() < 1e-9);
        assert_eq!((r[0].1, r[1].1), (1, 1));

        let p = CPoly::new(vec![c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let mut r = p.roots().unwrap();
        r.sort_by(|a, b| a.0.re.partial_cmp(&b.0.re).unwrap());
        assert_eq!(r.len(), 3);
        assert!((r[0].0 - c(-1.0, 0.0)).norm() < 1e-9);
        assert!(r[1].0.norm() < 1e-9);
        assert!((r[2].0 - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn double_root_merges_and_matches_companion_oracle() {
        let p = CPoly::new(vec![c(4.0, 0.0), c(-4.0, 0.0), c(1.0, 0.0)]);
        let r = p.roots().unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].0 - c(2.0, 0.0)).norm() < 1e-6);
        assert_eq!(r[0].1, 2);
        // companion-matrix oracle
        let comp = companion_roots(p.coeffs()).unwrap();
        for root in comp {
            assert!((root - c(2.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert_eq!(CPoly::new(vec![]).roots(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn display_roundtrip_smoke() {
        for src in [
            "z^2+1",
            "(3+2i)*z/(z-1)",
            "conj(z)*z - i",
            "-z^3",
            "1/(z-1)",
            "(z+zb)^4 - 2.5i",
            "z^-3",
        ] {
            let e = parse_expr(src).unwrap();
            let printed = format!("{e}");
            let re = parse_expr(&printed).unwrap();
            assert_eq!(e, re, "roundtrip failed for {src}: printed {printed}");
        }
    }
}
