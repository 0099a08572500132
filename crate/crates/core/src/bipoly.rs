//! Bivariate polynomials in (z, zb) and rational canonical forms.
//!
//! Internal plumbing for chart transitions: a curve lift built from rational
//! expressions is brought to a common denominator, and the chart at infinity
//! uses the degree-reversed numerators as a polynomial lift. That keeps the
//! lift finite and nonvanishing near the far chart's origin, which winding
//! numbers and curvature quadrature need.

use num_complex::Complex64;

use crate::error::Result;
use crate::wjet::WJet;

/// Hard cap on degrees during canonicalization; expressions that blow past
/// it fall back to direct jet evaluation through the chart map.
const MAX_DEG: usize = 96;

/// Polynomial Σ c[i][j] zⁱ zbʲ with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct BiPoly {
    /// c[i][j] is the coefficient of z^i zb^j; rows trimmed of trailing zeros.
    c: Vec<Vec<Complex64>>,
}

impl BiPoly {
    pub fn zero() -> Self {
        Self { c: vec![] }
    }

    pub fn constant(v: Complex64) -> Self {
        if v == Complex64::ZERO {
            return Self::zero();
        }
        Self { c: vec![vec![v]] }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::ONE)
    }

    pub fn var_z() -> Self {
        Self {
            c: vec![vec![], vec![Complex64::ONE]],
        }
    }

    pub fn var_zb() -> Self {
        Self {
            c: vec![vec![Complex64::ZERO, Complex64::ONE]],
        }
    }

    fn trim(mut self) -> Self {
        for row in &mut self.c {
            while row.last() == Some(&Complex64::ZERO) {
                row.pop();
            }
        }
        while self.c.last().map(|r| r.is_empty()).unwrap_or(false) {
            self.c.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.c
            .iter()
            .all(|r| r.iter().all(|v| *v == Complex64::ZERO))
    }

    pub fn deg_z(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn deg_zb(&self) -> usize {
        self.c
            .iter()
            .map(|r| r.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    fn coeff(&self, i: usize, j: usize) -> Complex64 {
        self.c
            .get(i)
            .and_then(|r| r.get(j))
            .copied()
            .unwrap_or(Complex64::ZERO)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let ni = self.c.len().max(rhs.c.len());
        let mut c = Vec::with_capacity(ni);
        for i in 0..ni {
            let nj = self
                .c
                .get(i)
                .map(|r| r.len())
                .unwrap_or(0)
                .max(rhs.c.get(i).map(|r| r.len()).unwrap_or(0));
            c.push(
                (0..nj)
                    .map(|j| self.coeff(i, j) + rhs.coeff(i, j))
                    .collect(),
            );
        }
        Self { c }.trim()
    }

    pub fn neg(&self) -> Self {
        Self {
            c: self
                .c
                .iter()
                .map(|r| r.iter().map(|v| -v).collect())
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Product; `None` when it would exceed the degree cap.
    pub fn mul(&self, rhs: &Self) -> Option<Self> {
        if self.is_zero() || rhs.is_zero() {
            return Some(Self::zero());
        }
        let dz = self.deg_z() + rhs.deg_z();
        let dzb = self.deg_zb() + rhs.deg_zb();
        if dz > MAX_DEG || dzb > MAX_DEG {
            return None;
        }
        let mut c = vec![vec![Complex64::ZERO; dzb + 1]; dz + 1];
        for (i1, row1) in self.c.iter().enumerate() {
            for (j1, v1) in row1.iter().enumerate() {
                if *v1 == Complex64::ZERO {
                    continue;
                }
                for (i2, row2) in rhs.c.iter().enumerate() {
                    for (j2, v2) in row2.iter().enumerate() {
                        c[i1 + i2][j1 + j2] += v1 * v2;
                    }
                }
            }
        }
        Some(Self { c }.trim())
    }

    pub fn powi(&self, n: u32) -> Option<Self> {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Some(acc)
    }

    /// Formal ∂z derivative.
    pub fn deriv_z(&self) -> Self {
        if self.c.len() <= 1 {
            return Self::zero();
        }
        Self {
            c: self.c[1..]
                .iter()
                .enumerate()
                .map(|(k, row)| row.iter().map(|v| v * (k as f64 + 1.0)).collect())
                .collect(),
        }
        .trim()
    }

    /// Degree reversal: P(1/w, 1/w̄) · w^dz · w̄^dzb as a polynomial in (w, w̄).
    /// `dz`, `dzb` must dominate the degrees of P.
    pub fn reverse(&self, dz: usize, dzb: usize) -> Self {
        debug_assert!(dz >= self.deg_z() && dzb >= self.deg_zb());
        let mut c = vec![vec![Complex64::ZERO; dzb + 1]; dz + 1];
        for (i, row) in self.c.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                c[dz - i][dzb - j] = *v;
            }
        }
        Self { c }.trim()
    }

    #[cfg(test)]
    pub fn eval_value(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let mut acc = Complex64::ZERO;
        for row in self.c.iter().rev() {
            let mut racc = Complex64::ZERO;
            for v in row.iter().rev() {
                racc = racc * zb + v;
            }
            acc = acc * z + racc;
        }
        acc
    }

    /// Jet of the polynomial over seeded jets (Horner in both variables).
    pub fn eval_jet(&self, jz: &WJet, jzb: &WJet) -> Result<WJet> {
        let order = jz.order();
        let mut acc = WJet::zero(order);
        for row in self.c.iter().rev() {
            let mut racc = WJet::zero(order);
            for v in row.iter().rev() {
                racc = racc.mul(jzb).add(&WJet::constant(*v, order));
            }
            acc = acc.mul(jz).add(&racc);
        }
        Ok(acc)
    }
}

/// Rational function as a numerator/denominator pair of bivariate polynomials.
#[derive(Debug, Clone)]
pub(crate) struct BiRat {
    pub num: BiPoly,
    pub den: BiPoly,
}

impl BiRat {
    fn poly(p: BiPoly) -> Self {
        Self {
            num: p,
            den: BiPoly::one(),
        }
    }

    /// Canonicalize an expression tree; `None` on degree blow-up or an
    /// identically zero denominator.
    pub fn from_expr(e: &crate::ratfun::RatExpr) -> Option<Self> {
        use crate::ratfun::RatExpr as E;
        Some(match e {
            E::Const(c) => Self::poly(BiPoly::constant(*c)),
            E::Z => Self::poly(BiPoly::var_z()),
            E::Zb => Self::poly(BiPoly::var_zb()),
            E::Add(a, b) => {
                let (a, b) = (Self::from_expr(a)?, Self::from_expr(b)?);
                Self {
                    num: a.num.mul(&b.den)?.add(&b.num.mul(&a.den)?),
                    den: a.den.mul(&b.den)?,
                }
            }
            E::Sub(a, b) => {
                let (a, b) = (Self::from_expr(a)?, Self::from_expr(b)?);
                Self {
                    num: a.num.mul(&b.den)?.sub(&b.num.mul(&a.den)?),
                    den: a.den.mul(&b.den)?,
                }
            }
            E::Mul(a, b) => {
                let (a, b) = (Self::from_expr(a)?, Self::from_expr(b)?);
                Self {
                    num: a.num.mul(&b.num)?,
                    den: a.den.mul(&b.den)?,
                }
            }
            E::Div(a, b) => {
                let (a, b) = (Self::from_expr(a)?, Self::from_expr(b)?);
                if b.num.is_zero() {
                    return None;
                }
                Self {
                    num: a.num.mul(&b.den)?,
                    den: a.den.mul(&b.num)?,
                }
            }
            E::Powi(inner, n) => {
                let base = Self::from_expr(inner)?;
                if *n >= 0 {
                    Self {
                        num: base.num.powi(*n as u32)?,
                        den: base.den.powi(*n as u32)?,
                    }
                } else {
                    if base.num.is_zero() {
                        return None;
                    }
                    Self {
                        num: base.den.powi((-n) as u32)?,
                        den: base.num.powi((-n) as u32)?,
                    }
                }
            }
        })
    }

    /// Formal ∂z derivative: (n'd - nd')/d².
    pub fn deriv_z(&self) -> Option<Self> {
        let num = self
            .num
            .deriv_z()
            .mul(&self.den)?
            .sub(&self.num.mul(&self.den.deriv_z())?);
        Some(Self {
            num,
            den: self.den.mul(&self.den)?,
        })
    }

    pub fn mul(&self, rhs: &Self) -> Option<Self> {
        Some(Self {
            num: self.num.mul(&rhs.num)?,
            den: self.den.mul(&rhs.den)?,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Option<Self> {
        Some(Self {
            num: self.num.mul(&rhs.den)?.sub(&rhs.num.mul(&self.den)?),
            den: self.den.mul(&rhs.den)?,
        })
    }

    pub fn div(&self, rhs: &Self) -> Option<Self> {
        if rhs.num.is_zero() {
            return None;
        }
        Some(Self {
            num: self.num.mul(&rhs.den)?,
            den: self.den.mul(&rhs.num)?,
        })
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            num: self.num.mul(&BiPoly::constant(s)).expect("constant scale"),
            den: self.den.clone(),
        }
    }
}

/// Bring four rational components over one common denominator and return
/// the numerators (the denominator is a common projective gauge factor).
pub(crate) fn common_numerators(components: &[BiRat; 4]) -> Option<[BiPoly; 4]> {
    let mut out = [
        BiPoly::zero(),
        BiPoly::zero(),
        BiPoly::zero(),
        BiPoly::zero(),
    ];
    for (i, comp) in components.iter().enumerate() {
        // numerator times the product of the other denominators
        let mut others = BiPoly::one();
        for (j, other) in components.iter().enumerate() {
            if i != j {
                others = others.mul(&other.den)?;
            }
        }
        out[i] = comp.num.mul(&others)?;
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfun::parse_expr;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn canonical_form_matches_direct_evaluation() {
        for src in ["z^2+1", "(3+2i)*z/(z-1)", "conj(z)*z - i", "zb^2/(z+2)"] {
            let e = parse_expr(src).unwrap();
            let r = BiRat::from_expr(&e).unwrap();
            for z in [c(0.3, 0.4), c(-1.2, 0.7), c(2.0, -0.5)] {
                let direct = e.eval_value(z).unwrap();
                let canon = r.num.eval_value(z) / r.den.eval_value(z);
                assert!((direct - canon).norm() < 1e-12 * (1.0 + direct.norm()));
            }
        }
    }

    #[test]
    fn reversal_clears_poles_at_infinity() {
        // zb^2 reversed over (0, 2) is the constant 1
        let e = parse_expr("zb^2").unwrap();
        let r = BiRat::from_expr(&e).unwrap();
        let rev = r.num.reverse(0, 2);
        assert_eq!(rev, BiPoly::one());
        // z^3 + z reversed over (3, 0) is 1 + z^2 in the new variable
        let e = parse_expr("z^3 + z").unwrap();
        let r = BiRat::from_expr(&e).unwrap();
        let rev = r.num.reverse(3, 0);
        let expect = parse_expr("1 + z^2").unwrap();
        for z in [c(0.5, 0.2), c(-0.3, 0.9)] {
            let want = expect.eval_value(z).unwrap();
            assert!((rev.eval_value(z) - want).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_is_formal() {
        let e = parse_expr("z^3/(z-2)").unwrap();
        let r = BiRat::from_expr(&e).unwrap();
        let dr = r.deriv_z().unwrap();
        // compare against the jet derivative
        let z0 = c(0.4, -0.3);
        let jet = e.eval_jet_at(z0, 1).unwrap();
        let v = dr.num.eval_value(z0) / dr.den.eval_value(z0);
        assert!((v - jet.deriv(1, 0)).norm() < 1e-12);
    }
}
