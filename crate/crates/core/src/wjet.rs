//! Truncated Wirtinger jets: mixed ∂z/∂z̄ derivatives to order ≤ 3.
//!
//! A `WJet` stores the scaled Taylor coefficients t[a][b] = ∂z^a ∂z̄^b f / (a! b!)
//! of a function of one complex variable at a base point, for a + b ≤ order.
//! Field operations, integer powers and conjugation are closed on jets and
//! exact to the stored order, which is all that rational expressions in z, z̄
//! need. `HJet` bundles four jets into the jet of a C⁴-valued map, the local
//! lift of a curve.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quat::HVec;

/// Highest supported jet order. The partner map consumes two jet orders of
/// its source and is differentiated once more for torsion residuals.
pub const MAX_ORDER: usize = 3;

/// Division by a jet whose value modulus is below this signals `PoleAtPoint`.
pub const POLE_EPS: f64 = 1e-12;

const FACT: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

/// Placeholder location for pole errors raised inside jet arithmetic;
/// evaluation drivers replace it with the actual base point.
pub(crate) fn pole_here() -> Error {
    Error::PoleAtPoint(Complex64::new(f64::NAN, f64::NAN))
}

impl Error {
    /// Attach the actual evaluation point to a location-less pole error.
    pub fn at_point(self, z: Complex64) -> Error {
        match self {
            Error::PoleAtPoint(w) if w.re.is_nan() => Error::PoleAtPoint(z),
            Error::NoHorizontalTangent(w) if w.re.is_nan() => Error::NoHorizontalTangent(z),
            e => e,
        }
    }
}

/// Truncated Wirtinger jet of a complex-valued map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WJet {
    order: u8,
    t: [[Complex64; 4]; 4],
}

impl WJet {
    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn constant(value: Complex64, order: usize) -> Self {
        debug_assert!(order <= MAX_ORDER);
        let mut t = [[Complex64::ZERO; 4]; 4];
        t[0][0] = value;
        Self {
            order: order as u8,
            t,
        }
    }

    pub fn zero(order: usize) -> Self {
        Self::constant(Complex64::ZERO, order)
    }

    /// Jet of the identity z ↦ z at z0.
    pub fn seed_z(z0: Complex64, order: usize) -> Self {
        let mut j = Self::constant(z0, order);
        if order >= 1 {
            j.t[1][0] = Complex64::ONE;
        }
        j
    }

    /// Jet of z ↦ z̄ at z0.
    pub fn seed_zb(z0: Complex64, order: usize) -> Self {
        let mut j = Self::constant(z0.conj(), order);
        if order >= 1 {
            j.t[0][1] = Complex64::ONE;
        }
        j
    }

    pub fn value(&self) -> Complex64 {
        self.t[0][0]
    }

    /// Derivative ∂z^a ∂z̄^b f at the base point.
    pub fn deriv(&self, a: usize, b: usize) -> Complex64 {
        assert!(
            a + b <= self.order(),
            "derivative ({a},{b}) beyond jet order"
        );
        self.t[a][b] * FACT[a] * FACT[b]
    }

    /// Jet of ∂z f, one order lower.
    pub fn shift_dz(&self) -> Self {
        debug_assert!(self.order >= 1);
        let n = self.order() - 1;
        let mut out = Self::zero(n);
        for a in 0..=n {
            for b in 0..=(n - a) {
                out.t[a][b] = self.t[a + 1][b] * (a as f64 + 1.0);
            }
        }
        out
    }

    /// Jet of ∂z̄ f, one order lower.
    pub fn shift_dzb(&self) -> Self {
        debug_assert!(self.order >= 1);
        let n = self.order() - 1;
        let mut out = Self::zero(n);
        for a in 0..=n {
            for b in 0..=(n - a) {
                out.t[a][b] = self.t[a][b + 1] * (b as f64 + 1.0);
            }
        }
        out
    }

    pub fn truncate(&self, order: usize) -> Self {
        debug_assert!(order <= self.order());
        let mut out = Self::zero(order);
        for a in 0..=order {
            for b in 0..=(order - a) {
                out.t[a][b] = self.t[a][b];
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.order, rhs.order, "jet orders must match");
        let mut out = *self;
        for a in 0..4 {
            for b in 0..4 {
                out.t[a][b] += rhs.t[a][b];
            }
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.order, rhs.order, "jet orders must match");
        let mut out = *self;
        for a in 0..4 {
            for b in 0..4 {
                out.t[a][b] -= rhs.t[a][b];
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        for a in 0..4 {
            for b in 0..4 {
                out.t[a][b] *= s;
            }
        }
        out
    }

    /// Truncated Leibniz product.
    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.order, rhs.order, "jet orders must match");
        let n = self.order();
        let mut out = Self::zero(n);
        for a in 0..=n {
            for b in 0..=(n - a) {
                let mut s = Complex64::ZERO;
                for p in 0..=a {
                    for q in 0..=b {
                        s += self.t[p][q] * rhs.t[a - p][b - q];
                    }
                }
                out.t[a][b] = s;
            }
        }
        out
    }

    /// Truncated quotient. Fails with `PoleAtPoint` when the divisor value
    /// modulus is below `pole_eps`.
    pub fn div_eps(&self, rhs: &Self, pole_eps: f64) -> Result<Self> {
        debug_assert_eq!(self.order, rhs.order, "jet orders must match");
        if rhs.t[0][0].norm() <= pole_eps {
            return Err(pole_here());
        }
        let n = self.order();
        let g0 = rhs.t[0][0];
        let mut out = Self::zero(n);
        // solve q·g = f by increasing total degree
        for total in 0..=n {
            for a in 0..=total {
                let b = total - a;
                let mut s = self.t[a][b];
                for p in 0..=a {
                    for q in 0..=b {
                        if p == a && q == b {
                            continue;
                        }
                        s -= out.t[p][q] * rhs.t[a - p][b - q];
                    }
                }
                out.t[a][b] = s / g0;
            }
        }
        Ok(out)
    }

    pub fn div(&self, rhs: &Self) -> Result<Self> {
        self.div_eps(rhs, POLE_EPS)
    }

    /// Conjugate jet: indices swap, coefficients conjugate.
    pub fn conj(&self) -> Self {
        let mut out = Self::zero(self.order());
        for a in 0..4 {
            for b in 0..4 {
                out.t[a][b] = self.t[b][a].conj();
            }
        }
        out
    }

    /// Integer power by binary exponentiation; negative powers go through
    /// the reciprocal and may signal a pole.
    pub fn powi(&self, n: i32) -> Result<Self> {
        if n < 0 {
            let pos = self.powi(-n)?;
            return WJet::constant(Complex64::ONE, self.order()).div(&pos);
        }
        let mut acc = WJet::constant(Complex64::ONE, self.order());
        let mut base = *self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// True when every antiholomorphic slot (b ≥ 1) is exactly zero.
    pub fn is_holomorphic(&self) -> bool {
        for a in 0..4 {
            for b in 1..4 {
                if self.t[a][b] != Complex64::ZERO {
                    return false;
                }
            }
        }
        true
    }

    pub fn approx_eq(&self, rhs: &Self, eps: f64) -> bool {
        if self.order != rhs.order {
            return false;
        }
        let n = self.order();
        for a in 0..=n {
            for b in 0..=(n - a) {
                if (self.t[a][b] - rhs.t[a][b]).norm() > eps {
                    return false;
                }
            }
        }
        true
    }
}

/// Seeded jets of z and z̄ at a base point, the inputs to expression
/// evaluation. Fails when the order exceeds `MAX_ORDER`.
pub fn seed_jets(z0: Complex64, order: usize) -> Result<(WJet, WJet)> {
    if order > MAX_ORDER {
        return Err(Error::OrderOutOfRange(order));
    }
    Ok((WJet::seed_z(z0, order), WJet::seed_zb(z0, order)))
}

/// Jet of an `HVec`-valued map: four component jets of equal order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HJet {
    pub w: [WJet; 4],
}

impl HJet {
    pub fn new(w: [WJet; 4]) -> Self {
        debug_assert!(w.iter().all(|j| j.order() == w[0].order()));
        Self { w }
    }

    pub fn constant(v: &HVec, order: usize) -> Self {
        Self::new([
            WJet::constant(v.c[0], order),
            WJet::constant(v.c[1], order),
            WJet::constant(v.c[2], order),
            WJet::constant(v.c[3], order),
        ])
    }

    pub fn order(&self) -> usize {
        self.w[0].order()
    }

    pub fn value(&self) -> HVec {
        HVec::new(
            self.w[0].value(),
            self.w[1].value(),
            self.w[2].value(),
            self.w[3].value(),
        )
    }

    /// Value of ∂z u at the base point.
    pub fn dz_value(&self) -> HVec {
        HVec::new(
            self.w[0].deriv(1, 0),
            self.w[1].deriv(1, 0),
            self.w[2].deriv(1, 0),
            self.w[3].deriv(1, 0),
        )
    }

    /// Value of ∂z̄ u at the base point.
    pub fn dzb_value(&self) -> HVec {
        HVec::new(
            self.w[0].deriv(0, 1),
            self.w[1].deriv(0, 1),
            self.w[2].deriv(0, 1),
            self.w[3].deriv(0, 1),
        )
    }

    pub fn map(&self, f: impl Fn(&WJet) -> WJet) -> Self {
        Self::new([f(&self.w[0]), f(&self.w[1]), f(&self.w[2]), f(&self.w[3])])
    }

    pub fn shift_dz(&self) -> Self {
        self.map(|j| j.shift_dz())
    }

    pub fn shift_dzb(&self) -> Self {
        self.map(|j| j.shift_dzb())
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.truncate(order))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new([
            self.w[0].add(&rhs.w[0]),
            self.w[1].add(&rhs.w[1]),
            self.w[2].add(&rhs.w[2]),
            self.w[3].add(&rhs.w[3]),
        ])
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new([
            self.w[0].sub(&rhs.w[0]),
            self.w[1].sub(&rhs.w[1]),
            self.w[2].sub(&rhs.w[2]),
            self.w[3].sub(&rhs.w[3]),
        ])
    }

    /// Componentwise product with a scalar jet.
    pub fn mul_jet(&self, s: &WJet) -> Self {
        self.map(|j| j.mul(s))
    }

    /// Right action of j, lifted to jets: (-conj u2, conj u1, -conj u4, conj u3).
    pub fn right_j(&self) -> Self {
        Self::new([
            self.w[1].conj().neg(),
            self.w[0].conj(),
            self.w[3].conj().neg(),
            self.w[2].conj(),
        ])
    }

    /// Hermitian pairing of jets: Σ conj(uᵢ)·vᵢ.
    pub fn herm(&self, rhs: &Self) -> WJet {
        let mut acc = WJet::zero(self.order());
        for i in 0..4 {
            acc = acc.add(&self.w[i].conj().mul(&rhs.w[i]));
        }
        acc
    }

    /// Symplectic pairing of jets: u1·v2 - u2·v1 + u3·v4 - u4·v3.
    pub fn sympl(&self, rhs: &Self) -> WJet {
        self.w[0]
            .mul(&rhs.w[1])
            .sub(&self.w[1].mul(&rhs.w[0]))
            .add(&self.w[2].mul(&rhs.w[3]))
            .sub(&self.w[3].mul(&rhs.w[2]))
    }

    /// Jet of |u|², real-valued.
    pub fn norm_sq(&self) -> WJet {
        self.herm(self)
    }

    /// Hermitian projection away from span{u, u·j}, lifted to jets.
    /// The result is quaternionically orthogonal to u at the base point.
    pub fn horizontal_project(&self, x: &Self) -> Result<Self> {
        let nsq = self.norm_sq();
        let uj = self.right_j();
        let cu = self.herm(x).div(&nsq)?;
        let cj = uj.herm(x).div(&nsq)?;
        Ok(x.sub(&self.mul_jet(&cu)).sub(&uj.mul_jet(&cj)))
    }
}

/// Max discrepancy between the jet's ∂z and ∂z̄ slots and centered finite
/// differences on a 9-point stencil. Consistency check between the two
/// differentiation routes; second-order slots are too noisy at small h in
/// f64 (roundoff amplifies as h⁻²) and are checked by their own oracles.
pub fn fd_crosscheck(expr: &crate::ratfun::RatExpr, z0: Complex64, h: f64) -> Result<f64> {
    let jet = expr.eval_jet_at(z0, 1)?;
    let mut f = [[Complex64::ZERO; 3]; 3];
    for (pi, p) in [-1.0f64, 0.0, 1.0].iter().enumerate() {
        for (qi, q) in [-1.0f64, 0.0, 1.0].iter().enumerate() {
            let z = z0 + Complex64::new(p * h, q * h);
            f[pi][qi] = expr.eval_value(z)?;
        }
    }
    let i = Complex64::i();
    let fx = (f[2][1] - f[0][1]) / (2.0 * h);
    let fy = (f[1][2] - f[1][0]) / (2.0 * h);
    let dz = (fx - i * fy) / 2.0;
    let dzb = (fx + i * fy) / 2.0;
    let pairs = [(jet.deriv(1, 0), dz), (jet.deriv(0, 1), dzb)];
    Ok(pairs
        .iter()
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}
