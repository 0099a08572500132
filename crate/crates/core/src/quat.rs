//! Quaternion arithmetic and the C⁴ ≅ H² identification.
//!
//! A quaternion is stored as a complex pair `q = a + j·b` with the relations
//! `j² = -1` and `z·j = j·z̄` for complex `z`. C acts on the right, so H² is a
//! right quaternionic vector space; the identification with C⁴ is
//! `(c1, c2, c3, c4) ~ (c1 + j·c2, c3 + j·c4)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

/// Quaternion `q = a + j·b` with complex components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub a: Complex64,
    pub b: Complex64,
}

impl Quaternion {
    pub const fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::ZERO, Complex64::ZERO)
    }

    pub fn one() -> Self {
        Self::new(Complex64::ONE, Complex64::ZERO)
    }

    /// The imaginary unit j = 0 + j·1.
    pub fn j() -> Self {
        Self::new(Complex64::ZERO, Complex64::ONE)
    }

    pub fn from_complex(a: Complex64) -> Self {
        Self::new(a, Complex64::ZERO)
    }

    /// Quaternion conjugate: conj(a + j·b) = ā - j·b.
    pub fn conj(&self) -> Self {
        Self::new(self.a.conj(), -self.b)
    }

    pub fn norm_sq(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Right action of a complex scalar: (a + j·b)·z = a·z + j·(b·z).
    pub fn mul_c(&self, z: Complex64) -> Self {
        Self::new(self.a * z, self.b * z)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s)
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        (*self - *other).norm() <= eps
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a + rhs.a, self.b + rhs.b)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a - rhs.a, self.b - rhs.b)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a, -self.b)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    /// (a + j·b)(c + j·d) = (a·c - b̄·d) + j·(ā·d + b·c).
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.a * rhs.a - self.b.conj() * rhs.b,
            self.a.conj() * rhs.b + self.b * rhs.a,
        )
    }
}

/// Vector in C⁴ ≅ H², the universal carrier for projective points, frames
/// and curve lifts. Components pair as (c1 + j·c2, c3 + j·c4).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HVec {
    pub c: [Complex64; 4],
}

impl HVec {
    pub const fn new(c1: Complex64, c2: Complex64, c3: Complex64, c4: Complex64) -> Self {
        Self {
            c: [c1, c2, c3, c4],
        }
    }

    pub fn from_array(c: [Complex64; 4]) -> Self {
        Self { c }
    }

    pub fn zero() -> Self {
        Self {
            c: [Complex64::ZERO; 4],
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Right action of j: (c1,c2,c3,c4) ↦ (-c̄2, c̄1, -c̄4, c̄3).
    /// Applying it twice negates the vector. Spans the twistor fiber
    /// direction together with the vector itself.
    pub fn right_j(&self) -> Self {
        Self::new(
            -self.c[1].conj(),
            self.c[0].conj(),
            -self.c[3].conj(),
            self.c[2].conj(),
        )
    }

    /// Right action of a complex scalar (componentwise).
    pub fn mul_c(&self, z: Complex64) -> Self {
        Self::new(self.c[0] * z, self.c[1] * z, self.c[2] * z, self.c[3] * z)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.mul_c(Complex64::new(s, 0.0))
    }

    /// Right action of a quaternion q = α + j·β on each quaternion slot:
    /// (c1 + j·c2)·q = (c1·α - c̄2·β) + j·(c̄1·β + c2·α).
    pub fn mul_q(&self, q: Quaternion) -> Self {
        let (al, be) = (q.a, q.b);
        Self::new(
            self.c[0] * al - self.c[1].conj() * be,
            self.c[0].conj() * be + self.c[1] * al,
            self.c[2] * al - self.c[3].conj() * be,
            self.c[2].conj() * be + self.c[3] * al,
        )
    }

    /// Hermitian pairing ⟨v,w⟩_C = Σ c̄ᵢ dᵢ (conjugate-linear in the first slot).
    pub fn herm(&self, w: &Self) -> Complex64 {
        self.c
            .iter()
            .zip(w.c.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Symplectic pairing σ(v,w) = v1·w2 - v2·w1 + v3·w4 - v4·w3,
    /// the j-part of the quaternionic inner product. Cuts out the
    /// holomorphic contact plane at each projective point.
    pub fn sympl(&self, w: &Self) -> Complex64 {
        self.c[0] * w.c[1] - self.c[1] * w.c[0] + self.c[2] * w.c[3] - self.c[3] * w.c[2]
    }

    /// Quaternionic inner product ⟨v,w⟩_H = herm(v,w) + j·sympl(v,w).
    pub fn quat(&self, w: &Self) -> Quaternion {
        Quaternion::new(self.herm(w), self.sympl(w))
    }

    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        (*self - *other).norm() <= eps
    }
}

impl Add for HVec {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.c[0] + rhs.c[0],
            self.c[1] + rhs.c[1],
            self.c[2] + rhs.c[2],
            self.c[3] + rhs.c[3],
        )
    }
}

impl Sub for HVec {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.c[0] - rhs.c[0],
            self.c[1] - rhs.c[1],
            self.c[2] - rhs.c[2],
            self.c[3] - rhs.c[3],
        )
    }
}

impl Neg for HVec {
    type Output = Self;
    fn neg(self) -> Self {
        self.mul_c(Complex64::new(-1.0, 0.0))
    }
}

/// All three pairings of a vector pair, tied by quat = herm + j·sympl.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingTriple {
    pub herm: Complex64,
    pub sympl: Complex64,
    pub quat: Quaternion,
}

/// Compute the Hermitian, symplectic and quaternionic pairings at once.
pub fn pairings(v: &HVec, w: &HVec) -> PairingTriple {
    PairingTriple {
        herm: v.herm(w),
        sympl: v.sympl(w),
        quat: v.quat(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// 4x4 real matrix representation of left multiplication by q
    /// on the basis {1, i, j, k} with k = i·j. Oracle for products.
    fn real_matrix(q: &Quaternion) -> [[f64; 4]; 4] {
        // q = w + x i + y j + z k with a = w + x i, b' from j·b:
        // a + j b = w + x i + y j + z k where b = y' + z' i gives
        // j b = j y' + j z' i = y' j + z' (j i) = y' j - z' k.
        let w = q.a.re;
        let x = q.a.im;
        let y = q.b.re;
        let z = -q.b.im; // k = i j = -j i, and j·(z' i) = -z' k
                         // left multiplication by (w,x,y,z) in basis (1,i,j,k):
        [[w, -x, -y, -z], [x, w, -z, y], [y, z, w, -x], [z, -y, x, w]]
    }

    fn from_wxyz(v: [f64; 4]) -> Quaternion {
        Quaternion::new(c(v[0], v[1]), c(v[2], -v[3]))
    }

    fn to_wxyz(q: &Quaternion) -> [f64; 4] {
        [q.a.re, q.a.im, q.b.re, -q.b.im]
    }

    fn oracle_mul(q: &Quaternion, p: &Quaternion) -> Quaternion {
        let m = real_matrix(q);
        let pv = to_wxyz(p);
        let mut out = [0.0; 4];
        for (i, row) in m.iter().enumerate() {
            out[i] = row.iter().zip(pv.iter()).map(|(a, b)| a * b).sum();
        }
        from_wxyz(out)
    }

    #[test]
    fn mul_squares_j_to_minus_one() {
        let j = Quaternion::j();
        let jj = j * j;
        assert!(jj.approx_eq(&Quaternion::new(c(-1.0, 0.0), c(0.0, 0.0)), 0.0));
    }

    #[test]
    fn mul_j_times_i_matches_real_matrix_oracle() {
        // j·i stays in canonical form j·(i): components (0, i). The identity
        // z·j = j·z̄ moves scalars across j with conjugation, so i·j = j·(-i).
        let j = Quaternion::j();
        let i = Quaternion::from_complex(c(0.0, 1.0));
        let ji = j * i;
        assert!(ji.approx_eq(&Quaternion::new(c(0.0, 0.0), c(0.0, 1.0)), 1e-15));
        assert!(ji.approx_eq(&oracle_mul(&j, &i), 1e-15));
        let ij = i * j;
        assert!(ij.approx_eq(&Quaternion::new(c(0.0, 0.0), c(0.0, -1.0)), 1e-15));
        assert!(ij.approx_eq(&oracle_mul(&i, &j), 1e-15));
    }

    #[test]
    fn mul_general_matches_real_matrix_oracle() {
        // (1 + j·1)(i + j·2) = (-2+i) + j·(2+i)
        let q = Quaternion::new(c(1.0, 0.0), c(1.0, 0.0));
        let p = Quaternion::new(c(0.0, 1.0), c(2.0, 0.0));
        let qp = q * p;
        assert!(qp.approx_eq(&Quaternion::new(c(-2.0, 1.0), c(2.0, 1.0)), 1e-15));
        assert!(qp.approx_eq(&oracle_mul(&q, &p), 1e-14));
    }

    #[test]
    fn mul_norm_is_multiplicative() {
        let q = Quaternion::new(c(0.3, -0.7), c(1.1, 0.2));
        let p = Quaternion::new(c(-0.4, 0.9), c(0.6, -1.3));
        let lhs = (q * p).norm();
        let rhs = q.norm() * p.norm();
        assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs);
    }

    #[test]
    fn right_j_on_basis_vectors() {
        let e1 = HVec::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(e1.right_j().approx_eq(
            &HVec::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            0.0
        ));
        let e3 = HVec::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!(e3.right_j().approx_eq(
            &HVec::new(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
            0.0
        ));
    }

    #[test]
    fn right_j_twice_negates() {
        let v = HVec::new(c(0.0, 1.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, -1.0));
        assert!(v.right_j().right_j().approx_eq(&-v, 0.0));
        // and v ⊥ v·j in the Hermitian pairing
        assert!(v.herm(&v.right_j()).norm() < 1e-15);
    }

    #[test]
    fn pairings_examples() {
        let v = HVec::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let w = HVec::new(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let p = pairings(&v, &w);
        assert!(p.herm.norm() < 1e-15);
        assert!((p.sympl - c(1.0, 0.0)).norm() < 1e-15);
        assert!(p.quat.approx_eq(&Quaternion::j(), 1e-15));

        let p = pairings(&v, &v);
        assert!((p.herm - c(1.0, 0.0)).norm() < 1e-15);
        assert!(p.sympl.norm() < 1e-15);

        let v = HVec::new(c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let w = v.right_j();
        assert!(w.approx_eq(
            &HVec::new(c(-2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)),
            0.0
        ));
        let p = pairings(&v, &w);
        assert!(p.herm.norm() < 1e-15);
        assert!((p.sympl - c(5.0, 0.0)).norm() < 1e-15);
        assert!((p.sympl - c(v.norm_sq(), 0.0)).norm() < 1e-15);
    }
}
