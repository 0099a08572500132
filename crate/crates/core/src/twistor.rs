//! The twistor fibration CP³ → HP¹ ≅ S⁴ and the Sp(2) frame bundle.
//!
//! Projective points carry a representative vector; the twistor projection
//! sends the complex line of v to its quaternion line, whose fibres are the
//! j-orbits. Frames adapted to flags give the Maurer–Cartan form, from which
//! the connection blocks ρ₁, ρ₂, ω₁, ω₂, ω₃, τ and the κ entries are read
//! off, and the structure equation dφ + φ∧φ = 0 is checked by residual.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quat::{HVec, Quaternion};

/// Point of CP³: a representative vector, normalized to unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjPoint {
    rep: HVec,
}

impl ProjPoint {
    /// Normalize a nonzero representative.
    pub fn new(v: HVec) -> Result<Self> {
        let n = v.norm();
        if n < 1e-100 {
            return Err(Error::DegeneratePoint);
        }
        Ok(Self {
            rep: v.scale(1.0 / n),
        })
    }

    pub fn rep(&self) -> &HVec {
        &self.rep
    }

    /// Fubini–Study chordal distance sqrt(1 - |⟨p,q⟩|²) for unit reps,
    /// evaluated through the phase-aligned difference: with
    /// d = ‖p - q·(c̄/|c|)‖ = 2·sin(θ/2) the distance is sin θ =
    /// d·sqrt(1 - d²/4). Algebraically the same quantity, but it resolves
    /// near-equal points to machine precision instead of sqrt(ε).
    pub fn dist(&self, other: &Self) -> f64 {
        let c = self.rep.herm(&other.rep);
        let n = c.norm();
        if n < 1e-30 {
            return 1.0;
        }
        let aligned = other.rep.mul_c(c.conj() / n);
        let d = (self.rep - aligned).norm();
        d * (1.0 - d * d / 4.0).max(0.0).sqrt()
    }
}

/// Quaternion line in H², defined up to right quaternion scale.
#[derive(Debug, Clone, Copy)]
pub struct HLine {
    rep: HVec,
}

impl HLine {
    pub fn new(v: HVec) -> Result<Self> {
        let n = v.norm();
        if n < 1e-100 {
            return Err(Error::DegeneratePoint);
        }
        Ok(Self {
            rep: v.scale(1.0 / n),
        })
    }

    pub fn rep(&self) -> &HVec {
        &self.rep
    }

    /// Distance between the complex 2-planes span{a, a·j} and span{b, b·j}
    /// (principal-angle test); 0 iff the quaternion lines agree. Computed
    /// as the norm of b minus its projection onto span{a, a·j}, which
    /// equals sqrt(1 - |⟨a,b⟩|² - |⟨a·j,b⟩|²) without the cancellation.
    pub fn dist(&self, other: &Self) -> f64 {
        horizontal_project(&self.rep, &other.rep).norm()
    }
}

/// Point of S⁴ as the unit sphere in R⁵ = R × H.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct S4Point {
    pub x: [f64; 5],
}

impl S4Point {
    pub fn norm(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dist(&self, other: &Self) -> f64 {
        self.x
            .iter()
            .zip(other.x.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Norm of the coordinate sum with another point; 0 for antipodes.
    pub fn antipodal_defect(&self, other: &Self) -> f64 {
        self.x
            .iter()
            .zip(other.x.iter())
            .map(|(a, b)| (a + b) * (a + b))
            .sum::<f64>()
            .sqrt()
    }
}

/// The twistor projection T: CP³ → HP¹, sending a complex line to the
/// quaternion line it spans. Invariant under the j-orbit (the fibre).
pub fn twistor_project(p: &ProjPoint) -> HLine {
    HLine { rep: *p.rep() }
}

/// Chart on HP¹ ≅ S⁴: with quaternion pair (q1, q2),
/// s = ((|q1|² - |q2|²), 2·q2·conj(q1)) / (|q1|² + |q2|²) ∈ R × H.
/// Invariant under right quaternion scaling; quaternionically orthogonal
/// lines land on antipodal points.
pub fn s4_coords(l: &HLine) -> S4Point {
    let v = l.rep();
    let q1 = Quaternion::new(v.c[0], v.c[1]);
    let q2 = Quaternion::new(v.c[2], v.c[3]);
    let n1 = q1.norm_sq();
    let n2 = q2.norm_sq();
    let s = n1 + n2;
    let h = (q2 * q1.conj()).scale(2.0 / s);
    S4Point {
        x: [(n1 - n2) / s, h.a.re, h.a.im, h.b.re, h.b.im],
    }
}

/// Component of x orthogonal (Hermitian) to span{u, u·j}: the horizontal
/// part of a tangent vector at [u]. Requires u ≠ 0. The result is
/// quaternionically orthogonal to u.
pub fn horizontal_project(u: &HVec, x: &HVec) -> HVec {
    let nsq = u.norm_sq();
    debug_assert!(nsq > 0.0, "horizontal_project needs u != 0");
    let uj = u.right_j();
    let cu = u.herm(x) / nsq;
    let cj = uj.herm(x) / nsq;
    *x - u.mul_c(cu) - uj.mul_c(cj)
}

/// The contact pairing σ(w,t) = w1·t2 - w2·t1 + w3·t4 - w4·t3, the j-part
/// of the quaternionic inner product. σ(w, w·j) = |w|², so the contact
/// plane is transverse to the twistor fibre.
pub fn contact_pair(w: &HVec, t: &HVec) -> Complex64 {
    w.sympl(t)
}

/// Pair of quaternionically orthogonal complex lines (a point of the flag
/// manifold).
#[derive(Debug, Clone, Copy)]
pub struct Flag {
    pub p: ProjPoint,
    pub q: ProjPoint,
}

impl Flag {
    /// Fails with `NotAFlag` when the quaternionic pairing of the unit
    /// representatives exceeds 1e-8.
    pub fn new(p: ProjPoint, q: ProjPoint) -> Result<Self> {
        let pairing = p.rep().quat(q.rep()).norm();
        if pairing >= 1e-8 {
            return Err(Error::NotAFlag(pairing));
        }
        Ok(Self { p, q })
    }
}

/// Quaternionically orthonormal pair (e1, e2): a point of Sp(2).
#[derive(Debug, Clone, Copy)]
pub struct Sp2Frame {
    pub e1: HVec,
    pub e2: HVec,
}

impl Sp2Frame {
    /// Max deviation from ⟨e1,e1⟩ = ⟨e2,e2⟩ = 1, ⟨e1,e2⟩ = 0.
    pub fn invariant_residual(&self) -> f64 {
        let one = Quaternion::one();
        let d1 = (self.e1.quat(&self.e1) - one).norm();
        let d2 = (self.e2.quat(&self.e2) - one).norm();
        let d12 = self.e1.quat(&self.e2).norm();
        d1.max(d2).max(d12)
    }
}

/// Make the first component with modulus > 0.1 positive real by right
/// complex scaling. Pins the S¹ phase gauge so frame fields are continuous
/// on simply connected charts.
fn phase_fix(v: &HVec) -> HVec {
    for k in 0..4 {
        let c = v.c[k];
        if c.norm() > 0.1 {
            return v.mul_c(c.conj() / c.norm());
        }
    }
    *v
}

/// Orthonormal frame adapted to a flag: e1 along p, e2 the quaternionic
/// Gram–Schmidt complement along q, both phase-fixed.
pub fn frame_from_flag(f: &Flag) -> Result<Sp2Frame> {
    let e1 = phase_fix(f.p.rep());
    let raw = *f.q.rep();
    // subtract the quaternionic component along e1
    let coeff = e1.quat(&raw);
    let perp = raw - e1.mul_q(coeff);
    let n = perp.norm();
    if n < 1e-12 {
        return Err(Error::NotAFlag(1.0));
    }
    let e2 = phase_fix(&perp.scale(1.0 / n));
    Ok(Sp2Frame { e1, e2 })
}

/// Complex-valued 1-form sample: its coefficients on dz and dz̄ at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CForm1 {
    pub dz: Complex64,
    pub dzb: Complex64,
}

impl CForm1 {
    fn from_xy(vx: Complex64, vy: Complex64) -> Self {
        let i = Complex64::i();
        Self {
            dz: (vx - i * vy) / 2.0,
            dzb: (vx + i * vy) / 2.0,
        }
    }

    fn conj_form(&self) -> Self {
        Self {
            dz: self.dzb.conj(),
            dzb: self.dz.conj(),
        }
    }

    fn scale(&self, s: Complex64) -> Self {
        Self {
            dz: self.dz * s,
            dzb: self.dzb * s,
        }
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            dz: self.dz + o.dz,
            dzb: self.dzb + o.dzb,
        }
    }

    fn sub(&self, o: &Self) -> Self {
        Self {
            dz: self.dz - o.dz,
            dzb: self.dzb - o.dzb,
        }
    }
}

/// Maurer–Cartan blocks of a frame field at a point, in the decomposition
/// φ¹₁ = iρ₁ + j·ω̄₃, φ²₁ = ω₁/√2 + j·ω₂/√2, φ²₂ = iρ₂ + j·τ, together
/// with the derived connection entries κ.
#[derive(Debug, Clone, Copy)]
pub struct McBlocks {
    pub rho1: CForm1,
    pub rho2: CForm1,
    pub omega1: CForm1,
    pub omega2: CForm1,
    pub omega3: CForm1,
    pub tau: CForm1,
    pub kappa11: CForm1,
    pub kappa12: CForm1,
    pub kappa21: CForm1,
    pub kappa22: CForm1,
    pub kappa33: CForm1,
    /// max |φ^a_b + conj(φ^b_a)| over entries and both coordinate directions
    pub skew_residual: f64,
}

const H_MIN: f64 = 1e-6;
const H_MAX: f64 = 1e-2;
const FRAME_DRIFT_TOL: f64 = 1e-6;

type PhiMatrix = [[Quaternion; 2]; 2];

fn check_h(h: f64) -> Result<()> {
    if h < H_MIN {
        return Err(Error::StepTooSmall(h));
    }
    if h > H_MAX {
        return Err(Error::StepTooLarge(h));
    }
    Ok(())
}

/// φ evaluated on ∂x and ∂y at z by central differences of the frame field,
/// resolved with the frame's unitarity: φ^b_a = ⟨e_b, de_a⟩.
fn phi_matrices<F>(field: &F, z: Complex64, h: f64) -> Result<(PhiMatrix, PhiMatrix, f64)>
where
    F: Fn(Complex64) -> Result<Sp2Frame>,
{
    let center = field(z)?;
    let xs = [
        field(z + Complex64::new(h, 0.0))?,
        field(z - Complex64::new(h, 0.0))?,
        field(z + Complex64::new(0.0, h))?,
        field(z - Complex64::new(0.0, h))?,
    ];
    for f in std::iter::once(&center).chain(xs.iter()) {
        let drift = f.invariant_residual();
        if drift > FRAME_DRIFT_TOL {
            return Err(Error::FrameNotOrthonormal(drift));
        }
    }
    let scale = 1.0 / (2.0 * h);
    let de = |plus: &HVec, minus: &HVec| (*plus - *minus).scale(scale);
    let de_x = [de(&xs[0].e1, &xs[1].e1), de(&xs[0].e2, &xs[1].e2)];
    let de_y = [de(&xs[2].e1, &xs[3].e1), de(&xs[2].e2, &xs[3].e2)];
    let e = [center.e1, center.e2];
    let mut phi_x = [[Quaternion::zero(); 2]; 2];
    let mut phi_y = [[Quaternion::zero(); 2]; 2];
    for b in 0..2 {
        for a in 0..2 {
            phi_x[b][a] = e[b].quat(&de_x[a]);
            phi_y[b][a] = e[b].quat(&de_y[a]);
        }
    }
    let mut skew = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            skew = skew.max((phi_x[a][b] + phi_x[b][a].conj()).norm());
            skew = skew.max((phi_y[a][b] + phi_y[b][a].conj()).norm());
        }
    }
    Ok((phi_x, phi_y, skew))
}

/// Extract the Maurer–Cartan blocks of a frame field near z.
pub fn maurer_cartan<F>(field: &F, z: Complex64, h: f64) -> Result<McBlocks>
where
    F: Fn(Complex64) -> Result<Sp2Frame>,
{
    check_h(h)?;
    let (phi_x, phi_y, skew) = phi_matrices(field, z, h)?;
    let i = Complex64::i();
    let sqrt2 = std::f64::consts::SQRT_2;

    let rho1 = CForm1::from_xy(
        Complex64::new(phi_x[0][0].a.im, 0.0),
        Complex64::new(phi_y[0][0].a.im, 0.0),
    );
    let omega3 = CForm1::from_xy(phi_x[0][0].b.conj(), phi_y[0][0].b.conj());
    let omega1 = CForm1::from_xy(phi_x[1][0].a * sqrt2, phi_y[1][0].a * sqrt2);
    let omega2 = CForm1::from_xy(phi_x[1][0].b * sqrt2, phi_y[1][0].b * sqrt2);
    let rho2 = CForm1::from_xy(
        Complex64::new(phi_x[1][1].a.im, 0.0),
        Complex64::new(phi_y[1][1].a.im, 0.0),
    );
    let tau = CForm1::from_xy(phi_x[1][1].b, phi_y[1][1].b);

    let kappa11 = rho2.sub(&rho1).scale(i);
    let kappa12 = tau.conj_form().scale(-Complex64::ONE);
    let kappa21 = tau;
    let kappa22 = rho1.add(&rho2).scale(-i);
    let kappa33 = rho1.scale(2.0 * i);

    Ok(McBlocks {
        rho1,
        rho2,
        omega1,
        omega2,
        omega3,
        tau,
        kappa11,
        kappa12,
        kappa21,
        kappa22,
        kappa33,
        skew_residual: skew,
    })
}

/// Residual of dφ + φ∧φ = 0 at z: Stokes loop of φ around an h-square plus
/// the wedge term at the center, max over the 2×2 quaternion entries.
/// Tends to zero as h → 0 for genuine Sp(2) frame fields.
pub fn structure_residual<F>(field: &F, z: Complex64, h: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Sp2Frame>,
{
    check_h(h)?;
    let half = h / 2.0;
    // midpoints of the square edges; Φx on horizontal edges, Φy on vertical
    let (bx, _, _) = phi_matrices(field, z - Complex64::new(0.0, half), h)?;
    let (tx, _, _) = phi_matrices(field, z + Complex64::new(0.0, half), h)?;
    let (_, ry, _) = phi_matrices(field, z + Complex64::new(half, 0.0), h)?;
    let (_, ly, _) = phi_matrices(field, z - Complex64::new(half, 0.0), h)?;
    let (cx, cy, _) = phi_matrices(field, z, h)?;

    let mut worst = 0.0f64;
    for a in 0..2 {
        for b in 0..2 {
            // loop/h² ≈ (∂x Φy - ∂y Φx)^a_b
            let loop_term = (bx[a][b] - tx[a][b] + ry[a][b] - ly[a][b]).scale(1.0 / h);
            // wedge (φ∧φ)(∂x,∂y) = (Φx·Φy - Φy·Φx)^a_b
            let mut wedge = Quaternion::zero();
            for c in 0..2 {
                wedge = wedge + cx[a][c] * cy[c][b] - cy[a][c] * cx[c][b];
            }
            worst = worst.max((loop_term + wedge).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hv(c1: (f64, f64), c2: (f64, f64), c3: (f64, f64), c4: (f64, f64)) -> HVec {
        HVec::new(c(c1.0, c1.1), c(c2.0, c2.1), c(c3.0, c3.1), c(c4.0, c4.1))
    }

    fn basis(k: usize) -> HVec {
        let mut v = HVec::zero();
        v.c[k] = Complex64::ONE;
        v
    }

    #[test]
    fn projection_is_constant_along_fibres() {
        let p = ProjPoint::new(hv((0.3, 0.1), (-0.2, 0.9), (0.0, 0.4), (1.1, 0.0))).unwrap();
        let pj = ProjPoint::new(p.rep().right_j()).unwrap();
        let l1 = twistor_project(&p);
        let l2 = twistor_project(&pj);
        assert!(l1.dist(&l2) < 1e-12);
        // but distinct base points project to distinct lines
        let q = ProjPoint::new(basis(2)).unwrap();
        let l3 = twistor_project(&q);
        assert!(twistor_project(&ProjPoint::new(basis(0)).unwrap()).dist(&l3) > 0.9);
    }

    #[test]
    fn s4_chart_conventions() {
        let l = HLine::new(basis(0)).unwrap();
        assert_eq!(s4_coords(&l).x, [1.0, 0.0, 0.0, 0.0, 0.0]);
        let l = HLine::new(basis(2)).unwrap();
        assert_eq!(s4_coords(&l).x, [-1.0, 0.0, 0.0, 0.0, 0.0]);
        // q1 = q2 = 1
        let l = HLine::new(hv((1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0))).unwrap();
        let s = s4_coords(&l);
        assert!(
            s.dist(&S4Point {
                x: [0.0, 1.0, 0.0, 0.0, 0.0]
            }) < 1e-14
        );
        assert!((s.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn s4_chart_invariant_under_right_scaling() {
        let v = hv((0.3, 0.1), (-0.2, 0.9), (0.0, 0.4), (1.1, 0.0));
        let q = Quaternion::new(c(0.4, -0.8), c(0.3, 0.5));
        let s1 = s4_coords(&HLine::new(v).unwrap());
        let s2 = s4_coords(&HLine::new(v.mul_q(q)).unwrap());
        assert!(s1.dist(&s2) < 1e-12);
    }

    #[test]
    fn orthogonal_lines_are_antipodal() {
        let v = hv((0.5, -0.3), (0.2, 0.8), (-0.7, 0.1), (0.4, 0.4));
        let w0 = hv((1.0, 0.2), (0.0, -0.5), (0.3, 0.3), (-0.2, 0.9));
        let coeff = v.quat(&w0).scale(1.0 / v.norm_sq());
        let w = w0 - v.mul_q(coeff);
        assert!(v.quat(&w).norm() < 1e-12);
        let s1 = s4_coords(&HLine::new(v).unwrap());
        let s2 = s4_coords(&HLine::new(w).unwrap());
        assert!(s1.antipodal_defect(&s2) < 1e-12);
    }

    #[test]
    fn horizontal_projection_examples() {
        let u = basis(0);
        let x = basis(2);
        assert!(horizontal_project(&u, &x).approx_eq(&x, 1e-15));
        // anything in the quaternion line of u is killed
        let x = hv((0.7, -0.2), (0.1, 0.4), (0.0, 0.0), (0.0, 0.0));
        assert!(horizontal_project(&u, &x).norm() < 1e-15);
        // mixed case, oracle = Gram–Schmidt against {u, u·j}
        let u = hv((1.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0));
        let x = basis(2);
        let got = horizontal_project(&u, &x);
        assert!(got.approx_eq(&hv((-0.5, 0.0), (0.0, 0.0), (0.5, 0.0), (0.0, 0.0)), 1e-14));
    }

    #[test]
    fn horizontal_projection_is_idempotent_and_orthogonal() {
        let u = hv((0.5, -0.3), (0.2, 0.8), (-0.7, 0.1), (0.4, 0.4));
        let x = hv((1.0, 0.2), (0.0, -0.5), (0.3, 0.3), (-0.2, 0.9));
        let p = horizontal_project(&u, &x);
        assert!(horizontal_project(&u, &p).approx_eq(&p, 1e-13));
        assert!(u.herm(&p).norm() < 1e-12);
        assert!(u.sympl(&p).norm() < 1e-12);
    }

    #[test]
    fn contact_pairing_is_antisymmetric_and_transverse_to_fibre() {
        let w = hv((0.5, -0.3), (0.2, 0.8), (-0.7, 0.1), (0.4, 0.4));
        assert!(contact_pair(&w, &w).norm() < 1e-15);
        let t = hv((1.0, 0.2), (0.0, -0.5), (0.3, 0.3), (-0.2, 0.9));
        assert!((contact_pair(&w, &t) + contact_pair(&t, &w)).norm() < 1e-15);
        let sigma = contact_pair(&w, &w.right_j());
        assert!((sigma - c(w.norm_sq(), 0.0)).norm() < 1e-13);
        // basis example
        assert!((contact_pair(&basis(0), &basis(1)) - Complex64::ONE).norm() < 1e-15);
    }

    #[test]
    fn frame_from_flag_examples() {
        let f = Flag::new(
            ProjPoint::new(basis(0)).unwrap(),
            ProjPoint::new(basis(2)).unwrap(),
        )
        .unwrap();
        let fr = frame_from_flag(&f).unwrap();
        assert!(fr.e1.approx_eq(&basis(0), 1e-14));
        assert!(fr.e2.approx_eq(&basis(2), 1e-14));

        // scaled representatives give the same frame after the phase fix
        let f = Flag::new(
            ProjPoint::new(basis(0).scale(2.0)).unwrap(),
            ProjPoint::new(basis(2).mul_c(c(0.0, 3.0))).unwrap(),
        )
        .unwrap();
        let fr = frame_from_flag(&f).unwrap();
        assert!(fr.e1.approx_eq(&basis(0), 1e-14));
        assert!(fr.e2.approx_eq(&basis(2), 1e-14));
        assert!(fr.invariant_residual() < 1e-10);
    }

    #[test]
    fn non_orthogonal_lines_are_not_a_flag() {
        let err = Flag::new(
            ProjPoint::new(basis(0)).unwrap(),
            ProjPoint::new(basis(1)).unwrap(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NotAFlag(p) if (p - 1.0).abs() < 1e-12));
    }

    fn fiber_frame(z: Complex64) -> Result<Sp2Frame> {
        let n = (1.0 + z.norm_sqr()).sqrt();
        Ok(Sp2Frame {
            e1: HVec::new(c(1.0 / n, 0.0), z.conj() / n, c(0.0, 0.0), c(0.0, 0.0)),
            e2: HVec::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        })
    }

    #[test]
    fn constant_frame_has_vanishing_blocks() {
        let field = |_z: Complex64| {
            Ok(Sp2Frame {
                e1: basis(0),
                e2: basis(2),
            })
        };
        let mc = maurer_cartan(&field, c(0.1, 0.2), 1e-3).unwrap();
        for form in [mc.rho1, mc.rho2, mc.omega1, mc.omega2, mc.omega3, mc.tau] {
            assert!(form.dz.norm() < 1e-10 && form.dzb.norm() < 1e-10);
        }
        assert!(mc.skew_residual < 1e-10);
        assert!(structure_residual(&field, c(0.1, 0.2), 1e-3).unwrap() < 1e-10);
    }

    #[test]
    fn fiber_frame_moves_only_in_the_fiber_slot() {
        let z = c(0.3, 0.2);
        let mc = maurer_cartan(&fiber_frame, z, 1e-4).unwrap();
        assert!(mc.omega1.dz.norm() + mc.omega1.dzb.norm() < 1e-9);
        assert!(mc.omega2.dz.norm() + mc.omega2.dzb.norm() < 1e-9);
        let fiber_motion = mc.omega3.dz.norm() + mc.omega3.dzb.norm();
        assert!(
            fiber_motion > 1e-2,
            "fiber slot should be nonzero, got {fiber_motion}"
        );
    }

    #[test]
    fn fiber_frame_blocks_match_closed_form() {
        // hand differentiation of e1 = (1, z̄, 0, 0)/sqrt(1+|z|²) with the
        // constant complement gives ρ₁ = (i z̄ dz - i z dz̄)/(2(1+|z|²)),
        // ω₃ = dz/(1+|z|²), and ω₁ = ω₂ = ρ₂ = τ = 0
        let z = c(0.4, -0.3);
        let s = 1.0 + z.norm_sqr();
        let i = Complex64::i();
        let mc = maurer_cartan(&fiber_frame, z, 1e-4).unwrap();
        assert!((mc.rho1.dz - i * z.conj() / (2.0 * s)).norm() < 1e-6);
        assert!((mc.rho1.dzb + i * z / (2.0 * s)).norm() < 1e-6);
        assert!((mc.omega3.dz - c(1.0 / s, 0.0)).norm() < 1e-6);
        assert!(mc.omega3.dzb.norm() < 1e-6);
        assert!(mc.rho2.dz.norm() < 1e-9 && mc.rho2.dzb.norm() < 1e-9);
        assert!(mc.tau.dz.norm() < 1e-9 && mc.tau.dzb.norm() < 1e-9);
        // derived connection entries follow the block formulas exactly
        assert!((mc.kappa33.dz - 2.0 * i * mc.rho1.dz).norm() < 1e-12);
        assert!((mc.kappa11.dz - i * (mc.rho2.dz - mc.rho1.dz)).norm() < 1e-12);
        assert!((mc.kappa12.dz + mc.tau.dzb.conj()).norm() < 1e-12);
        assert!((mc.kappa21.dz - mc.tau.dz).norm() < 1e-12);
        assert!((mc.kappa22.dz + i * (mc.rho1.dz + mc.rho2.dz)).norm() < 1e-12);
    }

    #[test]
    fn skew_residual_is_second_order_in_h() {
        let z = c(0.3, 0.2);
        let r1 = maurer_cartan(&fiber_frame, z, 8e-3).unwrap().skew_residual;
        let r2 = maurer_cartan(&fiber_frame, z, 4e-3).unwrap().skew_residual;
        let ratio = r1 / r2;
        assert!((2.5..6.0).contains(&ratio), "h-halving ratio {ratio}");
    }

    #[test]
    fn structure_residual_decreases_under_halving() {
        let z = c(0.3, 0.2);
        let r1 = structure_residual(&fiber_frame, z, 1e-2).unwrap();
        let r2 = structure_residual(&fiber_frame, z, 5e-3).unwrap();
        let r3 = structure_residual(&fiber_frame, z, 2.5e-3).unwrap();
        assert!(r1 / r2 >= 2.0, "first halving ratio {}", r1 / r2);
        assert!(r2 / r3 >= 2.0, "second halving ratio {}", r2 / r3);
    }

    #[test]
    fn corrupted_frame_is_rejected() {
        let field = |z: Complex64| {
            let f = fiber_frame(z)?;
            Ok(Sp2Frame {
                e1: f.e1,
                e2: f.e2.scale(1.01),
            })
        };
        let err = structure_residual(&field, c(0.3, 0.2), 1e-3).unwrap_err();
        assert!(matches!(err, Error::FrameNotOrthonormal(_)));
    }

    #[test]
    fn step_bounds_are_enforced() {
        assert!(matches!(
            maurer_cartan(&fiber_frame, c(0.0, 0.0), 1e-7),
            Err(Error::StepTooSmall(_))
        ));
        assert!(matches!(
            maurer_cartan(&fiber_frame, c(0.0, 0.0), 0.5),
            Err(Error::StepTooLarge(_))
        ));
    }
}
