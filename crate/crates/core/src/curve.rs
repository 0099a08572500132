//! Parametrized curves in CP³: generators, invariants and classification.
//!
//! A curve is given by a closed expression tree: four explicit rational
//! components, Weierstrass data (f, g) generating a contact integral, a
//! twistor fibre through a base point, or the partner of another curve.
//! Lifts are evaluated as Wirtinger jets; pseudoholomorphicity, the
//! invariants I₁/I₂ and the torsion residual are read off the jet at each
//! sample point. The partner map realizes the correspondence between
//! null-torsion curves and holomorphic contact integrals, with the same
//! closed formula in both directions:
//!
//! ```text
//! w(z) = right_j(horizontal_project(u, ∂z u))
//! ```

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipoly::{common_numerators, BiPoly, BiRat};
use crate::error::{Error, Result};
use crate::grid::{Chart, GridSpec};
use crate::quat::HVec;
use crate::ratfun::RatExpr;
use crate::twistor::{horizontal_project, ProjPoint};
use crate::wjet::{seed_jets, HJet, WJet, MAX_ORDER, POLE_EPS};

/// Floor for the local derivative scale that normalizes residuals; keeps
/// branch points from turning roundoff into large reported residuals.
pub const SCALE_FLOOR: f64 = 1e-6;

/// Below this normalized I₁ density the curve has no usable horizontal
/// tangent and the partner map is undefined.
pub const PARTNER_EPS: f64 = 1e-6;

/// Closed expression tree defining a parametrized curve.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveExpr {
    /// Four rational components of the lift.
    Explicit { components: [RatExpr; 4] },
    /// Contact-integral lift u = (1, f - (g/2)(f'/g'), g, (f'/g')/2).
    Weierstrass { f: RatExpr, g: RatExpr },
    /// Twistor fibre through [base]: u(z) = base + (base·j)·z̄.
    Fiber { base: HVec },
    /// Partner of the inner curve.
    Partner { inner: Box<CurveExpr> },
}

impl CurveExpr {
    pub fn explicit(components: [RatExpr; 4]) -> Self {
        CurveExpr::Explicit { components }
    }

    /// Weierstrass data must be holomorphic (no zb) and g nonconstant.
    pub fn weierstrass(f: RatExpr, g: RatExpr) -> Result<Self> {
        if f.has_zb() || g.has_zb() {
            return Err(Error::NonHolomorphicData);
        }
        let gp = g.deriv_z();
        let mut live = false;
        for probe in [
            Complex64::new(0.37, 0.21),
            Complex64::new(-0.52, 0.68),
            Complex64::new(1.13, -0.44),
            Complex64::new(-0.91, -0.77),
            Complex64::new(0.05, 1.21),
        ] {
            if let Ok(v) = gp.eval_value(probe) {
                if v.norm() > 1e-10 {
                    live = true;
                    break;
                }
            }
        }
        if !live {
            return Err(Error::DegenerateWeierstrass);
        }
        Ok(CurveExpr::Weierstrass { f, g })
    }

    pub fn fiber(base: HVec) -> Result<Self> {
        if base.norm() < 1e-12 {
            return Err(Error::DegeneratePoint);
        }
        Ok(CurveExpr::Fiber { base })
    }

    /// Partner nesting is capped at 2: each level consumes one jet order.
    pub fn partner(inner: CurveExpr) -> Result<Self> {
        if inner.partner_depth() + 1 > 2 {
            return Err(Error::PartnerTooDeep);
        }
        Ok(CurveExpr::Partner {
            inner: Box::new(inner),
        })
    }

    pub fn partner_depth(&self) -> usize {
        match self {
            CurveExpr::Partner { inner } => inner.partner_depth() + 1,
            _ => 0,
        }
    }

    // ----- evaluation -------------------------------------------------

    /// Jet of the lift on the chart at 0.
    pub fn eval_jet(&self, z: Complex64, order: usize) -> Result<HJet> {
        self.eval_jet_chart(Chart::Zero, z, order)
    }

    /// Value of the lift on a chart.
    pub fn eval_point_chart(&self, chart: Chart, zeta: Complex64) -> Result<HVec> {
        Ok(self.eval_jet_chart(chart, zeta, 0)?.value())
    }

    /// Jet of the lift on either chart. On the chart at infinity the
    /// generator kinds use a denominator-cleared polynomial lift (regular
    /// near w = 0, so winding numbers and curvature are gauge-clean);
    /// expressions that defeat canonicalization fall back to composing
    /// with z = 1/w, which pole-skips w = 0.
    pub fn eval_jet_chart(&self, chart: Chart, zeta: Complex64, order: usize) -> Result<HJet> {
        if order > MAX_ORDER {
            return Err(Error::OrderOutOfRange(order));
        }
        if order + self.partner_depth() > MAX_ORDER {
            return Err(Error::OrderExhausted);
        }
        match self {
            CurveExpr::Partner { inner } => {
                let u = inner.eval_jet_chart(chart, zeta, order + 1)?;
                partner_hjet(&u).map_err(|e| e.at_point(zeta))
            }
            _ => match chart {
                Chart::Zero => {
                    let (jz, jzb) = seed_jets(zeta, order)?;
                    let u = self.eval_leaf(&jz, &jzb).map_err(|e| e.at_point(zeta))?;
                    check_lift(u, zeta)
                }
                Chart::Infinity => {
                    if let Some(polys) = self.canonical_inf_lift() {
                        let (jw, jwb) = seed_jets(zeta, order)?;
                        let comps = [
                            polys[0].eval_jet(&jw, &jwb)?,
                            polys[1].eval_jet(&jw, &jwb)?,
                            polys[2].eval_jet(&jw, &jwb)?,
                            polys[3].eval_jet(&jw, &jwb)?,
                        ];
                        check_lift(HJet::new(comps), zeta)
                    } else {
                        let (jw, _) = seed_jets(zeta, order)?;
                        let jz = WJet::constant(Complex64::ONE, order)
                            .div(&jw)
                            .map_err(|e| e.at_point(zeta))?;
                        let jzb = jz.conj();
                        let u = self.eval_leaf(&jz, &jzb).map_err(|e| e.at_point(zeta))?;
                        check_lift(u, zeta)
                    }
                }
            },
        }
    }

    /// Literal lift formulas of the leaf kinds over given seed jets.
    fn eval_leaf(&self, jz: &WJet, jzb: &WJet) -> Result<HJet> {
        let order = jz.order();
        match self {
            CurveExpr::Explicit { components } => Ok(HJet::new([
                components[0].eval_jet(jz, jzb)?,
                components[1].eval_jet(jz, jzb)?,
                components[2].eval_jet(jz, jzb)?,
                components[3].eval_jet(jz, jzb)?,
            ])),
            CurveExpr::Weierstrass { f, g } => {
                let jf = f.eval_jet(jz, jzb)?;
                let jg = g.eval_jet(jz, jzb)?;
                let jfp = f.deriv_z().eval_jet(jz, jzb)?;
                let jgp = g.deriv_z().eval_jet(jz, jzb)?;
                let h = jfp.div(&jgp)?;
                let half = Complex64::new(0.5, 0.0);
                let u2 = jf.sub(&jg.mul(&h).scale(half));
                Ok(HJet::new([
                    WJet::constant(Complex64::ONE, order),
                    u2,
                    jg,
                    h.scale(half),
                ]))
            }
            CurveExpr::Fiber { base } => {
                let bj = base.right_j();
                let comp = |k: usize| {
                    WJet::constant(base.c[k], order).add(&WJet::constant(bj.c[k], order).mul(jzb))
                };
                Ok(HJet::new([comp(0), comp(1), comp(2), comp(3)]))
            }
            CurveExpr::Partner { .. } => unreachable!("partner handled by the chart dispatcher"),
        }
    }

    /// Rational canonicalization of the leaf components, when available.
    fn canonical_components(&self) -> Option<[BiRat; 4]> {
        match self {
            CurveExpr::Explicit { components } => Some([
                BiRat::from_expr(&components[0])?,
                BiRat::from_expr(&components[1])?,
                BiRat::from_expr(&components[2])?,
                BiRat::from_expr(&components[3])?,
            ]),
            CurveExpr::Weierstrass { f, g } => {
                let fr = BiRat::from_expr(f)?;
                let gr = BiRat::from_expr(g)?;
                let fp = fr.deriv_z()?;
                let gp = gr.deriv_z()?;
                let h = fp.div(&gp)?;
                let half = Complex64::new(0.5, 0.0);
                let u2 = fr.sub(&gr.mul(&h)?.scale(half))?;
                Some([
                    BiRat::from_expr(&RatExpr::Const(Complex64::ONE))?,
                    u2,
                    gr,
                    h.scale(half),
                ])
            }
            CurveExpr::Fiber { base } => {
                let bj = base.right_j();
                let comp = |k: usize| {
                    let e = RatExpr::Add(
                        Box::new(RatExpr::Const(base.c[k])),
                        Box::new(RatExpr::Mul(
                            Box::new(RatExpr::Const(bj.c[k])),
                            Box::new(RatExpr::Zb),
                        )),
                    );
                    BiRat::from_expr(&e)
                };
                Some([comp(0)?, comp(1)?, comp(2)?, comp(3)?])
            }
            CurveExpr::Partner { .. } => None,
        }
    }

    /// Polynomial lift on the chart at infinity: common-denominator
    /// numerators, degree-reversed in both variables.
    fn canonical_inf_lift(&self) -> Option<[BiPoly; 4]> {
        let comps = self.canonical_components()?;
        let nums = common_numerators(&comps)?;
        let dz = nums.iter().map(|p| p.deg_z()).max().unwrap();
        let dzb = nums.iter().map(|p| p.deg_zb()).max().unwrap();
        Some([
            nums[0].reverse(dz, dzb),
            nums[1].reverse(dz, dzb),
            nums[2].reverse(dz, dzb),
            nums[3].reverse(dz, dzb),
        ])
    }

    // ----- pointwise residuals and invariants --------------------------

    pub fn ph_residual(&self, z: Complex64) -> Result<PhResidual> {
        self.ph_residual_chart(Chart::Zero, z)
    }

    pub fn ph_residual_chart(&self, chart: Chart, zeta: Complex64) -> Result<PhResidual> {
        let u = self.eval_jet_chart(chart, zeta, 1)?;
        Ok(sample_from_jet(&u).0)
    }

    pub fn invariants(&self, z: Complex64) -> Result<InvariantSample> {
        self.invariants_chart(Chart::Zero, z)
    }

    pub fn invariants_chart(&self, chart: Chart, zeta: Complex64) -> Result<InvariantSample> {
        let u = self.eval_jet_chart(chart, zeta, 1)?;
        Ok(sample_from_jet(&u).1)
    }

    /// Normalized contact pullback |σ(u, ∂z u)|/|u|².
    pub fn contact_residual_chart(&self, chart: Chart, zeta: Complex64) -> Result<f64> {
        let u = self.eval_jet_chart(chart, zeta, 1)?;
        let uv = u.value();
        Ok(uv.sympl(&u.dz_value()).norm() / uv.norm_sq())
    }

    pub fn partner_point(&self, z: Complex64) -> Result<ProjPoint> {
        self.partner_point_chart(Chart::Zero, z)
    }

    /// The other line of the flag at a non-vertical point:
    /// [right_j(horizontal_project(u, ∂z u))].
    pub fn partner_point_chart(&self, chart: Chart, zeta: Complex64) -> Result<ProjPoint> {
        let u = self.eval_jet_chart(chart, zeta, 1)?;
        let uv = u.value();
        let h = horizontal_project(&uv, &u.dz_value());
        if h.norm() < PARTNER_EPS * uv.norm() {
            return Err(Error::NoHorizontalTangent(zeta));
        }
        ProjPoint::new(h.right_j())
    }

    pub fn torsion_residual(&self, z: Complex64) -> Result<f64> {
        self.torsion_residual_chart(Chart::Zero, z)
    }

    /// Scale-invariant torsion residual: holomorphy plus contact
    /// integrality of the partner map,
    /// |P_{w⊥}(∂z̄ w)|/(|w|·s) + |σ(w, ∂z w)|/(|w|²·s).
    pub fn torsion_residual_chart(&self, chart: Chart, zeta: Complex64) -> Result<f64> {
        let u = self.eval_jet_chart(chart, zeta, 2)?;
        let w = partner_hjet(&u).map_err(|e| e.at_point(zeta))?;
        Ok(torsion_from_jet(&w))
    }

    /// Complex scalar whose zeros are the divisor of the chosen invariant
    /// on the chosen chart.
    pub fn divisor_scalar(
        &self,
        invariant: Invariant,
        chart: Chart,
        zeta: Complex64,
    ) -> Result<Complex64> {
        match invariant {
            Invariant::I1 => {
                let u = self.eval_jet_chart(chart, zeta, 1)?;
                let uv = u.value();
                let h = horizontal_project(&uv, &u.dz_value());
                // fixed generic probe; winding on small contours recovers
                // the vanishing order of the vector-valued section
                let probe = HVec::new(
                    Complex64::new(0.31, 0.74),
                    Complex64::new(-0.58, 0.12),
                    Complex64::new(0.77, 0.27),
                    Complex64::new(-0.13, -0.64),
                );
                Ok(probe.herm(&h) / uv.norm())
            }
            Invariant::I2 => {
                let u = self.eval_jet_chart(chart, zeta, 1)?;
                let uv = u.value();
                Ok(uv.right_j().herm(&u.dzb_value()).conj() / uv.norm_sq())
            }
            Invariant::II => {
                let u = self.eval_jet_chart(chart, zeta, 2)?;
                let w = partner_hjet(&u).map_err(|e| e.at_point(zeta))?;
                let wv = w.value();
                // dz̄ coefficient of the pulled-back connection entry τ,
                // conjugated so the winding counts the vanishing order
                Ok(wv.sympl(&w.dzb_value()).conj() / wv.norm_sq())
            }
        }
    }

    /// (1/π)·∂z∂z̄ log|u|², the curvature density of the pullback of the
    /// dual tautological bundle.
    pub fn curvature_density_chart(&self, chart: Chart, zeta: Complex64) -> Result<f64> {
        let u = self.eval_jet_chart(chart, zeta, 2)?;
        let s = u.norm_sq();
        let s00 = s.value();
        let sz = s.deriv(1, 0);
        let szb = s.deriv(0, 1);
        let szzb = s.deriv(1, 1);
        let val = (s00 * szzb - sz * szb) / (s00 * s00);
        Ok(val.re / std::f64::consts::PI)
    }

    // ----- grid sweeps --------------------------------------------------

    /// First-order sweep: max residuals and densities over the grid,
    /// skipping poles. Deterministic reduction in point order.
    pub fn sweep_first_order(&self, grid: &GridSpec) -> Result<SweepStats> {
        grid.validate()?;
        let mut stats = SweepStats::default();
        for chart in &grid.charts {
            let points = grid.points();
            let rows: Vec<Option<(PhResidual, InvariantSample)>> = points
                .par_iter()
                .map(|z| {
                    self.eval_jet_chart(*chart, *z, 1)
                        .ok()
                        .map(|u| sample_from_jet(&u))
                })
                .collect();
            for row in rows {
                match row {
                    Some((ph, inv)) => {
                        stats.evaluated += 1;
                        stats.max_ph = stats.max_ph.max(ph.combined);
                        stats.max_i1 = stats.max_i1.max(inv.i1_density);
                        stats.max_i2 = stats.max_i2.max(inv.i2_density);
                    }
                    None => stats.skipped += 1,
                }
            }
        }
        if stats.evaluated == 0 {
            return Err(Error::EmptyGrid);
        }
        Ok(stats)
    }

    /// Torsion sweep; points where the partner is undefined are skipped.
    pub fn sweep_torsion(&self, grid: &GridSpec) -> Result<TorsionStats> {
        grid.validate()?;
        let mut stats = TorsionStats::default();
        for chart in &grid.charts {
            let points = grid.points();
            let rows: Vec<Option<f64>> = points
                .par_iter()
                .map(|z| self.torsion_residual_chart(*chart, *z).ok())
                .collect();
            for row in rows {
                match row {
                    Some(t) => {
                        stats.evaluated += 1;
                        stats.max_torsion = stats.max_torsion.max(t);
                    }
                    None => stats.skipped += 1,
                }
            }
        }
        Ok(stats)
    }

    /// Classify the curve on a grid: not pseudoholomorphic, else vertical
    /// (I₁ ≡ 0), else horizontal (I₂ ≡ 0), else null-torsion, else generic.
    /// "Identically zero" is judged by the grid maximum of the normalized
    /// density against the tolerance.
    pub fn classify(&self, grid: &GridSpec, tol: f64) -> Result<Classification> {
        let stats = self.sweep_first_order(grid)?;
        let base = Classification {
            verdict: Verdict::Generic,
            max_ph_residual: stats.max_ph,
            max_i1: stats.max_i1,
            max_i2: stats.max_i2,
            max_torsion: None,
            evaluated: stats.evaluated,
            skipped: stats.skipped,
        };
        if stats.max_ph > tol {
            return Ok(Classification {
                verdict: Verdict::NotPseudoholomorphic,
                ..base
            });
        }
        if stats.max_i1 < tol {
            return Ok(Classification {
                verdict: Verdict::Vertical,
                ..base
            });
        }
        if stats.max_i2 < tol {
            return Ok(Classification {
                verdict: Verdict::Horizontal,
                ..base
            });
        }
        let torsion = self.sweep_torsion(grid)?;
        if torsion.evaluated == 0 {
            return Ok(base);
        }
        let verdict = if torsion.max_torsion < tol {
            Verdict::NullTorsion
        } else {
            Verdict::Generic
        };
        Ok(Classification {
            verdict,
            max_torsion: Some(torsion.max_torsion),
            ..base
        })
    }
}

fn check_lift(u: HJet, zeta: Complex64) -> Result<HJet> {
    if u.value().norm() <= POLE_EPS {
        return Err(Error::PoleAtPoint(zeta));
    }
    Ok(u)
}

/// Partner lift as a jet, one order lower than the source:
/// w = right_j(horizontal_project(u, ∂z u)). Fails with
/// `NoHorizontalTangent` where the I₁ density is below `PARTNER_EPS`.
pub fn partner_hjet(u: &HJet) -> Result<HJet> {
    debug_assert!(u.order() >= 1);
    let n = u.order() - 1;
    let du = u.shift_dz();
    let ut = u.truncate(n);
    let h = ut.horizontal_project(&du)?;
    if h.value().norm() < PARTNER_EPS * ut.value().norm() {
        return Err(Error::NoHorizontalTangent(Complex64::new(
            f64::NAN,
            f64::NAN,
        )));
    }
    Ok(h.right_j())
}

/// Pseudoholomorphicity residuals at a point, normalized by the local
/// derivative scale; both vanish exactly on pseudoholomorphic curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhResidual {
    /// |horizontal_project(u, ∂z̄ u)| / (|u|·s)
    pub r_horizontal: f64,
    /// |⟨u·j, ∂z u⟩| / (|u|²·s) — the contact pullback residual
    pub r_vertical: f64,
    pub combined: f64,
}

/// First-order invariant data at a point.
#[derive(Debug, Clone, Copy)]
pub struct InvariantSample {
    /// h(z) = horizontal_project(u, ∂z u), the I₁ direction
    pub i1_vector: HVec,
    /// |h|/|u|
    pub i1_density: f64,
    /// a₃(z) = conj(⟨u·j, ∂z̄ u⟩)/|u|², the I₂ coefficient
    pub i2_scalar: Complex64,
    pub i2_density: f64,
}

fn sample_from_jet(u: &HJet) -> (PhResidual, InvariantSample) {
    let uv = u.value();
    let du = u.dz_value();
    let dub = u.dzb_value();
    let nsq = uv.norm_sq();
    let n = nsq.sqrt();
    let uj = uv.right_j();

    let i1_vector = horizontal_project(&uv, &du);
    let i1_density = i1_vector.norm() / n;
    let i2_scalar = uj.herm(&dub).conj() / nsq;
    let i2_density = i2_scalar.norm();

    let s = (i1_density + i2_density).max(SCALE_FLOOR);
    let r_horizontal = horizontal_project(&uv, &dub).norm() / (n * s);
    let r_vertical = uj.herm(&du).norm() / (nsq * s);
    (
        PhResidual {
            r_horizontal,
            r_vertical,
            combined: r_horizontal + r_vertical,
        },
        InvariantSample {
            i1_vector,
            i1_density,
            i2_scalar,
            i2_density,
        },
    )
}

fn torsion_from_jet(w: &HJet) -> f64 {
    let wv = w.value();
    let dw = w.dz_value();
    let dwb = w.dzb_value();
    let nsq = wv.norm_sq();
    let n = nsq.sqrt();
    // Hermitian projection away from w alone: [w] is a holomorphic map
    // iff this kills ∂z̄ w entirely
    let coeff = wv.herm(&dwb) / nsq;
    let proj = dwb - wv.mul_c(coeff);
    let s = ((dw.norm() + dwb.norm()) / n).max(SCALE_FLOOR);
    proj.norm() / (n * s) + wv.sympl(&dw).norm() / (nsq * s)
}

/// Invariant selector for divisor bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Invariant {
    I1,
    I2,
    II,
}

/// Classification verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Vertical,
    Horizontal,
    NullTorsion,
    Generic,
    NotPseudoholomorphic,
}

/// Grid classification with its witness statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub max_ph_residual: f64,
    pub max_i1: f64,
    pub max_i2: f64,
    pub max_torsion: Option<f64>,
    pub evaluated: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SweepStats {
    pub max_ph: f64,
    pub max_i1: f64,
    pub max_i2: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TorsionStats {
    pub max_torsion: f64,
    pub evaluated: usize,
    pub skipped: usize,
}

// ----- JSON form -------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum CurveJson {
    Explicit { components: [String; 4] },
    Weierstrass { f: String, g: String },
    Fiber { base: [[f64; 2]; 4] },
    Partner { inner: Box<CurveJson> },
}

impl CurveJson {
    fn from_expr(c: &CurveExpr) -> Self {
        match c {
            CurveExpr::Explicit { components } => CurveJson::Explicit {
                components: [
                    components[0].to_string(),
                    components[1].to_string(),
                    components[2].to_string(),
                    components[3].to_string(),
                ],
            },
            CurveExpr::Weierstrass { f, g } => CurveJson::Weierstrass {
                f: f.to_string(),
                g: g.to_string(),
            },
            CurveExpr::Fiber { base } => CurveJson::Fiber {
                base: [
                    [base.c[0].re, base.c[0].im],
                    [base.c[1].re, base.c[1].im],
                    [base.c[2].re, base.c[2].im],
                    [base.c[3].re, base.c[3].im],
                ],
            },
            CurveExpr::Partner { inner } => CurveJson::Partner {
                inner: Box::new(CurveJson::from_expr(inner)),
            },
        }
    }

    fn into_expr(self) -> Result<CurveExpr> {
        match self {
            CurveJson::Explicit { components } => {
                let parse = |s: &str| RatExpr::parse(s).map_err(Error::from);
                Ok(CurveExpr::explicit([
                    parse(&components[0])?,
                    parse(&components[1])?,
                    parse(&components[2])?,
                    parse(&components[3])?,
                ]))
            }
            CurveJson::Weierstrass { f, g } => {
                CurveExpr::weierstrass(RatExpr::parse(&f)?, RatExpr::parse(&g)?)
            }
            CurveJson::Fiber { base } => CurveExpr::fiber(HVec::new(
                Complex64::new(base[0][0], base[0][1]),
                Complex64::new(base[1][0], base[1][1]),
                Complex64::new(base[2][0], base[2][1]),
                Complex64::new(base[3][0], base[3][1]),
            )),
            CurveJson::Partner { inner } => CurveExpr::partner(inner.into_expr()?),
        }
    }
}

impl Serialize for CurveExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurveJson::from_expr(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for CurveExpr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CurveJson::deserialize(d)?;
        raw.into_expr().map_err(serde::de::Error::custom)
    }
}
