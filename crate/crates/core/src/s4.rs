//! Projection of curves to S⁴ through the twistor map, with conformality
//! and harmonicity (minimality) residuals, and the antipodality check
//! tying a curve to its partner.
//!
//! Minimality is tested as the harmonic-map equation for conformal maps
//! into the unit sphere, Δs + |∇s|²·s = 0, by finite differences: one
//! formula, second-order stencil, no frame bundle needed. Branch points of
//! the projection are excluded by threshold, not resolved.

use num_complex::Complex64;
use serde::Serialize;

use crate::curve::CurveExpr;
use crate::error::{Error, Result};
use crate::grid::Chart;
use crate::twistor::{s4_coords, twistor_project, ProjPoint, S4Point};

/// Below this value of E + G the surface point is degenerate (the image
/// has collapsed; fibres project to points).
pub const DEGENERACY_FLOOR: f64 = 1e-14;

/// Conformality required before harmonicity is meaningful.
pub const CONFORMAL_GATE: f64 = 1e-3;

/// Surface sample: position, first derivatives and first fundamental form.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSample {
    pub z: Complex64,
    pub point: S4Point,
    /// ∂x s and ∂y s
    pub du: [[f64; 5]; 2],
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

fn s4_of(curve: &CurveExpr, chart: Chart, z: Complex64) -> Result<S4Point> {
    let v = curve.eval_point_chart(chart, z)?;
    Ok(s4_coords(&twistor_project(&ProjPoint::new(v)?)))
}

/// Five-point stencil of the projected surface around z.
struct Stencil {
    center: S4Point,
    px: S4Point,
    mx: S4Point,
    py: S4Point,
    my: S4Point,
}

fn stencil(curve: &CurveExpr, chart: Chart, z: Complex64, h: f64) -> Result<Stencil> {
    Ok(Stencil {
        center: s4_of(curve, chart, z)?,
        px: s4_of(curve, chart, z + Complex64::new(h, 0.0))?,
        mx: s4_of(curve, chart, z - Complex64::new(h, 0.0))?,
        py: s4_of(curve, chart, z + Complex64::new(0.0, h))?,
        my: s4_of(curve, chart, z - Complex64::new(0.0, h))?,
    })
}

fn sample_from_stencil(z: Complex64, st: &Stencil, h: f64) -> SurfaceSample {
    let diff = |p: &S4Point, m: &S4Point| {
        let mut out = [0.0; 5];
        for (o, (a, b)) in out.iter_mut().zip(p.x.iter().zip(m.x.iter())) {
            *o = (a - b) / (2.0 * h);
        }
        out
    };
    let du = [diff(&st.px, &st.mx), diff(&st.py, &st.my)];
    let dot = |a: &[f64; 5], b: &[f64; 5]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    SurfaceSample {
        z,
        point: st.center,
        du,
        e: dot(&du[0], &du[0]),
        f: dot(&du[0], &du[1]),
        g: dot(&du[1], &du[1]),
    }
}

pub fn surface_point(curve: &CurveExpr, z: Complex64, h: f64) -> Result<SurfaceSample> {
    surface_point_chart(curve, Chart::Zero, z, h)
}

/// Project and differentiate by central differences with step h.
pub fn surface_point_chart(
    curve: &CurveExpr,
    chart: Chart,
    z: Complex64,
    h: f64,
) -> Result<SurfaceSample> {
    let st = stencil(curve, chart, z, h)?;
    Ok(sample_from_stencil(z, &st, h))
}

/// (|E - G| + 2|F|)/(E + G); `DegeneratePoint` below the floor.
pub fn conformal_residual(sample: &SurfaceSample) -> Result<f64> {
    let denom = sample.e + sample.g;
    if denom < DEGENERACY_FLOOR {
        return Err(Error::DegeneratePoint);
    }
    Ok(((sample.e - sample.g).abs() + 2.0 * sample.f.abs()) / denom)
}

pub fn harmonic_residual(curve: &CurveExpr, z: Complex64, h: f64) -> Result<f64> {
    harmonic_residual_chart(curve, Chart::Zero, z, h)
}

/// ‖Δs + (|∂x s|² + |∂y s|²)·s‖ / (|∂x s|² + |∂y s|²) with the five-point
/// Laplacian. Harmonicity is equivalent to minimality only for conformal
/// maps, so a failing conformality gate aborts with `NotConformal`.
pub fn harmonic_residual_chart(
    curve: &CurveExpr,
    chart: Chart,
    z: Complex64,
    h: f64,
) -> Result<f64> {
    let st = stencil(curve, chart, z, h)?;
    let sample = sample_from_stencil(z, &st, h);
    let conf = conformal_residual(&sample)?;
    if conf >= CONFORMAL_GATE {
        return Err(Error::NotConformal(conf));
    }
    let energy = sample.e + sample.g;
    let mut defect = 0.0;
    for k in 0..5 {
        let lap =
            (st.px.x[k] + st.mx.x[k] + st.py.x[k] + st.my.x[k] - 4.0 * st.center.x[k]) / (h * h);
        let r = lap + energy * st.center.x[k];
        defect += r * r;
    }
    Ok(defect.sqrt() / energy)
}

pub fn antipodal_check(curve: &CurveExpr, z: Complex64) -> Result<f64> {
    antipodal_check_chart(curve, Chart::Zero, z)
}

/// ‖s4(T(X(z))) + s4(T(partner(X)(z)))‖ — near zero when the flag
/// invariant holds, since quaternionically orthogonal lines project to
/// antipodal points in this chart.
pub fn antipodal_check_chart(curve: &CurveExpr, chart: Chart, z: Complex64) -> Result<f64> {
    let s1 = s4_of(curve, chart, z)?;
    let partner = curve.partner_point_chart(chart, z)?;
    let s2 = s4_coords(&twistor_project(&partner));
    Ok(s1.antipodal_defect(&s2))
}

/// One row of the exported surface mesh.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SurfaceRecord {
    pub z_re: f64,
    pub z_im: f64,
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub conformal_residual: f64,
    pub harmonic_residual: f64,
}

/// Full per-point record for mesh export.
pub fn surface_record(
    curve: &CurveExpr,
    chart: Chart,
    z: Complex64,
    h: f64,
) -> Result<SurfaceRecord> {
    let sample = surface_point_chart(curve, chart, z, h)?;
    let conformal = conformal_residual(&sample)?;
    let harmonic = harmonic_residual_chart(curve, chart, z, h)?;
    Ok(SurfaceRecord {
        z_re: z.re,
        z_im: z.im,
        s0: sample.point.x[0],
        s1: sample.point.x[1],
        s2: sample.point.x[2],
        s3: sample.point.x[3],
        s4: sample.point.x[4],
        e: sample.e,
        f: sample.f,
        g: sample.g,
        conformal_residual: conformal,
        harmonic_residual: harmonic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::HVec;
    use crate::ratfun::parse_expr;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn explicit(comps: [&str; 4]) -> CurveExpr {
        CurveExpr::explicit([
            parse_expr(comps[0]).unwrap(),
            parse_expr(comps[1]).unwrap(),
            parse_expr(comps[2]).unwrap(),
            parse_expr(comps[3]).unwrap(),
        ])
    }

    fn weier(f: &str, g: &str) -> CurveExpr {
        CurveExpr::weierstrass(parse_expr(f).unwrap(), parse_expr(g).unwrap()).unwrap()
    }

    #[test]
    fn round_sphere_sample_at_origin() {
        let curve = explicit(["1", "0", "z", "0"]);
        let s = surface_point(&curve, c(0.0, 0.0), 1e-3).unwrap();
        assert!(
            s.point.dist(&S4Point {
                x: [1.0, 0.0, 0.0, 0.0, 0.0]
            }) < 1e-12
        );
        assert!((s.point.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fiber_projects_to_a_point() {
        let fib = CurveExpr::fiber(HVec::new(
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ))
        .unwrap();
        let s = surface_point(&fib, c(0.4, -0.7), 1e-3).unwrap();
        assert!(
            s.point.dist(&S4Point {
                x: [1.0, 0.0, 0.0, 0.0, 0.0]
            }) < 1e-12
        );
        assert!(s.e + s.g < 1e-20);
        assert!(matches!(
            conformal_residual(&s),
            Err(Error::DegeneratePoint)
        ));
    }

    #[test]
    fn projections_stay_on_the_unit_sphere() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let w = weier("z^3", "z");
        for _ in 0..100 {
            let z = c(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
            let s = surface_point(&w, z, 1e-3).unwrap();
            assert!((s.point.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn round_sphere_is_conformal_and_harmonic() {
        let curve = explicit(["1", "0", "z", "0"]);
        let s = surface_point(&curve, c(0.4, 0.2), 1e-3).unwrap();
        assert!(conformal_residual(&s).unwrap() < 1e-6);
        for z in [
            c(0.0, 0.0),
            c(0.4, 0.2),
            c(-0.9, 0.3),
            c(1.2, -0.5),
            c(-0.1, -1.3),
        ] {
            let r = harmonic_residual(&curve, z, 1e-3).unwrap();
            assert!(r < 1e-4, "harmonic residual {r} at {z}");
        }
    }

    #[test]
    fn harmonic_residual_is_second_order_in_h() {
        let curve = explicit(["1", "0", "z", "0"]);
        let z = c(0.5, 0.3);
        let r1 = harmonic_residual(&curve, z, 4e-3).unwrap();
        let r2 = harmonic_residual(&curve, z, 2e-3).unwrap();
        let ratio = r1 / r2;
        assert!((2.5..6.0).contains(&ratio), "h-halving ratio {ratio}");
    }

    #[test]
    fn weierstrass_projection_is_minimal() {
        let w = weier("z^3", "z");
        let mut max_conf: f64 = 0.0;
        let mut max_harm: f64 = 0.0;
        for zr in -10..=10 {
            for zi in -10..=10 {
                let z = c(zr as f64 * 0.15, zi as f64 * 0.15);
                let inv = w.invariants(z).unwrap();
                if inv.i1_density < 1e-3 {
                    continue; // branch point of the projection
                }
                let s = surface_point(&w, z, 3e-4).unwrap();
                max_conf = max_conf.max(conformal_residual(&s).unwrap());
                max_harm = max_harm.max(harmonic_residual(&w, z, 3e-4).unwrap());
            }
        }
        assert!(max_conf < 1e-5, "conformal {max_conf}");
        assert!(max_harm < 1e-3, "harmonic {max_harm}");
    }

    #[test]
    fn generic_holomorphic_curve_is_not_minimal() {
        let curve = explicit(["1", "z", "z^2", "0"]);
        let mut worst: f64 = 0.0;
        for zr in -5..=5 {
            for zi in -5..=5 {
                let z = c(zr as f64 * 0.3, zi as f64 * 0.3);
                let st = stencil(&curve, Chart::Zero, z, 1e-3).unwrap();
                let sample = sample_from_stencil(z, &st, 1e-3);
                let energy = sample.e + sample.g;
                if energy < 1e-6 {
                    continue;
                }
                let mut defect = 0.0;
                for k in 0..5 {
                    let lap = (st.px.x[k] + st.mx.x[k] + st.py.x[k] + st.my.x[k]
                        - 4.0 * st.center.x[k])
                        / (1e-3 * 1e-3);
                    let r = lap + energy * st.center.x[k];
                    defect += r * r;
                }
                worst = worst.max(defect.sqrt() / energy);
            }
        }
        assert!(
            worst > 0.1,
            "harmonic defect should be visible, got {worst}"
        );
    }

    #[test]
    fn antipodality_of_partner_projections() {
        let w3 = CurveExpr::partner(weier("z^3", "z")).unwrap();
        assert!(antipodal_check(&w3, c(0.3, 0.1)).unwrap() < 1e-9);
        let w2 = weier("z^2", "z");
        assert!(antipodal_check(&w2, c(1.0, 0.0)).unwrap() < 1e-9);
        let fib = CurveExpr::fiber(HVec::new(
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ))
        .unwrap();
        assert!(matches!(
            antipodal_check(&fib, c(0.2, 0.2)),
            Err(Error::NoHorizontalTangent(_))
        ));
    }
}
