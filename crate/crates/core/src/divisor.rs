//! Zero localization and order counting for invariant densities, and the
//! numeric Chern degree of the pullback of the dual tautological bundle.
//!
//! Zeros are found as grid minima refined by damped Newton on |f|², then
//! certified and ordered by the argument principle on a small contour.
//! Divisor totals over the two charts use the regular chart-at-infinity
//! lift, so winding numbers count honest vanishing orders.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::CurveExpr;
use crate::error::{Error, Result};
use crate::grid::{Chart, GridSpec};

/// Located zero of an invariant with its winding-number order.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroRecord {
    pub chart: Chart,
    #[serde(rename = "z", serialize_with = "ser_complex")]
    pub location: Complex64,
    pub order: i32,
    pub residual: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    (z.re, z.im).serialize(s)
}

const MAX_CONTOUR_SAMPLES: usize = 65_536;
const CONTOUR_MIN_MODULUS: f64 = 1e-9;

/// Winding number of f around a circle by summed phase increments.
/// Each increment must stay below π; the contour is refined (doubling n)
/// until that holds or `InsufficientSamples`. `ZeroOnContour` when the
/// minimum modulus on the circle drops to 1e-9.
pub fn winding_order<F>(f: &F, center: Complex64, radius: f64, n: usize) -> Result<i32>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut n = n.max(64);
    loop {
        let mut values = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
            let z = center + Complex64::from_polar(radius, theta);
            values.push(f(z)?);
        }
        let min_mod = values
            .iter()
            .map(|v| v.norm())
            .fold(f64::INFINITY, f64::min);
        if min_mod <= CONTOUR_MIN_MODULUS {
            return Err(Error::ZeroOnContour(min_mod));
        }
        let mut total = 0.0;
        let mut ok = true;
        for pair in values.windows(2) {
            let inc = (pair[1] / pair[0]).arg();
            if inc.abs() >= std::f64::consts::PI * 0.999 {
                ok = false;
                break;
            }
            total += inc;
        }
        if ok {
            return Ok((total / (2.0 * std::f64::consts::PI)).round() as i32);
        }
        if n >= MAX_CONTOUR_SAMPLES {
            return Err(Error::InsufficientSamples);
        }
        n *= 2;
    }
}

/// Grid minima of |f| below `tol`, refined by damped Newton on |f|²,
/// ordered by winding number at half the distance to the nearest other
/// zero (capped at 0.25), deduplicated across the chart overlap.
pub fn locate_zeros<F>(f: &F, grid: &GridSpec, tol: f64) -> Result<Vec<ZeroRecord>>
where
    F: Fn(Chart, Complex64) -> Result<Complex64> + Sync,
{
    grid.validate()?;
    let mut zeros: Vec<(Chart, Complex64, f64)> = Vec::new();
    for chart in &grid.charts {
        let points = grid.points();
        let n = grid.samples;
        let values: Vec<Option<f64>> = points
            .par_iter()
            .map(|z| f(*chart, *z).ok().map(|v| v.norm()))
            .collect();

        // identically-zero screen: a divisor of the zero section is undefined
        let finite: Vec<f64> = values.iter().flatten().copied().collect();
        if finite.is_empty() {
            continue;
        }
        let max_val = finite.iter().copied().fold(0.0, f64::max);
        let tiny = finite.iter().filter(|v| **v <= 1e-12).count();
        if tiny * 2 > finite.len() {
            return Err(Error::IdenticallyZero);
        }
        let accept = 1e-8 * (1.0 + max_val);

        for (idx, val) in values.iter().enumerate() {
            let Some(v) = val else { continue };
            if *v >= tol {
                continue;
            }
            let (row, col) = (idx / n, idx % n);
            let mut is_min = true;
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (r2, c2) = (row as i64 + dr, col as i64 + dc);
                    if r2 < 0 || c2 < 0 || r2 >= n as i64 || c2 >= n as i64 {
                        continue;
                    }
                    if let Some(nv) = values[(r2 as usize) * n + c2 as usize] {
                        if nv < *v {
                            is_min = false;
                        }
                    }
                }
            }
            if !is_min {
                continue;
            }
            let fx = |z: Complex64| f(*chart, z);
            if let Some(refined) = newton_refine(&fx, points[idx]) {
                if let Ok(res) = fx(refined) {
                    if res.norm() <= accept {
                        zeros.push((*chart, refined, res.norm()));
                    }
                }
            }
        }
    }

    // merge refinements of the same zero (Newton jitter)
    let mut clusters: Vec<(Chart, Complex64, f64)> = Vec::new();
    for (chart, z, res) in zeros {
        if let Some(existing) = clusters
            .iter_mut()
            .find(|(c2, z2, _)| *c2 == chart && (*z2 - z).norm() < 1e-4)
        {
            if res < existing.2 {
                existing.1 = z;
                existing.2 = res;
            }
        } else {
            clusters.push((chart, z, res));
        }
    }

    // drop chart-overlap duplicates: w = 1/z names the same zero
    let mut keep = vec![true; clusters.len()];
    for i in 0..clusters.len() {
        for k in (i + 1)..clusters.len() {
            if !keep[i] || !keep[k] || clusters[i].0 == clusters[k].0 {
                continue;
            }
            let (zi, zk) = (clusters[i].1, clusters[k].1);
            if zi.norm() < 1e-6 || zk.norm() < 1e-6 {
                continue;
            }
            if (1.0 / zi - zk).norm() < 1e-3 {
                // prefer the chart where the zero is closer to the origin
                if zi.norm() <= zk.norm() {
                    keep[k] = false;
                } else {
                    keep[i] = false;
                }
            }
        }
    }
    let clusters: Vec<_> = clusters
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect();

    let mut records = Vec::with_capacity(clusters.len());
    for (i, (chart, z, res)) in clusters.iter().enumerate() {
        let mut radius: f64 = 0.25;
        for (k, (chart2, z2, _)) in clusters.iter().enumerate() {
            if i != k && chart == chart2 {
                radius = radius.min((z - z2).norm() / 2.0);
            }
        }
        let fx = |zz: Complex64| f(*chart, zz);
        let mut order = None;
        let mut r = radius;
        for _ in 0..4 {
            match winding_order(&fx, *z, r, 256) {
                Ok(o) => {
                    order = Some(o);
                    break;
                }
                Err(Error::ZeroOnContour(_)) | Err(Error::PoleAtPoint(_)) => r /= 2.0,
                Err(e) => return Err(e),
            }
        }
        let order = order.ok_or(Error::InsufficientSamples)?;
        records.push(ZeroRecord {
            chart: *chart,
            location: *z,
            order,
            residual: *res,
        });
    }
    Ok(records)
}

fn newton_refine<F>(f: &F, start: Complex64) -> Option<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let h = 1e-6;
    let gval = |z: Complex64| -> Option<f64> { f(z).ok().map(|v| v.norm_sqr()) };
    let mut z = start;
    let mut g0 = gval(z)?;
    for _ in 0..60 {
        // FD gradient and Hessian of g = |f|²
        let gpx = gval(z + Complex64::new(h, 0.0))?;
        let gmx = gval(z - Complex64::new(h, 0.0))?;
        let gpy = gval(z + Complex64::new(0.0, h))?;
        let gmy = gval(z - Complex64::new(0.0, h))?;
        let gxy_pp = gval(z + Complex64::new(h, h))?;
        let gxy_pm = gval(z + Complex64::new(h, -h))?;
        let gxy_mp = gval(z + Complex64::new(-h, h))?;
        let gxy_mm = gval(z + Complex64::new(-h, -h))?;

        let gx = (gpx - gmx) / (2.0 * h);
        let gy = (gpy - gmy) / (2.0 * h);
        let gxx = (gpx - 2.0 * g0 + gmx) / (h * h);
        let gyy = (gpy - 2.0 * g0 + gmy) / (h * h);
        let gxy = (gxy_pp - gxy_pm - gxy_mp + gxy_mm) / (4.0 * h * h);

        let det = gxx * gyy - gxy * gxy;
        let (mut dx, mut dy) = if det.abs() > 1e-14 && gxx + gyy > 0.0 {
            (-(gyy * gx - gxy * gy) / det, -(gxx * gy - gxy * gx) / det)
        } else {
            let scale = (gxx.abs() + gyy.abs()).max(1e-12);
            (-gx / scale, -gy / scale)
        };
        // damping: halve until |f|² decreases
        let mut improved = false;
        for _ in 0..20 {
            let cand = z + Complex64::new(dx, dy);
            if let Some(g1) = gval(cand) {
                if g1 < g0 {
                    z = cand;
                    g0 = g1;
                    improved = true;
                    break;
                }
            }
            dx /= 2.0;
            dy /= 2.0;
        }
        let step = (dx * dx + dy * dy).sqrt();
        if !improved || step < 1e-12 {
            break;
        }
    }
    Some(z)
}

/// Bundle selector for degree quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bundle {
    /// Dual ε* of the tautological bundle; deg(X*ε) = -degree.
    TautologicalDual,
}

/// Degree of the pullback of ε* along the curve: (1/π)·∫ ∂z∂z̄ log|u|²,
/// integrated in polar coordinates over |ζ| ≤ 1 on each chart (the overlap
/// is partitioned at |z| = 1). Returns the nearest integer and the drift
/// |raw - integer|; errors with `QuadratureDrift` when drift > 0.1.
pub fn chern_degree(curve: &CurveExpr, bundle: Bundle, grid: &GridSpec) -> Result<(i64, f64)> {
    let Bundle::TautologicalDual = bundle;
    if !(grid.charts.contains(&Chart::Zero) && grid.charts.contains(&Chart::Infinity)) {
        return Err(Error::BadConfig(
            "degree quadrature needs both charts".into(),
        ));
    }
    let n_r = grid.samples.max(48) | 1; // odd number of radial nodes for Simpson
    let n_theta = 4 * n_r;
    let mut total = 0.0;
    for chart in [Chart::Zero, Chart::Infinity] {
        let ring: Vec<f64> = (0..n_r)
            .into_par_iter()
            .map(|ri| {
                let r = ri as f64 / (n_r - 1) as f64;
                let mut acc = 0.0;
                let mut used = 0usize;
                for ti in 0..n_theta {
                    let theta = 2.0 * std::f64::consts::PI * ti as f64 / n_theta as f64;
                    let z = Complex64::from_polar(r, theta);
                    if let Ok(k) = curve.curvature_density_chart(chart, z) {
                        acc += k;
                        used += 1;
                    }
                }
                if used == 0 {
                    0.0
                } else {
                    // mean over the used angular nodes times the full angle
                    acc / used as f64 * 2.0 * std::f64::consts::PI * r
                }
            })
            .collect();
        // composite Simpson over r ∈ [0, 1]
        let h = 1.0 / (n_r - 1) as f64;
        let mut integral = ring[0] + ring[n_r - 1];
        for (k, v) in ring.iter().enumerate().skip(1).take(n_r - 2) {
            integral += if k % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        total += integral * h / 3.0;
    }
    let degree = total.round() as i64;
    let drift = (total - degree as f64).abs();
    if drift > 0.1 {
        return Err(Error::QuadratureDrift(drift));
    }
    Ok((degree, drift))
}

/// Divisor report for one invariant of a curve.
#[derive(Debug, Clone, Serialize)]
pub struct DivisorReport {
    pub invariant: crate::curve::Invariant,
    pub zeros: Vec<ZeroRecord>,
    pub total_order: i64,
}

/// Locate the divisor of an invariant of a curve over the grid charts.
pub fn divisor_report(
    curve: &CurveExpr,
    invariant: crate::curve::Invariant,
    grid: &GridSpec,
    tol: f64,
) -> Result<DivisorReport> {
    let f = |chart: Chart, z: Complex64| curve.divisor_scalar(invariant, chart, z);
    let mut zeros = locate_zeros(&f, grid, tol)?;
    if invariant == crate::curve::Invariant::I1 {
        // the I1 scalar pairs the section against a fixed probe; a point
        // where only the probe component vanishes is not a zero of I1
        zeros.retain(|z| {
            curve
                .invariants_chart(z.chart, z.location)
                .map(|inv| inv.i1_density < 1e-4)
                .unwrap_or(false)
        });
    }
    let total_order = zeros.iter().map(|z| z.order as i64).sum();
    Ok(DivisorReport {
        invariant,
        zeros,
        total_order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Invariant;
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

    #[test]
    fn winding_of_powers_and_conjugates() {
        let sq = |z: Complex64| Ok(z * z);
        assert_eq!(winding_order(&sq, c(0.0, 0.0), 0.5, 64).unwrap(), 2);
        let cj = |z: Complex64| Ok(z.conj());
        assert_eq!(winding_order(&cj, c(0.0, 0.0), 0.5, 64).unwrap(), -1);
    }

    #[test]
    fn winding_rejects_zero_on_contour() {
        let f = |z: Complex64| Ok(z - c(0.5, 0.0));
        assert!(matches!(
            winding_order(&f, c(0.0, 0.0), 0.5, 64),
            Err(Error::ZeroOnContour(_))
        ));
    }

    #[test]
    fn phase_jump_exhausts_contour_refinement() {
        // a genuine phase discontinuity of π cannot be resolved by sampling
        let f = |z: Complex64| {
            Ok(if z.im >= 0.0 {
                Complex64::ONE
            } else {
                -Complex64::ONE
            })
        };
        assert!(matches!(
            winding_order(&f, c(0.0, 0.0), 0.5, 64),
            Err(Error::InsufficientSamples)
        ));
    }

    #[test]
    fn winding_of_vertical_family_invariant() {
        let vert = explicit(["1", "zb^2", "0", "0"]);
        let f = |z: Complex64| vert.divisor_scalar(Invariant::I2, Chart::Zero, z);
        assert_eq!(winding_order(&f, c(0.0, 0.0), 0.3, 128).unwrap(), 1);
    }

    #[test]
    fn locate_zeros_of_shifted_square() {
        let f = |_: Chart, z: Complex64| Ok(z * z - c(0.25, 0.0));
        let grid = GridSpec {
            charts: vec![Chart::Zero],
            ..GridSpec::default()
        };
        let zeros = locate_zeros(&f, &grid, 0.2).unwrap();
        assert_eq!(zeros.len(), 2);
        let mut locs: Vec<f64> = zeros.iter().map(|z| z.location.re).collect();
        locs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((locs[0] + 0.5).abs() < 1e-7 && (locs[1] - 0.5).abs() < 1e-7);
        assert!(zeros.iter().all(|z| z.order == 1));
    }

    #[test]
    fn vertical_family_divisor_totals() {
        // d = 1: the fibre; I₂ never vanishes
        let fib = CurveExpr::fiber(HVec::new(
            c(1.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
        ))
        .unwrap();
        let rep = divisor_report(&fib, Invariant::I2, &GridSpec::default(), 0.1).unwrap();
        assert!(rep.zeros.is_empty(), "unexpected zeros: {:?}", rep.zeros);
        assert_eq!(rep.total_order, 0);

        // d = 2: one simple zero on each chart
        let vert = explicit(["1", "zb^2", "0", "0"]);
        let rep = divisor_report(&vert, Invariant::I2, &GridSpec::default(), 0.1).unwrap();
        assert_eq!(rep.zeros.len(), 2, "zeros: {:?}", rep.zeros);
        for z in &rep.zeros {
            assert!(z.location.norm() < 1e-7);
            assert_eq!(z.order, 1);
        }
        assert_eq!(rep.total_order, 2);
        let charts: Vec<Chart> = rep.zeros.iter().map(|z| z.chart).collect();
        assert!(charts.contains(&Chart::Zero) && charts.contains(&Chart::Infinity));
    }

    #[test]
    fn identically_zero_invariant_is_rejected() {
        // I₂ of a horizontal curve vanishes identically
        let w =
            CurveExpr::weierstrass(parse_expr("z^3").unwrap(), parse_expr("z").unwrap()).unwrap();
        let err = divisor_report(&w, Invariant::I2, &GridSpec::default(), 0.1).unwrap_err();
        assert_eq!(err, Error::IdenticallyZero);
    }

    #[test]
    fn chern_degree_examples() {
        let grid = GridSpec::default();
        let line = explicit(["1", "z", "0", "0"]);
        let (deg, drift) = chern_degree(&line, Bundle::TautologicalDual, &grid).unwrap();
        assert_eq!(deg, 1);
        assert!(drift < 0.02, "drift {drift}");

        let vert = explicit(["1", "zb^2", "0", "0"]);
        let (deg, drift) = chern_degree(&vert, Bundle::TautologicalDual, &grid).unwrap();
        assert_eq!(deg, 2);
        assert!(drift < 0.05, "drift {drift}");

        let konst = explicit(["1", "1", "0", "0"]);
        let (deg, drift) = chern_degree(&konst, Bundle::TautologicalDual, &grid).unwrap();
        assert_eq!(deg, 0);
        assert!(drift < 0.01, "drift {drift}");
    }

    #[test]
    fn winding_orders_stable_under_radius_perturbation() {
        let vert = explicit(["1", "zb^2", "0", "0"]);
        let f = |z: Complex64| vert.divisor_scalar(Invariant::I2, Chart::Zero, z);
        for radius in [0.24, 0.3, 0.36] {
            assert_eq!(winding_order(&f, c(0.0, 0.0), radius, 128).unwrap(), 1);
        }
    }
}
