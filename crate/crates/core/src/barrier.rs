//! Supersolution barriers vanishing on the parabolic boundary.
//!
//! The pair is the classical construction: w solves the heat problem with
//! unit load and zero boundary data, v is a cosh bump positive on any
//! enclosing cylinder, and psi is their smooth minimum scaled so that the
//! discrete operator applied to psi stays at least 1 across the domain.
//! Verification applies the exact solver stencil to the candidate field, so
//! boundary taps read the field's true (small, positive) values rather than
//! the solver's hard zeros.

use serde::Serialize;

use crate::assemble::{apply_operator, Load};
use crate::coeffs::{CoefficientSet, Form, OperatorSource};
use crate::dirichlet::{solve_dirichlet, Solution};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mask::{BoundaryClass, Classified, GridField};

/// Smooth minimum with deviation in [0, eps/2] and exact value 0 at (0, 0).
/// Partial derivatives are nonnegative and sum to one; the Hessian is
/// negative semidefinite, which is what the supersolution argument needs.
pub fn smooth_min(a: f64, b: f64, eps: f64) -> f64 {
    0.5 * (a + b - ((a - b) * (a - b) + eps * eps).sqrt() + eps)
}

/// Heat component: w_t - Delta w = 1, w = 0 on the parabolic boundary.
/// Positivity is asserted two cells inside; closer to the boundary the
/// discrete strong maximum principle is only an expectation.
pub fn barrier_heat(cl: &Classified, dist: &GridField) -> Result<Solution> {
    let heat = CoefficientSet::heat(Form::NonDivergence);
    let src = OperatorSource::Plain { coeffs: &heat, dist };
    let one = |_: &Point| 1.0;
    let w = solve_dirichlet(&src, cl, &Load::Scalar(&one))?;
    let deep = 2.0 * cl.grid.para_cell();
    for node in 0..cl.grid.node_count() {
        let v = w.u[node];
        if !v.is_finite() {
            continue;
        }
        if v < -1e-12 {
            return Err(Error::LinearSolve(format!(
                "heat barrier came out negative ({v:.3e}) at node {node}"
            )));
        }
        if dist.data[node] >= deep && v <= 0.0 {
            return Err(Error::LinearSolve(format!(
                "heat barrier not strictly positive at node {node}, depth {}",
                dist.data[node]
            )));
        }
    }
    Ok(w)
}

#[derive(Debug, Clone)]
pub struct BarrierPair {
    pub w: Solution,
    /// cosh(mu R) - cosh(mu |x - c|) on every node; nonnegative on the
    /// domain because R encloses it.
    pub v: Vec<f64>,
    /// Smooth min of (1 + lambda) w and v; NaN outside the domain.
    pub psi: Vec<f64>,
    pub mu: f64,
    pub lambda_scale: f64,
    pub eps_smooth: f64,
    pub center: [f64; 3],
    pub r_enclose: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BarrierReport {
    /// min of the discrete operator applied to v over PDE nodes.
    pub min_lv: f64,
    /// min of the discrete operator applied to psi over PDE nodes.
    pub min_lpsi: f64,
    /// PDE nodes where the operator on psi dropped below 1.
    pub lpsi_violations: usize,
    pub checked: usize,
    pub psi_min: f64,
    /// max psi over parabolic-boundary nodes; bounded by eps_smooth / 2.
    pub psi_boundary_max: f64,
    pub r_enclose: f64,
}

/// Spatial center and radius of a cylinder enclosing the occupied nodes,
/// padded by half a cell so the cosh bump stays strictly positive inside.
fn enclosing_cylinder(cl: &Classified) -> Result<([f64; 3], f64)> {
    let g = &cl.grid;
    let n = g.n;
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let mut any = false;
    for node in 0..g.node_count() {
        if !cl.occupied(node) {
            continue;
        }
        any = true;
        let p = g.point(node);
        for i in 0..n {
            lo[i] = lo[i].min(p.x[i]);
            hi[i] = hi[i].max(p.x[i]);
        }
    }
    if !any {
        return Err(Error::DegenerateDomain("no occupied nodes to enclose".into()));
    }
    let mut c = [0.0; 3];
    for i in 0..n {
        c[i] = 0.5 * (lo[i] + hi[i]);
    }
    let mut r: f64 = 0.0;
    for node in 0..g.node_count() {
        if !cl.occupied(node) {
            continue;
        }
        let p = g.point(node);
        let mut d2 = 0.0;
        for i in 0..n {
            d2 += (p.x[i] - c[i]) * (p.x[i] - c[i]);
        }
        r = r.max(d2.sqrt());
    }
    Ok((c, r + 0.5 * g.h))
}

fn cosh_bump(cl: &Classified, c: &[f64; 3], r: f64, mu: f64) -> Vec<f64> {
    let g = &cl.grid;
    let top = (mu * r).cosh();
    (0..g.node_count())
        .map(|node| {
            let p = g.point(node);
            let mut d2 = 0.0;
            for i in 0..g.n {
                d2 += (p.x[i] - c[i]) * (p.x[i] - c[i]);
            }
            top - (mu * d2.sqrt()).cosh()
        })
        .collect()
}

/// Assemble and verify the barrier psi = F((1 + lambda) w, v) for the
/// operator `src` (the k-th regularized operator of the study). Both
/// preconditions are scanned first: the bump must be a strict supersolution,
/// and lambda must push (1 + lambda) w above v outside the 1/k collar so the
/// min picks v there. Scan failures return the offending numbers instead of
/// a barrier.
#[allow(clippy::too_many_arguments)]
pub fn barrier_psi(
    w: &Solution,
    cl: &Classified,
    dist: &GridField,
    src: &OperatorSource,
    k: u32,
    mu: f64,
    lam: f64,
    eps_smooth: f64,
) -> Result<(BarrierPair, BarrierReport)> {
    let g = &cl.grid;
    if mu <= 0.0 || lam < 0.0 || eps_smooth <= 0.0 || k == 0 {
        return Err(Error::BadParams("barrier needs mu > 0, lam >= 0, eps > 0, k >= 1".into()));
    }
    if w.u.len() != g.node_count() {
        return Err(Error::BadParams("heat barrier lives on a different grid".into()));
    }
    let (center, r_enclose) = enclosing_cylinder(cl)?;
    let v = cosh_bump(cl, &center, r_enclose, mu);

    // scan 1: the bump is a discrete supersolution with margin 1
    let lv = apply_operator(src, cl, &v)?;
    let min_lv = lv.iter().filter(|x| x.is_finite()).fold(f64::INFINITY, |m, &x| m.min(x));
    if !(min_lv >= 1.0 - 1e-9) {
        return Err(Error::ParameterSearch(format!(
            "operator on the cosh bump dips to {min_lv:.6} < 1; raise mu (currently {mu})"
        )));
    }

    // scan 2: outside the collar the scaled heat part dominates the bump
    let collar = 1.0 / k as f64;
    for node in 0..g.node_count() {
        let d = dist.data[node];
        if !(d > collar) || !w.u[node].is_finite() {
            continue;
        }
        if lam * w.u[node] < v[node] - 1e-12 {
            return Err(Error::ParameterSearch(format!(
                "lambda {lam} leaves lambda*w = {:.6} below v = {:.6} at depth {d:.4}; raise lambda",
                lam * w.u[node],
                v[node]
            )));
        }
    }

    let psi: Vec<f64> = (0..g.node_count())
        .map(|node| {
            if w.u[node].is_finite() {
                smooth_min((1.0 + lam) * w.u[node], v[node], eps_smooth)
            } else {
                f64::NAN
            }
        })
        .collect();

    let lpsi = apply_operator(src, cl, &psi)?;
    let mut min_lpsi = f64::INFINITY;
    let mut violations = 0;
    let mut checked = 0;
    for x in lpsi.iter().filter(|x| x.is_finite()) {
        checked += 1;
        min_lpsi = min_lpsi.min(*x);
        if *x < 1.0 {
            violations += 1;
        }
    }
    let mut psi_min = f64::INFINITY;
    let mut psi_boundary_max = 0.0f64;
    for node in 0..g.node_count() {
        if !psi[node].is_finite() {
            continue;
        }
        psi_min = psi_min.min(psi[node]);
        if cl.class[node] == BoundaryClass::Parabolic {
            psi_boundary_max = psi_boundary_max.max(psi[node].abs());
        }
    }
    let report = BarrierReport {
        min_lv,
        min_lpsi,
        lpsi_violations: violations,
        checked,
        psi_min,
        psi_boundary_max,
        r_enclose,
    };
    let pair = BarrierPair {
        w: w.clone(),
        v,
        psi,
        mu,
        lambda_scale: lam,
        eps_smooth,
        center,
        r_enclose,
    };
    Ok((pair, report))
}

/// Scan a short mu ladder, derive the matching lambda from the collar
/// ratio, and return the first barrier whose verified operator minimum
/// clears `target`.
pub fn barrier_search(
    w: &Solution,
    cl: &Classified,
    dist: &GridField,
    src: &OperatorSource,
    k: u32,
    eps_smooth: f64,
    target: f64,
) -> Result<(BarrierPair, BarrierReport)> {
    let g = &cl.grid;
    let (center, r_enclose) = enclosing_cylinder(cl)?;
    let collar = 1.0 / k as f64;
    let mut last = String::new();
    for &mu in &[1.0, 1.5, 2.0, 3.0] {
        let v = cosh_bump(cl, &center, r_enclose, mu);
        // smallest lambda clearing scan 2, with a little headroom
        let mut lam = 0.0f64;
        let mut blocked = false;
        for node in 0..g.node_count() {
            let d = dist.data[node];
            if !(d > collar) || !w.u[node].is_finite() {
                continue;
            }
            if w.u[node] <= 0.0 {
                if v[node] > 0.0 {
                    blocked = true;
                    break;
                }
                continue;
            }
            lam = lam.max(v[node] / w.u[node]);
        }
        if blocked {
            last = format!("mu {mu}: heat part vanishes where the bump is positive");
            continue;
        }
        match barrier_psi(w, cl, dist, src, k, mu, 1.02 * lam + 1e-9, eps_smooth) {
            Ok((pair, report)) => {
                if report.min_lpsi >= target {
                    return Ok((pair, report));
                }
                last = format!(
                    "mu {mu}: verified minimum {:.4} below target {target}",
                    report.min_lpsi
                );
            }
            Err(Error::ParameterSearch(msg)) => last = msg,
            Err(e) => return Err(e),
        }
    }
    Err(Error::ParameterSearch(format!("mu ladder exhausted; last attempt: {last}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::regularize_coeffs;
    use crate::domain::{make_domain, Generator};
    use crate::grid::Grid;
    use crate::mask::{classify, distance_field, rasterize};

    fn ctx(gen: &Generator, h: f64) -> (Classified, GridField) {
        let dom = make_domain(gen).unwrap();
        let grid = Grid::cover_default(dom.n, h, &dom.bbox).unwrap();
        let cl = classify(&rasterize(&dom, &grid));
        let dist = distance_field(&cl);
        (cl, dist)
    }

    #[test]
    fn smooth_min_properties() {
        for eps in [0.1, 0.01] {
            assert_eq!(smooth_min(0.0, 0.0, eps), 0.0);
            let mut a = -2.0;
            while a <= 2.0 {
                let mut b = -2.0;
                while b <= 2.0 {
                    let f = smooth_min(a, b, eps);
                    let dev = f - a.min(b);
                    assert!(dev >= -1e-15 && dev <= eps / 2.0 + 1e-15, "dev {dev} at ({a},{b})");
                    // partials sum to 1 and are each nonnegative
                    let d = 1e-6;
                    let fx = (smooth_min(a + d, b, eps) - smooth_min(a - d, b, eps)) / (2.0 * d);
                    let fy = (smooth_min(a, b + d, eps) - smooth_min(a, b - d, eps)) / (2.0 * d);
                    assert!(fx >= -1e-9 && fy >= -1e-9);
                    assert!((fx + fy - 1.0).abs() < 1e-8);
                    b += 0.25;
                }
                a += 0.25;
            }
        }
    }

    #[test]
    fn heat_barrier_positive_and_bounded() {
        let (cl, dist) = ctx(&Generator::StraightCylinder { n: 1, r: 1.0, t_end: 1.0 }, 1.0 / 16.0);
        let g = cl.grid.clone();
        let w = barrier_heat(&cl, &dist).unwrap();
        // zero on the parabolic boundary, nonnegative everywhere
        for node in 0..g.node_count() {
            match cl.class[node] {
                BoundaryClass::Parabolic => assert_eq!(w.u[node], 0.0),
                BoundaryClass::Exterior => assert!(w.u[node].is_nan()),
                _ => assert!(w.u[node] > 0.0),
            }
        }
        // center value increases in time and respects both closed-form caps
        let mid = g.nx[0] / 2;
        let mut prev = 0.0;
        for it in 1..g.nt {
            let node = g.index([mid, 0, 0], it);
            if !w.u[node].is_finite() {
                continue;
            }
            let p = g.point(node);
            assert!(w.u[node] >= prev - 1e-12, "center value dipped at t = {}", p.t);
            assert!(w.u[node] <= p.t + 1e-8);
            let steady = (1.0 - p.x[0] * p.x[0]) / 2.0;
            assert!(w.u[node] <= steady + 2.0 * g.h);
            prev = w.u[node];
        }
    }

    #[test]
    fn bump_is_positive_inside_enclosure() {
        let (cl, _) = ctx(&Generator::StraightCylinder { n: 1, r: 1.0, t_end: 1.0 }, 1.0 / 16.0);
        let (c, r) = enclosing_cylinder(&cl).unwrap();
        let mu = 1.5;
        let v = cosh_bump(&cl, &c, r, mu);
        for node in 0..cl.grid.node_count() {
            if cl.occupied(node) {
                assert!(v[node] > 0.0);
            }
        }
        // value at the center is cosh(mu R) - 1
        let center_node = cl.grid.index([cl.grid.nx[0] / 2, 0, 0], cl.grid.nt / 2);
        let p = cl.grid.point(center_node);
        if (p.x[0] - c[0]).abs() < 1e-9 {
            assert!((v[center_node] - ((mu * r).cosh() - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn barrier_verifies_on_cylinder() {
        let h = 1.0 / 16.0;
        let (cl, dist) = ctx(&Generator::StraightCylinder { n: 1, r: 1.0, t_end: 1.0 }, h);
        let w = barrier_heat(&cl, &dist).unwrap();
        let heat = CoefficientSet::heat(Form::NonDivergence);
        let k = 2;
        let reg = regularize_coeffs(&heat, &cl, &dist, 1.0, 1.0 / k as f64).unwrap();
        let src = OperatorSource::Regularized(&reg);
        let eps = 0.05 * h * h;
        let (pair, report) = barrier_search(&w, &cl, &dist, &src, k, eps, 0.9).unwrap();
        let mu = pair.mu;
        assert!(report.min_lv >= 1.0 - h * h * mu.powi(4));
        assert!(report.min_lpsi >= 0.9, "min {}", report.min_lpsi);
        assert!(report.psi_min >= -1e-12);
        assert!(report.psi_boundary_max <= eps / 2.0 + 1e-15);
        // deviation from the hard min never exceeds eps/2
        for node in 0..cl.grid.node_count() {
            if pair.psi[node].is_finite() {
                let hard = ((1.0 + pair.lambda_scale) * pair.w.u[node]).min(pair.v[node]);
                assert!((pair.psi[node] - hard).abs() <= eps / 2.0 + 1e-15);
            }
        }
    }

    #[test]
    fn tiny_mu_fails_the_supersolution_scan() {
        let (cl, dist) = ctx(&Generator::StraightCylinder { n: 1, r: 1.0, t_end: 1.0 }, 1.0 / 16.0);
        let w = barrier_heat(&cl, &dist).unwrap();
        let heat = CoefficientSet::heat(Form::NonDivergence);
        let reg = regularize_coeffs(&heat, &cl, &dist, 1.0, 0.5).unwrap();
        let src = OperatorSource::Regularized(&reg);
        let err = barrier_psi(&w, &cl, &dist, &src, 2, 0.1, 100.0, 1e-3).unwrap_err();
        assert!(matches!(err, Error::ParameterSearch(_)), "got {err:?}");
    }

    #[test]
    fn small_lambda_fails_the_collar_scan() {
        let (cl, dist) = ctx(&Generator::StraightCylinder { n: 1, r: 1.0, t_end: 1.0 }, 1.0 / 16.0);
        let w = barrier_heat(&cl, &dist).unwrap();
        let heat = CoefficientSet::heat(Form::NonDivergence);
        let reg = regularize_coeffs(&heat, &cl, &dist, 1.0, 0.5).unwrap();
        let src = OperatorSource::Regularized(&reg);
        let err = barrier_psi(&w, &cl, &dist, &src, 2, 1.5, 0.01, 1e-3).unwrap_err();
        assert!(matches!(err, Error::ParameterSearch(_)), "got {err:?}");
    }
}
