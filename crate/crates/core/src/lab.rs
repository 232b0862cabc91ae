//! Quantitative regularity experiments: growth-lemma contraction ratios,
//! boundary decay exponents, weighted sup bounds, randomized maximum
//! principle trials, and the one-dimensional sharpness example.
//!
//! Everything here consumes the discrete solver output; nothing asserts a
//! constant from the theory, only shapes (ratios below 1, exponents above
//! 0, divergence trends) that the estimates predict.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assemble::{apply_operator, Load};
use crate::coeffs::{
    CoefficientSet, Form, GammaProfile, MatrixProfile, OperatorSource, ScalarProfile,
    VectorProfile,
};
use crate::dirichlet::{solve_dirichlet, SchemeMeta, Solution};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::{parabolic_distance, HatCylinder, Point};
use crate::grid::Grid;
use crate::linsolve::solve_slice;
use crate::mask::{classify, distance_field, rasterize, Classified, GridField};
use crate::sampling::qmc_mean;
use crate::stats::fit_line;

/// One caloric-measure style experiment: boundary data 1 on the cylinder
/// cap inside the domain, 0 on the domain's own boundary, value read at the
/// cylinder's top center.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthExperiment {
    pub x0: Point,
    pub r: f64,
    /// u(X0) for data capped at 1: the contraction ratio.
    pub ratio: f64,
    /// Fraction of the backward cylinder lying outside the domain.
    pub exterior_density: f64,
    /// Distance from the evaluation node to the requested center.
    pub eval_offset: f64,
}

/// Cutoff that is 1 within `w` of the domain boundary and 0 beyond `2w`.
fn boundary_ramp(d: f64, w: f64) -> f64 {
    ((2.0 * w - d) / w).clamp(0.0, 1.0)
}

pub fn caloric_ratio(
    dom: &Domain,
    cs: &CoefficientSet,
    x0: &Point,
    r: f64,
    h: f64,
) -> Result<GrowthExperiment> {
    if !dom.inside(x0) {
        return Err(Error::BadQuery(format!(
            "center ({}, {}) is not an interior point of {}",
            x0.x[0], x0.t, dom.name
        )));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::BadParams(format!("cylinder radius {r} must be positive")));
    }
    let clip = dom.clip_backward(*x0, r);
    let grid = Grid::cover_default(dom.n, h, &clip.bbox)?;
    let cl = classify(&rasterize(&clip, &grid));
    if cl.parabolic.is_empty() {
        return Err(Error::DegenerateDomain(format!(
            "clipped cylinder at ({}, {}) rasterizes to nothing",
            x0.x[0], x0.t
        )));
    }
    let dist = distance_field(&cl);

    // the lift carries the boundary data: 1 on the cap, rolled off to 0 near
    // the parent domain's own boundary so the zero-data solver applies
    let w = 2.0 * grid.para_cell();
    let mut lift = vec![f64::NAN; grid.node_count()];
    for node in 0..grid.node_count() {
        if cl.occupied(node) {
            let p = grid.point(node);
            lift[node] = 1.0 - boundary_ramp(dom.boundary_distance(&p), w);
        }
    }
    let src = OperatorSource::Plain { coeffs: cs, dist: &dist };
    let l_lift = apply_operator(&src, &cl, &lift)?;
    let f: Vec<f64> = l_lift.iter().map(|v| if v.is_finite() { -v } else { 0.0 }).collect();
    let z = solve_dirichlet(&src, &cl, &Load::Field(&f))?;

    // read u = lift + z at the occupied node nearest the center
    let mut best = (f64::INFINITY, usize::MAX);
    for node in 0..grid.node_count() {
        if !cl.occupied(node) {
            continue;
        }
        let d = parabolic_distance(&grid.point(node), x0, grid.n);
        if d < best.0 {
            best = (d, node);
        }
    }
    let ratio = lift[best.1] + z.u[best.1];

    let density = exterior_density(dom, x0, r, 20_000);
    Ok(GrowthExperiment {
        x0: *x0,
        r,
        ratio,
        exterior_density: density,
        eval_offset: best.0,
    })
}

/// QMC estimate of |C_r(X0) \ Q| / |C_r|.
pub fn exterior_density(dom: &Domain, x0: &Point, r: f64, samples: usize) -> f64 {
    let n = dom.n;
    let est = qmc_mean(n + 1, samples, 0xCA10, |u| {
        let mut x = [0.0; 3];
        let mut rho2 = 0.0;
        for i in 0..n {
            let d = (2.0 * u[i] - 1.0) * r;
            x[i] = x0.x[i] + d;
            rho2 += d * d;
        }
        if rho2 >= r * r {
            return None;
        }
        let p = Point { x, t: x0.t - u[n] * r * r };
        Some(if dom.inside(&p) { 0.0 } else { 1.0 })
    });
    if est.hits == 0 {
        0.0
    } else {
        est.mean
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub radii: Vec<f64>,
    pub sups: Vec<f64>,
    pub counts: Vec<usize>,
    pub delta: f64,
    /// Fitted per-step contraction factor.
    pub rate: f64,
    /// The decay exponent the rate implies: log_delta(rate).
    pub beta1: f64,
    /// Set when the solution vanished on every level.
    pub degenerate: bool,
}

/// Sup of |u| over shrinking hat cylinders about `x0`, fitted to a
/// geometric rate. The load is the indicator of the far region
/// `{dist to x0 > 2r}`, so the solution is caloric near the center.
pub fn growth_iteration(
    dom: &Domain,
    cs: &CoefficientSet,
    x0: &Point,
    r: f64,
    delta: f64,
    levels: usize,
    h: f64,
) -> Result<GrowthReport> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::BadParams(format!("shrink factor {delta} outside (0, 1)")));
    }
    let grid = Grid::cover_default(dom.n, h, &dom.bbox)?;
    let cl = classify(&rasterize(dom, &grid));
    let dist = distance_field(&cl);
    let n = grid.n;
    let far = move |p: &Point| if parabolic_distance(p, x0, n) > 2.0 * r { 1.0 } else { 0.0 };
    let src = OperatorSource::Plain { coeffs: cs, dist: &dist };
    let sol = solve_dirichlet(&src, &cl, &Load::Scalar(&far))?;

    let mut radii = Vec::new();
    let mut sups = Vec::new();
    let mut counts = Vec::new();
    for m in 0..levels {
        let rm = r * delta.powi(m as i32);
        if rm < 2.0 * grid.para_cell() {
            break;
        }
        let hat = HatCylinder { center: *x0, r: rm };
        let mut sup = 0.0f64;
        let mut count = 0usize;
        for node in 0..grid.node_count() {
            if !cl.occupied(node) || !sol.u[node].is_finite() {
                continue;
            }
            if hat.contains(&grid.point(node), n) {
                sup = sup.max(sol.u[node].abs());
                count += 1;
            }
        }
        if count < 4 {
            break;
        }
        radii.push(rm);
        sups.push(sup);
        counts.push(count);
    }
    if radii.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "only {} resolvable levels at h = {h}; need 3",
            radii.len()
        )));
    }
    if sups.iter().all(|&s| s == 0.0) {
        return Ok(GrowthReport {
            radii,
            sups,
            counts,
            delta,
            rate: 0.0,
            beta1: 0.0,
            degenerate: true,
        });
    }
    let pts: Vec<(f64, f64)> = sups
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > 0.0)
        .map(|(m, s)| (m as f64, s.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientData("fewer than 3 nonzero levels".into()));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let fit = fit_line(&xs, &ys)?;
    let rate = fit.slope.exp();
    Ok(GrowthReport {
        radii,
        sups,
        counts,
        delta,
        rate,
        beta1: fit.slope / delta.ln(),
        degenerate: false,
    })
}

/// Boundary-collar suprema M(h) = sup { |u| : d <= h } on a dyadic ladder.
#[derive(Debug, Clone, Serialize)]
pub struct DecayProfile {
    /// Ladder values, descending.
    pub hs: Vec<f64>,
    /// Cumulative sup of |u| over nodes with d <= hs[k].
    pub m: Vec<f64>,
    /// Nodes in the band (hs[k+1], hs[k]] (innermost band reaches 0).
    pub counts: Vec<usize>,
    /// Bands with fewer than 10 nodes.
    pub thin: Vec<usize>,
    /// Grid cell scale the fit must respect.
    pub cell: f64,
}

pub fn decay_profile(sol: &Solution, dist: &GridField, ladder: &[f64]) -> Result<DecayProfile> {
    if ladder.is_empty() || ladder.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(Error::BadParams("ladder must be positive and finite".into()));
    }
    let mut hs = ladder.to_vec();
    hs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    hs.dedup();
    let g = &sol.grid;
    let mut m = vec![0.0f64; hs.len()];
    let mut counts = vec![0usize; hs.len()];
    for node in 0..g.node_count() {
        let (u, d) = (sol.u[node], dist.data[node]);
        if !u.is_finite() || !d.is_finite() {
            continue;
        }
        for (k, &hk) in hs.iter().enumerate() {
            if d <= hk {
                m[k] = m[k].max(u.abs());
                let lower = hs.get(k + 1).copied().unwrap_or(0.0);
                if d > lower || (k + 1 == hs.len()) {
                    counts[k] += 1;
                }
            }
        }
    }
    let thin = counts
        .iter()
        .enumerate()
        .filter(|(_, c)| **c < 10)
        .map(|(k, _)| k)
        .collect();
    Ok(DecayProfile { hs, m, counts, thin, cell: g.para_cell() })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExponentFit {
    pub beta_est: f64,
    pub stderr: f64,
    pub r2: f64,
    /// Ladder range the fit actually used.
    pub h_min: f64,
    pub h_max: f64,
    pub used: usize,
}

/// Log-log slope of the decay profile. Only bands at least 4 cells wide,
/// at least 10 nodes deep, and with a positive supremum participate.
pub fn estimate_beta(profile: &DecayProfile) -> Result<ExponentFit> {
    if profile.m.iter().all(|&v| v == 0.0) {
        return Err(Error::InsufficientData(
            "solution is exactly zero near the boundary; no exponent to fit".into(),
        ));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut h_min = f64::INFINITY;
    let mut h_max = 0.0f64;
    for k in 0..profile.hs.len() {
        let h = profile.hs[k];
        if profile.m[k] > 0.0 && h >= 4.0 * profile.cell && profile.counts[k] >= 10 {
            xs.push(h.ln());
            ys.push(profile.m[k].ln());
            h_min = h_min.min(h);
            h_max = h_max.max(h);
        }
    }
    if xs.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} usable ladder points; the fit needs 4",
            xs.len()
        )));
    }
    let fit = fit_line(&xs, &ys)?;
    Ok(ExponentFit {
        beta_est: fit.slope,
        stderr: fit.slope_se,
        r2: fit.r2,
        h_min,
        h_max,
        used: xs.len(),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeightedSup {
    /// max d^(-beta) |u| over nodes with d >= 2h.
    pub value: f64,
    /// Nodes under the 2h floor, reported but not maximized over.
    pub excluded: usize,
    /// The same weighted sup over only the excluded collar.
    pub excluded_value: f64,
}

pub fn weighted_sup(sol: &Solution, dist: &GridField, beta: f64) -> Result<WeightedSup> {
    if !(beta > 0.0 && beta < 2.0) {
        return Err(Error::BadParams(format!("weight exponent {beta} outside (0, 2)")));
    }
    let floor = 2.0 * sol.grid.h;
    let mut value = 0.0f64;
    let mut excluded = 0usize;
    let mut excluded_value = 0.0f64;
    for node in 0..sol.grid.node_count() {
        let (u, d) = (sol.u[node], dist.data[node]);
        if !u.is_finite() || !d.is_finite() || d <= 0.0 {
            continue;
        }
        let w = d.powf(-beta) * u.abs();
        if d < floor {
            excluded += 1;
            excluded_value = excluded_value.max(w);
        } else {
            value = value.max(w);
        }
    }
    Ok(WeightedSup { value, excluded, excluded_value })
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxPrincipleReport {
    pub trials: usize,
    pub monotone_trials: usize,
    /// Monotone trials where a nonpositive load produced a positive value.
    pub violations: usize,
    /// Trials that lost the M-matrix property (reported, not failed).
    pub warned_trials: usize,
    pub warned_violations: usize,
    pub worst_overshoot: f64,
}

/// Random admissible nondivergence operators with nonnegative c0 and
/// nonpositive loads: the discrete maximum principle demands u <= 0
/// whenever the scheme stayed monotone.
pub fn max_principle_suite(
    cl: &Classified,
    dist: &GridField,
    trials: usize,
    seed: u64,
) -> Result<MaxPrincipleReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = cl.grid.n;
    let mut report = MaxPrincipleReport {
        trials,
        monotone_trials: 0,
        violations: 0,
        warned_trials: 0,
        warned_violations: 0,
        worst_overshoot: 0.0,
    };
    for _ in 0..trials {
        let a = match rng.random_range(0..4u8) {
            0 => MatrixProfile::Identity,
            1 => MatrixProfile::Diag {
                d: [
                    rng.random_range(0.5..2.0),
                    rng.random_range(0.5..2.0),
                    rng.random_range(0.5..2.0),
                ],
            },
            2 => MatrixProfile::Smooth { amp: rng.random_range(0.0..0.8) },
            _ if n >= 2 => {
                MatrixProfile::Cross { diag: 1.0, off: rng.random_range(-0.9..0.9) }
            }
            _ => MatrixProfile::Smooth { amp: rng.random_range(0.0..0.8) },
        };
        let b = match rng.random_range(0..3u8) {
            0 => VectorProfile::Zero,
            1 => VectorProfile::Const {
                v: [
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                ],
            },
            _ => VectorProfile::DistanceDrift {
                gamma: GammaProfile::Sqrt,
                dir: [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), 0.5],
            },
        };
        let cs = CoefficientSet {
            form: Form::NonDivergence,
            nu: 0.4,
            a,
            b,
            c: VectorProfile::Zero,
            c0: ScalarProfile::Const { v: rng.random_range(0.0..1.0) },
            gamma: GammaProfile::Sqrt,
        };
        let (a0, a1, k) = (
            rng.random_range(0.1..1.0),
            rng.random_range(0.0..2.0),
            rng.random_range(1.0..5.0),
        );
        let f = move |p: &Point| -(a0 + a1 * (k * p.x[0] + p.t).sin().abs());
        let src = OperatorSource::Plain { coeffs: &cs, dist };
        let sol = solve_dirichlet(&src, cl, &Load::Scalar(&f))?;
        let scale = sol.sup_norm();
        let overshoot = sol.max_over().max(0.0);
        report.worst_overshoot = report.worst_overshoot.max(overshoot);
        let bad = overshoot > 1e-10 * (1.0 + scale);
        if sol.meta.monotone {
            report.monotone_trials += 1;
            if bad {
                report.violations += 1;
            }
        } else {
            report.warned_trials += 1;
            if bad {
                report.warned_violations += 1;
            }
        }
    }
    Ok(report)
}

/// Closed forms of the one-dimensional sharpness example on (0, 1/2):
/// u = -eta(x) / ln x with a quintic cutoff eta that is 1 below 1/3 and 0
/// above 1/2, and drift b = (1 + 2/ln x) / x. On (0, 1/3) the pair
/// satisfies u'' + b u' = 0 exactly.
pub mod one_d {
    /// eta, eta', eta'' of the quintic smoothstep cutoff.
    pub fn eta(x: f64) -> (f64, f64, f64) {
        if x <= 1.0 / 3.0 {
            (1.0, 0.0, 0.0)
        } else if x >= 0.5 {
            (0.0, 0.0, 0.0)
        } else {
            let s = (x - 1.0 / 3.0) * 6.0;
            let v = 10.0 * s.powi(3) - 15.0 * s.powi(4) + 6.0 * s.powi(5);
            let dv = (30.0 * s.powi(2) - 60.0 * s.powi(3) + 30.0 * s.powi(4)) * 6.0;
            let ddv = (60.0 * s - 180.0 * s.powi(2) + 120.0 * s.powi(3)) * 36.0;
            (1.0 - v, -dv, -ddv)
        }
    }

    pub fn u(x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let (e, _, _) = eta(x);
        if e == 0.0 {
            return 0.0;
        }
        -e / x.ln()
    }

    pub fn u_prime(x: f64) -> f64 {
        let (e, de, _) = eta(x);
        let l = x.ln();
        -de / l + e / (x * l * l)
    }

    pub fn u_double_prime(x: f64) -> f64 {
        let (e, de, dde) = eta(x);
        let l = x.ln();
        -dde / l + 2.0 * de / (x * l * l) - e * (1.0 / (x * x * l * l) + 2.0 / (x * x * l * l * l))
    }

    pub fn b(x: f64) -> f64 {
        (1.0 + 2.0 / x.ln()) / x
    }

    /// The load the closed form satisfies: f = u'' + b u'.
    pub fn f(x: f64) -> f64 {
        u_double_prime(x) + b(x) * u_prime(x)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WeightedPoint {
    pub beta: f64,
    pub x: f64,
    /// x^(-beta) * u(x) from the closed form.
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Example1dReport {
    pub xs: Vec<f64>,
    pub u_closed: Vec<f64>,
    pub u_solved: Vec<f64>,
    /// sup |u'' + b u'| over (0, 1/3): analytically zero.
    pub sup_f_inner: f64,
    /// sup |u'' + b u'| over the whole interval: finite.
    pub sup_f: f64,
    pub sup_solve_err: f64,
    pub u_at_tenth_closed: f64,
    pub u_at_tenth_solved: f64,
    pub weighted: Vec<WeightedPoint>,
    /// Whether x^(-0.05) u grew from x = 1e-3 to x = 1e-6.
    pub grew_small_beta: bool,
    pub graded: bool,
    pub notices: Vec<String>,
}

/// Build the graded mesh, evaluate the closed forms, solve the two-point
/// boundary value problem with the recovered load, and tabulate the
/// weighted values whose divergence makes the example sharp.
pub fn example_1d(x_min: f64, ratio: f64) -> Result<Example1dReport> {
    if !(x_min > 0.0 && x_min < 0.01) {
        return Err(Error::BadParams(format!("first node {x_min} outside (0, 0.01)")));
    }
    if !(ratio >= 1.0 && ratio < 2.0) {
        return Err(Error::BadParams(format!("grading ratio {ratio} outside [1, 2)")));
    }
    let mut notices = Vec::new();
    let graded = ratio > 1.0;
    if !graded {
        notices.push("uniform mesh near a 1/x drift: expect accuracy loss".into());
    }

    // geometric nodes from x_min with the step capped at 1/256 so the
    // cutoff blend near 1/2 stays resolved; the mesh never reaches 0, so
    // the left end carries the exact trace -1/ln(x_min) as Dirichlet data
    // (u changes by 1/|ln x_min| below x_min, unrepresentable on any mesh)
    let cap = 1.0 / 512.0;
    let mut xs = vec![x_min];
    if graded {
        loop {
            let last = *xs.last().unwrap();
            let next = (last * ratio).min(last + cap);
            if next >= 0.5 - 0.5 * cap {
                break;
            }
            xs.push(next);
        }
    } else {
        let m = (0.5 / x_min).ceil() as usize;
        for j in 2..m {
            xs.push(j as f64 * x_min);
        }
    }
    xs.push(0.5);
    let nn = xs.len();
    let u_left = one_d::u(x_min);

    // interior rows of -u'' - b u' = -f with sign-chosen one-sided drift
    let unknowns = nn - 2;
    let mut indptr = vec![0usize];
    let mut indices = Vec::new();
    let mut vals = Vec::new();
    let mut rhs = Vec::new();
    let mut full = Vec::new();
    for j in 1..nn - 1 {
        let hm = xs[j] - xs[j - 1];
        let hp = xs[j + 1] - xs[j];
        let bj = one_d::b(xs[j]);
        let mut diag = 2.0 / (hm * hp);
        let mut left = -2.0 / (hm * (hm + hp));
        let mut right = -2.0 / (hp * (hm + hp));
        // central drift keeps second order; it stays an M-matrix row as
        // long as |b| h < 2 (true on the graded mesh, where b h is
        // pinned near ratio - 1), otherwise fall back to one-sided
        let central_ok = bj.abs() <= 2.0 / hm.max(hp);
        if central_ok {
            left += bj / (hm + hp);
            right += -bj / (hm + hp);
        } else if bj > 0.0 {
            diag += bj / hp;
            right += -bj / hp;
        } else {
            diag += -bj / hm;
            left += bj / hm;
        }
        // rows are equilibrated by their diagonal: the row scale varies
        // over many orders of magnitude along the graded mesh
        let row = j - 1;
        let mut g = -one_d::f(xs[j]);
        if row > 0 {
            indices.push(row - 1);
            vals.push(left / diag);
        } else {
            g -= left * u_left;
        }
        indices.push(row);
        vals.push(1.0);
        if row + 1 < unknowns {
            indices.push(row + 1);
            vals.push(right / diag);
        }
        indptr.push(indices.len());
        rhs.push(g / diag);
        full.push((diag + left + right) / diag);
    }
    let sys = crate::assemble::SliceSystem {
        it: 0,
        unknown_of_spatial: (0..nn)
            .map(|j| if j == 0 || j == nn - 1 { None } else { Some(j - 1) })
            .collect(),
        spatial_of_unknown: (1..nn - 1).collect(),
        indptr,
        indices,
        vals,
        rhs,
        full_row_sums: full,
        monotonicity_violations: 0,
        ghost_hits: 0,
        tridiagonal: true,
    };
    let (z, _) = solve_slice(&sys)?;
    let mut u_solved = vec![0.0; nn];
    u_solved[0] = u_left;
    u_solved[1..nn - 1].copy_from_slice(&z);

    let u_closed: Vec<f64> = xs.iter().map(|&x| one_d::u(x)).collect();
    let sup_solve_err = u_closed
        .iter()
        .zip(&u_solved)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));

    // closed-form residual scan
    let mut sup_f_inner = 0.0f64;
    let mut sup_f = 0.0f64;
    for j in 1..=2000 {
        let x = 0.5 * j as f64 / 2000.0;
        let v = one_d::f(x).abs();
        sup_f = sup_f.max(v);
        if x < 1.0 / 3.0 {
            sup_f_inner = sup_f_inner.max(v);
        }
    }

    let mut weighted = Vec::new();
    for &beta in &[0.1, 0.05] {
        for &x in &[1e-3, 1e-6, 1e-12] {
            weighted.push(WeightedPoint { beta, x, value: x.powf(-beta) * one_d::u(x) });
        }
    }
    let find = |beta: f64, x: f64| {
        weighted
            .iter()
            .find(|w| w.beta == beta && w.x == x)
            .map(|w| w.value)
            .unwrap_or(f64::NAN)
    };
    let grew_small_beta = find(0.05, 1e-6) > find(0.05, 1e-3);

    // linear interpolation of the numerical solution at x = 0.1
    let j = xs.partition_point(|&x| x < 0.1).min(nn - 1).max(1);
    let s = (0.1 - xs[j - 1]) / (xs[j] - xs[j - 1]);
    let u_at_tenth_solved = (1.0 - s) * u_solved[j - 1] + s * u_solved[j];
    Ok(Example1dReport {
        u_at_tenth_closed: one_d::u(0.1),
        u_at_tenth_solved,
        xs,
        u_closed,
        u_solved,
        sup_f_inner,
        sup_f,
        sup_solve_err,
        weighted,
        grew_small_beta,
        graded,
        notices,
    })
}

/// Assemble a synthetic Solution from a per-node closure, for profiling
/// and fitting machinery that only needs fields.
pub fn synthetic_solution(cl: &Classified, f: impl Fn(usize) -> f64) -> Solution {
    let g = &cl.grid;
    let u: Vec<f64> = (0..g.node_count())
        .map(|node| if cl.occupied(node) { f(node) } else { f64::NAN })
        .collect();
    Solution {
        grid: g.clone(),
        u,
        slice_residuals: vec![0.0; g.nt],
        meta: SchemeMeta {
            h: g.h,
            tau: g.tau,
            upwind: true,
            monotone: true,
            monotonicity_violations: 0,
            ghost_hits: 0,
            empty_slices: 0,
            max_residual: 0.0,
        },
    }
}
