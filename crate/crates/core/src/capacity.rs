//! Thermal capacity of discrete compact sets and Wiener-type series.
//!
//! Capacity is approximated by the packing LP `max sum(mu)` subject to
//! `F * mu <= 1` over the set's own cells, with the potential checked on a
//! dilated constraint lattice. The kernel matrix uses the pointwise heat
//! kernel off the diagonal and the analytic cell average on it, keeping the
//! atom's self-constraint finite and consistent with the cell size.

use serde::Serialize;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::grid::BBox;
use crate::heatball::{heat_ball_bbox, heat_kernel};
use crate::lp::solve_packing_lp;
use crate::stats::fit_line;

/// Space and time extent of one cell; the two are independent because shell
/// discretizations are not parabolically scaled.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CellSize {
    pub h: f64,
    pub tau: f64,
}

#[derive(Debug, Clone)]
pub struct DiscreteCompactSet {
    pub n: usize,
    pub points: Vec<Point>,
    pub cell: CellSize,
    pub provenance: String,
}

impl DiscreteCompactSet {
    pub fn new(
        n: usize,
        points: Vec<Point>,
        cell: CellSize,
        provenance: impl Into<String>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::BadParams("discrete compact set must be nonempty".into()));
        }
        if cell.h <= 0.0 || cell.tau <= 0.0 {
            return Err(Error::BadParams(format!(
                "cell extents must be positive, got h={} tau={}",
                cell.h, cell.tau
            )));
        }
        if points
            .iter()
            .any(|p| !p.t.is_finite() || p.x[..n].iter().any(|v| !v.is_finite()))
        {
            return Err(Error::BadParams("set contains non-finite coordinates".into()));
        }
        Ok(Self { n, points, cell, provenance: provenance.into() })
    }

    pub fn volume(&self) -> f64 {
        self.points.len() as f64 * self.cell.h.powi(self.n as i32) * self.cell.tau
    }

    pub fn bbox(&self) -> BBox {
        let mut b = BBox {
            x_lo: [f64::INFINITY; 3],
            x_hi: [f64::NEG_INFINITY; 3],
            t_lo: f64::INFINITY,
            t_hi: f64::NEG_INFINITY,
        };
        for p in &self.points {
            for i in 0..self.n {
                b.x_lo[i] = b.x_lo[i].min(p.x[i] - 0.5 * self.cell.h);
                b.x_hi[i] = b.x_hi[i].max(p.x[i] + 0.5 * self.cell.h);
            }
            b.t_lo = b.t_lo.min(p.t - 0.5 * self.cell.tau);
            b.t_hi = b.t_hi.max(p.t + 0.5 * self.cell.tau);
        }
        for i in self.n..3 {
            b.x_lo[i] = 0.0;
            b.x_hi[i] = 0.0;
        }
        b
    }

    pub fn translated(&self, dx: f64, dt: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            p.x[0] += dx;
            p.t += dt;
        }
        out
    }

    /// Parabolic dilation (x, t) -> (sx, s^2 t) with cells scaled likewise.
    pub fn scaled_parabolic(&self, s: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            for i in 0..self.n {
                p.x[i] *= s;
            }
            p.t *= s * s;
        }
        out.cell = CellSize { h: self.cell.h * s, tau: self.cell.tau * s * s };
        out
    }
}

/// Average of the heat kernel over one cell centered at the zero difference:
/// `(1/(h^n tau)) * integral_0^{tau/2} erf(h/(4 sqrt(t)))^n dt` by midpoint
/// quadrature. This regularizes the kernel matrix diagonal.
pub fn kernel_cell_average(n: usize, h: f64, tau: f64) -> Result<f64> {
    if h <= 0.0 || tau <= 0.0 {
        return Err(Error::BadParams("cell average needs positive extents".into()));
    }
    if !(1..=3).contains(&n) {
        return Err(Error::BadParams(format!("dimension {n} outside 1..=3")));
    }
    let m = 20_000;
    let half = tau / 2.0;
    let mut acc = 0.0;
    for i in 0..m {
        let t = (i as f64 + 0.5) * half / m as f64;
        acc += erf(h / (4.0 * t.sqrt())).powi(n as i32);
    }
    Ok(acc * half / m as f64 / (h.powi(n as i32) * tau))
}

/// Abramowitz-Stegun 7.1.26 rational approximation, |error| < 1.5e-7, made
/// odd by construction.
fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

pub const LP_VAR_CAP: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CapMethod {
    Lp,
    VolumeProxy,
}

#[derive(Debug, Clone, Serialize)]
pub struct CapacityOutcome {
    pub value: f64,
    pub method: CapMethod,
    pub constraint_count: usize,
    #[serde(skip)]
    pub weights: Option<Vec<f64>>,
}

fn lattice_key(set: &DiscreteCompactSet, p: &Point) -> [i64; 4] {
    let mut k = [0i64; 4];
    for i in 0..set.n {
        k[i] = (p.x[i] / set.cell.h).round() as i64;
    }
    k[3] = (p.t / set.cell.tau).round() as i64;
    k
}

/// Packing-LP capacity: maximize total mass of a measure supported on the
/// set's cells subject to `F * mu <= 1` on the set dilated by `dilation_m`
/// cells per axis. Points must sit on their cell lattice.
pub fn thermal_capacity_lp(set: &DiscreteCompactSet, dilation_m: usize) -> Result<CapacityOutcome> {
    let nv = set.points.len();
    if nv > LP_VAR_CAP {
        return Err(Error::Lp(format!(
            "{nv} variables exceed the LP cap {LP_VAR_CAP}; use the volume proxy"
        )));
    }
    let a0 = kernel_cell_average(set.n, set.cell.h, set.cell.tau)?;
    // constraint lattice: every cell within m steps of a set cell, deduped
    let mut seen = std::collections::HashMap::new();
    let m = dilation_m as i64;
    let mut spatial: Vec<[i64; 3]> = Vec::new();
    for a in -m..=m {
        match set.n {
            1 => spatial.push([a, 0, 0]),
            2 => {
                for b in -m..=m {
                    spatial.push([a, b, 0]);
                }
            }
            _ => {
                for b in -m..=m {
                    for c in -m..=m {
                        spatial.push([a, b, c]);
                    }
                }
            }
        }
    }
    for p in &set.points {
        let base = lattice_key(set, p);
        for sp in &spatial {
            for dt in -m..=m {
                let mut key = [base[0] + sp[0], base[1] + sp[1], base[2] + sp[2], base[3] + dt];
                for i in set.n..3 {
                    key[i] = 0;
                }
                seen.entry(key).or_insert_with(|| {
                    let mut q = Point { x: [0.0; 3], t: key[3] as f64 * set.cell.tau };
                    for i in 0..set.n {
                        q.x[i] = key[i] as f64 * set.cell.h;
                    }
                    q
                });
            }
        }
    }
    let var_keys: Vec<[i64; 4]> = set.points.iter().map(|p| lattice_key(set, p)).collect();
    let mut rows = Vec::with_capacity(seen.len());
    for (ckey, cpt) in &seen {
        let mut row = vec![0.0; nv];
        for (j, p) in set.points.iter().enumerate() {
            row[j] = if *ckey == var_keys[j] {
                a0
            } else {
                heat_kernel(
                    &[cpt.x[0] - p.x[0], cpt.x[1] - p.x[1], cpt.x[2] - p.x[2]][..set.n.max(1)],
                    cpt.t - p.t,
                    set.n,
                )
                .0
            };
        }
        rows.push(row);
    }
    let b = vec![1.0; rows.len()];
    let c = vec![1.0; nv];
    let mut sol = solve_packing_lp(&rows, &b, &c)?;
    // certify feasibility: pivoting drift can leave the potential slightly
    // above 1, and any feasible measure is a valid capacity witness, so the
    // mass is scaled back onto the constraint set; only gross violations
    // indicate a solver failure
    let worst = rows
        .iter()
        .map(|row| row.iter().zip(&sol.x).map(|(g, w)| g * w).sum::<f64>())
        .fold(0.0f64, f64::max);
    if !(worst.is_finite()) || worst > 1.05 {
        return Err(Error::Lp(format!("constraint violated by {}", worst - 1.0)));
    }
    if worst > 1.0 {
        let s = 1.0 / worst;
        for w in &mut sol.x {
            *w *= s;
        }
        sol.objective *= s;
    }
    Ok(CapacityOutcome {
        value: sol.objective,
        method: CapMethod::Lp,
        constraint_count: rows.len(),
        weights: Some(sol.x),
    })
}

/// `|K|^(n/(n+2))`, the capacity lower-bound shape from the isoperimetric
/// comparison; the multiplicative constant is treated as empirical.
pub fn volume_proxy_capacity(set: &DiscreteCompactSet) -> f64 {
    set.volume().powf(set.n as f64 / (set.n as f64 + 2.0))
}

/// LP capacity when the set fits the variable cap, volume proxy otherwise.
pub fn capacity_with_fallback(set: &DiscreteCompactSet, dilation_m: usize) -> Result<CapacityOutcome> {
    if set.points.len() <= LP_VAR_CAP {
        thermal_capacity_lp(set, dilation_m)
    } else {
        Ok(CapacityOutcome {
            value: volume_proxy_capacity(set),
            method: CapMethod::VolumeProxy,
            constraint_count: 0,
            weights: None,
        })
    }
}

/// Upper bound on the variational parabolic capacity
/// `inf sup_t int u^2 dx + int int |grad u|^2 dX`
/// over plateau functions covering the set: per-axis trapezoid ramps around
/// the set's bounding box, ramp widths scanned, minimum energy returned.
pub fn parabolic_capacity_upper(set: &DiscreteCompactSet) -> Result<f64> {
    let b = set.bbox();
    let n = set.n;
    let dur = b.t_hi - b.t_lo;
    let side: Vec<f64> = (0..n).map(|i| b.x_hi[i] - b.x_lo[i]).collect();
    let scale = side.iter().cloned().fold(dur.sqrt(), f64::max).max(1e-6);
    let mut best = f64::INFINITY;
    for iw in 0..5 {
        let w = scale * 0.25 * 2f64.powi(iw - 2) + 1e-9;
        for it in 0..5 {
            let wt = dur.max(1e-9) * 0.25 * 2f64.powi(it - 2) + 1e-12;
            // per-axis plateau integrals for a trapezoid of plateau length s
            // and ramp width w: int X^2 = s + 2w/3, int |X'|^2 = 2/w
            let sq: Vec<f64> = side.iter().map(|s| s + 2.0 * w / 3.0).collect();
            let sup_l2: f64 = sq.iter().product();
            let t2 = dur + 2.0 * wt / 3.0;
            let mut grad = 0.0;
            for i in 0..n {
                let mut g = 2.0 / w;
                for (j, q) in sq.iter().enumerate() {
                    if j != i {
                        g *= q;
                    }
                }
                grad += g;
            }
            let energy = sup_l2 + t2 * grad;
            best = best.min(energy);
        }
    }
    Ok(best)
}

/// Both sides of the capacity-volume comparison and their ratio.
pub fn capacity_vs_volume(
    set: &DiscreteCompactSet,
    dilation_m: usize,
) -> Result<(f64, f64, f64)> {
    let cap = capacity_with_fallback(set, dilation_m)?.value;
    let vol_pow = volume_proxy_capacity(set);
    Ok((cap, vol_pow, cap / vol_pow))
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellTerm {
    pub k: u32,
    /// Spatial half-extent of the shell's bounding box.
    pub scale: f64,
    pub set_size: usize,
    pub cap_method: CapMethod,
    pub cap_value: f64,
    /// `lambda^k * cap_value`.
    pub term: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WienerReport {
    pub lambda: f64,
    pub shells: Vec<ShellTerm>,
    pub partial_sums: Vec<f64>,
    pub slope: f64,
    pub slope_ci: f64,
    /// Set when the shell ladder hit the scale floor before k_max.
    pub truncated: bool,
}

/// Complement cells of the level shell `lambda^k <= F(X0 - X) <= lambda^(k+1)`
/// on a grid at the shell's own scale; `None` when the domain covers the
/// whole shell.
pub fn shell_complement_set(
    dom: &Domain,
    x0: &Point,
    lambda: f64,
    k: u32,
    cells_per_axis: usize,
) -> Result<Option<DiscreteCompactSet>> {
    if lambda <= 1.0 || cells_per_axis < 2 {
        return Err(Error::BadParams("shell set needs lambda > 1 and >= 2 cells".into()));
    }
    let n = dom.n;
    let log_lo = k as f64 * lambda.ln();
    let log_hi = (k as f64 + 1.0) * lambda.ln();
    let outer = heat_ball_bbox(n, log_lo.exp());
    let floor = 1e-13;
    if outer.x_max < floor * x0.x[0].abs().max(1.0) || -outer.t_min < floor * x0.t.abs().max(1.0) {
        return Err(Error::ScaleFloor(format!(
            "shell k={k} spans {:.3e} in space, below resolvable scale",
            outer.x_max
        )));
    }
    let cpa = cells_per_axis;
    let h = 2.0 * outer.x_max / cpa as f64;
    let tau = -outer.t_min / cpa as f64;
    let nf = n as f64;
    let mut pts = Vec::new();
    let spatial_cells = cpa.pow(n as u32);
    for flat in 0..spatial_cells {
        let mut x = [0.0; 3];
        let mut rem = flat;
        let mut r2 = 0.0;
        for (i, xi) in x.iter_mut().enumerate().take(n) {
            let idx = rem % cpa;
            rem /= cpa;
            let d = -outer.x_max + (idx as f64 + 0.5) * h;
            *xi = x0.x[i] + d;
            r2 += d * d;
        }
        for jt in 0..cpa {
            let t = x0.t + outer.t_min + (jt as f64 + 0.5) * tau;
            let s = x0.t - t;
            if s <= 0.0 {
                continue;
            }
            let log_f = -nf / 2.0 * (4.0 * std::f64::consts::PI * s).ln() - r2 / (4.0 * s);
            if log_f < log_lo || log_f > log_hi {
                continue;
            }
            let p = Point { x, t };
            if !dom.inside(&p) {
                pts.push(p);
            }
        }
    }
    if pts.is_empty() {
        return Ok(None);
    }
    let set = DiscreteCompactSet::new(
        n,
        pts,
        CellSize { h, tau },
        format!("complement of {} in shell k={k}", dom.name),
    )?;
    Ok(Some(set))
}

/// Per-shell capacities of the domain complement around a boundary point and
/// the partial sums `S_K = sum_{k<=K} lambda^k cap_k`, with a linear fit of
/// `S_K` against `K`. Divergence of the full series is the boundary-point
/// regularity criterion; on truncated evidence the fitted slope stands in.
pub fn wiener_partial_sums(
    dom: &Domain,
    x0: &Point,
    lambda: f64,
    k_max: u32,
    cells_per_axis: usize,
    dilation_m: usize,
) -> Result<WienerReport> {
    if lambda <= 1.0 {
        return Err(Error::BadParams(format!("lambda must exceed 1, got {lambda}")));
    }
    let mut shells = Vec::new();
    let mut partial_sums = Vec::new();
    let mut acc = 0.0;
    let mut truncated = false;
    for k in 1..=k_max {
        let set = match shell_complement_set(dom, x0, lambda, k, cells_per_axis) {
            Ok(s) => s,
            Err(Error::ScaleFloor(_)) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let scale = heat_ball_bbox(dom.n, (k as f64 * lambda.ln()).exp()).x_max;
        let (cap_value, method, size) = match &set {
            None => (0.0, CapMethod::Lp, 0),
            Some(s) => {
                let out = capacity_with_fallback(s, dilation_m)?;
                (out.value, out.method, s.points.len())
            }
        };
        let term = lambda.powi(k as i32) * cap_value;
        acc += term;
        shells.push(ShellTerm {
            k,
            scale,
            set_size: size,
            cap_method: method,
            cap_value,
            term,
        });
        partial_sums.push(acc);
    }
    if shells.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "only {} resolvable shells at this point",
            shells.len()
        )));
    }
    let xs: Vec<f64> = shells.iter().map(|s| s.k as f64).collect();
    let fit = fit_line(&xs, &partial_sums)?;
    Ok(WienerReport {
        lambda,
        shells,
        partial_sums,
        slope: fit.slope,
        slope_ci: 1.96 * fit.slope_se,
        truncated,
    })
}
