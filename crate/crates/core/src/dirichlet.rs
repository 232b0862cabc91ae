//! Time-marching Dirichlet solves with homogeneous boundary data.
//!
//! The march visits slices in order; nodes classified as parabolic boundary
//! carry the value 0, and nodes entering the domain at a slice are parabolic
//! by construction, so expanding domains need no special casing. The scheme
//! is everywhere the monotone implicit-Euler assembly, so sign preservation
//! and comparison hold to solver tolerance whenever the M-matrix property
//! was not flagged away.

use serde::Serialize;

use crate::assemble::{assemble_slice, Load};
use crate::coeffs::{CoefficientSet, Form, OperatorSource, SampledOperator};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::linsolve::solve_slice;
use crate::mask::{Classified, GridField};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SchemeMeta {
    pub h: f64,
    pub tau: f64,
    /// Drift handling; always first-order sign-chosen upwinding.
    pub upwind: bool,
    pub monotone: bool,
    pub monotonicity_violations: usize,
    pub ghost_hits: usize,
    pub empty_slices: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub grid: Grid,
    /// Per-node values: computed on occupied non-Dirichlet nodes, exactly 0
    /// on the parabolic boundary, NaN outside the domain.
    pub u: Vec<f64>,
    pub slice_residuals: Vec<f64>,
    pub meta: SchemeMeta,
}

impl Solution {
    pub fn sup_norm(&self) -> f64 {
        self.u.iter().filter(|v| v.is_finite()).fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_over(&self) -> f64 {
        self.u.iter().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, |m, &v| m.max(v))
    }

    pub fn min_over(&self) -> f64 {
        self.u.iter().filter(|v| v.is_finite()).fold(f64::INFINITY, |m, &v| m.min(v))
    }
}

pub fn solve_dirichlet(src: &OperatorSource, cl: &Classified, load: &Load) -> Result<Solution> {
    let g = &cl.grid;
    let sl = g.slice_len();
    let mut u = vec![f64::NAN; g.node_count()];
    let mut meta = SchemeMeta {
        h: g.h,
        tau: g.tau,
        upwind: true,
        monotone: true,
        monotonicity_violations: 0,
        ghost_hits: 0,
        empty_slices: 0,
        max_residual: 0.0,
    };
    let mut residuals = Vec::with_capacity(g.nt);
    let mut prev = vec![0.0; sl];
    for it in 0..g.nt {
        let base = it * sl;
        if (0..sl).all(|s| !cl.occupied(base + s)) {
            meta.empty_slices += 1;
            residuals.push(0.0);
            prev.iter_mut().for_each(|v| *v = 0.0);
            continue;
        }
        let sys = assemble_slice(src, cl, it, &prev, load)?;
        let (x, stats) = solve_slice(&sys)?;
        meta.monotonicity_violations += sys.monotonicity_violations;
        meta.ghost_hits += sys.ghost_hits;
        meta.max_residual = meta.max_residual.max(stats.residual);
        residuals.push(stats.residual);
        for s in 0..sl {
            u[base + s] = match sys.unknown_of_spatial[s] {
                Some(j) => x[j],
                None => {
                    if cl.occupied(base + s) {
                        0.0
                    } else {
                        f64::NAN
                    }
                }
            };
        }
        for s in 0..sl {
            prev[s] = if u[base + s].is_finite() { u[base + s] } else { 0.0 };
        }
    }
    meta.monotone = meta.monotonicity_violations == 0;
    Ok(Solution { grid: g.clone(), u, slice_residuals: residuals, meta })
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceReport {
    /// Sup norm of each u_k, k = 1..k_reached.
    pub sup_norms: Vec<f64>,
    /// Successive sup differences, one per adjacent pair.
    pub cauchy: Vec<f64>,
    pub k_reached: u32,
    /// Set when the cutoff ramp stopped being resolvable before k_max.
    pub truncated: bool,
}

/// Zero the load on the collar `d < cut` and freeze it into a field.
fn cutoff_load(g: &Grid, dist: &GridField, load: &Load, cut: f64) -> Vec<f64> {
    let mut out = vec![0.0; g.node_count()];
    for (node, slot) in out.iter_mut().enumerate() {
        let d = dist.data[node];
        if d.is_finite() && d >= cut {
            *slot = load.eval(g, node);
        }
    }
    out
}

/// The approximation sequence: for k = 1..k_max solve under the cutoff
/// operator at scale eps = 1/k with the load zeroed on `d < 1/(2k)`.
/// Divergence-form coefficients are rewritten to nondivergence form and the
/// rewritten fields mollified, so each stage is a smooth monotone solve.
pub fn solve_sequence(
    cs: &CoefficientSet,
    cl: &Classified,
    dist: &GridField,
    load: &Load,
    k_max: u32,
) -> Result<(Vec<Solution>, SequenceReport)> {
    if k_max == 0 {
        return Err(Error::BadParams("sequence needs k_max >= 1".into()));
    }
    let g = &cl.grid;
    let mut solutions: Vec<Solution> = Vec::new();
    let mut truncated = false;
    for k in 1..=k_max {
        let eps = 1.0 / k as f64;
        let reg = match crate::coeffs::regularize_coeffs(cs, cl, dist, 1.0, eps) {
            Ok(r) => r,
            Err(Error::RampResolution(_)) => {
                truncated = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let fk = cutoff_load(g, dist, load, eps / 2.0);
        let fk_load = Load::Field(&fk);
        let sol = match cs.form {
            Form::NonDivergence => {
                solve_dirichlet(&OperatorSource::Regularized(&reg), cl, &fk_load)?
            }
            Form::Divergence => {
                let sampled =
                    SampledOperator::from_source(&OperatorSource::Regularized(&reg), g);
                let nd = sampled.to_nondivergence(cl)?;
                let eps_m = (2.0 * g.h).max(1.0 / (8.0 * k as f64));
                let smooth = nd.mollified(eps_m)?;
                solve_dirichlet(&OperatorSource::Sampled(&smooth), cl, &fk_load)?
            }
        };
        solutions.push(sol);
    }
    if solutions.is_empty() {
        return Err(Error::RampResolution(format!(
            "even k = 1 has an unresolvable cutoff ramp on this grid (h = {})",
            g.h
        )));
    }
    let sup_norms: Vec<f64> = solutions.iter().map(|s| s.sup_norm()).collect();
    let cauchy: Vec<f64> = solutions
        .windows(2)
        .map(|w| {
            w[0].u
                .iter()
                .zip(&w[1].u)
                .filter(|(a, b)| a.is_finite() && b.is_finite())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        })
        .collect();
    let report = SequenceReport {
        sup_norms,
        cauchy,
        k_reached: solutions.len() as u32,
        truncated,
    };
    Ok((solutions, report))
}
