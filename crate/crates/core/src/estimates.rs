//! Empirical pointwise-bound ratios for solves on standard cylinders.
//!
//! The theory bounds sup |u| by Lebesgue norms of the data; here the bound
//! is never asserted with a constant, only the ratio is computed so that
//! refinement studies can watch it stay bounded.

use serde::Serialize;

use crate::dirichlet::Solution;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Data presented the way the two estimates expect it: a single load for
/// the nondivergence bound, or a (f0, flux components) bundle whose pieces
/// are measured at p0 and 2 p0 respectively.
pub enum BoundData<'a> {
    Plain(&'a dyn Fn(&Point) -> f64),
    Divergence { f0: &'a dyn Fn(&Point) -> f64, fi: Vec<&'a dyn Fn(&Point) -> f64> },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundRatio {
    pub sup_u: f64,
    pub data_norm: f64,
    /// sup |u| / data norm; 0 when both vanish.
    pub ratio: f64,
    /// Set when data and solution both vanish, making the ratio vacuous.
    pub trivial: bool,
}

/// Discrete L_p norm of `f` over the nodes the solution occupies (finite
/// entries), using the grid cell volume as the measure.
fn lp_norm(sol: &Solution, f: &dyn Fn(&Point) -> f64, p: f64) -> f64 {
    let g = &sol.grid;
    let vol = g.cell_volume();
    let mut acc = 0.0;
    for node in 0..g.node_count() {
        if sol.u[node].is_finite() {
            acc += f(&g.point(node)).abs().powf(p) * vol;
        }
    }
    acc.powf(1.0 / p)
}

pub fn pointwise_bound_check(
    sol: &Solution,
    data: &BoundData,
    p0: f64,
) -> Result<BoundRatio> {
    if !(p0 > 1.0) {
        return Err(Error::BadParams(format!("integrability exponent p0 = {p0} must exceed 1")));
    }
    let sup_u = sol.sup_norm();
    let data_norm = match data {
        BoundData::Plain(f) => lp_norm(sol, f, p0),
        BoundData::Divergence { f0, fi } => {
            if fi.len() > sol.grid.n {
                return Err(Error::BadParams(format!(
                    "{} flux components on an n = {} grid",
                    fi.len(),
                    sol.grid.n
                )));
            }
            let mut total = lp_norm(sol, *f0, p0);
            for g in fi {
                total += lp_norm(sol, *g, 2.0 * p0);
            }
            total
        }
    };
    if data_norm == 0.0 {
        if sup_u > 1e-12 {
            return Err(Error::BadParams(format!(
                "inconsistent inputs: zero data norm but sup |u| = {sup_u:.3e}"
            )));
        }
        return Ok(BoundRatio { sup_u, data_norm, ratio: 0.0, trivial: true });
    }
    Ok(BoundRatio { sup_u, data_norm, ratio: sup_u / data_norm, trivial: false })
}
