//! Coefficient fields for divergence and nondivergence parabolic operators.
//!
//! Coefficients are declarative profiles evaluated at grid nodes, with the
//! degenerate lower-order terms driven by the computed distance field, never
//! by an analytic distance. The cutoff regularization swaps the operator for
//! the heat operator in a thin collar along the parabolic boundary; its
//! gradient correction to `c0` uses the same centered stencil as the
//! discrete sign-condition check, so the regularized operator passes that
//! check exactly, not just up to discretization error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{parabolic_distance, Point};
use crate::grid::Grid;
use crate::mask::{Classified, GridField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Divergence,
    NonDivergence,
}

/// Blowup envelope gamma: lower-order terms are admissible when
/// `|b|, |c| <= gamma(d)/d` with gamma nondecreasing; the borderline-vs-fatal
/// distinction is whether gamma vanishes at 0+.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GammaProfile {
    Zero,
    /// gamma(d) = sqrt(d): drift grows like d^(-1/2).
    Sqrt,
    /// gamma(d) = slope * d: bounded drift of size `slope`.
    Linear { slope: f64 },
    /// gamma(d) = level: drift exactly level/d, violating the o(1/d) condition.
    Const { level: f64 },
}

impl GammaProfile {
    pub fn eval(&self, d: f64) -> f64 {
        match self {
            GammaProfile::Zero => 0.0,
            GammaProfile::Sqrt => d.max(0.0).sqrt(),
            GammaProfile::Linear { slope } => slope * d.max(0.0),
            GammaProfile::Const { level } => *level,
        }
    }

    /// Whether gamma(0+) = 0, the condition for the decay estimates.
    pub fn vanishes_at_origin(&self) -> bool {
        match self {
            GammaProfile::Const { level } => *level == 0.0,
            _ => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MatrixProfile {
    Identity,
    Diag { d: [f64; 3] },
    /// Constant symmetric 2-D matrix with off-diagonal coupling.
    Cross { diag: f64, off: f64 },
    /// Smoothly varying diagonal: a_ii = 1 + amp * sin(3 x_i + 2 t).
    Smooth { amp: f64 },
}

impl MatrixProfile {
    pub fn eval(&self, p: &Point, n: usize) -> [[f64; 3]; 3] {
        let mut a = [[0.0; 3]; 3];
        match self {
            MatrixProfile::Identity => {
                for (i, row) in a.iter_mut().enumerate().take(n) {
                    row[i] = 1.0;
                }
            }
            MatrixProfile::Diag { d } => {
                for (i, row) in a.iter_mut().enumerate().take(n) {
                    row[i] = d[i];
                }
            }
            MatrixProfile::Cross { diag, off } => {
                for (i, row) in a.iter_mut().enumerate().take(n) {
                    row[i] = *diag;
                }
                if n >= 2 {
                    a[0][1] = *off;
                    a[1][0] = *off;
                }
            }
            MatrixProfile::Smooth { amp } => {
                for (i, row) in a.iter_mut().enumerate().take(n) {
                    row[i] = 1.0 + amp * (3.0 * p.x[i] + 2.0 * p.t).sin();
                }
            }
        }
        a
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum VectorProfile {
    Zero,
    Const { v: [f64; 3] },
    /// Magnitude gamma(d)/d along a fixed direction; zero where d = 0 so the
    /// blowup never evaluates to infinity on boundary nodes.
    DistanceDrift { gamma: GammaProfile, dir: [f64; 3] },
}

impl VectorProfile {
    pub fn eval(&self, _p: &Point, d: f64, n: usize) -> [f64; 3] {
        match self {
            VectorProfile::Zero => [0.0; 3],
            VectorProfile::Const { v } => {
                let mut out = [0.0; 3];
                out[..n].copy_from_slice(&v[..n]);
                out
            }
            VectorProfile::DistanceDrift { gamma, dir } => {
                let mut out = [0.0; 3];
                if d > 0.0 && d.is_finite() {
                    let norm: f64 = dir[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
                    if norm > 0.0 {
                        let mag = gamma.eval(d) / d;
                        for i in 0..n {
                            out[i] = dir[i] / norm * mag;
                        }
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ScalarProfile {
    Zero,
    Const { v: f64 },
    /// `value` inside the parabolic ball around `center`, zero outside.
    Spot { center: Point, radius: f64, value: f64 },
}

impl ScalarProfile {
    pub fn eval(&self, p: &Point, n: usize) -> f64 {
        match self {
            ScalarProfile::Zero => 0.0,
            ScalarProfile::Const { v } => *v,
            ScalarProfile::Spot { center, radius, value } => {
                if parabolic_distance(center, p, n) < *radius {
                    *value
                } else {
                    0.0
                }
            }
        }
    }
}

/// Pointwise realized coefficients at one node.
#[derive(Debug, Clone, Copy)]
pub struct NodeCoeffs {
    pub a: [[f64; 3]; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
    pub c0: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub form: Form,
    /// Ellipticity constant: nu |xi|^2 <= a xi . xi and |a_ij| <= 1/nu.
    pub nu: f64,
    pub a: MatrixProfile,
    pub b: VectorProfile,
    /// Flux drift; zero in nondivergence form.
    pub c: VectorProfile,
    pub c0: ScalarProfile,
    /// Envelope the lower-order terms are claimed to respect.
    pub gamma: GammaProfile,
}

impl CoefficientSet {
    pub fn heat(form: Form) -> Self {
        CoefficientSet {
            form,
            nu: 1.0,
            a: MatrixProfile::Identity,
            b: VectorProfile::Zero,
            c: VectorProfile::Zero,
            c0: ScalarProfile::Zero,
            gamma: GammaProfile::Zero,
        }
    }

    pub fn eval(&self, p: &Point, d: f64, n: usize) -> NodeCoeffs {
        let d = if d.is_finite() { d } else { 0.0 };
        NodeCoeffs {
            a: self.a.eval(p, n),
            b: self.b.eval(p, d, n),
            c: self.c.eval(p, d, n),
            c0: self.c0.eval(p, n),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EllipticityReport {
    pub ok: bool,
    /// min over samples of (a xi . xi - nu |xi|^2); negative means failure.
    pub min_margin: f64,
    /// max over samples of (|a_ij| - 1/nu); positive means failure.
    pub max_entry_excess: f64,
    pub witness: Option<Point>,
}

/// Uniform ellipticity sampled at random occupied nodes and random
/// directions.
pub fn check_uniform_ellipticity(
    cs: &CoefficientSet,
    cl: &Classified,
    trials: usize,
    seed: u64,
) -> EllipticityReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g = &cl.grid;
    let n = g.n;
    let occupied: Vec<usize> = (0..g.node_count()).filter(|&i| cl.occupied(i)).collect();
    let mut rep = EllipticityReport {
        ok: true,
        min_margin: f64::INFINITY,
        max_entry_excess: f64::NEG_INFINITY,
        witness: None,
    };
    if occupied.is_empty() {
        rep.min_margin = 0.0;
        rep.max_entry_excess = 0.0;
        return rep;
    }
    for _ in 0..trials {
        let node = occupied[rng.random_range(0..occupied.len())];
        let p = g.point(node);
        let a = cs.a.eval(&p, n);
        let mut xi = [0.0; 3];
        let mut norm2 = 0.0;
        for v in xi.iter_mut().take(n) {
            *v = rng.random::<f64>() * 2.0 - 1.0;
            norm2 += *v * *v;
        }
        if norm2 < 1e-12 {
            continue;
        }
        let mut quad = 0.0;
        let mut entry = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                quad += a[i][j] * xi[i] * xi[j];
                entry = entry.max(a[i][j].abs());
            }
        }
        let margin = quad - cs.nu * norm2;
        let excess = entry - 1.0 / cs.nu;
        if margin < rep.min_margin || excess > rep.max_entry_excess {
            rep.witness = Some(p);
        }
        rep.min_margin = rep.min_margin.min(margin);
        rep.max_entry_excess = rep.max_entry_excess.max(excess);
    }
    rep.ok = rep.min_margin >= -1e-12 && rep.max_entry_excess <= 1e-12;
    rep
}

/// Verify `|b|, |c| <= gamma(d)/d` at every occupied node with d > 0;
/// returns the pass flag and the worst excess over the envelope.
pub fn check_blowup_envelope(
    cs: &CoefficientSet,
    cl: &Classified,
    dist: &GridField,
) -> (bool, f64) {
    let g = &cl.grid;
    let n = g.n;
    let mut worst = f64::NEG_INFINITY;
    for node in 0..g.node_count() {
        if !cl.occupied(node) {
            continue;
        }
        let d = dist.data[node];
        if !(d > 0.0) {
            continue;
        }
        let p = g.point(node);
        let coeffs = cs.eval(&p, d, n);
        let envelope = cs.gamma.eval(d) / d;
        for i in 0..n {
            worst = worst.max(coeffs.b[i].abs() - envelope);
            worst = worst.max(coeffs.c[i].abs() - envelope);
        }
    }
    if worst == f64::NEG_INFINITY {
        worst = 0.0;
    }
    (worst <= 1e-12, worst)
}

/// Cutoff regularization: the operator becomes the heat operator in the
/// collar `d < rho*eps/2` and is untouched beyond `d > rho*eps`.
#[derive(Debug, Clone)]
pub struct RegularizedOperator {
    pub base: CoefficientSet,
    pub rho: f64,
    pub eps: f64,
    pub eta: GridField,
    /// Spatial gradient of eta per node, same stencil as the sign check.
    pub grad_eta: Vec<[f64; 3]>,
    pub dist: GridField,
}

/// Centered spatial difference of a nodal value, degrading to one-sided at
/// nodes whose neighbor is missing or unoccupied, and to zero if isolated.
fn spatial_diff<F: Fn(usize) -> f64>(
    g: &Grid,
    occ: &dyn Fn(usize) -> bool,
    val: F,
    node: usize,
    axis: usize,
) -> f64 {
    let left = g.neighbor(node, axis, -1).filter(|&nb| occ(nb));
    let right = g.neighbor(node, axis, 1).filter(|&nb| occ(nb));
    match (left, right) {
        (Some(l), Some(r)) => (val(r) - val(l)) / (2.0 * g.h),
        (Some(l), None) => (val(node) - val(l)) / g.h,
        (None, Some(r)) => (val(r) - val(node)) / g.h,
        (None, None) => 0.0,
    }
}

pub fn regularize_coeffs(
    base: &CoefficientSet,
    cl: &Classified,
    dist: &GridField,
    rho: f64,
    eps: f64,
) -> Result<RegularizedOperator> {
    if !(rho > 0.0 && rho <= 1.0) || !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::BadParams(format!(
            "cutoff scales must lie in (0, 1], got rho={rho} eps={eps}"
        )));
    }
    let g = &cl.grid;
    let ramp = rho * eps / 2.0;
    if ramp < 2.0 * g.para_cell() {
        return Err(Error::RampResolution(format!(
            "cutoff ramp {ramp:.4} thinner than 2 cells ({:.4}); refine the grid or raise eps",
            g.para_cell()
        )));
    }
    let mut eta = GridField::zeros(g);
    for node in 0..g.node_count() {
        let d = dist.data[node];
        eta.data[node] = if d.is_finite() { ((d - ramp) / ramp).clamp(0.0, 1.0) } else { 0.0 };
    }
    let occ = |nb: usize| cl.occupied(nb);
    let mut grad_eta = vec![[0.0; 3]; g.node_count()];
    for node in 0..g.node_count() {
        if !cl.occupied(node) {
            continue;
        }
        let mut grad = [0.0; 3];
        for (axis, slot) in grad.iter_mut().enumerate().take(g.n) {
            *slot = spatial_diff(g, &occ, |m| eta.data[m], node, axis);
        }
        grad_eta[node] = grad;
    }
    Ok(RegularizedOperator {
        base: base.clone(),
        rho,
        eps,
        eta,
        grad_eta,
        dist: dist.clone(),
    })
}

impl RegularizedOperator {
    pub fn form(&self) -> Form {
        self.base.form
    }

    pub fn eval_node(&self, g: &Grid, node: usize) -> NodeCoeffs {
        let p = g.point(node);
        let d = self.dist.data[node];
        let e = self.eta.data[node];
        let raw = self.base.eval(&p, d, g.n);
        let mut a = [[0.0; 3]; 3];
        for i in 0..g.n {
            for j in 0..g.n {
                let id = if i == j { 1.0 } else { 0.0 };
                a[i][j] = e * raw.a[i][j] + (1.0 - e) * id;
            }
        }
        let mut b = [0.0; 3];
        let mut c = [0.0; 3];
        let mut c0 = e * raw.c0;
        for i in 0..g.n {
            b[i] = e * raw.b[i];
            c[i] = e * raw.c[i];
            c0 += self.grad_eta[node][i] * raw.c[i];
        }
        NodeCoeffs { a, b, c, c0 }
    }
}

/// Coefficients realized as per-node arrays: the form the mollifier and the
/// divergence-to-nondivergence rewrite work on.
#[derive(Debug, Clone)]
pub struct SampledOperator {
    pub form: Form,
    pub grid: Grid,
    pub a: Vec<[[f64; 3]; 3]>,
    pub b: Vec<[f64; 3]>,
    pub c: Vec<[f64; 3]>,
    pub c0: Vec<f64>,
}

impl SampledOperator {
    pub fn from_source(src: &OperatorSource, grid: &Grid) -> SampledOperator {
        let nodes = grid.node_count();
        let mut out = SampledOperator {
            form: src.form(),
            grid: grid.clone(),
            a: vec![[[0.0; 3]; 3]; nodes],
            b: vec![[0.0; 3]; nodes],
            c: vec![[0.0; 3]; nodes],
            c0: vec![0.0; nodes],
        };
        for node in 0..nodes {
            let nc = src.eval_node(grid, node);
            out.a[node] = nc.a;
            out.b[node] = nc.b;
            out.c[node] = nc.c;
            out.c0[node] = nc.c0;
        }
        out
    }

    /// Mollify every coefficient array at parabolic width (eps_m, eps_m^2).
    pub fn mollified(&self, eps_m: f64) -> Result<SampledOperator> {
        let mut out = self.clone();
        for i in 0..3 {
            for j in 0..3 {
                let comp: Vec<f64> = self.a.iter().map(|m| m[i][j]).collect();
                let sm = mollify_field(&self.grid, &comp, eps_m)?;
                for (node, v) in sm.into_iter().enumerate() {
                    out.a[node][i][j] = v;
                }
            }
            let compb: Vec<f64> = self.b.iter().map(|m| m[i]).collect();
            let smb = mollify_field(&self.grid, &compb, eps_m)?;
            let compc: Vec<f64> = self.c.iter().map(|m| m[i]).collect();
            let smc = mollify_field(&self.grid, &compc, eps_m)?;
            for node in 0..self.grid.node_count() {
                out.b[node][i] = smb[node];
                out.c[node][i] = smc[node];
            }
        }
        out.c0 = mollify_field(&self.grid, &self.c0, eps_m)?;
        Ok(out)
    }

    /// Rewrite a divergence-form operator to nondivergence form:
    /// `b~_i = -D_j a_ij + b_i - c_i`, `c0~ = c0 - D_i c_i`.
    pub fn to_nondivergence(&self, cl: &Classified) -> Result<SampledOperator> {
        if self.form != Form::Divergence {
            return Err(Error::BadParams("rewrite expects a divergence-form operator".into()));
        }
        let g = &self.grid;
        let occ = |nb: usize| cl.occupied(nb);
        let mut out = self.clone();
        out.form = Form::NonDivergence;
        for node in 0..g.node_count() {
            if !cl.occupied(node) {
                continue;
            }
            for i in 0..g.n {
                let mut div_a = 0.0;
                for j in 0..g.n {
                    div_a += spatial_diff(g, &occ, |m| self.a[m][i][j], node, j);
                }
                out.b[node][i] = -div_a + self.b[node][i] - self.c[node][i];
                out.c[node][i] = 0.0;
            }
            let mut div_c = 0.0;
            for i in 0..g.n {
                div_c += spatial_diff(g, &occ, |m| self.c[m][i], node, i);
            }
            out.c0[node] = self.c0[node] - div_c;
        }
        Ok(out)
    }
}

/// The one interface the assembler consumes; every coefficient pipeline stage
/// ends up here.
pub enum OperatorSource<'a> {
    Plain { coeffs: &'a CoefficientSet, dist: &'a GridField },
    Regularized(&'a RegularizedOperator),
    Sampled(&'a SampledOperator),
}

impl OperatorSource<'_> {
    pub fn form(&self) -> Form {
        match self {
            OperatorSource::Plain { coeffs, .. } => coeffs.form,
            OperatorSource::Regularized(r) => r.form(),
            OperatorSource::Sampled(s) => s.form,
        }
    }

    pub fn eval_node(&self, g: &Grid, node: usize) -> NodeCoeffs {
        match self {
            OperatorSource::Plain { coeffs, dist } => {
                coeffs.eval(&g.point(node), dist.data[node], g.n)
            }
            OperatorSource::Regularized(r) => r.eval_node(g, node),
            OperatorSource::Sampled(s) => NodeCoeffs {
                a: s.a[node],
                b: s.b[node],
                c: s.c[node],
                c0: s.c0[node],
            },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    pub ok: bool,
    /// Nondivergence: min c0. Divergence: min tent integral.
    pub worst: f64,
    pub witness: Option<Point>,
}

/// Discrete sign condition `L 1 >= 0`. Nondivergence form needs `c0 >= 0`
/// nodewise; divergence form needs `integral(c0 phi + c_i D_i phi) >= 0`
/// for a spanning family of tents, one per interior node, realized with the
/// same centered gradient stencil the regularization uses.
pub fn check_sign_condition(src: &OperatorSource, cl: &Classified) -> SignReport {
    let g = &cl.grid;
    let n = g.n;
    let mut worst = f64::INFINITY;
    let mut witness = None;
    let mut scale = 0.0f64;
    match src.form() {
        Form::NonDivergence => {
            for node in 0..g.node_count() {
                if !cl.occupied(node) {
                    continue;
                }
                let c0 = src.eval_node(g, node).c0;
                scale = scale.max(c0.abs());
                if c0 < worst {
                    worst = c0;
                    witness = Some(g.point(node));
                }
            }
        }
        Form::Divergence => {
            let vol = g.cell_volume();
            for node in 0..g.node_count() {
                if cl.class[node] != crate::mask::BoundaryClass::Interior {
                    continue;
                }
                let center = src.eval_node(g, node);
                let mut tent = center.c0;
                scale = scale.max(center.c0.abs());
                for axis in 0..n {
                    // the tent's gradient lives at the face neighbors:
                    // D_i phi = +-1/(2h) one step away from the peak
                    if let Some(l) = g.neighbor(node, axis, -1) {
                        let cl_ = src.eval_node(g, l).c[axis];
                        tent += cl_ / (2.0 * g.h);
                        scale = scale.max(cl_.abs() / (2.0 * g.h));
                    }
                    if let Some(r) = g.neighbor(node, axis, 1) {
                        let cr = src.eval_node(g, r).c[axis];
                        tent -= cr / (2.0 * g.h);
                        scale = scale.max(cr.abs() / (2.0 * g.h));
                    }
                }
                let tent = tent * vol;
                if tent < worst {
                    worst = tent;
                    witness = Some(g.point(node));
                }
            }
            scale *= vol;
        }
    }
    if worst == f64::INFINITY {
        worst = 0.0;
        witness = None;
    }
    let tol = 1e-9 * (1.0 + scale);
    SignReport { ok: worst >= -tol, worst, witness }
}

/// Truncated discrete Gaussian smoothing at parabolic width (eps_m, eps_m^2):
/// separable passes over each spatial axis and then time, kernel cut at
/// 3 eps_m and renormalized per node, so constants are preserved even at the
/// array edges.
pub fn mollify_field(grid: &Grid, data: &[f64], eps_m: f64) -> Result<Vec<f64>> {
    if eps_m < 2.0 * grid.h {
        return Err(Error::BadParams(format!(
            "mollifier width {eps_m} below the 2h floor {}",
            2.0 * grid.h
        )));
    }
    if data.len() != grid.node_count() {
        return Err(Error::BadParams("field length does not match the grid".into()));
    }
    let mut cur = data.to_vec();
    for axis in 0..grid.n {
        cur = smooth_axis(grid, &cur, axis, eps_m, grid.h);
    }
    cur = smooth_axis(grid, &cur, 3, eps_m * eps_m, grid.tau);
    Ok(cur)
}

fn smooth_axis(grid: &Grid, data: &[f64], axis: usize, width: f64, step: f64) -> Vec<f64> {
    let radius = (3.0 * width / step).ceil() as isize;
    let weights: Vec<f64> = (-radius..=radius)
        .map(|k| {
            let x = k as f64 * step;
            (-x * x / (2.0 * width * width)).exp()
        })
        .collect();
    let mut out = vec![0.0; data.len()];
    for (node, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        let mut mass = 0.0;
        for (wi, k) in (-radius..=radius).enumerate() {
            let mut target = Some(node);
            let steps = k.unsigned_abs();
            let dir = if k < 0 { -1 } else { 1 };
            for _ in 0..steps {
                target = target.and_then(|m| grid.neighbor(m, axis, dir));
            }
            if let Some(m) = target {
                acc += weights[wi] * data[m];
                mass += weights[wi];
            }
        }
        *slot = acc / mass;
    }
    out
}
