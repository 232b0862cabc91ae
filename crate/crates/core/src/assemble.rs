//! Implicit-Euler slice systems for the parabolic operators.
//!
//! Each time slice yields one sparse linear system over the slice's
//! non-Dirichlet occupied nodes. The discretization is built to be an
//! M-matrix whenever the coefficients allow it: centered second differences,
//! first-order upwinding for drift chosen by sign, two-point fluxes with
//! arithmetic face averages in divergence form, and the 7-point diagonal
//! splitting for cross derivatives. When `|a_ij| > min(a_ii, a_jj)` no
//! monotone fixed stencil exists; assembly proceeds and reports the
//! violation instead of failing.

use crate::coeffs::{Form, OperatorSource};
use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mask::{BoundaryClass, Classified};

/// Right-hand side data for one solve.
pub enum Load<'a> {
    /// Nondivergence data f evaluated at node points.
    Scalar(&'a dyn Fn(&Point) -> f64),
    /// Divergence data f = f_0 - D_i f_i; the derivative lands in the load
    /// by centered differences of `fi` at node points.
    Components { f0: &'a dyn Fn(&Point) -> f64, fi: Vec<&'a dyn Fn(&Point) -> f64> },
    /// Precomputed per-node values (cutoff loads in the approximation
    /// sequence).
    Field(&'a [f64]),
}

impl Load<'_> {
    pub(crate) fn eval(&self, g: &crate::grid::Grid, node: usize) -> f64 {
        match self {
            Load::Scalar(f) => f(&g.point(node)),
            Load::Components { f0, fi } => {
                let p = g.point(node);
                let mut v = f0(&p);
                for (i, f) in fi.iter().enumerate() {
                    let mut lo = p;
                    let mut hi = p;
                    lo.x[i] -= g.h;
                    hi.x[i] += g.h;
                    v -= (f(&hi) - f(&lo)) / (2.0 * g.h);
                }
                v
            }
            Load::Field(vals) => vals[node],
        }
    }
}

/// One slice's linear system in CSR over local unknown indices.
#[derive(Debug, Clone)]
pub struct SliceSystem {
    pub it: usize,
    /// spatial index -> local unknown index; `None` for Dirichlet/exterior.
    pub unknown_of_spatial: Vec<Option<usize>>,
    pub spatial_of_unknown: Vec<usize>,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub vals: Vec<f64>,
    pub rhs: Vec<f64>,
    /// Sum of every stencil coefficient of the row, including links to
    /// known-zero neighbors that never enter the matrix.
    pub full_row_sums: Vec<f64>,
    /// Rows where some off-diagonal came out positive.
    pub monotonicity_violations: usize,
    /// Stencil taps that fell on unoccupied nodes and were pinned to zero.
    pub ghost_hits: usize,
    /// True when every row couples only adjacent unknowns (n = 1).
    pub tridiagonal: bool,
}

impl SliceSystem {
    pub fn unknowns(&self) -> usize {
        self.spatial_of_unknown.len()
    }

    pub fn m_matrix_ok(&self) -> bool {
        self.monotonicity_violations == 0
    }

    /// y = A x over local indices.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.unknowns()];
        for (row, slot) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.indptr[row]..self.indptr[row + 1] {
                acc += self.vals[k] * x[self.indices[k]];
            }
            *slot = acc;
        }
        y
    }
}

/// One PDE node's discrete-operator row over the current slice: the
/// diagonal carries 1/tau + c0 plus all stencil mass moved off the taps;
/// taps are (global occupied node, weight) pairs, parabolic nodes included.
/// Taps that leave the grid or land outside the domain are pinned to zero
/// and only counted.
pub(crate) struct StencilRow {
    pub diag: f64,
    pub taps: Vec<(usize, f64)>,
    pub full_sum: f64,
    pub ghost_hits: usize,
    pub violations: usize,
}

impl StencilRow {
    fn tap(&mut self, target: Option<usize>, w: f64) {
        self.full_sum += w;
        match target {
            Some(m) => self.taps.push((m, w)),
            None => self.ghost_hits += 1,
        }
    }
}

/// Build the discrete row of the operator at one PDE node. Shared between
/// system assembly (which drops known-zero Dirichlet taps) and direct
/// operator application (which reads real field values at every tap).
pub(crate) fn stencil_row(
    src: &OperatorSource,
    cl: &Classified,
    node: usize,
) -> Result<StencilRow> {
    let g = &cl.grid;
    let n = g.n;
    let nc = src.eval_node(g, node);
    if !nc.c0.is_finite()
        || nc.a[..n].iter().any(|r| r[..n].iter().any(|v| !v.is_finite()))
        || nc.b[..n].iter().any(|v| !v.is_finite())
        || nc.c[..n].iter().any(|v| !v.is_finite())
    {
        return Err(Error::BadParams(format!("non-finite coefficients at node {node}")));
    }

    // resolve a stencil tap within this slice; occupied nodes keep their id
    let tap_at = |steps: &[(usize, isize)]| -> Option<usize> {
        let mut cur = Some(node);
        for &(axis, dir) in steps {
            cur = cur.and_then(|m| g.neighbor(m, axis, dir));
        }
        cur.filter(|&m| cl.occupied(m))
    };

    let form = src.form();
    let mut row = StencilRow {
        diag: 0.0,
        taps: Vec::with_capacity(8),
        full_sum: 0.0,
        ghost_hits: 0,
        violations: 0,
    };
    let h = g.h;
    let h2 = h * h;

    // time derivative and zero-order term
    row.diag += 1.0 / g.tau + nc.c0;
    row.full_sum += 1.0 / g.tau + nc.c0;

    // second-order part: split off |a_ij| onto the diagonal stencils
    let mut cross_abs = [0.0; 3];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                cross_abs[i] += nc.a[i][j].abs();
            }
        }
    }
    for i in 0..n {
        let face_coeff = nc.a[i][i] - cross_abs[i];
        if face_coeff < -1e-12 {
            row.violations += 1;
        }
        match form {
            Form::NonDivergence => {
                row.diag += 2.0 * face_coeff / h2;
                row.full_sum += 2.0 * face_coeff / h2;
                row.tap(tap_at(&[(i, -1)]), -face_coeff / h2);
                row.tap(tap_at(&[(i, 1)]), -face_coeff / h2);
            }
            Form::Divergence => {
                // two-point flux with arithmetic face averages; the
                // cross split is subtracted at the node value
                for dir in [-1isize, 1] {
                    let a_nb = match g.neighbor(node, i, dir) {
                        Some(m) if cl.occupied(m) => src.eval_node(g, m).a[i][i],
                        _ => nc.a[i][i],
                    };
                    let a_face = 0.5 * (nc.a[i][i] + a_nb) - cross_abs[i];
                    if a_face < -1e-12 {
                        row.violations += 1;
                    }
                    row.diag += a_face / h2;
                    row.full_sum += a_face / h2;
                    row.tap(tap_at(&[(i, dir)]), -a_face / h2);
                }
            }
        }
    }
    // diagonal second differences along the cross directions
    for i in 0..n {
        for j in (i + 1)..n {
            let aij = nc.a[i][j];
            if aij == 0.0 {
                continue;
            }
            let w = aij.abs() / h2;
            let sgn: isize = if aij > 0.0 { 1 } else { -1 };
            row.diag += 2.0 * w;
            row.full_sum += 2.0 * w;
            row.tap(tap_at(&[(i, 1), (j, sgn)]), -w);
            row.tap(tap_at(&[(i, -1), (j, -sgn)]), -w);
        }
    }

    // drift: b, plus the cross-coefficient divergence in divergence form
    for i in 0..n {
        let mut bi = nc.b[i];
        if form == Form::Divergence {
            for j in 0..n {
                if j == i {
                    continue;
                }
                // -D_j(a_ij D_i u) leaves a first-order piece
                // -(D_j a_ij) D_i u after the symmetric split
                let up = match g.neighbor(node, j, 1) {
                    Some(m) if cl.occupied(m) => src.eval_node(g, m).a[i][j],
                    _ => nc.a[i][j],
                };
                let dn = match g.neighbor(node, j, -1) {
                    Some(m) if cl.occupied(m) => src.eval_node(g, m).a[i][j],
                    _ => nc.a[i][j],
                };
                bi -= (up - dn) / (2.0 * h);
            }
        }
        if bi > 0.0 {
            // backward difference: b (u_c - u_l)/h
            row.diag += bi / h;
            row.full_sum += bi / h;
            row.tap(tap_at(&[(i, -1)]), -bi / h);
        } else if bi < 0.0 {
            row.diag += -bi / h;
            row.full_sum += -bi / h;
            row.tap(tap_at(&[(i, 1)]), bi / h);
        }
    }

    // flux drift -D_i(c_i u): anti-upwinded faces keep the off-diagonals
    // nonpositive and reproduce -D_i c_i in the row sum
    if form == Form::Divergence {
        for i in 0..n {
            for dir in [-1isize, 1] {
                let c_nb = match g.neighbor(node, i, dir) {
                    Some(m) if cl.occupied(m) => src.eval_node(g, m).c[i],
                    _ => nc.c[i],
                };
                let c_face = 0.5 * (nc.c[i] + c_nb);
                if dir == 1 {
                    // -(F_r)/h with F_r = c+ u_r + c- u_c
                    row.tap(tap_at(&[(i, 1)]), -c_face.max(0.0) / h);
                    row.diag += -c_face.min(0.0) / h;
                    row.full_sum += -c_face.min(0.0) / h;
                } else {
                    // +(F_l)/h with F_l = c+ u_c + c- u_l
                    row.diag += c_face.max(0.0) / h;
                    row.full_sum += c_face.max(0.0) / h;
                    row.tap(tap_at(&[(i, -1)]), c_face.min(0.0) / h);
                }
            }
        }
    }

    if row.taps.iter().any(|&(_, w)| w > 1e-12) || row.diag <= 0.0 {
        row.violations += 1;
    }
    Ok(row)
}

pub fn assemble_slice(
    src: &OperatorSource,
    cl: &Classified,
    it: usize,
    u_prev: &[f64],
    load: &Load,
) -> Result<SliceSystem> {
    let g = &cl.grid;
    let sl = g.slice_len();
    if it >= g.nt {
        return Err(Error::BadQuery(format!("slice {it} outside 0..{}", g.nt)));
    }
    if u_prev.len() != sl {
        return Err(Error::BadParams("previous-slice vector length mismatch".into()));
    }
    let base = it * sl;
    let mut unknown_of_spatial = vec![None; sl];
    let mut spatial_of_unknown = Vec::new();
    for s in 0..sl {
        let class = cl.class[base + s];
        if class == BoundaryClass::Interior || class == BoundaryClass::FlatTop {
            unknown_of_spatial[s] = Some(spatial_of_unknown.len());
            spatial_of_unknown.push(s);
        }
    }

    let mut indptr = vec![0usize];
    let mut indices = Vec::new();
    let mut vals = Vec::new();
    let mut rhs = Vec::new();
    let mut full_row_sums = Vec::new();
    let mut monotonicity_violations = 0;
    let mut ghost_hits = 0;

    for &s in &spatial_of_unknown {
        let node = base + s;
        let row = stencil_row(src, cl, node)?;
        monotonicity_violations += row.violations;
        ghost_hits += row.ghost_hits;

        // merge duplicate column hits (cross stencils can revisit a tap);
        // taps on Dirichlet nodes carry the known value zero and vanish
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(row.taps.len() + 1);
        let me = unknown_of_spatial[s].unwrap();
        entries.push((me, row.diag));
        for (m, w) in row.taps {
            let Some(j) = unknown_of_spatial[g.spatial_of(m)] else { continue };
            if let Some(e) = entries.iter_mut().find(|e| e.0 == j) {
                e.1 += w;
            } else {
                entries.push((j, w));
            }
        }
        entries.sort_by_key(|e| e.0);
        for (j, w) in entries {
            indices.push(j);
            vals.push(w);
        }
        indptr.push(indices.len());
        rhs.push(load.eval(g, node) + u_prev[s] / g.tau);
        full_row_sums.push(row.full_sum);
    }

    Ok(SliceSystem {
        it,
        unknown_of_spatial,
        spatial_of_unknown,
        indptr,
        indices,
        vals,
        rhs,
        full_row_sums,
        monotonicity_violations,
        ghost_hits,
        tridiagonal: g.n == 1,
    })
}

/// Evaluate the discrete operator on a given field at every PDE node.
/// Unlike assembly, taps on parabolic-boundary nodes read the field's real
/// value there, so supersolution checks of fields that do not vanish on the
/// boundary stay honest. Non-PDE nodes come back NaN.
pub fn apply_operator(
    src: &OperatorSource,
    cl: &Classified,
    field: &[f64],
) -> Result<Vec<f64>> {
    let g = &cl.grid;
    if field.len() != g.node_count() {
        return Err(Error::BadParams("field length does not match grid".into()));
    }
    let sl = g.slice_len();
    let mut out = vec![f64::NAN; g.node_count()];
    for node in 0..g.node_count() {
        let class = cl.class[node];
        if class != BoundaryClass::Interior && class != BoundaryClass::FlatTop {
            continue;
        }
        let row = stencil_row(src, cl, node)?;
        // PDE nodes always have an occupied past neighbor
        let mut acc = row.diag * field[node] - field[node - sl] / g.tau;
        for (m, w) in row.taps {
            acc += w * field[m];
        }
        out[node] = acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{
        CoefficientSet, Form, MatrixProfile, OperatorSource, ScalarProfile, VectorProfile,
    };
    use crate::domain::{make_domain, Generator};
    use crate::grid::Grid;
    use crate::mask::{classify, distance_field, rasterize, GridField};
    use approx::assert_abs_diff_eq;

    fn slab_ctx(h: f64) -> (Classified, GridField) {
        let dom = make_domain(&Generator::HalfSpaceSlab { n: 1, width: 2.0, t_end: 1.0 }).unwrap();
        let grid = Grid::cover_default(1, h, &dom.bbox).unwrap();
        let cl = classify(&rasterize(&dom, &grid));
        let dist = distance_field(&cl);
        (cl, dist)
    }

    fn row_of(sys: &SliceSystem, local: usize) -> (f64, Vec<(usize, f64)>) {
        let mut diag = 0.0;
        let mut off = Vec::new();
        for k in sys.indptr[local]..sys.indptr[local + 1] {
            if sys.indices[k] == local {
                diag = sys.vals[k];
            } else {
                off.push((sys.indices[k], sys.vals[k]));
            }
        }
        (diag, off)
    }

    #[test]
    fn pure_heat_interior_row() {
        let (cl, dist) = slab_ctx(1.0 / 16.0);
        let g = cl.grid.clone();
        let heat = CoefficientSet::heat(Form::NonDivergence);
        let src = OperatorSource::Plain { coeffs: &heat, dist: &dist };
        let prev = vec![0.25; g.slice_len()];
        let one = |_: &Point| 1.0;
        let sys = assemble_slice(&src, &cl, g.nt / 2, &prev, &Load::Scalar(&one)).unwrap();
        assert!(sys.tridiagonal);
        assert!(sys.m_matrix_ok());
        let s = g.spatial_of(g.index([g.nx[0] / 2, 0, 0], 0));
        let local = sys.unknown_of_spatial[s].unwrap();
        let (diag, off) = row_of(&sys, local);
        let h2 = g.h * g.h;
        assert_abs_diff_eq!(diag, 1.0 / g.tau + 2.0 / h2, epsilon = 1e-9);
        assert_eq!(off.len(), 2);
        for (_, w) in off {
            assert_abs_diff_eq!(w, -1.0 / h2, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(sys.rhs[local], 1.0 + 0.25 / g.tau, epsilon = 1e-12);
    }

    #[test]
    fn positive_drift_upwinds_backward() {
        let (cl, dist) = slab_ctx(1.0 / 16.0);
        let g = cl.grid.clone();
        let mut cs = CoefficientSet::heat(Form::NonDivergence);
        cs.b = VectorProfile::Const { v: [2.0, 0.0, 0.0] };
        let src = OperatorSource::Plain { coeffs: &cs, dist: &dist };
        let prev = vec![0.0; g.slice_len()];
        let zero = |_: &Point| 0.0;
        let sys = assemble_slice(&src, &cl, g.nt / 2, &prev, &Load::Scalar(&zero)).unwrap();
        let s = g.spatial_of(g.index([g.nx[0] / 2, 0, 0], 0));
        let local = sys.unknown_of_spatial[s].unwrap();
        let (diag, off) = row_of(&sys, local);
        let h = g.h;
        assert_abs_diff_eq!(diag, 1.0 / g.tau + 2.0 / (h * h) + 2.0 / h, epsilon = 1e-9);
        let left = off.iter().find(|e| e.0 == local - 1).unwrap().1;
        let right = off.iter().find(|e| e.0 == local + 1).unwrap().1;
        assert_abs_diff_eq!(left, -1.0 / (h * h) - 2.0 / h, epsilon = 1e-9);
        assert_abs_diff_eq!(right, -1.0 / (h * h), epsilon = 1e-9);
        assert!(sys.m_matrix_ok());
    }

    #[test]
    fn row_sums_are_time_plus_zero_order() {
        let (cl, dist) = slab_ctx(1.0 / 16.0);
        let g = cl.grid.clone();
        let mut cs = CoefficientSet::heat(Form::NonDivergence);
        cs.c0 = ScalarProfile::Const { v: 0.3 };
        cs.b = VectorProfile::Const { v: [-1.2, 0.0, 0.0] };
        let src = OperatorSource::Plain { coeffs: &cs, dist: &dist };
        let prev = vec![0.0; g.slice_len()];
        let zero = |_: &Point| 0.0;
        let sys = assemble_slice(&src, &cl, 3, &prev, &Load::Scalar(&zero)).unwrap();
        for &sum in &sys.full_row_sums {
            assert_abs_diff_eq!(sum, 1.0 / g.tau + 0.3, epsilon = 1e-9);
        }
    }

    #[test]
    fn constant_flux_row_sums_cancel() {
        let (cl, dist) = slab_ctx(1.0 / 16.0);
        let g = cl.grid.clone();
        let mut cs = CoefficientSet::heat(Form::Divergence);
        cs.c = VectorProfile::Const { v: [0.9, 0.0, 0.0] };
        let src = OperatorSource::Plain { coeffs: &cs, dist: &dist };
        let prev = vec![0.0; g.slice_len()];
        let zero = |_: &Point| 0.0;
        let sys = assemble_slice(&src, &cl, 3, &prev, &Load::Scalar(&zero)).unwrap();
        assert!(sys.m_matrix_ok());
        for &sum in &sys.full_row_sums {
            assert_abs_diff_eq!(sum, 1.0 / g.tau, epsilon = 1e-9);
        }
    }

    #[test]
    fn divergence_identity_matches_nondivergence() {
        let (cl, dist) = slab_ctx(1.0 / 16.0);
        let g = cl.grid.clone();
        let div = CoefficientSet::heat(Form::Divergence);
        let nd = CoefficientSet::heat(Form::NonDivergence);
        let prev = vec![0.0; g.slice_len()];
        let zero = |_: &Point| 0.0;
        let a = assemble_slice(
            &OperatorSource::Plain { coeffs: &div, dist: &dist },
            &cl,
            5,
            &prev,
            &Load::Scalar(&zero),
        )
        .unwrap();
        let b = assemble_slice(
            &OperatorSource::Plain { coeffs: &nd, dist: &dist },
            &cl,
            5,
            &prev,
            &Load::Scalar(&zero),
        )
        .unwrap();
        assert_eq!(a.indices, b.indices);
        for (x, y) in a.vals.iter().zip(&b.vals) {
            assert_abs_diff_eq!(*x, *y, epsilon = 1e-12);
        }
    }

    #[test]
    fn cross_terms_flag_monotonicity() {
        let dom = make_domain(&Generator::StraightCylinder { n: 2, r: 1.0, t_end: 0.5 }).unwrap();
        let g = Grid::cover(2, 1.0 / 12.0, 1.0 / 144.0, &dom.bbox).unwrap();
        let cl = classify(&rasterize(&dom, &g));
        let dist = distance_field(&cl);
        let prev = vec![0.0; g.slice_len()];
        let zero = |_: &Point| 0.0;
        let mut mild = CoefficientSet::heat(Form::NonDivergence);
        mild.a = MatrixProfile::Cross { diag: 1.0, off: 0.6 };
        let sys = assemble_slice(
            &OperatorSource::Plain { coeffs: &mild, dist: &dist },
            &cl,
            g.nt / 2,
            &prev,
            &Load::Scalar(&zero),
        )
        .unwrap();
        assert!(sys.m_matrix_ok(), "splitting handles |a12| <= min diag");
        assert!(!sys.tridiagonal);

        let mut harsh = mild.clone();
        harsh.a = MatrixProfile::Cross { diag: 1.0, off: 1.4 };
        let sys = assemble_slice(
            &OperatorSource::Plain { coeffs: &harsh, dist: &dist },
            &cl,
            g.nt / 2,
            &prev,
            &Load::Scalar(&zero),
        )
        .unwrap();
        assert!(!sys.m_matrix_ok());
        assert!(sys.monotonicity_violations > 0);
    }

    #[test]
    fn dirichlet_nodes_have_no_rows() {
        let (cl, dist) = slab_ctx(1.0 / 8.0);
        let g = cl.grid.clone();
        let heat = CoefficientSet::heat(Form::NonDivergence);
        let src = OperatorSource::Plain { coeffs: &heat, dist: &dist };
        let prev = vec![0.0; g.slice_len()];
        let zero = |_: &Point| 0.0;
        // slice 0 is entirely parabolic boundary: no unknowns at all
        let sys = assemble_slice(&src, &cl, 0, &prev, &Load::Scalar(&zero)).unwrap();
        assert_eq!(sys.unknowns(), 0);
        let sys = assemble_slice(&src, &cl, 3, &prev, &Load::Scalar(&zero)).unwrap();
        // wall columns are parabolic, so strictly fewer unknowns than cells
        assert!(sys.unknowns() > 0 && sys.unknowns() < g.slice_len());
        for (s, u) in sys.unknown_of_spatial.iter().enumerate() {
            let class = cl.class[3 * g.slice_len() + s];
            match class {
                BoundaryClass::Interior | BoundaryClass::FlatTop => assert!(u.is_some()),
                _ => assert!(u.is_none()),
            }
        }
    }

    #[test]
    fn component_load_applies_centered_divergence() {
        let (cl, dist) = slab_ctx(1.0 / 16.0);
        let g = cl.grid.clone();
        let heat = CoefficientSet::heat(Form::Divergence);
        let src = OperatorSource::Plain { coeffs: &heat, dist: &dist };
        let prev = vec![0.0; g.slice_len()];
        let f0 = |_: &Point| 2.0;
        let f1 = |p: &Point| 3.0 * p.x[0];
        let fns: Vec<&dyn Fn(&Point) -> f64> = vec![&f1];
        let load = Load::Components { f0: &f0, fi: fns };
        let sys = assemble_slice(&src, &cl, 4, &prev, &load).unwrap();
        // f = f0 - D_x f1 = 2 - 3
        for &v in &sys.rhs {
            assert_abs_diff_eq!(v, -1.0, epsilon = 1e-9);
        }
    }
}
