//! Dense-tableau simplex for small packing linear programs.
//!
//! Solves `max c'x  s.t.  Ax <= b, x >= 0` with `b >= 0`, so the slack
//! basis is immediately feasible and no phase-1 is needed. Pivoting starts
//! with Dantzig's rule and falls back to Bland's after a stall budget,
//! which rules out cycling on degenerate vertices.

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

const EPS: f64 = 1e-12;

/// `a` is row-major, `a.len() == b.len()`, every row `a[i].len() == c.len()`.
pub fn solve_packing_lp(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let nv = c.len();
    if b.len() != m {
        return Err(Error::Lp(format!("{} rows but {} bounds", m, b.len())));
    }
    if let Some(bad) = a.iter().position(|row| row.len() != nv) {
        return Err(Error::Lp(format!("row {bad} has {} entries, expected {nv}", a[bad].len())));
    }
    if let Some(bad) = b.iter().position(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::Lp(format!("bound {bad} = {} breaks the packing form", b[bad])));
    }
    if a.iter().any(|row| row.iter().any(|v| !v.is_finite())) {
        return Err(Error::Lp("non-finite constraint entry".into()));
    }
    if m == 0 {
        if c.iter().any(|&cj| cj > EPS) {
            return Err(Error::Lp("unbounded: positive objective with no constraints".into()));
        }
        return Ok(LpSolution { objective: 0.0, x: vec![0.0; nv], iterations: 0 });
    }

    // equilibrate: kernel matrices span many orders of magnitude, which
    // wrecks pivot arithmetic; scale columns to unit max, then rows, solve
    // in the scaled variables and map back
    let mut cs = vec![1.0f64; nv];
    for (j, sj) in cs.iter_mut().enumerate() {
        let mx = a.iter().map(|row| row[j].abs()).fold(0.0f64, f64::max);
        if mx > 0.0 {
            *sj = 1.0 / mx;
        }
    }
    let mut rows = vec![vec![0.0f64; nv]; m];
    let mut bs = vec![0.0f64; m];
    for i in 0..m {
        let mut rmax = 0.0f64;
        for j in 0..nv {
            rows[i][j] = a[i][j] * cs[j];
            rmax = rmax.max(rows[i][j].abs());
        }
        let r = if rmax > 0.0 { rmax } else { 1.0 };
        for v in rows[i].iter_mut() {
            *v /= r;
        }
        bs[i] = b[i] / r;
    }
    let cc: Vec<f64> = (0..nv).map(|j| c[j] * cs[j]).collect();
    let scaled = simplex_packing(&rows, &bs, &cc)?;
    let x: Vec<f64> = (0..nv).map(|j| scaled.x[j] * cs[j]).collect();
    let objective = x.iter().zip(c).map(|(xj, cj)| xj * cj).sum();
    Ok(LpSolution { objective, x, iterations: scaled.iterations })
}

fn simplex_packing(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpSolution> {
    let m = a.len();
    let nv = c.len();
    // tableau: m constraint rows + objective row; columns: nv vars, m slacks, rhs
    let cols = nv + m + 1;
    let mut t = vec![vec![0.0f64; cols]; m + 1];
    for i in 0..m {
        t[i][..nv].copy_from_slice(&a[i]);
        t[i][nv + i] = 1.0;
        t[i][cols - 1] = b[i];
    }
    for j in 0..nv {
        t[m][j] = -c[j];
    }
    let mut basis: Vec<usize> = (nv..nv + m).collect();

    let max_iter = 50 * (m + nv).max(100);
    let bland_after = 10 * (m + nv).max(50);
    let mut iter = 0;
    loop {
        // entering column: most negative reduced cost, or Bland's first
        let pivot_col = if iter < bland_after {
            let mut best = (EPS, None);
            for j in 0..nv + m {
                if -t[m][j] > best.0 {
                    best = (-t[m][j], Some(j));
                }
            }
            best.1
        } else {
            (0..nv + m).find(|&j| t[m][j] < -EPS)
        };
        let Some(jc) = pivot_col else {
            break;
        };
        // ratio test; Bland's tie-break on the basis index
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if t[i][jc] > EPS {
                let ratio = t[i][cols - 1] / t[i][jc];
                let better = match leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < lr - EPS || (ratio < lr + EPS && basis[i] < basis[li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((ir, _)) = leave else {
            return Err(Error::Lp("unbounded packing LP".into()));
        };
        // pivot
        let piv = t[ir][jc];
        for v in t[ir].iter_mut() {
            *v /= piv;
        }
        for i in 0..=m {
            if i != ir && t[i][jc].abs() > 0.0 {
                let f = t[i][jc];
                for j in 0..cols {
                    t[i][j] -= f * t[ir][j];
                }
            }
        }
        basis[ir] = jc;
        iter += 1;
        if iter > max_iter {
            return Err(Error::Lp(format!("simplex stalled after {iter} iterations")));
        }
    }

    let mut x = vec![0.0; nv];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < nv {
            x[bj] = t[i][cols - 1];
        }
    }
    Ok(LpSolution { objective: t[m][cols - 1], x, iterations: iter })
}
