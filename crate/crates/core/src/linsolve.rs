//! Linear solvers for slice systems.
//!
//! n = 1 slices are tridiagonal and go through the Thomas algorithm; larger
//! stencils use BiCGStab with Jacobi preconditioning and fall back to
//! Gauss-Seidel sweeps on breakdown. Every path verifies the final residual
//! against the 1e-10 relative target instead of trusting the recurrence.

use crate::assemble::SliceSystem;
use crate::error::{Error, Result};

pub const REL_RESIDUAL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
    pub method: &'static str,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual_norm(sys: &SliceSystem, x: &[f64]) -> f64 {
    let ax = sys.apply(x);
    let mut acc = 0.0;
    for i in 0..x.len() {
        let r = sys.rhs[i] - ax[i];
        acc += r * r;
    }
    acc.sqrt()
}

/// Direct solve for rows coupling only adjacent unknowns.
pub fn thomas_solve(sys: &SliceSystem) -> Result<Vec<f64>> {
    let n = sys.unknowns();
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    for row in 0..n {
        for k in sys.indptr[row]..sys.indptr[row + 1] {
            let j = sys.indices[k];
            let v = sys.vals[k];
            if j + 1 == row {
                sub[row] = v;
            } else if j == row {
                diag[row] = v;
            } else if j == row + 1 {
                sup[row] = v;
            } else {
                return Err(Error::LinearSolve(format!(
                    "row {row} couples column {j}; system is not tridiagonal"
                )));
            }
        }
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 0..n {
        let denom = diag[i] - sub[i] * if i > 0 { c[i - 1] } else { 0.0 };
        if denom.abs() < 1e-300 {
            return Err(Error::LinearSolve(format!("zero pivot at row {i}")));
        }
        c[i] = sup[i] / denom;
        d[i] = (sys.rhs[i] - sub[i] * if i > 0 { d[i - 1] } else { 0.0 }) / denom;
    }
    let mut x = d;
    for i in (0..n.saturating_sub(1)).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Ok(x)
}

/// Jacobi-preconditioned BiCGStab; `None` on breakdown or stagnation.
pub fn bicgstab_solve(sys: &SliceSystem, tol: f64, max_iter: usize) -> Option<(Vec<f64>, usize)> {
    let n = sys.unknowns();
    let mut inv_diag = vec![0.0; n];
    for row in 0..n {
        let mut d = 0.0;
        for k in sys.indptr[row]..sys.indptr[row + 1] {
            if sys.indices[k] == row {
                d = sys.vals[k];
            }
        }
        if d.abs() < 1e-300 {
            return None;
        }
        inv_diag[row] = 1.0 / d;
    }
    let mut x = vec![0.0; n];
    let mut r: Vec<f64> = sys.rhs.clone();
    let r_hat = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    for it in 0..max_iter {
        if norm2(&r) <= tol {
            return Some((x, it));
        }
        let rho_new: f64 = r_hat.iter().zip(&r).map(|(a, b)| a * b).sum();
        if rho_new.abs() < 1e-290 {
            return None;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let p_hat: Vec<f64> = (0..n).map(|i| p[i] * inv_diag[i]).collect();
        v = sys.apply(&p_hat);
        let denom: f64 = r_hat.iter().zip(&v).map(|(a, b)| a * b).sum();
        if denom.abs() < 1e-290 {
            return None;
        }
        alpha = rho / denom;
        let s: Vec<f64> = (0..n).map(|i| r[i] - alpha * v[i]).collect();
        if norm2(&s) <= tol {
            for i in 0..n {
                x[i] += alpha * p_hat[i];
            }
            return Some((x, it + 1));
        }
        let s_hat: Vec<f64> = (0..n).map(|i| s[i] * inv_diag[i]).collect();
        let t = sys.apply(&s_hat);
        let tt: f64 = t.iter().map(|a| a * a).sum();
        if tt < 1e-290 {
            return None;
        }
        omega = t.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>() / tt;
        if omega.abs() < 1e-290 {
            return None;
        }
        for i in 0..n {
            x[i] += alpha * p_hat[i] + omega * s_hat[i];
            r[i] = s[i] - omega * t[i];
        }
    }
    if norm2(&r) <= tol {
        Some((x, max_iter))
    } else {
        None
    }
}

/// Plain Gauss-Seidel sweeps; the slow but steady fallback.
pub fn gauss_seidel_solve(
    sys: &SliceSystem,
    tol: f64,
    max_sweeps: usize,
) -> Option<(Vec<f64>, usize)> {
    let n = sys.unknowns();
    let mut x = vec![0.0; n];
    for sweep in 0..max_sweeps {
        for row in 0..n {
            let mut diag = 0.0;
            let mut acc = sys.rhs[row];
            for k in sys.indptr[row]..sys.indptr[row + 1] {
                let j = sys.indices[k];
                if j == row {
                    diag = sys.vals[k];
                } else {
                    acc -= sys.vals[k] * x[j];
                }
            }
            if diag.abs() < 1e-300 {
                return None;
            }
            x[row] = acc / diag;
        }
        if sweep % 4 == 3 || sweep + 1 == max_sweeps {
            if residual_norm(sys, &x) <= tol {
                return Some((x, sweep + 1));
            }
        }
    }
    None
}

/// Solve one slice system to the relative residual target.
pub fn solve_slice(sys: &SliceSystem) -> Result<(Vec<f64>, SolveStats)> {
    let n = sys.unknowns();
    if n == 0 {
        return Ok((Vec::new(), SolveStats { iterations: 0, residual: 0.0, method: "empty" }));
    }
    let rhs_norm = norm2(&sys.rhs);
    if rhs_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveStats { iterations: 0, residual: 0.0, method: "zero-rhs" },
        ));
    }
    let tol = REL_RESIDUAL * rhs_norm;
    if sys.tridiagonal {
        let x = thomas_solve(sys)?;
        let res = residual_norm(sys, &x);
        if res <= tol * 10.0 {
            return Ok((x, SolveStats { iterations: 1, residual: res, method: "thomas" }));
        }
    }
    if let Some((x, it)) = bicgstab_solve(sys, tol, 40 * n + 200) {
        let res = residual_norm(sys, &x);
        if res <= tol * 10.0 {
            return Ok((x, SolveStats { iterations: it, residual: res, method: "bicgstab" }));
        }
    }
    if let Some((x, it)) = gauss_seidel_solve(sys, tol, 200_000) {
        let res = residual_norm(sys, &x);
        return Ok((x, SolveStats { iterations: it, residual: res, method: "gauss-seidel" }));
    }
    Err(Error::LinearSolve(format!(
        "no solver reached residual {tol:.3e} on a {n}-unknown slice"
    )))
}
