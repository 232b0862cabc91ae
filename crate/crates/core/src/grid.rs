//! Uniform space-time grids.
//!
//! Nodes sit at cell centers: axis `i` has `nx[i]` cells of width `h`
//! starting at `x_lo[i]`, and there are `nt` time cells of depth `tau`.
//! The default coupling is `tau = h^2` so one cell is roughly a unit cube
//! of the parabolic metric; stiff marches may override it.

use crate::error::{Error, Result};
use crate::geom::Point;
use serde::{Deserialize, Serialize};

/// Closed axis-aligned space-time box.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BBox {
    pub x_lo: [f64; 3],
    pub x_hi: [f64; 3],
    pub t_lo: f64,
    pub t_hi: f64,
}

impl BBox {
    pub fn contains(&self, p: &Point, n: usize) -> bool {
        if p.t < self.t_lo || p.t > self.t_hi {
            return false;
        }
        (0..n).all(|i| p.x[i] >= self.x_lo[i] && p.x[i] <= self.x_hi[i])
    }

    pub fn pad(&self, n: usize, dx: f64, dt: f64) -> BBox {
        let mut b = *self;
        for i in 0..n {
            b.x_lo[i] -= dx;
            b.x_hi[i] += dx;
        }
        b.t_lo -= dt;
        b.t_hi += dt;
        b
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub tau: f64,
    pub x_lo: [f64; 3],
    pub nx: [usize; 3],
    pub t_lo: f64,
    pub nt: usize,
}

pub const MIN_CELLS_PER_AXIS: usize = 4;

impl Grid {
    pub fn new(
        n: usize,
        h: f64,
        tau: f64,
        x_lo: [f64; 3],
        nx: [usize; 3],
        t_lo: f64,
        nt: usize,
    ) -> Result<Grid> {
        if !(1..=3).contains(&n) {
            return Err(Error::InvalidGrid(format!("dimension {n} not in 1..=3")));
        }
        if !(h > 0.0) || !(tau > 0.0) {
            return Err(Error::InvalidGrid("h and tau must be positive".into()));
        }
        for i in 0..n {
            if nx[i] < MIN_CELLS_PER_AXIS {
                return Err(Error::InvalidGrid(format!(
                    "axis {i} has {} cells, need at least {MIN_CELLS_PER_AXIS}",
                    nx[i]
                )));
            }
        }
        if nt < MIN_CELLS_PER_AXIS {
            return Err(Error::InvalidGrid(format!(
                "time axis has {nt} cells, need at least {MIN_CELLS_PER_AXIS}"
            )));
        }
        let mut nx_full = [1usize; 3];
        nx_full[..n].copy_from_slice(&nx[..n]);
        Ok(Grid { n, h, tau, x_lo, nx: nx_full, t_lo, nt })
    }

    /// Smallest grid with spacing `h`, `tau` whose cells cover `bbox`.
    pub fn cover(n: usize, h: f64, tau: f64, bbox: &BBox) -> Result<Grid> {
        let mut nx = [1usize; 3];
        for i in 0..n {
            let span = bbox.x_hi[i] - bbox.x_lo[i];
            nx[i] = (span / h).ceil().max(1.0) as usize;
        }
        let nt = ((bbox.t_hi - bbox.t_lo) / tau).ceil().max(1.0) as usize;
        Grid::new(n, h, tau, bbox.x_lo, nx, bbox.t_lo, nt)
    }

    /// `cover` with the default coupling `tau = h^2`.
    pub fn cover_default(n: usize, h: f64, bbox: &BBox) -> Result<Grid> {
        Grid::cover(n, h, h * h, bbox)
    }

    pub fn slice_len(&self) -> usize {
        self.nx[0] * self.nx[1] * self.nx[2]
    }

    pub fn node_count(&self) -> usize {
        self.slice_len() * self.nt
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.n as i32) * self.tau
    }

    /// Cell diameter in the parabolic metric.
    pub fn para_cell(&self) -> f64 {
        self.h.max(self.tau.sqrt())
    }

    pub fn index(&self, ix: [usize; 3], it: usize) -> usize {
        debug_assert!(it < self.nt);
        let s = ix[0] + self.nx[0] * (ix[1] + self.nx[1] * ix[2]);
        it * self.slice_len() + s
    }

    pub fn spatial_of(&self, node: usize) -> usize {
        node % self.slice_len()
    }

    pub fn slice_of(&self, node: usize) -> usize {
        node / self.slice_len()
    }

    pub fn coords(&self, node: usize) -> ([usize; 3], usize) {
        let it = node / self.slice_len();
        let mut s = node % self.slice_len();
        let i0 = s % self.nx[0];
        s /= self.nx[0];
        let i1 = s % self.nx[1];
        let i2 = s / self.nx[1];
        ([i0, i1, i2], it)
    }

    /// Cell-center coordinates of a node.
    pub fn point(&self, node: usize) -> Point {
        let (ix, it) = self.coords(node);
        let mut x = [0.0; 3];
        for i in 0..3 {
            x[i] = self.x_lo[i] + (ix[i] as f64 + 0.5) * self.h;
        }
        Point { x, t: self.t_lo + (it as f64 + 0.5) * self.tau }
    }

    /// Face neighbor along `axis` (0..n spatial, 3 = time), `dir` in {-1, +1}.
    /// `None` when the step leaves the grid.
    pub fn neighbor(&self, node: usize, axis: usize, dir: isize) -> Option<usize> {
        let (mut ix, mut it) = self.coords(node);
        if axis == 3 {
            let nit = it as isize + dir;
            if nit < 0 || nit >= self.nt as isize {
                return None;
            }
            it = nit as usize;
        } else {
            debug_assert!(axis < self.n);
            let ni = ix[axis] as isize + dir;
            if ni < 0 || ni >= self.nx[axis] as isize {
                return None;
            }
            ix[axis] = ni as usize;
        }
        Some(self.index(ix, it))
    }

    pub fn bbox(&self) -> BBox {
        let mut x_hi = self.x_lo;
        for i in 0..self.n {
            x_hi[i] = self.x_lo[i] + self.nx[i] as f64 * self.h;
        }
        BBox {
            x_lo: self.x_lo,
            x_hi,
            t_lo: self.t_lo,
            t_hi: self.t_lo + self.nt as f64 * self.tau,
        }
    }

    /// Anisotropic rescale of the grid metadata: lengths shrink by `rho`,
    /// times by `rho^2`; node indices are unchanged.
    pub fn rescaled(&self, rho: f64) -> Grid {
        let mut g = self.clone();
        g.h /= rho;
        g.tau /= rho * rho;
        for i in 0..3 {
            g.x_lo[i] /= rho;
        }
        g.t_lo /= rho * rho;
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_bbox() -> BBox {
        BBox { x_lo: [0.0; 3], x_hi: [1.0, 1.0, 1.0], t_lo: 0.0, t_hi: 1.0 }
    }

    #[test]
    fn cover_meets_minimum() {
        let g = Grid::cover_default(1, 1.0 / 8.0, &unit_bbox()).unwrap();
        assert_eq!(g.nx[0], 8);
        assert_eq!(g.nt, 64);
        assert!(Grid::cover_default(1, 0.5, &unit_bbox()).is_err()); // 2 cells per axis
    }

    #[test]
    fn indexing_round_trips() {
        let g = Grid::new(2, 0.25, 0.0625, [0.0; 3], [4, 5, 1], 0.0, 6).unwrap();
        for node in 0..g.node_count() {
            let (ix, it) = g.coords(node);
            assert_eq!(g.index(ix, it), node);
        }
    }

    #[test]
    fn nodes_are_cell_centers() {
        let g = Grid::cover_default(1, 0.25, &unit_bbox()).unwrap();
        let p = g.point(g.index([0, 0, 0], 0));
        assert!((p.x[0] - 0.125).abs() < 1e-15);
        assert!((p.t - 0.0625 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn neighbors_respect_bounds() {
        let g = Grid::cover_default(1, 0.25, &unit_bbox()).unwrap();
        let first = g.index([0, 0, 0], 0);
        assert!(g.neighbor(first, 0, -1).is_none());
        assert!(g.neighbor(first, 3, -1).is_none());
        let nb = g.neighbor(first, 0, 1).unwrap();
        assert_eq!(g.coords(nb).0[0], 1);
    }

    #[test]
    fn rescale_metadata() {
        let g = Grid::cover_default(1, 0.25, &unit_bbox()).unwrap();
        let r = g.rescaled(2.0);
        assert!((r.h - 0.125).abs() < 1e-15);
        assert!((r.tau - 0.0625 / 4.0).abs() < 1e-15);
        assert_eq!(r.node_count(), g.node_count());
    }
}
