//! Rasterization and discrete boundary geometry.
//!
//! A domain is sampled at cell centers into an occupancy mask. Occupied
//! nodes with an unoccupied face neighbor form the discrete boundary; among
//! those, nodes missing only their future neighbor are "flat tops", the
//! ceilings a shrinking domain leaves behind, and everything else counts as
//! the data-carrying parabolic boundary. The distance field measures the
//! parabolic distance from every occupied node to that parabolic set.

use std::io::Write as _;
use std::path::Path;

use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryClass {
    Exterior,
    Interior,
    Parabolic,
    FlatTop,
}

#[derive(Debug, Clone)]
pub struct Mask {
    pub grid: Grid,
    pub occ: Vec<bool>,
}

/// Occupancy of the grid: the domain indicator sampled at cell centers.
pub fn rasterize(dom: &Domain, grid: &Grid) -> Mask {
    let mut occ = vec![false; grid.node_count()];
    for (node, slot) in occ.iter_mut().enumerate() {
        *slot = dom.inside(&grid.point(node));
    }
    Mask { grid: grid.clone(), occ }
}

#[derive(Debug, Clone)]
pub struct Classified {
    pub grid: Grid,
    pub class: Vec<BoundaryClass>,
    /// Node ids of the parabolic boundary, in index order.
    pub parabolic: Vec<usize>,
}

#[derive(Debug, Clone, Copy, Default, serde::Serialize)]
pub struct ClassCounts {
    pub exterior: usize,
    pub interior: usize,
    pub parabolic: usize,
    pub flat_top: usize,
}

impl Classified {
    pub fn occupied(&self, node: usize) -> bool {
        self.class[node] != BoundaryClass::Exterior
    }

    pub fn counts(&self) -> ClassCounts {
        let mut c = ClassCounts::default();
        for k in &self.class {
            match k {
                BoundaryClass::Exterior => c.exterior += 1,
                BoundaryClass::Interior => c.interior += 1,
                BoundaryClass::Parabolic => c.parabolic += 1,
                BoundaryClass::FlatTop => c.flat_top += 1,
            }
        }
        c
    }
}

fn neighbors_all_occupied(mask: &Mask, node: usize) -> bool {
    let g = &mask.grid;
    for axis in (0..g.n).chain([3]) {
        for dir in [-1, 1] {
            match g.neighbor(node, axis, dir) {
                Some(nb) if mask.occ[nb] => {}
                _ => return false,
            }
        }
    }
    true
}

/// Split occupied nodes into interior, parabolic boundary and flat tops.
pub fn classify(mask: &Mask) -> Classified {
    let g = &mask.grid;
    let interior: Vec<bool> = (0..g.node_count())
        .map(|node| mask.occ[node] && neighbors_all_occupied(mask, node))
        .collect();
    let mut class = vec![BoundaryClass::Exterior; g.node_count()];
    let mut parabolic = Vec::new();
    for node in 0..g.node_count() {
        if !mask.occ[node] {
            continue;
        }
        if interior[node] {
            class[node] = BoundaryClass::Interior;
            continue;
        }
        // flat top: only the future neighbor is missing, and the node rests
        // on interior; near lateral edges the rule falls through to parabolic
        let above_free = match g.neighbor(node, 3, 1) {
            Some(nb) => !mask.occ[nb],
            None => true,
        };
        let below_interior = matches!(g.neighbor(node, 3, -1), Some(nb) if interior[nb]);
        let sides_occupied = (0..g.n).all(|axis| {
            [-1, 1].iter().all(|&dir| {
                matches!(g.neighbor(node, axis, dir), Some(nb) if mask.occ[nb])
            })
        });
        if above_free && below_interior && sides_occupied {
            class[node] = BoundaryClass::FlatTop;
        } else {
            class[node] = BoundaryClass::Parabolic;
            parabolic.push(node);
        }
    }
    Classified { grid: g.clone(), class, parabolic }
}

/// Scalar values attached to grid nodes.
#[derive(Debug, Clone)]
pub struct GridField {
    pub grid: Grid,
    pub data: Vec<f64>,
}

impl GridField {
    pub fn zeros(grid: &Grid) -> GridField {
        GridField { grid: grid.clone(), data: vec![0.0; grid.node_count()] }
    }

    pub fn constant(grid: &Grid, v: f64) -> GridField {
        GridField { grid: grid.clone(), data: vec![v; grid.node_count()] }
    }
}

/// Parabolic distance from each occupied node to the parabolic boundary
/// set; exactly zero on that set, NaN outside the domain.
///
/// Within one slice the minimum over boundary nodes of
/// `max(space_dist, gap)` equals `max(min space_dist, gap)`, so the field is
/// built per spatial column: the column's spatial distance to every slice's
/// boundary set is computed once, then each time level scans those minima
/// in increasing order and stops as soon as they alone exceed the best
/// candidate.
pub fn distance_field(cl: &Classified) -> GridField {
    let g = &cl.grid;
    let mut by_slice: Vec<Vec<usize>> = vec![Vec::new(); g.nt];
    for &node in &cl.parabolic {
        by_slice[g.slice_of(node)].push(node);
    }
    let sl = g.slice_len();
    let mut out = GridField::constant(g, f64::NAN);
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(g.nt);
    for col in 0..sl {
        if !(0..g.nt).any(|it| cl.occupied(it * sl + col)) {
            continue;
        }
        let p = g.point(col);
        order.clear();
        for (s, bnd) in by_slice.iter().enumerate() {
            let mut dmin = f64::INFINITY;
            for &b in bnd {
                let d = p.space_dist(&g.point(b), g.n);
                if d < dmin {
                    dmin = d;
                }
            }
            order.push((dmin, s));
        }
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for it in 0..g.nt {
            let node = it * sl + col;
            if !cl.occupied(node) {
                continue;
            }
            if cl.class[node] == BoundaryClass::Parabolic {
                out.data[node] = 0.0;
                continue;
            }
            let mut best = f64::INFINITY;
            for &(d, s) in &order {
                if d >= best {
                    break;
                }
                let gap = ((it.abs_diff(s)) as f64 * g.tau).sqrt();
                let v = d.max(gap);
                if v < best {
                    best = v;
                }
            }
            out.data[node] = best;
        }
    }
    out
}

/// View a distance field at scale `rho`: coordinates shrink parabolically,
/// so distances divide by `rho`.
pub fn rescale_distance(df: &GridField, rho: f64) -> GridField {
    GridField {
        grid: df.grid.rescaled(rho),
        data: df.data.iter().map(|d| d / rho).collect(),
    }
}

/// Raw export: a small text header line, then f64 little-endian node data
/// in index order.
pub fn write_field_binary(f: &GridField, path: &Path) -> Result<()> {
    let g = &f.grid;
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        w,
        "caloric-field n={} nx={},{},{} nt={} h={} tau={}",
        g.n, g.nx[0], g.nx[1], g.nx[2], g.nt, g.h, g.tau
    )?;
    for v in &f.data {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Grayscale image of the classification: one space-time sheet for n = 1,
/// otherwise the requested time slice.
pub fn write_class_pgm(cl: &Classified, path: &Path, slice: Option<usize>) -> Result<()> {
    let g = &cl.grid;
    let shade = |c: BoundaryClass| -> u8 {
        match c {
            BoundaryClass::Exterior => 0,
            BoundaryClass::Interior => 255,
            BoundaryClass::Parabolic => 90,
            BoundaryClass::FlatTop => 170,
        }
    };
    let (w, h, at): (usize, usize, Box<dyn Fn(usize, usize) -> usize>) = match g.n {
        1 => (g.nx[0], g.nt, Box::new(|ix, row| g.index([ix, 0, 0], g.nt - 1 - row))),
        2 => {
            let it = slice.unwrap_or(g.nt / 2);
            if it >= g.nt {
                return Err(Error::BadQuery(format!("slice {it} outside 0..{}", g.nt)));
            }
            (g.nx[0], g.nx[1], Box::new(move |ix, row| g.index([ix, g.nx[1] - 1 - row, 0], it)))
        }
        _ => {
            return Err(Error::BadQuery("image export supports n <= 2".into()));
        }
    };
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "P5\n{w} {h}\n255")?;
    for row in 0..h {
        for ix in 0..w {
            out.write_all(&[shade(cl.class[at(ix, row)])])?;
        }
    }
    Ok(())
}
