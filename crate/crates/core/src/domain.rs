//! Space-time domain generators.
//!
//! A domain is an open subset of R^n x (0, T) given by a fast membership
//! test plus an explicit list of boundary pieces. The pieces describe the
//! lateral-and-bottom part of the boundary (the part that carries Dirichlet
//! data); exposed ceilings, where the domain ends abruptly in time, are
//! deliberately left out and are instead detected on the grid by the mask
//! classifier.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{parabolic_distance, Point};
use crate::grid::BBox;

/// Named domain constructions with their parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Generator {
    /// Ball of radius `r` dragged over `(0, t_end)`.
    StraightCylinder {
        n: usize,
        #[serde(default = "one")]
        r: f64,
        #[serde(default = "one")]
        t_end: f64,
    },
    /// Box `(0, width) x (-width/2, width/2)^(n-1)` over `(0, t_end)`; the
    /// wall `x_1 = 0` plays the role of a flat piece of boundary.
    HalfSpaceSlab {
        n: usize,
        #[serde(default = "two")]
        width: f64,
        #[serde(default = "one")]
        t_end: f64,
    },
    /// Staircase of dyadic space-time squares joined by thin triangular
    /// connectors; the squares shrink by half at every level.
    ShrinkingCubes {
        #[serde(default = "five")]
        levels: usize,
    },
    /// Unit box with an exponentially thin inward spike removed; the spike
    /// is far below any grid resolution near its tip.
    InnerSpike,
    /// Box with a thin wall inserted at mid-time.
    Slit {
        n: usize,
        #[serde(default = "tenth")]
        width: f64,
    },
    /// Box whose exterior, before the distinguished time, is the region
    /// under the parabola `x = c sqrt(t0 - t)`; `c` tunes how much of a
    /// backward cylinder at the apex the exterior fills.
    Wedge { c: f64 },
    /// No interior at all; useful as a degenerate fixture.
    Empty { n: usize },
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn five() -> usize {
    5
}
fn tenth() -> f64 {
    0.1
}

/// Purely spatial sets used as factors of boundary pieces.
#[derive(Debug, Clone)]
pub enum Spatial {
    Sphere { c: [f64; 3], r: f64 },
    Ball { c: [f64; 3], r: f64 },
    /// Axis-aligned, possibly degenerate along some axes.
    Rect { lo: [f64; 3], hi: [f64; 3] },
    Pt { p: [f64; 3] },
}

fn space_gap(a: &[f64; 3], b: &[f64; 3], n: usize) -> f64 {
    a[..n]
        .iter()
        .zip(&b[..n])
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl Spatial {
    fn dist(&self, x: &[f64; 3], n: usize) -> f64 {
        match self {
            Spatial::Sphere { c, r } => (space_gap(x, c, n) - r).abs(),
            Spatial::Ball { c, r } => (space_gap(x, c, n) - r).max(0.0),
            Spatial::Rect { lo, hi } => {
                let mut s = 0.0;
                for i in 0..n {
                    let g = (lo[i] - x[i]).max(0.0).max(x[i] - hi[i]);
                    s += g * g;
                }
                s.sqrt()
            }
            Spatial::Pt { p } => space_gap(x, p, n),
        }
    }

    fn sample(&self, u: &[f64; 4], n: usize) -> [f64; 3] {
        use std::f64::consts::PI;
        match self {
            Spatial::Sphere { c, r } => {
                let mut x = *c;
                match n {
                    1 => x[0] += if u[0] < 0.5 { -r } else { *r },
                    2 => {
                        let th = 2.0 * PI * u[0];
                        x[0] += r * th.cos();
                        x[1] += r * th.sin();
                    }
                    _ => {
                        let z = 2.0 * u[0] - 1.0;
                        let th = 2.0 * PI * u[1];
                        let rho = (1.0 - z * z).max(0.0).sqrt();
                        x[0] += r * rho * th.cos();
                        x[1] += r * rho * th.sin();
                        x[2] += r * z;
                    }
                }
                x
            }
            Spatial::Ball { c, r } => {
                let mut x = *c;
                match n {
                    1 => x[0] += (2.0 * u[0] - 1.0) * r,
                    2 => {
                        let rho = r * u[0].sqrt();
                        let th = 2.0 * PI * u[1];
                        x[0] += rho * th.cos();
                        x[1] += rho * th.sin();
                    }
                    _ => {
                        let rho = r * u[0].cbrt();
                        let z = 2.0 * u[1] - 1.0;
                        let th = 2.0 * PI * u[2];
                        let pl = (1.0 - z * z).max(0.0).sqrt();
                        x[0] += rho * pl * th.cos();
                        x[1] += rho * pl * th.sin();
                        x[2] += rho * z;
                    }
                }
                x
            }
            Spatial::Rect { lo, hi } => {
                let mut x = [0.0; 3];
                for i in 0..n {
                    x[i] = lo[i] + u[i] * (hi[i] - lo[i]);
                }
                x
            }
            Spatial::Pt { p } => *p,
        }
    }

    fn weight(&self, n: usize) -> f64 {
        match self {
            Spatial::Sphere { r, .. } | Spatial::Ball { r, .. } => 2.0 * r,
            Spatial::Rect { lo, hi } => {
                let mut s = 0.0;
                for i in 0..n {
                    s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
                }
                s.sqrt()
            }
            Spatial::Pt { .. } => 0.0,
        }
    }
}

/// Parabolic distance from `p` to the space-time segment `p0 -> p1`, n = 1.
/// Along the segment the distance is max(|dx(s)|, sqrt|dt(s)|) with both
/// arguments affine in s, so the minimum sits at an endpoint, at a zero of
/// either arm, or where the arms cross; checking those candidates is exact.
fn segment_distance(p: &Point, p0: (f64, f64), p1: (f64, f64)) -> f64 {
    let (a, b) = (p0.0 - p.x[0], p1.0 - p0.0);
    let (c, e) = (p0.1 - p.t, p1.1 - p0.1);
    let eval = |s: f64| (a + s * b).abs().max((c + s * e).abs().sqrt());
    let mut best = eval(0.0).min(eval(1.0));
    let mut try_s = |s: f64| {
        if (0.0..=1.0).contains(&s) {
            best = best.min(eval(s));
        }
    };
    if b != 0.0 {
        try_s(-a / b);
    }
    if e != 0.0 {
        try_s(-c / e);
    }
    // crossings |a+sb|^2 = +-(c+se)
    for sign in [1.0, -1.0] {
        let (qa, qb, qc) = (b * b, 2.0 * a * b - sign * e, a * a - sign * c);
        if qa == 0.0 {
            if qb != 0.0 {
                try_s(-qc / qb);
            }
            continue;
        }
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let rt = disc.sqrt();
            try_s((-qb + rt) / (2.0 * qa));
            try_s((-qb - rt) / (2.0 * qa));
        }
    }
    best
}

/// One piece of the data-carrying boundary.
#[derive(Debug, Clone)]
pub enum Piece {
    /// Product of a spatial set with a time interval. The parabolic
    /// distance to such a product splits: it is the max of the spatial gap
    /// and the root of the time gap.
    Product { spatial: Spatial, t0: f64, t1: f64 },
    /// Space-time polygonal curve in one space dimension.
    Polyline { pts: Vec<(f64, f64)> },
}

impl Piece {
    pub fn distance(&self, p: &Point, n: usize) -> f64 {
        match self {
            Piece::Product { spatial, t0, t1 } => {
                let dt = if p.t < *t0 {
                    t0 - p.t
                } else if p.t > *t1 {
                    p.t - t1
                } else {
                    0.0
                };
                spatial.dist(&p.x, n).max(dt.sqrt())
            }
            Piece::Polyline { pts } => {
                let mut best = f64::INFINITY;
                for w in pts.windows(2) {
                    best = best.min(segment_distance(p, w[0], w[1]));
                }
                best
            }
        }
    }

    fn sample(&self, u: &[f64; 4], n: usize) -> Point {
        match self {
            Piece::Product { spatial, t0, t1 } => {
                let x = spatial.sample(u, n);
                Point { x, t: t0 + u[3] * (t1 - t0) }
            }
            Piece::Polyline { pts } => {
                // uniform along the chords; no snapping, so no sample mass
                // concentrates on the vertices
                let lens: Vec<f64> = pts
                    .windows(2)
                    .map(|w| parabolic_distance(&Point::d1(w[0].0, w[0].1), &Point::d1(w[1].0, w[1].1), 1))
                    .collect();
                let total: f64 = lens.iter().sum();
                let mut s = u[0] * total;
                for (i, l) in lens.iter().enumerate() {
                    if s <= *l || i == lens.len() - 1 {
                        let a = if *l > 0.0 { (s / l).clamp(0.0, 1.0) } else { 0.0 };
                        let w = (pts[i], pts[i + 1]);
                        return Point::d1(w.0 .0 + a * (w.1 .0 - w.0 .0), w.0 .1 + a * (w.1 .1 - w.0 .1));
                    }
                    s -= l;
                }
                Point::d1(pts[0].0, pts[0].1)
            }
        }
    }

    fn weight(&self, n: usize) -> f64 {
        match self {
            Piece::Product { spatial, t0, t1 } => (spatial.weight(n) + (t1 - t0).sqrt()).max(1e-3),
            Piece::Polyline { pts } => pts
                .windows(2)
                .map(|w| parabolic_distance(&Point::d1(w[0].0, w[0].1), &Point::d1(w[1].0, w[1].1), 1))
                .sum::<f64>()
                .max(1e-3),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Cube {
    x0: f64,
    x1: f64,
    t0: f64,
    t1: f64,
}

#[derive(Debug, Clone, Copy)]
struct Tri {
    /// Right edge of the triangle, shared with the next cube's left wall.
    x_hi: f64,
    w: f64,
    t_base: f64,
    /// Start time of the next cube; the wall segment between `next_t0` and
    /// `t_base + w` is interior glue.
    next_t0: f64,
}

#[derive(Debug, Clone)]
enum Kind {
    Cylinder { r: f64, t_end: f64 },
    Slab { width: f64, t_end: f64 },
    Cubes { cubes: Vec<Cube>, tris: Vec<Tri> },
    Spike,
    Slit { w: f64 },
    Wedge { c: f64 },
    Empty,
    Clip { inner: Box<Kind>, center: Point, r: f64 },
}

const SPIKE_TIP_T: f64 = 0.6;
const SPIKE_BASE_T: f64 = 0.1;
const WEDGE_T0: f64 = 0.75;

fn spike_halfwidth(t: f64) -> f64 {
    if t < SPIKE_TIP_T {
        (-1.0 / (SPIKE_TIP_T - t)).exp()
    } else {
        0.0
    }
}

impl Kind {
    fn inside(&self, p: &Point, n: usize) -> bool {
        match self {
            Kind::Cylinder { r, t_end } => {
                p.t > 0.0 && p.t < *t_end && space_gap(&p.x, &[0.0; 3], n) < *r
            }
            Kind::Slab { width, t_end } => {
                if p.t <= 0.0 || p.t >= *t_end {
                    return false;
                }
                if p.x[0] <= 0.0 || p.x[0] >= *width {
                    return false;
                }
                (1..n).all(|i| p.x[i].abs() < width / 2.0)
            }
            Kind::Cubes { cubes, tris } => {
                let (x, t) = (p.x[0], p.t);
                cubes
                    .iter()
                    .any(|c| x > c.x0 && x < c.x1 && t > c.t0 && t < c.t1)
                    || tris.iter().any(|tr| {
                        let in_tri = t > tr.t_base
                            && t < tr.t_base + tr.w
                            && x < tr.x_hi
                            && x > tr.x_hi - tr.w + (t - tr.t_base);
                        // measure-zero glue keeping the union open and connected
                        let glue_top = t == tr.t_base && x > tr.x_hi - tr.w && x < tr.x_hi;
                        let glue_wall = x == tr.x_hi && t > tr.next_t0 && t < tr.t_base + tr.w;
                        in_tri || glue_top || glue_wall
                    })
            }
            Kind::Spike => {
                let (x, t) = (p.x[0], p.t);
                if x <= 0.0 || x >= 1.0 || t <= 0.0 || t >= 1.0 {
                    return false;
                }
                !(t >= SPIKE_BASE_T && t < SPIKE_TIP_T && (x - 0.5).abs() <= spike_halfwidth(t))
            }
            Kind::Slit { w } => {
                if p.t <= 0.0 || p.t >= 1.0 {
                    return false;
                }
                if (0..n).any(|i| p.x[i] <= -1.0 || p.x[i] >= 1.0) {
                    return false;
                }
                !(p.t >= 0.5 && p.x[0].abs() <= w / 2.0)
            }
            Kind::Wedge { c } => {
                let (x, t) = (p.x[0], p.t);
                if x <= -1.0 || x >= 1.0 || t <= 0.0 || t >= 1.0 {
                    return false;
                }
                // the closed wedge: at t = t0 its closure still covers x <= 0
                !(t <= WEDGE_T0 && x <= c * (WEDGE_T0 - t).max(0.0).sqrt())
            }
            Kind::Empty => false,
            Kind::Clip { inner, center, r } => {
                let dt = center.t - p.t;
                inner.inside(p, n)
                    && dt >= 0.0
                    && dt < r * r
                    && space_gap(&p.x, &center.x, n) < *r
            }
        }
    }
}

/// An open space-time domain with its boundary description.
#[derive(Debug, Clone)]
pub struct Domain {
    pub name: String,
    pub n: usize,
    pub bbox: BBox,
    pub pieces: Vec<Piece>,
    pub distinguished: Vec<Point>,
    kind: Kind,
}

impl Domain {
    pub fn inside(&self, p: &Point) -> bool {
        self.kind.inside(p, self.n)
    }

    /// Distance to the nearest boundary piece in the parabolic metric.
    /// Infinite when the domain has no pieces.
    pub fn boundary_distance(&self, p: &Point) -> f64 {
        self.pieces
            .iter()
            .map(|q| q.distance(p, self.n))
            .fold(f64::INFINITY, f64::min)
    }

    /// Deterministic boundary point cloud, allocated over pieces by a crude
    /// size weight; every piece contributes at least one point. Distinguished
    /// points are deliberately not mixed in: corner points can be degenerate
    /// for measure checks, so targeted queries use `distinguished` directly.
    pub fn boundary_samples(&self, count: usize, seed: u64) -> Vec<Point> {
        let mut out = Vec::new();
        if self.pieces.is_empty() {
            return out;
        }
        let weights: Vec<f64> = self.pieces.iter().map(|p| p.weight(self.n)).collect();
        let total: f64 = weights.iter().sum();
        let want = count;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (piece, w) in self.pieces.iter().zip(&weights) {
            let k = ((want as f64) * w / total).ceil() as usize;
            for _ in 0..k.max(1) {
                let u = [
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                ];
                out.push(piece.sample(&u, self.n));
            }
        }
        out
    }

    /// Intersection with the backward cylinder at `center` (its own top
    /// slice included, so values at `center` remain part of the set). The
    /// clipped domain is meant for rasterization; its piece list is the
    /// parent's plus the cylinder shell, which can make `boundary_distance`
    /// an underestimate, so the clip is not used for distance queries.
    pub fn clip_backward(&self, center: Point, r: f64) -> Domain {
        let mut bbox = self.bbox;
        for i in 0..self.n {
            bbox.x_lo[i] = bbox.x_lo[i].max(center.x[i] - r);
            bbox.x_hi[i] = bbox.x_hi[i].min(center.x[i] + r);
        }
        bbox.t_lo = bbox.t_lo.max(center.t - r * r);
        bbox.t_hi = bbox.t_hi.min(center.t);
        let mut pieces = self.pieces.clone();
        pieces.push(Piece::Product {
            spatial: Spatial::Sphere { c: center.x, r },
            t0: center.t - r * r,
            t1: center.t,
        });
        pieces.push(Piece::Product {
            spatial: Spatial::Ball { c: center.x, r },
            t0: center.t - r * r,
            t1: center.t - r * r,
        });
        Domain {
            name: format!("{}+clip", self.name),
            n: self.n,
            bbox,
            pieces,
            distinguished: vec![center],
            kind: Kind::Clip { inner: Box::new(self.kind.clone()), center, r },
        }
    }
}

fn rect1(x0: f64, x1: f64) -> Spatial {
    Spatial::Rect { lo: [x0, 0.0, 0.0], hi: [x1, 0.0, 0.0] }
}

fn check_n(n: usize, max: usize) -> Result<()> {
    if n < 1 || n > max {
        return Err(Error::BadParams(format!("space dimension {n} outside 1..={max}")));
    }
    Ok(())
}

/// Build a domain from its generator description.
pub fn make_domain(g: &Generator) -> Result<Domain> {
    match *g {
        Generator::StraightCylinder { n, r, t_end } => {
            check_n(n, 3)?;
            if r <= 0.0 || t_end <= 0.0 {
                return Err(Error::BadParams("cylinder needs r > 0 and t_end > 0".into()));
            }
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for i in 0..n {
                lo[i] = -r;
                hi[i] = r;
            }
            Ok(Domain {
                name: "straight_cylinder".into(),
                n,
                bbox: BBox { x_lo: lo, x_hi: hi, t_lo: 0.0, t_hi: t_end },
                pieces: vec![
                    Piece::Product { spatial: Spatial::Ball { c: [0.0; 3], r }, t0: 0.0, t1: 0.0 },
                    Piece::Product { spatial: Spatial::Sphere { c: [0.0; 3], r }, t0: 0.0, t1: t_end },
                ],
                distinguished: vec![
                    Point { x: [0.0; 3], t: 0.0 },
                    Point { x: { let mut x = [0.0; 3]; x[0] = r; x }, t: t_end / 2.0 },
                ],
                kind: Kind::Cylinder { r, t_end },
            })
        }
        Generator::HalfSpaceSlab { n, width, t_end } => {
            check_n(n, 3)?;
            if width <= 0.0 || t_end <= 0.0 {
                return Err(Error::BadParams("slab needs width > 0 and t_end > 0".into()));
            }
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            hi[0] = width;
            for i in 1..n {
                lo[i] = -width / 2.0;
                hi[i] = width / 2.0;
            }
            let mut pieces = vec![
                Piece::Product {
                    spatial: Spatial::Rect { lo, hi },
                    t0: 0.0,
                    t1: 0.0,
                },
            ];
            // lateral facets: per axis, two walls
            for axis in 0..n {
                for side in 0..2 {
                    let mut flo = lo;
                    let mut fhi = hi;
                    let v = if side == 0 { lo[axis] } else { hi[axis] };
                    flo[axis] = v;
                    fhi[axis] = v;
                    pieces.push(Piece::Product {
                        spatial: Spatial::Rect { lo: flo, hi: fhi },
                        t0: 0.0,
                        t1: t_end,
                    });
                }
            }
            Ok(Domain {
                name: "half_space_slab".into(),
                n,
                bbox: BBox { x_lo: lo, x_hi: hi, t_lo: 0.0, t_hi: t_end },
                pieces,
                distinguished: vec![Point { x: [0.0; 3], t: t_end / 2.0 }],
                kind: Kind::Slab { width, t_end },
            })
        }
        Generator::ShrinkingCubes { levels } => {
            if !(2..=12).contains(&levels) {
                return Err(Error::BadParams(format!("levels {levels} outside 2..=12")));
            }
            let mut cubes = Vec::new();
            let mut tris = Vec::new();
            let mut o = 0.0;
            let mut t = 0.0;
            for k in 0..levels {
                let s = 0.5f64.powi(k as i32 + 1);
                cubes.push(Cube { x0: o, x1: o + s, t0: t, t1: t + s });
                if k + 1 < levels {
                    let w = 0.5f64.powi(k as i32 + 3);
                    let next_t0 = t + s + 0.5 * w;
                    tris.push(Tri { x_hi: o + s, w, t_base: t + s, next_t0 });
                    o += s;
                    t = next_t0;
                }
            }
            let mut pieces = Vec::new();
            let mut distinguished = Vec::new();
            for (k, c) in cubes.iter().enumerate() {
                pieces.push(Piece::Product { spatial: rect1(c.x0, c.x1), t0: c.t0, t1: c.t0 });
                // glue from the previous connector shortens the left wall
                let left_t0 = if k == 0 { c.t0 } else { tris[k - 1].t_base + tris[k - 1].w };
                pieces.push(Piece::Product { spatial: rect1(c.x0, c.x0), t0: left_t0, t1: c.t1 });
                pieces.push(Piece::Product { spatial: rect1(c.x1, c.x1), t0: c.t0, t1: c.t1 });
                distinguished.push(Point::d1(c.x0, c.t0));
            }
            for tr in &tris {
                let hyp: Vec<(f64, f64)> = (0..=64)
                    .map(|i| {
                        let a = i as f64 / 64.0;
                        (tr.x_hi - tr.w + a * tr.w, tr.t_base + a * tr.w)
                    })
                    .collect();
                pieces.push(Piece::Polyline { pts: hyp });
                pieces.push(Piece::Product {
                    spatial: rect1(tr.x_hi, tr.x_hi),
                    t0: tr.t_base,
                    t1: tr.next_t0,
                });
                distinguished.push(Point::d1(tr.x_hi - tr.w, tr.t_base));
                distinguished.push(Point::d1(tr.x_hi, tr.t_base + tr.w));
            }
            let last = cubes[levels - 1];
            Ok(Domain {
                name: "shrinking_cubes".into(),
                n: 1,
                bbox: BBox {
                    x_lo: [0.0; 3],
                    x_hi: [last.x1, 0.0, 0.0],
                    t_lo: 0.0,
                    t_hi: last.t1,
                },
                pieces,
                distinguished,
                kind: Kind::Cubes { cubes, tris },
            })
        }
        Generator::InnerSpike => {
            let base_w = spike_halfwidth(SPIKE_BASE_T);
            let curve = |sign: f64| {
                let m = 1024;
                let pts: Vec<(f64, f64)> = (0..=m)
                    .map(|i| {
                        let t = SPIKE_BASE_T + (SPIKE_TIP_T - SPIKE_BASE_T) * i as f64 / m as f64;
                        (0.5 + sign * spike_halfwidth(t), t)
                    })
                    .collect();
                Piece::Polyline { pts }
            };
            let pieces = vec![
                Piece::Product { spatial: rect1(0.0, 1.0), t0: 0.0, t1: 0.0 },
                Piece::Product { spatial: rect1(0.0, 0.0), t0: 0.0, t1: 1.0 },
                Piece::Product { spatial: rect1(1.0, 1.0), t0: 0.0, t1: 1.0 },
                curve(-1.0),
                curve(1.0),
                Piece::Product {
                    spatial: Spatial::Pt { p: [0.5, 0.0, 0.0] },
                    t0: SPIKE_TIP_T,
                    t1: SPIKE_TIP_T,
                },
            ];
            Ok(Domain {
                name: "inner_spike".into(),
                n: 1,
                bbox: BBox { x_lo: [0.0; 3], x_hi: [1.0, 0.0, 0.0], t_lo: 0.0, t_hi: 1.0 },
                pieces,
                distinguished: vec![
                    Point::d1(0.5, SPIKE_TIP_T),
                    Point::d1(0.5 - base_w, SPIKE_BASE_T),
                    Point::d1(0.5 + base_w, SPIKE_BASE_T),
                ],
                kind: Kind::Spike,
            })
        }
        Generator::Slit { n, width } => {
            check_n(n, 2)?;
            if width <= 0.0 || width >= 1.0 {
                return Err(Error::BadParams(format!("slit width {width} outside (0, 1)")));
            }
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for i in 0..n {
                lo[i] = -1.0;
                hi[i] = 1.0;
            }
            let mut pieces = vec![Piece::Product { spatial: Spatial::Rect { lo, hi }, t0: 0.0, t1: 0.0 }];
            for axis in 0..n {
                for side in 0..2 {
                    let mut flo = lo;
                    let mut fhi = hi;
                    let v = if side == 0 { -1.0 } else { 1.0 };
                    flo[axis] = v;
                    fhi[axis] = v;
                    pieces.push(Piece::Product {
                        spatial: Spatial::Rect { lo: flo, hi: fhi },
                        t0: 0.0,
                        t1: 1.0,
                    });
                }
            }
            for side in [-1.0, 1.0] {
                let mut flo = lo;
                let mut fhi = hi;
                flo[0] = side * width / 2.0;
                fhi[0] = side * width / 2.0;
                pieces.push(Piece::Product {
                    spatial: Spatial::Rect { lo: flo, hi: fhi },
                    t0: 0.5,
                    t1: 1.0,
                });
            }
            let mut dl = [0.0; 3];
            let mut dr = [0.0; 3];
            dl[0] = -width / 2.0;
            dr[0] = width / 2.0;
            Ok(Domain {
                name: "slit".into(),
                n,
                bbox: BBox { x_lo: lo, x_hi: hi, t_lo: 0.0, t_hi: 1.0 },
                pieces,
                distinguished: vec![Point { x: dl, t: 0.5 }, Point { x: dr, t: 0.5 }],
                kind: Kind::Slit { w: width },
            })
        }
        Generator::Wedge { c } => {
            if !c.is_finite() || c.abs() > 10.0 {
                return Err(Error::BadParams(format!("wedge parameter {c} outside [-10, 10]")));
            }
            let t0 = WEDGE_T0;
            let mut pieces = Vec::new();
            // bottom face, where the wedge leaves room for one
            let xb = (c * t0.sqrt()).clamp(-1.0, 1.0);
            if xb < 1.0 {
                pieces.push(Piece::Product { spatial: rect1(xb, 1.0), t0: 0.0, t1: 0.0 });
            }
            // face exposed the instant the wedge vanishes
            pieces.push(Piece::Product { spatial: rect1(-1.0, 0.0), t0, t1: t0 });
            // parabolic wall, sampled densely towards the apex
            let t_reach = if c != 0.0 { t0 - 1.0 / (c * c) } else { f64::NEG_INFINITY };
            let t_lo = t_reach.max(0.0);
            let m = 1024;
            let pts: Vec<(f64, f64)> = (0..=m)
                .map(|i| {
                    let s = (t0 - t_lo) * (i as f64 / m as f64).powi(2);
                    ((c * s.sqrt()).clamp(-1.0, 1.0), t0 - s)
                })
                .collect();
            pieces.push(Piece::Polyline { pts });
            // left wall: buried inside the wedge except late in time, and,
            // for steep negative c, again before the parabola reaches it
            if c < 0.0 && t_reach > 0.0 {
                pieces.push(Piece::Product { spatial: rect1(-1.0, -1.0), t0: 0.0, t1: t_reach });
            }
            pieces.push(Piece::Product { spatial: rect1(-1.0, -1.0), t0, t1: 1.0 });
            // right wall: gone only while the wedge swallows the whole slice
            let r_t0 = if c > 0.0 && t_reach > 0.0 { t_reach } else { 0.0 };
            pieces.push(Piece::Product { spatial: rect1(1.0, 1.0), t0: r_t0, t1: 1.0 });
            Ok(Domain {
                name: "wedge".into(),
                n: 1,
                bbox: BBox { x_lo: [-1.0, 0.0, 0.0], x_hi: [1.0, 0.0, 0.0], t_lo: 0.0, t_hi: 1.0 },
                pieces,
                distinguished: vec![Point::d1(0.0, t0)],
                kind: Kind::Wedge { c },
            })
        }
        Generator::Empty { n } => {
            check_n(n, 3)?;
            let mut hi = [0.0; 3];
            for x in hi.iter_mut().take(n) {
                *x = 1.0;
            }
            Ok(Domain {
                name: "empty".into(),
                n,
                bbox: BBox { x_lo: [0.0; 3], x_hi: hi, t_lo: 0.0, t_hi: 1.0 },
                pieces: Vec::new(),
                distinguished: Vec::new(),
                kind: Kind::Empty,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mk(g: Generator) -> Domain {
        make_domain(&g).unwrap()
    }

    #[test]
    fn cylinder_membership_and_distance() {
        let d = mk(Generator::StraightCylinder { n: 2, r: 1.0, t_end: 1.0 });
        assert!(d.inside(&Point::d2(0.0, 0.0, 0.5)));
        assert!(!d.inside(&Point::d2(1.1, 0.0, 0.5)));
        assert!(!d.inside(&Point::d2(0.0, 0.0, -0.1)));
        // center at t = 0.09: bottom is closer than the wall
        assert_abs_diff_eq!(d.boundary_distance(&Point::d2(0.0, 0.0, 0.09)), 0.3, epsilon = 1e-12);
        // near the wall late in time
        assert_abs_diff_eq!(d.boundary_distance(&Point::d2(0.9, 0.0, 0.5)), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn slab_distance_is_min_of_wall_and_bottom() {
        let d = mk(Generator::HalfSpaceSlab { n: 2, width: 2.0, t_end: 1.0 });
        assert!(d.inside(&Point::d2(0.05, 0.0, 0.5)));
        let near_left = Point::d2(0.05, 0.0, 0.5);
        assert_abs_diff_eq!(d.boundary_distance(&near_left), 0.05, epsilon = 1e-12);
        let near_bottom = Point::d2(0.5, 0.0, 0.04);
        assert_abs_diff_eq!(d.boundary_distance(&near_bottom), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn cubes_geometry() {
        let d = mk(Generator::ShrinkingCubes { levels: 3 });
        // cube 0 is (0, 1/2)^2 in space-time
        assert!(d.inside(&Point::d1(0.25, 0.25)));
        // first connector: t in (0.5, 0.625), x in (0.375 + (t - 0.5), 0.5)
        assert!(d.inside(&Point::d1(0.47, 0.55)));
        assert!(!d.inside(&Point::d1(0.40, 0.55)));
        // glue on cube 0's top edge keeps the connector attached
        assert!(d.inside(&Point::d1(0.45, 0.5)));
        // the exposed part of the top is not in the domain
        assert!(!d.inside(&Point::d1(0.2, 0.5)));
        // cube 1 is (0.5, 0.75) x (0.5625, 0.8125)
        assert!(d.inside(&Point::d1(0.6, 0.7)));
        // glue on cube 1's left wall
        assert!(d.inside(&Point::d1(0.5, 0.6)));
        assert_abs_diff_eq!(d.boundary_distance(&Point::d1(0.25, 0.25)), 0.25, epsilon = 1e-9);
    }

    #[test]
    fn spike_is_removed_from_the_box() {
        let d = mk(Generator::InnerSpike);
        assert!(!d.inside(&Point::d1(0.5, 0.3)));
        assert!(d.inside(&Point::d1(0.45, 0.3)));
        assert!(d.inside(&Point::d1(0.5, 0.7)));
        assert!(d.inside(&Point::d1(0.5, 0.05)));
        // tip is a distinguished boundary point
        assert!(d.distinguished.iter().any(|p| p.x[0] == 0.5 && p.t == SPIKE_TIP_T));
    }

    #[test]
    fn slit_blocks_mid_time() {
        let d = mk(Generator::Slit { n: 1, width: 0.1 });
        assert!(d.inside(&Point::d1(0.0, 0.3)));
        assert!(!d.inside(&Point::d1(0.0, 0.7)));
        assert!(d.inside(&Point::d1(0.2, 0.7)));
    }

    #[test]
    fn wedge_membership_matches_parabola() {
        let c = 1.2909944487358056;
        let d = mk(Generator::Wedge { c });
        // early slice swallowed whole: c sqrt(0.65) > 0.9
        assert!(!d.inside(&Point::d1(0.9, 0.1)));
        // late, before t0: parabola sits at 0.289
        assert!(d.inside(&Point::d1(0.9, 0.7)));
        assert!(!d.inside(&Point::d1(0.2, 0.7)));
        // after t0 the whole box is there
        assert!(d.inside(&Point::d1(-0.9, 0.8)));
    }

    #[test]
    fn boundary_samples_lie_on_the_boundary() {
        for g in [
            Generator::StraightCylinder { n: 2, r: 1.0, t_end: 1.0 },
            Generator::HalfSpaceSlab { n: 1, width: 2.0, t_end: 1.0 },
            Generator::ShrinkingCubes { levels: 4 },
            Generator::Wedge { c: -0.5 },
        ] {
            let d = mk(g);
            let samples = d.boundary_samples(64, 11);
            assert!(samples.len() >= 64.min(d.distinguished.len().max(1)));
            for s in &samples {
                // up to roundoff every sample sits on a boundary piece
                assert!(d.boundary_distance(s) < 1e-6, "sample off the boundary for {}", d.name);
            }
            // determinism
            let again = d.boundary_samples(64, 11);
            assert_eq!(samples.len(), again.len());
            assert!(samples.iter().zip(&again).all(|(a, b)| a.x == b.x && a.t == b.t));
        }
    }

    #[test]
    fn clip_restricts_to_backward_cylinder() {
        let d = mk(Generator::HalfSpaceSlab { n: 1, width: 2.0, t_end: 1.0 });
        let center = Point::d1(0.5, 0.8);
        let c = d.clip_backward(center, 0.4);
        assert!(c.inside(&Point::d1(0.5, 0.7)));
        // top slice of the cylinder stays in
        assert!(c.inside(&Point::d1(0.5, 0.8)));
        assert!(!c.inside(&Point::d1(0.5, 0.81)));
        assert!(!c.inside(&Point::d1(0.95, 0.7)));
        assert!(!c.inside(&Point::d1(0.5, 0.63)));
        assert!(c.bbox.t_hi <= 0.8 && c.bbox.t_lo >= 0.64 - 1e-12);
    }

    #[test]
    fn generators_parse_from_toml() {
        let g: Generator = toml::from_str("kind = \"wedge\"\nc = 1.291").unwrap();
        assert_eq!(g, Generator::Wedge { c: 1.291 });
        let g: Generator = toml::from_str("kind = \"shrinking_cubes\"").unwrap();
        assert_eq!(g, Generator::ShrinkingCubes { levels: 5 });
        let g: Generator = toml::from_str("kind = \"straight_cylinder\"\nn = 2").unwrap();
        assert_eq!(g, Generator::StraightCylinder { n: 2, r: 1.0, t_end: 1.0 });
        assert!(toml::from_str::<Generator>("kind = \"slit\"\nn = 1\nbogus = 3").is_err());
    }

    #[test]
    fn bad_parameters_are_rejected()  {
        assert!(make_domain(&Generator::StraightCylinder { n: 0, r: 1.0, t_end: 1.0 }).is_err());
        assert!(make_domain(&Generator::StraightCylinder { n: 1, r: -1.0, t_end: 1.0 }).is_err());
        assert!(make_domain(&Generator::ShrinkingCubes { levels: 1 }).is_err());
        assert!(make_domain(&Generator::Slit { n: 3, width: 0.1 }).is_err());
        assert!(make_domain(&Generator::Wedge { c: f64::NAN }).is_err());
    }
}
