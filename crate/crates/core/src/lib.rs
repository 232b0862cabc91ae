//! Numerical laboratory for heat-type Dirichlet problems on domains that
//! change with time.
//!
//! The crate builds space-time grids over analytically described domains,
//! measures how much of a backward cylinder or heat-ball shell lies outside
//! the domain, estimates thermal capacity through a small packing LP, runs
//! monotone implicit finite-difference solves with degenerating lower-order
//! coefficients, and fits boundary decay exponents from the results.
//!
//! Everything is deterministic for a fixed seed: sampling uses shifted
//! rank-1 lattices, solves are single-threaded, and reports serialize with
//! a stable field order.

pub mod assemble;
pub mod barrier;
pub mod capacity;
pub mod cli;
pub mod coeffs;
pub mod config;
pub mod dirichlet;
pub mod domain;
pub mod error;
pub mod estimates;
pub mod geom;
pub mod grid;
pub mod heatball;
pub mod lab;
pub mod linsolve;
pub mod lp;
pub mod mask;
pub mod measure;
pub mod norms;
pub mod report;
pub mod sampling;
pub mod stats;

pub use error::{Error, Result};
pub use geom::{parabolic_distance, Point};
pub use grid::{BBox, Grid};
