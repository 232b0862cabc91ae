//! Deterministic low-discrepancy sampling.
//!
//! Estimates use a rank-1 Kronecker lattice split into shifted batches.
//! The lattice directions come from the generalized golden ratios; the
//! per-batch random shifts come from a seeded stream cipher, so every
//! estimate is reproducible bit-for-bit from `(dim, samples, seed)` and
//! carries a spread-based confidence half-width.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BATCHES: usize = 16;

/// Roots of x^(d+1) = x + 1 for d = 1..4.
const PHI: [f64; 4] = [
    1.618033988749895,
    1.324717957244746,
    1.2207440846057596,
    1.1673039782614187,
];

pub(crate) fn alphas(dim: usize) -> [f64; 4] {
    let phi = PHI[dim - 1];
    let mut a = [0.0; 4];
    let mut p = 1.0;
    for slot in a.iter_mut().take(dim) {
        p /= phi;
        *slot = p;
    }
    a
}

#[derive(Debug, Clone, Copy)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub ci_halfwidth: f64,
    pub hits: u64,
    pub total: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct MeanEstimate {
    pub mean: f64,
    pub ci_halfwidth: f64,
    pub hits: u64,
    pub total: u64,
}

fn batch_stats(vals: &[f64]) -> (f64, f64) {
    let k = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / k;
    if vals.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1.0);
    (mean, 1.96 * (var / k).sqrt())
}

/// Ratio of two indicator integrals over the unit cube: the closure returns
/// `None` when a point misses the conditioning set, otherwise whether it
/// also lands in the numerator set. Batches without hits are dropped.
pub fn qmc_ratio<F>(dim: usize, samples: usize, seed: u64, mut f: F) -> RatioEstimate
where
    F: FnMut(&[f64; 4]) -> Option<bool>,
{
    assert!((1..=4).contains(&dim));
    let alpha = alphas(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_batch = samples.div_ceil(BATCHES);
    let mut ratios = Vec::with_capacity(BATCHES);
    let mut hits = 0u64;
    let mut total = 0u64;
    for _ in 0..BATCHES {
        let mut shift = [0.0f64; 4];
        for s in shift.iter_mut().take(dim) {
            *s = rng.random::<f64>();
        }
        let mut in_set = 0u64;
        let mut in_num = 0u64;
        let mut u = shift;
        for _ in 0..per_batch {
            total += 1;
            if let Some(num) = f(&u) {
                in_set += 1;
                if num {
                    in_num += 1;
                }
            }
            for i in 0..dim {
                u[i] += alpha[i];
                if u[i] >= 1.0 {
                    u[i] -= 1.0;
                }
            }
        }
        hits += in_set;
        if in_set > 0 {
            ratios.push(in_num as f64 / in_set as f64);
        }
    }
    if ratios.is_empty() {
        return RatioEstimate { ratio: f64::NAN, ci_halfwidth: f64::INFINITY, hits, total };
    }
    let (mean, ci) = batch_stats(&ratios);
    RatioEstimate { ratio: mean, ci_halfwidth: ci, hits, total }
}

/// Mean of `f` over its conditioning set inside the unit cube.
pub fn qmc_mean<F>(dim: usize, samples: usize, seed: u64, mut f: F) -> MeanEstimate
where
    F: FnMut(&[f64; 4]) -> Option<f64>,
{
    assert!((1..=4).contains(&dim));
    let alpha = alphas(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_batch = samples.div_ceil(BATCHES);
    let mut means = Vec::with_capacity(BATCHES);
    let mut hits = 0u64;
    let mut total = 0u64;
    for _ in 0..BATCHES {
        let mut shift = [0.0f64; 4];
        for s in shift.iter_mut().take(dim) {
            *s = rng.random::<f64>();
        }
        let mut acc = 0.0;
        let mut cnt = 0u64;
        let mut u = shift;
        for _ in 0..per_batch {
            total += 1;
            if let Some(v) = f(&u) {
                acc += v;
                cnt += 1;
            }
            for i in 0..dim {
                u[i] += alpha[i];
                if u[i] >= 1.0 {
                    u[i] -= 1.0;
                }
            }
        }
        hits += cnt;
        if cnt > 0 {
            means.push(acc / cnt as f64);
        }
    }
    if means.is_empty() {
        return MeanEstimate { mean: f64::NAN, ci_halfwidth: f64::INFINITY, hits, total };
    }
    let (mean, ci) = batch_stats(&means);
    MeanEstimate { mean, ci_halfwidth: ci, hits, total }
}

/// Fraction of the unit cube where `member` holds, times `box_volume`.
pub fn qmc_volume<F>(
    dim: usize,
    samples: usize,
    seed: u64,
    box_volume: f64,
    mut member: F,
) -> (f64, f64)
where
    F: FnMut(&[f64; 4]) -> bool,
{
    let est = qmc_ratio(dim, samples, seed, |u| Some(member(u)));
    (est.ratio * box_volume, est.ci_halfwidth * box_volume)
}
