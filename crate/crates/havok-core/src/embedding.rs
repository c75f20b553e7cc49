//! Time-delay embedding: Hankel matrix construction, its SVD, and
//! truncation-rank selection.
//!
//! The Hankel matrix is stored as `p x q` (delays down the rows, time
//! snapshots across the columns) so that the columns of `V` are time
//! series spanning the whole recording. Row `i` is the input shifted by
//! `i * tau` samples.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::havok::{CoordinateSeries, ForcingSeries};
use crate::linalg;
use crate::series::TimeSeries;

/// How to pick the truncation rank from the singular spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RankPolicy {
    /// Optimal hard threshold with unknown noise level, using the
    /// median-based approximation
    /// `omega(beta) = 0.56 beta^3 - 0.95 beta^2 + 1.82 beta + 1.43`.
    Auto,
    /// Caller-specified rank; must lie in `[2, m]`.
    Fixed(usize),
    /// Smallest rank capturing at least this fraction of squared
    /// singular-value energy.
    Energy(f64),
}

/// A scalar series embedded as a Hankel matrix together with its SVD
/// factors and the chosen truncation rank.
#[derive(Debug, Clone)]
pub struct DelayEmbedding {
    /// Embedding dimension (number of delay rows).
    pub window_p: usize,
    /// Samples between successive delays.
    pub lag_tau: usize,
    /// Seconds per snapshot of the embedded series.
    pub dt: f64,
    /// The `p x q` trajectory matrix.
    pub hankel: DMatrix<f64>,
    /// Left singular vectors, `p x m`.
    pub svd_u: DMatrix<f64>,
    /// Singular values, descending.
    pub svd_s: Vec<f64>,
    /// Right singular vectors, `q x m`; each column is a time series.
    pub svd_v: DMatrix<f64>,
    /// Truncation rank in `[2, m]`.
    pub rank_r: usize,
}

/// Builds the `p x q` Hankel matrix with `H[i][j] = z[i * tau + j]`,
/// where `q = N - (p - 1) * tau`.
pub fn build_hankel(z: &TimeSeries, window_p: usize, lag_tau: usize) -> Result<DMatrix<f64>> {
    if window_p < 2 || lag_tau < 1 {
        return Err(Error::SeriesTooShort { needed: 2, got: window_p });
    }
    let n = z.values.len();
    let span = (window_p - 1) * lag_tau;
    if n <= span {
        return Err(Error::SeriesTooShort { needed: span + window_p, got: n });
    }
    let q = n - span;
    if q < window_p {
        return Err(Error::SeriesTooShort { needed: span + window_p, got: n });
    }
    if z.values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "hankel input" });
    }
    let mut h = DMatrix::<f64>::zeros(window_p, q);
    for i in 0..window_p {
        let off = i * lag_tau;
        for j in 0..q {
            h[(i, j)] = z.values[off + j];
        }
    }
    Ok(h)
}

/// Economy SVD of the Hankel matrix under the deterministic sign
/// convention (largest-magnitude entry of each `U` column nonnegative).
pub fn decompose(h: &DMatrix<f64>) -> Result<(DMatrix<f64>, Vec<f64>, DMatrix<f64>)> {
    let (p, q) = h.shape();
    if p < 2 || q < p {
        return Err(Error::SeriesTooShort { needed: p, got: q });
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { context: "hankel matrix" });
    }
    linalg::economy_svd(h)
}

/// Picks the truncation rank from a descending singular spectrum.
///
/// `Auto` counts the singular values above `omega(beta) * median(s)`
/// (Gavish-Donoho hard threshold for unknown noise) with an absolute
/// floor of `max(p, q) * eps * s_max` so that numerically zero tails of
/// noiseless matrices do not count. The result is clamped to `[2, m]`:
/// the model always needs at least one linear state plus the forcing
/// coordinate.
pub fn select_rank(s: &[f64], p: usize, q: usize, policy: RankPolicy) -> Result<usize> {
    let m = s.len();
    if m < 2 {
        return Err(Error::InvalidRank { rank: m, max: m });
    }
    let clamp = |r: usize| r.clamp(2, m);
    match policy {
        RankPolicy::Fixed(r) => {
            if r < 2 || r > m {
                Err(Error::InvalidRank { rank: r, max: m })
            } else {
                Ok(r)
            }
        }
        RankPolicy::Energy(frac) => {
            let total: f64 = s.iter().map(|v| v * v).sum();
            if total <= 0.0 {
                return Ok(2);
            }
            let mut acc = 0.0;
            for (i, v) in s.iter().enumerate() {
                acc += v * v;
                if acc / total >= frac {
                    return Ok(clamp(i + 1));
                }
            }
            Ok(m)
        }
        RankPolicy::Auto => {
            let beta = p.min(q) as f64 / p.max(q) as f64;
            let omega = 0.56 * beta * beta * beta - 0.95 * beta * beta + 1.82 * beta + 1.43;
            let mut sorted = s.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median = if m % 2 == 1 {
                sorted[m / 2]
            } else {
                0.5 * (sorted[m / 2 - 1] + sorted[m / 2])
            };
            let floor = p.max(q) as f64 * f64::EPSILON * s[0];
            let threshold = (omega * median).max(floor);
            let count = s.iter().filter(|&&v| v > threshold).count();
            Ok(clamp(count))
        }
    }
}

/// Convenience chain: Hankel, SVD, rank selection.
pub fn embed(
    z: &TimeSeries,
    window_p: usize,
    lag_tau: usize,
    policy: RankPolicy,
) -> Result<DelayEmbedding> {
    let hankel = build_hankel(z, window_p, lag_tau)?;
    let (u, s, v) = decompose(&hankel)?;
    let (p, q) = hankel.shape();
    let rank_r = select_rank(&s, p, q, policy)?;
    Ok(DelayEmbedding {
        window_p,
        lag_tau,
        dt: z.dt,
        hankel,
        svd_u: u,
        svd_s: s,
        svd_v: v,
        rank_r,
    })
}

impl DelayEmbedding {
    /// Number of snapshots `q`.
    pub fn snapshots(&self) -> usize {
        self.svd_v.nrows()
    }

    /// Fraction of squared singular-value energy carried by coordinate
    /// `r` (1-based, so `r = rank_r` is the forcing coordinate).
    pub fn energy_fraction(&self, r: usize) -> f64 {
        let total: f64 = self.svd_s.iter().map(|v| v * v).sum();
        if total <= 0.0 || r == 0 || r > self.svd_s.len() {
            return 0.0;
        }
        self.svd_s[r - 1] * self.svd_s[r - 1] / total
    }

    /// The first `rank_r` eigen time-delay coordinates as a `q x r`
    /// snapshot matrix.
    pub fn coordinates(&self) -> CoordinateSeries {
        let q = self.snapshots();
        let r = self.rank_r;
        let mut v = DMatrix::<f64>::zeros(q, r);
        for j in 0..r {
            for i in 0..q {
                v[(i, j)] = self.svd_v[(i, j)];
            }
        }
        CoordinateSeries { v, dt: self.dt }
    }

    /// The forcing coordinate `v_r(t)` with its energy fraction.
    pub fn forcing(&self) -> ForcingSeries {
        let r = self.rank_r;
        let vr: Vec<f64> = self.svd_v.column(r - 1).iter().copied().collect();
        ForcingSeries { vr, dt: self.dt, energy_fraction: self.energy_fraction(r) }
    }
}
