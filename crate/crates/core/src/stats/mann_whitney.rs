//! One-sided Mann-Whitney U test.
//!
//! `H1`: `x` is stochastically greater than `y`. Small samples (the smaller
//! side under [`NORMAL_THRESHOLD`]) use the exact null distribution of the
//! rank sum, computed over the observed mid-ranks so ties are handled exactly.
//! Larger samples use the normal approximation with tie-corrected variance
//! and a continuity correction of at most one half toward the mean.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const NORMAL_THRESHOLD: usize = 20;
/// Exact enumeration is skipped above this pooled size.
pub const EXACT_MAX_POOLED: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MannWhitney {
    /// `U` statistic of `x`.
    pub u: f64,
    pub p_value: f64,
    pub method: Method,
    /// Every value in both samples is identical; `p_value` is 0.5.
    pub all_tied: bool,
}

/// Mid-ranks of the pooled sample, doubled so they are integers.
pub(crate) fn doubled_ranks(x: &[f64], y: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut pooled: Vec<(f64, bool)> =
        x.iter().map(|&v| (v, true)).chain(y.iter().map(|&v| (v, false))).collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut ranks = vec![0u64; pooled.len()];
    let mut tie_sizes = Vec::new();
    let mut start = 0;
    while start < pooled.len() {
        let mut end = start;
        while end + 1 < pooled.len() && pooled[end + 1].0 == pooled[start].0 {
            end += 1;
        }
        // 1-based ranks start+1..=end+1, mean doubled = start + end + 2.
        let r = (start + end + 2) as u64;
        for k in start..=end {
            ranks[k] = r;
        }
        tie_sizes.push(end - start + 1);
        start = end + 1;
    }
    // Reorder so x's ranks come first.
    let mut out = Vec::with_capacity(pooled.len());
    out.extend(pooled.iter().zip(&ranks).filter(|(p, _)| p.1).map(|(_, &r)| r));
    out.extend(pooled.iter().zip(&ranks).filter(|(p, _)| !p.1).map(|(_, &r)| r));
    (out, tie_sizes)
}

fn normal_upper_tail(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

/// Distribution of the sum of `k` items drawn without replacement from
/// `values`, as counts indexed by sum.
fn subset_sum_counts(values: &[u64], k: usize) -> Vec<f64> {
    let max_sum: u64 = {
        let mut sorted = values.to_vec();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        sorted.iter().take(k).sum()
    };
    let width = max_sum as usize + 1;
    // table[c][s]: number of ways to pick c items with sum s.
    let mut table = vec![0.0f64; (k + 1) * width];
    table[0] = 1.0;
    for &v in values {
        let v = v as usize;
        for c in (1..=k).rev() {
            let (lower, upper) = table.split_at_mut(c * width);
            let prev = &lower[(c - 1) * width..];
            let cur = &mut upper[..width];
            for s in (v..width).rev() {
                cur[s] += prev[s - v];
            }
        }
    }
    table[k * width..].to_vec()
}

pub fn mann_whitney_greater(x: &[f64], y: &[f64]) -> Result<MannWhitney> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidParameter("Mann-Whitney samples must be non-empty".into()));
    }
    let (nx, ny) = (x.len(), y.len());
    let (ranks, ties) = doubled_ranks(x, y);
    let rank_sum2: u64 = ranks[..nx].iter().sum();
    let u = rank_sum2 as f64 / 2.0 - (nx * (nx + 1)) as f64 / 2.0;
    let pooled = nx + ny;

    if ties.len() == 1 {
        return Ok(MannWhitney { u, p_value: 0.5, method: Method::Normal, all_tied: true });
    }

    if nx.min(ny) < NORMAL_THRESHOLD && pooled <= EXACT_MAX_POOLED {
        let total2: u64 = ranks.iter().sum();
        // Enumerate the smaller side; P(S_x >= s) = P(S_y <= total - s).
        let (k, tail): (usize, fn(usize, u64, u64) -> bool) = if nx <= ny {
            (nx, |s, obs, _| s as u64 >= obs)
        } else {
            (ny, |s, obs, total| s as u64 <= total - obs)
        };
        let counts = subset_sum_counts(&ranks, k);
        let all: f64 = counts.iter().sum();
        let hit: f64 = counts
            .iter()
            .enumerate()
            .filter(|&(s, _)| tail(s, rank_sum2, total2))
            .map(|(_, c)| c)
            .sum();
        return Ok(MannWhitney { u, p_value: (hit / all).clamp(0.0, 1.0), method: Method::Exact, all_tied: false });
    }

    let (nxf, nyf, nf) = (nx as f64, ny as f64, pooled as f64);
    let mean = nxf * nyf / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (nf * (nf - 1.0));
    let sd = libm::sqrt(nxf * nyf / 12.0 * ((nf + 1.0) - tie_term));
    let diff = u - mean;
    let correction = diff.clamp(-0.5, 0.5);
    let z = (diff - correction) / sd;
    Ok(MannWhitney { u, p_value: normal_upper_tail(z).clamp(0.0, 1.0), method: Method::Normal, all_tied: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_separation() {
        let x: Vec<f64> = (1..=30).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| v - 100.0).collect();
        let r = mann_whitney_greater(&x, &y).unwrap();
        assert_eq!(r.method, Method::Normal);
        assert!(r.p_value < 1e-6, "{}", r.p_value);
        let rev = mann_whitney_greater(&y, &x).unwrap();
        assert!(rev.p_value > 1.0 - 1e-6);
    }

    #[test]
    fn identical_samples_are_symmetric() {
        let x: Vec<f64> = (0..40).map(|k| (k % 7) as f64).collect();
        let r = mann_whitney_greater(&x, &x).unwrap();
        assert_eq!(r.p_value, 0.5);
        assert!(!r.all_tied);
    }

    #[test]
    fn all_tied() {
        let r = mann_whitney_greater(&[1.0; 5], &[1.0; 8]).unwrap();
        assert!(r.all_tied);
        assert_eq!(r.p_value, 0.5);
    }

    #[test]
    fn exact_extremes() {
        // Complete separation with 5 vs 5: p = 1 / C(10,5).
        let r = mann_whitney_greater(&[6.0, 7.0, 8.0, 9.0, 10.0], &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert!((r.p_value - 1.0 / 252.0).abs() < 1e-15);
        assert_eq!(r.u, 25.0);
    }

    #[test]
    fn empty_is_an_error() {
        assert!(mann_whitney_greater(&[], &[1.0]).is_err());
    }
}
