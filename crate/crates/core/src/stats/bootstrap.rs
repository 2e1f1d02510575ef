//! Bootstrap with rejection resampling.
//!
//! Each resample draws `m` rows with replacement and proposes one value to
//! every tracked distribution. A marginal value is kept only if
//! `0 < P(i) < 1`; a pair value `(P(j|i), P(j|not i))` only if both units are
//! non-degenerate in the resample and the two columns are not identical there
//! (`P(i|j) < 1 or P(j|i) < 1`). Sampling stops once every distribution holds
//! at least `K` values.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::lift::LiftedMatrix;
use crate::matrix::BitColumn;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BootstrapConfig {
    /// Minimum retained values per distribution.
    pub k: usize,
    /// Resamples allowed to reject a still-unfilled distribution before giving
    /// up; `None` means `100 * k`.
    pub max_rejections: Option<usize>,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { k: 100, max_rejections: None }
    }
}

impl BootstrapConfig {
    pub fn rejection_budget(&self) -> usize {
        self.max_rejections.unwrap_or(100 * self.k)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairSamples {
    /// `P(j | i)` per retained resample.
    pub given: Vec<f64>,
    /// `P(j | not i)` from the same resamples.
    pub given_not: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BootstrapDistributions {
    marginals: BTreeMap<usize, Vec<f64>>,
    pairs: BTreeMap<(usize, usize), PairSamples>,
    pub resamples: usize,
    pub rejected_resamples: usize,
    /// How often each unit caused a value to be dropped.
    pub rejections_by_unit: BTreeMap<usize, usize>,
}

impl BootstrapDistributions {
    pub fn marginal(&self, unit: usize) -> Option<&[f64]> {
        self.marginals.get(&unit).map(Vec::as_slice)
    }

    /// Pair statistics for "does `cause` raise the probability of `effect`".
    pub fn pair(&self, cause: usize, effect: usize) -> Option<&PairSamples> {
        self.pairs.get(&(cause, effect))
    }

    pub fn units(&self) -> impl Iterator<Item = usize> + '_ {
        self.marginals.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.keys().copied()
    }
}

/// Tracks marginals for `units` and pair statistics for `(cause, effect)` in
/// `pairs` over the lifted columns. Deterministic in `seed`: resample `r`
/// draws from its own substream.
pub fn bootstrap_distributions(
    lifted: &LiftedMatrix,
    units: &[usize],
    pairs: &[(usize, usize)],
    config: &BootstrapConfig,
    seed: u64,
) -> Result<BootstrapDistributions> {
    if config.k == 0 {
        return Err(Error::InvalidParameter("bootstrap size K must be at least 1".into()));
    }
    let columns = lifted.columns();
    let m = lifted.n_samples();
    let mut involved: BTreeSet<usize> = units.iter().copied().collect();
    for &(i, j) in pairs {
        involved.insert(i);
        involved.insert(j);
    }
    let involved: Vec<usize> = involved.into_iter().collect();
    let slot: BTreeMap<usize, usize> = involved.iter().enumerate().map(|(s, &u)| (u, s)).collect();

    let mut out = BootstrapDistributions::default();
    for &u in units {
        out.marginals.entry(u).or_default();
    }
    for &p in pairs {
        out.pairs.entry(p).or_default();
    }
    let k = config.k;
    let budget = config.rejection_budget();
    let mut indices = Vec::with_capacity(m);
    let mut resampled: Vec<BitColumn> = Vec::with_capacity(involved.len());
    let mut counts: Vec<usize> = Vec::with_capacity(involved.len());

    loop {
        let pending = out.marginals.values().any(|v| v.len() < k)
            || out.pairs.values().any(|p| p.given.len() < k);
        if !pending {
            break;
        }
        if out.rejected_resamples >= budget {
            let mut starved: BTreeSet<usize> = out
                .marginals
                .iter()
                .filter(|(_, v)| v.len() < k)
                .map(|(&u, _)| u)
                .collect();
            for (&(i, j), p) in &out.pairs {
                if p.given.len() < k {
                    // Blame whichever side rejected more often.
                    let ri = out.rejections_by_unit.get(&i).copied().unwrap_or(0);
                    let rj = out.rejections_by_unit.get(&j).copied().unwrap_or(0);
                    if ri >= rj {
                        starved.insert(i);
                    }
                    if rj >= ri {
                        starved.insert(j);
                    }
                }
            }
            let units: Vec<String> = starved.into_iter().map(|u| lifted.label(u).into()).collect();
            return Err(Error::BootstrapStarvation { units, attempts: out.resamples });
        }

        let mut rng = rng::substream(seed, rng::BOOTSTRAP, out.resamples as u64);
        indices.clear();
        indices.extend((0..m).map(|_| rng.gen_range(0..m)));
        resampled.clear();
        resampled.extend(involved.iter().map(|&u| columns[u].gather(&indices)));
        counts.clear();
        counts.extend(resampled.iter().map(BitColumn::count_ones));
        out.resamples += 1;

        let degenerate = |c: usize| c == 0 || c == m;
        let mut rejected_pending = false;
        for (&u, values) in out.marginals.iter_mut() {
            let c = counts[slot[&u]];
            if degenerate(c) {
                *out.rejections_by_unit.entry(u).or_default() += 1;
                rejected_pending |= values.len() < k;
            } else {
                values.push(c as f64 / m as f64);
            }
        }
        for (&(i, j), samples) in out.pairs.iter_mut() {
            let (si, sj) = (slot[&i], slot[&j]);
            let (ci, cj) = (counts[si], counts[sj]);
            let cij = resampled[si].and_count(&resampled[sj]);
            let identical = cij == ci && cij == cj;
            if degenerate(ci) || degenerate(cj) || identical {
                for u in [i, j] {
                    let c = counts[slot[&u]];
                    if degenerate(c) || identical {
                        *out.rejections_by_unit.entry(u).or_default() += 1;
                    }
                }
                rejected_pending |= samples.given.len() < k;
            } else {
                samples.given.push(cij as f64 / ci as f64);
                samples.given_not.push((cj - cij) as f64 / (m - ci) as f64);
            }
        }
        if rejected_pending {
            out.rejected_resamples += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lift::lift;
    use crate::matrix::AlterationMatrix;
    use alloc::vec;
    use alloc::vec::Vec;

    fn matrix(rows: &[&str], names: &[&str]) -> AlterationMatrix {
        let rows: Vec<Vec<bool>> = rows.iter().map(|r| r.chars().map(|c| c == '1').collect()).collect();
        AlterationMatrix::from_rows(names.iter().copied(), &rows).unwrap()
    }

    #[test]
    fn fills_every_distribution() {
        let d = matrix(&["110", "100", "011", "101", "000", "111", "010", "100"], &["a", "b", "c"]);
        let lifted = lift(&d, &[]).unwrap();
        let cfg = BootstrapConfig { k: 100, max_rejections: None };
        let dist = bootstrap_distributions(&lifted, &[0, 1, 2], &[(0, 1), (1, 0), (0, 2)], &cfg, 3).unwrap();
        for u in 0..3 {
            let v = dist.marginal(u).unwrap();
            assert!(v.len() >= 100);
            assert!(v.iter().all(|&p| p > 0.0 && p < 1.0));
        }
        for p in [(0, 1), (1, 0), (0, 2)] {
            let s = dist.pair(p.0, p.1).unwrap();
            assert!(s.given.len() >= 100);
            assert_eq!(s.given.len(), s.given_not.len());
        }
    }

    #[test]
    fn saturated_column_starves() {
        let d = matrix(&["11", "10", "11", "10"], &["always", "b"]);
        let lifted = lift(&d, &[]).unwrap();
        let cfg = BootstrapConfig { k: 10, max_rejections: Some(50) };
        let err = bootstrap_distributions(&lifted, &[0, 1], &[(0, 1)], &cfg, 1).unwrap_err();
        match err {
            Error::BootstrapStarvation { units, .. } => assert_eq!(units, vec![String::from("always")]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn same_seed_same_distributions() {
        let d = matrix(&["110", "100", "011", "101", "000", "111"], &["a", "b", "c"]);
        let lifted = lift(&d, &[]).unwrap();
        let cfg = BootstrapConfig { k: 20, max_rejections: None };
        let a = bootstrap_distributions(&lifted, &[0, 1, 2], &[(0, 1)], &cfg, 11).unwrap();
        let b = bootstrap_distributions(&lifted, &[0, 1, 2], &[(0, 1)], &cfg, 11).unwrap();
        assert_eq!(a, b);
        let c = bootstrap_distributions(&lifted, &[0, 1, 2], &[(0, 1)], &cfg, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_k_is_rejected() {
        let d = matrix(&["10", "01"], &["a", "b"]);
        let lifted = lift(&d, &[]).unwrap();
        let cfg = BootstrapConfig { k: 0, max_rejections: None };
        assert!(matches!(
            bootstrap_distributions(&lifted, &[0], &[], &cfg, 0),
            Err(Error::InvalidParameter(_))
        ));
    }
}
