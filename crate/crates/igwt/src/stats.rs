//! Sufficient statistics for offspring-count likelihoods.
//!
//! The likelihood of a corpus depends on the data only through the
//! tallies `N_{n,k}` (number of generation-`n` vertices with exactly `k`
//! offspring) and the derived per-generation sums `A_n` and `B_n`.
//! Tallying is done once; likelihood evaluation cost is then independent
//! of corpus size.

use std::collections::BTreeMap;

use crate::tree::OrderedTree;

/// Offspring-count tallies over a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SufficientStats {
    counts: BTreeMap<(u32, u32), u64>,
    a: Vec<u64>,
    b: Vec<u64>,
    n_max: u32,
}

/// Tallies `N_{n,k}` across all trees of a corpus.
pub fn tally(trees: &[OrderedTree]) -> SufficientStats {
    let mut stats = SufficientStats::default();
    for tree in trees {
        for v in tree.vertices() {
            stats.record(v.generation, v.children.len() as u32, 1);
        }
    }
    stats
}

impl SufficientStats {
    fn record(&mut self, n: u32, k: u32, times: u64) {
        *self.counts.entry((n, k)).or_insert(0) += times;
        let idx = n as usize;
        if idx >= self.a.len() {
            self.a.resize(idx + 1, 0);
            self.b.resize(idx + 1, 0);
        }
        if k >= 2 {
            self.a[idx] += times;
            self.b[idx] += times * u64::from(k - 2);
        }
        self.n_max = self.n_max.max(n);
    }

    /// `N_{n,k}`.
    pub fn count(&self, n: u32, k: u32) -> u64 {
        self.counts.get(&(n, k)).copied().unwrap_or(0)
    }

    /// `A_n`: number of generation-`n` vertices with at least 2 offspring.
    pub fn a(&self, n: u32) -> u64 {
        self.a.get(n as usize).copied().unwrap_or(0)
    }

    /// `B_n`: total offspring beyond 2 among generation-`n` branchers.
    pub fn b(&self, n: u32) -> u64 {
        self.b.get(n as usize).copied().unwrap_or(0)
    }

    /// Highest generation with any observation.
    pub fn n_max_observed(&self) -> u32 {
        self.n_max
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Total vertex count, `sum_{n,k} N_{n,k}`.
    pub fn total_vertices(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Number of generation-`n` vertices, `sum_k N_{n,k}`.
    pub fn generation_vertices(&self, n: u32) -> u64 {
        self.range(n).map(|(_, c)| c).sum()
    }

    /// Iterates `(k, N_{n,k})` for one generation.
    pub fn range(&self, n: u32) -> impl Iterator<Item = (u32, u64)> + '_ {
        self.counts
            .range((n, 0)..(n + 1, 0))
            .map(|(&(_, k), &c)| (k, c))
    }

    /// Iterates all `((n, k), N_{n,k})` entries.
    pub fn entries(&self) -> impl Iterator<Item = ((u32, u32), u64)> + '_ {
        self.counts.iter().map(|(&nk, &c)| (nk, c))
    }

    /// Empirical mean and sample variance (and count) of the offspring
    /// counts at generation `n`. The variance needs two observations.
    pub fn offspring_moments(&self, n: u32) -> Option<(f64, Option<f64>, u64)> {
        let total: u64 = self.generation_vertices(n);
        if total == 0 {
            return None;
        }
        let sum: f64 = self.range(n).map(|(k, c)| f64::from(k) * c as f64).sum();
        let mean = sum / total as f64;
        let variance = if total >= 2 {
            let ss: f64 = self
                .range(n)
                .map(|(k, c)| (f64::from(k) - mean).powi(2) * c as f64)
                .sum();
            Some(ss / (total - 1) as f64)
        } else {
            None
        };
        Some((mean, variance, total))
    }

    /// Pools two tallies; counts add exactly.
    pub fn merged(&self, other: &SufficientStats) -> SufficientStats {
        let mut out = self.clone();
        for (&(n, k), &c) in &other.counts {
            out.record(n, k, c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn root_with_two_children() {
        let trees = corpus::parse("[-1,0,0]").unwrap();
        let s = tally(&trees);
        assert_eq!(s.count(0, 2), 1);
        assert_eq!(s.count(1, 0), 2);
        assert_eq!(s.a(0), 1);
        assert_eq!(s.b(0), 0);
        assert_eq!(s.a(1), 0);
        assert_eq!(s.n_max_observed(), 1);
    }

    #[test]
    fn single_vertex_corpus() {
        let trees = corpus::parse("[-1]").unwrap();
        let s = tally(&trees);
        assert_eq!(s.count(0, 0), 1);
        for n in 0..4 {
            assert_eq!(s.a(n), 0);
            assert_eq!(s.b(n), 0);
        }
    }

    #[test]
    fn totals_match_summaries() {
        let trees = corpus::parse("[-1,0,0,1,1,2]\n[-1]\n[-1,0,0,0]\n").unwrap();
        let s = tally(&trees);
        let expected: usize = trees.iter().map(|t| t.summary().total_vertices).sum();
        assert_eq!(s.total_vertices(), expected as u64);
        // per-generation totals match the z_n of each tree summed
        for n in 0..=s.n_max_observed() {
            let z: usize = trees
                .iter()
                .map(|t| {
                    t.summary()
                        .per_generation_counts
                        .get(n as usize)
                        .copied()
                        .unwrap_or(0)
                })
                .sum();
            assert_eq!(s.generation_vertices(n), z as u64);
        }
    }

    #[test]
    fn b_counts_offspring_beyond_two() {
        let trees = corpus::parse("[-1,0,0,0,0]").unwrap(); // root with 4 children
        let s = tally(&trees);
        assert_eq!(s.a(0), 1);
        assert_eq!(s.b(0), 2);
    }

    #[test]
    fn merging_adds_counts_exactly() {
        let a = tally(&corpus::parse("[-1,0,0]").unwrap());
        let b = tally(&corpus::parse("[-1]\n[-1,0,0,1,1]").unwrap());
        let pooled = tally(&corpus::parse("[-1,0,0]\n[-1]\n[-1,0,0,1,1]").unwrap());
        assert_eq!(a.merged(&b), pooled);
    }

    #[test]
    fn empirical_offspring_moments() {
        // generation 0 offspring counts: 2 and 4 -> mean 3, var 2
        let trees = corpus::parse("[-1,0,0]\n[-1,0,0,0,0]").unwrap();
        let s = tally(&trees);
        let (mean, var, n) = s.offspring_moments(0).unwrap();
        assert_eq!(n, 2);
        assert!((mean - 3.0).abs() < 1e-12);
        assert!((var.unwrap() - 2.0).abs() < 1e-12);
        // a single observation has no sample variance
        let s = tally(&corpus::parse("[-1,0,0]").unwrap());
        let (_, var, _) = s.offspring_moments(0).unwrap();
        assert!(var.is_none());
        assert!(s.offspring_moments(5).is_none());
    }
}
