//! Largest (separator, key) pair families.
//!
//! Keys never interact: a family is valid iff, for each key, its separators
//! form an antichain of supersets of the key with at most `k` elements. The
//! maximum is the sum over keys of the largest such antichain.

use crate::bits::{self, is_subset};
use crate::verify::SeparatorWitness;

use super::SearchError;

pub const MAX_PAIR_GROUND: usize = 6;
pub const MAX_PAIR_K: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSearchReport {
    pub best: usize,
    pub pairs: Vec<SeparatorWitness>,
    pub exhausted: bool,
    pub nodes_visited: u64,
}

/// Largest antichain among `elems` (at most 64 sets), by branch and bound on
/// the comparability graph. Ties go to the first antichain found when
/// including lower-indexed elements first. Returns the antichain and the node count.
pub fn max_antichain(elems: &[u64]) -> (Vec<u64>, u64) {
    assert!(elems.len() <= 64);
    let n = elems.len();
    let comparable: Vec<u64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| {
                    j != i && (is_subset(elems[i], elems[j]) || is_subset(elems[j], elems[i]))
                })
                .fold(0u64, |acc, j| acc | 1 << j)
        })
        .collect();

    struct Search<'a> {
        comparable: &'a [u64],
        best: u64,
        nodes: u64,
    }
    impl Search<'_> {
        fn go(&mut self, chosen: u64, open: u64) {
            self.nodes += 1;
            if open == 0 {
                if chosen.count_ones() > self.best.count_ones() {
                    self.best = chosen;
                }
                return;
            }
            if (chosen | open).count_ones() <= self.best.count_ones() {
                return;
            }
            let v = open.trailing_zeros() as usize;
            self.go(chosen | 1 << v, open & !(1 << v) & !self.comparable[v]);
            self.go(chosen, open & !(1 << v));
        }
    }

    let mut s = Search {
        comparable: &comparable,
        best: 0,
        nodes: 0,
    };
    s.go(0, bits::full_mask(n));
    (bits::elements(s.best).map(|i| elems[i]).collect(), s.nodes)
}

pub fn max_pair_family(m: usize, k: usize) -> Result<PairSearchReport, SearchError> {
    if m > MAX_PAIR_GROUND {
        return Err(SearchError::Capacity {
            m,
            max: MAX_PAIR_GROUND,
        });
    }
    if k == 0 {
        return Err(SearchError::ZeroK);
    }
    if k > MAX_PAIR_K {
        return Err(SearchError::LargeK { k, max: MAX_PAIR_K });
    }
    let candidates: Vec<u64> = bits::subsets_up_to(m, k).collect();
    let mut pairs = Vec::new();
    let mut nodes = 0;
    for &key in &candidates {
        let above: Vec<u64> = candidates
            .iter()
            .copied()
            .filter(|&s| is_subset(key, s))
            .collect();
        let (antichain, n) = max_antichain(&above);
        nodes += n;
        pairs.extend(
            antichain
                .into_iter()
                .map(|separator| SeparatorWitness { separator, key }),
        );
    }
    Ok(PairSearchReport {
        best: pairs.len(),
        pairs,
        exhausted: true,
        nodes_visited: nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::binom;
    use crate::verify::pair_family_valid;

    fn brute_antichain(elems: &[u64]) -> usize {
        (0u64..1 << elems.len())
            .filter(|mask| {
                let chosen: Vec<u64> = bits::elements(*mask).map(|i| elems[i]).collect();
                chosen.iter().enumerate().all(|(i, &a)| {
                    chosen
                        .iter()
                        .enumerate()
                        .all(|(j, &b)| i == j || !is_subset(a, b))
                })
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn antichain_matches_brute_force() {
        for m in 0..=4 {
            for k in 0..=m {
                let elems: Vec<u64> = bits::subsets_up_to(m, k).collect();
                assert_eq!(
                    max_antichain(&elems).0.len(),
                    brute_antichain(&elems),
                    "m={m} k={k}"
                );
            }
        }
        let elems: Vec<u64> = (0..16).collect();
        assert_eq!(max_antichain(&elems).0.len(), 6);
    }

    #[test]
    fn pair_family_examples() {
        assert_eq!(max_pair_family(4, 2).unwrap().best, 24);
        assert_eq!(max_pair_family(2, 1).unwrap().best, 4);
        assert_eq!(max_pair_family(3, 1).unwrap().best, 6);
        assert!(max_pair_family(7, 1).is_err());
        assert!(max_pair_family(4, 3).is_err());
    }

    #[test]
    fn pair_family_bound_and_validity() {
        for m in 0..=6 {
            for k in 1..=2 {
                let r = max_pair_family(m, k).unwrap();
                let bound = (1u64 << k) * binom(m as u64, k as i64).unwrap();
                if m >= 2 * k {
                    assert_eq!(r.best as u64, bound, "m={m} k={k}");
                }
                assert_eq!(pair_family_valid(&r.pairs, m, k).unwrap(), None);
            }
        }
    }
}
