//! Explicit extremal constructions and the antichain lift.

pub mod reduction;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bits::{self, from_indices, full_mask};
use crate::bounds::{self, BoundsError};
use crate::family::{Family, FamilyError};
use crate::verify::SeparatorWitness;

pub use reduction::{
    proof_step_reduction, reduce_to_exhaustion, ReductionCase, ReductionError, ReductionOutcome,
    ReductionTrace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("n must be at least {min}, got {n}")]
    SmallN { n: usize, min: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("explicit small nice families exist for m in 1..=4, got {0}")]
    UnsupportedM(usize),
    #[error("family is empty")]
    EmptyFamily,
    #[error("family has duplicate members")]
    NotProper,
    #[error("family is not Sperner: member {0} is contained in member {1}")]
    NotSperner(usize, usize),
    #[error("lift needs l + 1 < m - l, but the least member size is {level} on a ground of {ground_size}")]
    CountingCondition { level: usize, ground_size: usize },
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// Separating system with `ceil(log2 n)` members: member `i` holds the
/// elements whose `i`-th binary digit is 1.
pub fn binary_separating(n: usize) -> Result<Family, ConstructError> {
    if n == 0 {
        return Err(ConstructError::SmallN { n, min: 1 });
    }
    let width = bounds::separating_min(n as u64)? as usize;
    let members = (0..width)
        .map(|i| from_indices((0..n).filter(|j| j >> i & 1 == 1)))
        .collect();
    Ok(Family::from_words(n, members)?)
}

/// `n` distinct `t`-subsets of `{0, .., m-1}` covering every index, in
/// lexicographic order. Takes the lexicographically first `n` when those
/// already cover; otherwise starts from a block cover and fills
/// lexicographically.
fn covering_subsets(m: usize, t: usize, n: usize) -> Vec<u64> {
    let lex = bits::lex_subsets(m, t);
    debug_assert!(n <= lex.len());
    let first: Vec<u64> = lex[..n].to_vec();
    let covered = first.iter().fold(0, |a, &w| a | w);
    if covered == full_mask(m) || t == 0 {
        return first;
    }
    let mut chosen = BTreeSet::new();
    for start in (0..m).step_by(t) {
        let mut block: Vec<usize> = (start..(start + t).min(m)).collect();
        let mut pad = 0;
        while block.len() < t {
            if !block.contains(&pad) {
                block.push(pad);
            }
            pad += 1;
        }
        chosen.insert(from_indices(block));
    }
    debug_assert!(chosen.len() <= n);
    for &w in &lex {
        if chosen.len() >= n {
            break;
        }
        chosen.insert(w);
    }
    lex.into_iter().filter(|w| chosen.contains(w)).collect()
}

/// Dual of `n` distinct `t`-subsets of an `m`-set: a system with `m` members on `n` elements.
fn dual_of_layer_choice(m: usize, t: usize, n: usize) -> Result<Family, ConstructError> {
    let chosen = covering_subsets(m, t, n);
    Ok(Family::from_words(m, chosen)?.dual()?)
}

/// Completely separating system of minimum size: each element gets a distinct
/// `floor(m/2)`-subset of the member indices.
pub fn spencer_completely_separating(n: usize) -> Result<Family, ConstructError> {
    if n < 2 {
        return Err(ConstructError::SmallN { n, min: 2 });
    }
    let m = bounds::spencer_min(n as u64)? as usize;
    dual_of_layer_choice(m, m / 2, n)
}

/// Minimum-size k-hypercompletely separating system: the dual of `n` distinct
/// `k'`-subsets of an `m`-set.
pub fn k_hcs_minimal(n: usize, k: usize) -> Result<Family, ConstructError> {
    if n < 2 {
        return Err(ConstructError::SmallN { n, min: 2 });
    }
    if k == 0 {
        return Err(ConstructError::ZeroK);
    }
    let m = bounds::min_m_hcs(n as u64, k as u64)?;
    let t = bounds::k_prime(m, k as u64);
    dual_of_layer_choice(m as usize, t as usize, n)
}

/// Nice (k = 2) dual families of size `2m` on `m <= 4` elements.
pub fn nice_small_m(m: usize) -> Result<Family, ConstructError> {
    let sets: Vec<Vec<usize>> = match m {
        1 => vec![vec![], vec![0]],
        2 => vec![vec![], vec![0], vec![1], vec![0, 1]],
        3 => vec![
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
        ],
        // Elements 1..4 relabeled to 0..3.
        4 => vec![
            vec![],
            vec![0],
            vec![1],
            vec![0, 2],
            vec![1, 3],
            vec![0, 2, 3],
            vec![1, 2, 3],
            vec![0, 1, 2, 3],
        ],
        _ => return Err(ConstructError::UnsupportedM(m)),
    };
    Ok(Family::new(m, &sets)?)
}

/// The published separators for the eight members of `nice_small_m(4)`, in
/// member order, relabeled to 0-based elements.
pub fn published_m4_witnesses() -> [SeparatorWitness; 8] {
    let family = [
        0b0000, 0b0001, 0b0010, 0b0101, 0b1010, 0b1101, 0b1110, 0b1111u64,
    ];
    let separators = [
        [0, 1],
        [0, 2],
        [1, 3],
        [2, 3],
        [2, 3],
        [1, 3],
        [0, 2],
        [0, 1],
    ];
    std::array::from_fn(|i| {
        let separator = from_indices(separators[i]);
        SeparatorWitness {
            separator,
            key: family[i] & separator,
        }
    })
}

/// Minimum-size 2-hyperseparating system on `n` elements.
pub fn hyperseparating_minimal_2(n: usize) -> Result<Family, ConstructError> {
    if n < 2 {
        return Err(ConstructError::SmallN { n, min: 2 });
    }
    if n >= 9 {
        return k_hcs_minimal(n, 2);
    }
    let m = n.div_ceil(2);
    let d = nice_small_m(m)?;
    let d = d.retain_members(|i| i < n);
    Ok(d.dual()?)
}

/// Replaces the members of least size `l` by every `(l+1)`-subset containing
/// at least one of them. Requires a nonempty proper Sperner family with
/// `l + 1 < m - l`; the result is Sperner and strictly larger.
pub fn antichain_lift(f: &Family) -> Result<Family, ConstructError> {
    if f.is_empty() {
        return Err(ConstructError::EmptyFamily);
    }
    if !f.is_proper() {
        return Err(ConstructError::NotProper);
    }
    if let Some((i, j)) = f.sperner_violation() {
        return Err(ConstructError::NotSperner(i, j));
    }
    let m = f.ground_size();
    let level = f
        .members()
        .iter()
        .map(|w| w.count_ones() as usize)
        .min()
        .unwrap_or(0);
    if level + 1 >= m.saturating_sub(level) {
        return Err(ConstructError::CountingCondition {
            level,
            ground_size: m,
        });
    }
    let mut lifted = BTreeSet::new();
    let mut kept = Vec::with_capacity(f.len());
    for &w in f.members() {
        if w.count_ones() as usize == level {
            for x in (0..m).filter(|x| w >> x & 1 == 0) {
                lifted.insert(w | 1 << x);
            }
        } else {
            kept.push(w);
        }
    }
    kept.extend(lifted);
    Ok(Family::from_words(m, kept)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{self, recheck_separator};

    fn fam(m: usize, sets: &[&[usize]]) -> Family {
        Family::new(m, sets).unwrap()
    }

    #[test]
    fn binary_examples() {
        assert_eq!(binary_separating(4).unwrap(), fam(4, &[&[1, 3], &[2, 3]]));
        assert_eq!(binary_separating(1).unwrap().len(), 0);
        let f = binary_separating(5).unwrap();
        assert_eq!(f.len(), 3);
        assert!(verify::is_separating(&f).holds());
        assert!(binary_separating(0).is_err());
    }

    #[test]
    fn spencer_examples() {
        let f = spencer_completely_separating(6).unwrap();
        assert_eq!((f.len(), f.ground_size()), (4, 6));
        assert!(verify::is_completely_separating(&f).holds());
        // Dual is the six 2-subsets of {0,1,2,3} in lexicographic order.
        assert_eq!(
            f.dual().unwrap().members(),
            bits::lex_subsets(4, 2).as_slice()
        );
        assert_eq!(
            spencer_completely_separating(2).unwrap(),
            fam(2, &[&[0], &[1]])
        );
        assert_eq!(
            spencer_completely_separating(3).unwrap(),
            fam(3, &[&[0], &[1], &[2]])
        );
    }

    #[test]
    fn covering_fix_up_applies_when_lex_prefix_misses_an_index() {
        // First three 2-subsets of 5 in lex order all contain 0 and miss 4.
        let c = covering_subsets(5, 2, 3);
        assert_eq!(c.len(), 3);
        assert_eq!(c.iter().fold(0, |a, &w| a | w), 0b11111);
        assert!(c.iter().all(|w| w.count_ones() == 2));
        for (m, t) in [(5usize, 2usize), (6, 3), (7, 3), (7, 2), (4, 1)] {
            let total = bounds::binom(m as u64, t as i64).unwrap() as usize;
            for n in m.div_ceil(t)..=total {
                let c = covering_subsets(m, t, n);
                let distinct: BTreeSet<u64> = c.iter().copied().collect();
                assert_eq!(distinct.len(), n);
                assert_eq!(
                    c.iter().fold(0, |a, &w| a | w),
                    full_mask(m),
                    "m={m} t={t} n={n}"
                );
            }
        }
    }

    #[test]
    fn k_hcs_examples() {
        let f = k_hcs_minimal(10, 2).unwrap();
        assert_eq!(
            f.dual().unwrap().sorted(),
            Family::layer(5, 2).unwrap().sorted()
        );
        let f = k_hcs_minimal(4, 3).unwrap();
        assert_eq!(f.len(), 4);
        assert!(f
            .dual()
            .unwrap()
            .members()
            .iter()
            .all(|w| w.count_ones() == 2));
        let f = k_hcs_minimal(2, 2).unwrap();
        assert_eq!(f, fam(2, &[&[0], &[1]]));
        assert!(verify::is_k_hypercompletely_separating(&f, 2)
            .unwrap()
            .holds());
    }

    #[test]
    fn nice_small_examples() {
        for m in 1..=4 {
            let d = nice_small_m(m).unwrap();
            assert_eq!((d.ground_size(), d.len()), (m, 2 * m));
            assert!(verify::is_nice(&d, 2).unwrap().holds(), "m={m}");
        }
        // On one element, {0} is its own separator; the empty member needs
        // S = {0} with key {} since the empty separator cannot tell the two apart.
        let one = nice_small_m(1).unwrap();
        assert!(recheck_separator(
            &one,
            1,
            &SeparatorWitness {
                separator: 1,
                key: 1
            },
            2
        ));
        assert!(!recheck_separator(
            &one,
            0,
            &SeparatorWitness {
                separator: 0,
                key: 0
            },
            2
        ));
        assert!(recheck_separator(
            &one,
            0,
            &SeparatorWitness {
                separator: 1,
                key: 0
            },
            2
        ));
        assert_eq!(nice_small_m(5), Err(ConstructError::UnsupportedM(5)));
        assert_eq!(nice_small_m(0), Err(ConstructError::UnsupportedM(0)));
    }

    #[test]
    fn published_witnesses_recheck() {
        let d = nice_small_m(4).unwrap();
        for (i, w) in published_m4_witnesses().iter().enumerate() {
            assert!(recheck_separator(&d, i, w, 2), "member {i}");
        }
    }

    #[test]
    fn hyperseparating_minimal_examples() {
        let f = hyperseparating_minimal_2(8).unwrap();
        assert_eq!((f.len(), f.ground_size()), (4, 8));
        assert_eq!(f.dual().unwrap(), nice_small_m(4).unwrap());
        assert_eq!(hyperseparating_minimal_2(11).unwrap().len(), 6);
        let f = hyperseparating_minimal_2(3).unwrap();
        assert_eq!(f.len(), 2);
        assert!(verify::is_k_hyperseparating(&f, 2).unwrap().holds());
    }

    #[test]
    fn antichain_lift_examples() {
        let f = fam(4, &[&[0]]);
        assert_eq!(
            antichain_lift(&f).unwrap(),
            fam(4, &[&[0, 1], &[0, 2], &[0, 3]])
        );
        let f = fam(4, &[&[0], &[1, 2]]);
        let g = antichain_lift(&f).unwrap();
        assert_eq!(g, fam(4, &[&[1, 2], &[0, 1], &[0, 2], &[0, 3]]));
        assert!(g.is_sperner());
        for m in 2..=7 {
            let mid = Family::layer(m, m / 2).unwrap();
            assert!(matches!(
                antichain_lift(&mid),
                Err(ConstructError::CountingCondition { .. })
            ));
        }
        assert!(matches!(
            antichain_lift(&fam(3, &[&[0], &[0, 1]])),
            Err(ConstructError::NotSperner(0, 1))
        ));
        assert_eq!(
            antichain_lift(&fam(3, &[])),
            Err(ConstructError::EmptyFamily)
        );
        assert_eq!(
            antichain_lift(&fam(3, &[&[0], &[0]])),
            Err(ConstructError::NotProper)
        );
    }
}
