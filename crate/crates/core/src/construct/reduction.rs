//! One step of the case analysis that bounds nice families (k = 2): find a
//! shared 2-element separator or a singleton separator, and shrink the ground
//! by one element while dropping at most two members.

use thiserror::Error;

use crate::bounds;
use crate::family::{compact, Family};
use crate::verify::{self, Counterexample, VerifyError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionCase {
    /// A 2-set `{x, y}` separates two members whose keys differ in one element.
    SharedSeparatorKeysDifferByOne,
    /// A 2-set `{x, y}` separates two members whose keys differ in both elements.
    SharedSeparatorKeysDifferByTwo,
    /// Some member is the only one on its side of a single element.
    SingletonSeparator,
    /// Every member has its own 2-element separator, so `|d| <= C(m, 2)`.
    NoReduction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutcome {
    pub case: ReductionCase,
    /// Nice family on `ground_size - 1` elements; absent for `NoReduction`.
    pub reduced: Option<Family>,
    /// Indices (in the input) of the deleted members.
    pub removed: Vec<usize>,
    /// The separator elements: `[x, y]` for the 2-set cases, `[x]` for the
    /// singleton case. For the one-element case `x` is the deleted element.
    pub pivot: Vec<usize>,
}

impl ReductionOutcome {
    pub fn removed_members(&self) -> usize {
        self.removed.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("input is not nice for k = 2: {0}")]
    NotNice(Counterexample),
    #[error("reduction needs a ground of at least 2 elements, got {0}")]
    SmallGround(usize),
    #[error("reduced family failed re-verification: {0}")]
    Internal(String),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Members whose intersection with `s` is unique, i.e. those `s` separates.
fn separated_by(d: &Family, s: u64) -> Vec<usize> {
    let patterns: Vec<u64> = d.members().iter().map(|&w| w & s).collect();
    (0..d.len())
        .filter(|&i| patterns.iter().filter(|&&p| p == patterns[i]).count() == 1)
        .collect()
}

fn shared_separator(d: &Family, keys_differ_in: u32) -> Option<(usize, usize, usize, usize)> {
    let m = d.ground_size();
    for x in 0..m {
        for y in x + 1..m {
            let s = 1u64 << x | 1u64 << y;
            let sep = separated_by(d, s);
            for (a, &i) in sep.iter().enumerate() {
                for &j in &sep[a + 1..] {
                    if ((d.member(i) ^ d.member(j)) & s).count_ones() == keys_differ_in {
                        return Some((x, y, i, j));
                    }
                }
            }
        }
    }
    None
}

/// Applies the first applicable case, preferring a shared separator with keys
/// differing in one element, then in two, then a singleton separator.
pub fn proof_step_reduction(d: &Family) -> Result<ReductionOutcome, ReductionError> {
    let m = d.ground_size();
    if m < 2 {
        return Err(ReductionError::SmallGround(m));
    }
    if let verify::Outcome::Fails(c) = verify::is_nice(d, 2)? {
        return Err(ReductionError::NotNice(c));
    }

    let outcome = if let Some((x, y, i, j)) = shared_separator(d, 1) {
        let s = 1u64 << x | 1u64 << y;
        let differing = (d.member(i) ^ d.member(j)) & s;
        let agreeing = (s & !differing).trailing_zeros() as usize;
        let rest = d.retain_members(|t| t != i && t != j);
        // The other members all agree on the deleted element.
        let values: Vec<u64> = rest.members().iter().map(|w| w >> agreeing & 1).collect();
        if values.windows(2).any(|p| p[0] != p[1]) {
            log::warn!(
                "deleted element {agreeing} still varies across the remaining members of {d}"
            );
        }
        ReductionOutcome {
            case: ReductionCase::SharedSeparatorKeysDifferByOne,
            reduced: Some(
                rest.delete_element(agreeing)
                    .expect("agreeing element in range"),
            ),
            removed: vec![i, j],
            pivot: vec![agreeing, differing.trailing_zeros() as usize],
        }
    } else if let Some((x, y, i, j)) = shared_separator(d, 2) {
        // Normalize so one key is {x, y} and the other empty: switch y when
        // the keys are {x} and {y}.
        let s = 1u64 << x | 1u64 << y;
        let ki = d.member(i) & s;
        let switch_y = ki != 0 && ki != s;
        let members = d
            .members()
            .iter()
            .enumerate()
            .filter(|&(t, _)| t != i && t != j)
            .map(|(_, &w)| {
                let has_x = w >> x & 1 == 1;
                let has_y = (w >> y & 1 == 1) ^ switch_y;
                // z takes y's slot: present iff x is in and y is out.
                let z = (has_x && !has_y) as u64;
                compact((w & !(1 << y)) | z << y, x)
            })
            .collect();
        ReductionOutcome {
            case: ReductionCase::SharedSeparatorKeysDifferByTwo,
            reduced: Some(Family::from_words(m - 1, members).expect("compacted words fit")),
            removed: vec![i, j],
            pivot: vec![x, y],
        }
    } else if let Some((x, i)) =
        (0..m).find_map(|x| separated_by(d, 1 << x).first().map(|&i| (x, i)))
    {
        let rest = d.retain_members(|t| t != i);
        ReductionOutcome {
            case: ReductionCase::SingletonSeparator,
            reduced: Some(rest.delete_element(x).expect("element in range")),
            removed: vec![i],
            pivot: vec![x],
        }
    } else {
        let cap = bounds::binom(m as u64, 2).expect("small binomial");
        if d.len() as u64 > cap {
            return Err(ReductionError::Internal(format!(
                "no reduction applies but |d| = {} exceeds C({m}, 2) = {cap}",
                d.len()
            )));
        }
        return Ok(ReductionOutcome {
            case: ReductionCase::NoReduction,
            reduced: None,
            removed: Vec::new(),
            pivot: Vec::new(),
        });
    };

    let reduced = outcome
        .reduced
        .as_ref()
        .expect("reduced cases carry a family");
    if reduced.ground_size() + 1 != m || reduced.len() + outcome.removed.len() != d.len() {
        return Err(ReductionError::Internal(format!(
            "size bookkeeping broke on {d}"
        )));
    }
    if !verify::is_nice(reduced, 2)?.holds() {
        return Err(ReductionError::Internal(format!(
            "{:?} on {d} produced {reduced}, which is not nice",
            outcome.case
        )));
    }
    Ok(outcome)
}

/// Every step of a reduction run, and the bound it certifies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionOutcome>,
    pub final_family: Family,
    /// Upper bound on the input size implied by the steps: the final family's
    /// own bound plus the members removed along the way.
    pub derived_bound: u64,
}

impl ReductionTrace {
    /// The bound the steps prove for a nice family on `m` elements.
    pub fn target_bound(m: usize) -> u64 {
        let m = m as u64;
        (2 * m).max(bounds::binom(m, 2).expect("small binomial"))
    }
}

/// Applies [`proof_step_reduction`] until no case applies or the ground drops
/// below two elements.
pub fn reduce_to_exhaustion(d: &Family) -> Result<ReductionTrace, ReductionError> {
    let mut steps = Vec::new();
    let mut current = d.clone();
    let mut removed = 0u64;
    let terminal_bound = loop {
        let m = current.ground_size();
        if m < 2 {
            // At most 2^m distinct members on fewer than two elements.
            break 1u64 << m;
        }
        let step = proof_step_reduction(&current)?;
        match step.reduced.clone() {
            Some(next) => {
                removed += step.removed.len() as u64;
                steps.push(step);
                current = next;
            }
            None => {
                steps.push(step);
                break bounds::binom(m as u64, 2).expect("small binomial");
            }
        }
    };
    let derived_bound = removed + terminal_bound;
    if d.len() as u64 > derived_bound {
        return Err(ReductionError::Internal(format!(
            "|d| = {} exceeds the derived bound {derived_bound}",
            d.len()
        )));
    }
    Ok(ReductionTrace {
        steps,
        final_family: current,
        derived_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::nice_small_m;

    #[test]
    fn four_subsets_of_two() {
        let d = Family::all_subsets_up_to(2, 2).unwrap();
        let out = proof_step_reduction(&d).unwrap();
        assert_eq!(out.case, ReductionCase::SharedSeparatorKeysDifferByOne);
        let r = out.reduced.as_ref().unwrap();
        assert_eq!((r.ground_size(), r.len()), (1, 2));
        assert_eq!(out.removed_members(), 2);
    }

    #[test]
    fn two_subsets_of_five_do_not_reduce() {
        let d = Family::layer(5, 2).unwrap();
        // Each 2-set separates only the member equal to it.
        for s in d.members() {
            assert_eq!(
                separated_by(&d, *s),
                vec![d.members().iter().position(|w| w == s).unwrap()]
            );
        }
        let out = proof_step_reduction(&d).unwrap();
        assert_eq!(out.case, ReductionCase::NoReduction);
        assert!(out.reduced.is_none());
    }

    #[test]
    fn preconditions() {
        let d = Family::new(1, &[vec![], vec![0]]).unwrap();
        assert_eq!(
            proof_step_reduction(&d),
            Err(ReductionError::SmallGround(1))
        );
        let dup = Family::new(2, &[vec![0], vec![0]]).unwrap();
        assert!(matches!(
            proof_step_reduction(&dup),
            Err(ReductionError::NotNice(_))
        ));
    }

    #[test]
    fn every_reducing_case_occurs_on_three_elements() {
        let mut seen = Vec::new();
        for mask in 1u32..256 {
            let words: Vec<u64> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
            let d = Family::from_words(3, words).unwrap();
            if !verify::is_nice(&d, 2).unwrap().holds() {
                continue;
            }
            let out = proof_step_reduction(&d).unwrap();
            if out.case == ReductionCase::SharedSeparatorKeysDifferByTwo
                && !seen.contains(&out.case)
            {
                // Keys {x},{y} or {x,y},{} on the shared separator.
                let s = (1u64 << out.pivot[0]) | (1u64 << out.pivot[1]);
                let keys: Vec<u64> = out.removed.iter().map(|&i| d.member(i) & s).collect();
                assert_eq!((keys[0] ^ keys[1]), s);
            }
            if !seen.contains(&out.case) {
                seen.push(out.case);
            }
        }
        assert_eq!(seen.len(), 3, "{seen:?}");
        assert!(!seen.contains(&ReductionCase::NoReduction));
    }

    #[test]
    fn small_constructions_reduce_within_bound() {
        for m in 2..=4 {
            let d = nice_small_m(m).unwrap();
            let trace = reduce_to_exhaustion(&d).unwrap();
            assert!(trace.derived_bound <= ReductionTrace::target_bound(m));
            assert!(d.len() as u64 <= trace.derived_bound);
        }
    }
}
