//! Set families over a word-sized ground set.

use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::bits::{self, full_mask, is_subset, MAX_GROUND};

/// Largest ground size accepted by [`Family::canonical_form`]. The group is
/// enumerated in full, so cost grows as `m!` (times `n` with switching).
pub const MAX_CANON_GROUND: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("ground size {0} exceeds the capacity of {MAX_GROUND} elements")]
    Capacity(usize),
    #[error(
        "member {member}: element index {index} is out of range for ground size {ground_size}"
    )]
    IndexOutOfRange {
        member: usize,
        index: usize,
        ground_size: usize,
    },
    #[error("member {member} has bits outside the ground of size {ground_size}")]
    StrayBits { member: usize, ground_size: usize },
    #[error("family has {0} members; its dual would exceed the capacity of {MAX_GROUND} elements")]
    DualCapacity(usize),
    #[error("element {element} is out of range for ground size {ground_size}")]
    ElementOutOfRange { element: usize, ground_size: usize },
    #[error("not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("canonical form is limited to ground size {MAX_CANON_GROUND}, got {0}")]
    CanonCapacity(usize),
}

/// Symmetry group used for canonical forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryGroup {
    /// All relabelings of the ground set.
    PermutationsOnly,
    /// Relabelings combined with switching any subset of ground elements.
    /// Only sound for properties invariant under switching (niceness).
    PermutationsAndSwitching,
}

/// An ordered list of subsets of `{0, .., ground_size-1}`.
///
/// Duplicate members are allowed; [`Family::is_proper`] reports whether all
/// members are distinct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Family {
    ground_size: usize,
    members: Vec<u64>,
}

impl Family {
    /// Builds a family from element-index lists.
    pub fn new<S: AsRef<[usize]>>(ground_size: usize, members: &[S]) -> Result<Self, FamilyError> {
        if ground_size > MAX_GROUND {
            return Err(FamilyError::Capacity(ground_size));
        }
        let mut words = Vec::with_capacity(members.len());
        for (member, set) in members.iter().enumerate() {
            let mut w = 0u64;
            for &index in set.as_ref() {
                if index >= ground_size {
                    return Err(FamilyError::IndexOutOfRange {
                        member,
                        index,
                        ground_size,
                    });
                }
                w |= 1 << index;
            }
            words.push(w);
        }
        Ok(Family {
            ground_size,
            members: words,
        })
    }

    /// Builds a family from member words.
    pub fn from_words(ground_size: usize, members: Vec<u64>) -> Result<Self, FamilyError> {
        if ground_size > MAX_GROUND {
            return Err(FamilyError::Capacity(ground_size));
        }
        let mask = full_mask(ground_size);
        if let Some(member) = members.iter().position(|&w| w & !mask != 0) {
            return Err(FamilyError::StrayBits {
                member,
                ground_size,
            });
        }
        Ok(Family {
            ground_size,
            members,
        })
    }

    /// Empty family on `ground_size` elements.
    pub fn empty(ground_size: usize) -> Result<Self, FamilyError> {
        Self::from_words(ground_size, Vec::new())
    }

    /// All subsets of `{0, .., m-1}` with at most `k` elements, by (size, value).
    pub fn all_subsets_up_to(m: usize, k: usize) -> Result<Self, FamilyError> {
        Self::from_words(m, bits::subsets_up_to(m, k).collect())
    }

    /// All `t`-element subsets of `{0, .., m-1}` in increasing word order.
    pub fn layer(m: usize, t: usize) -> Result<Self, FamilyError> {
        Self::from_words(m, bits::subsets_of_size(m, t).collect())
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn member(&self, i: usize) -> u64 {
        self.members[i]
    }

    pub fn member_indices(&self, i: usize) -> Vec<usize> {
        bits::to_indices(self.members[i])
    }

    pub fn into_members(self) -> Vec<u64> {
        self.members
    }

    /// Signature of ground element `v`: the indices of members containing it.
    pub fn signature(&self, v: usize) -> u64 {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &w)| w >> v & 1 == 1)
            .fold(0, |acc, (i, _)| acc | 1 << i)
    }

    /// The dual family: ground = member indices, one member per ground element
    /// holding that element's signature.
    pub fn dual(&self) -> Result<Family, FamilyError> {
        if self.members.len() > MAX_GROUND {
            return Err(FamilyError::DualCapacity(self.members.len()));
        }
        let members = (0..self.ground_size).map(|v| self.signature(v)).collect();
        Ok(Family {
            ground_size: self.members.len(),
            members,
        })
    }

    /// Complements membership of element `v` in every member.
    pub fn switch(&self, v: usize) -> Result<Family, FamilyError> {
        self.check_element(v)?;
        Ok(self.switch_set(1 << v))
    }

    /// Switches every element of `set` at once. Bits outside the ground are ignored.
    pub fn switch_set(&self, set: u64) -> Family {
        let set = set & full_mask(self.ground_size);
        Family {
            ground_size: self.ground_size,
            members: self.members.iter().map(|&w| w ^ set).collect(),
        }
    }

    /// Maps element `v` to `perm[v]` in every member.
    pub fn relabel(&self, perm: &[usize]) -> Result<Family, FamilyError> {
        let m = self.ground_size;
        if perm.len() != m {
            return Err(FamilyError::NotPermutation(m));
        }
        let mut seen = 0u64;
        for &p in perm {
            if p >= m || seen >> p & 1 == 1 {
                return Err(FamilyError::NotPermutation(m));
            }
            seen |= 1 << p;
        }
        Ok(Family {
            ground_size: m,
            members: self.members.iter().map(|&w| apply_perm(w, perm)).collect(),
        })
    }

    /// Removes ground element `v` and shifts higher elements down by one.
    pub fn delete_element(&self, v: usize) -> Result<Family, FamilyError> {
        self.check_element(v)?;
        Ok(Family {
            ground_size: self.ground_size - 1,
            members: self.members.iter().map(|&w| compact(w, v)).collect(),
        })
    }

    /// Keeps only the members whose index satisfies `keep`.
    pub fn retain_members(&self, mut keep: impl FnMut(usize) -> bool) -> Family {
        Family {
            ground_size: self.ground_size,
            members: self
                .members
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, &w)| w)
                .collect(),
        }
    }

    pub fn with_member(&self, w: u64) -> Result<Family, FamilyError> {
        let mut members = self.members.clone();
        members.push(w);
        Family::from_words(self.ground_size, members)
    }

    /// Members sorted as unsigned words.
    pub fn sorted(&self) -> Family {
        let mut members = self.members.clone();
        members.sort_unstable();
        Family {
            ground_size: self.ground_size,
            members,
        }
    }

    /// True iff all members are pairwise distinct.
    pub fn is_proper(&self) -> bool {
        let mut s = self.members.clone();
        s.sort_unstable();
        s.windows(2).all(|p| p[0] != p[1])
    }

    /// True iff no member is a subset of a different member. Duplicates make
    /// this false.
    pub fn is_sperner(&self) -> bool {
        self.sperner_violation().is_none()
    }

    /// First pair `(i, j)`, `i != j`, with `members[i] ⊆ members[j]`.
    pub fn sperner_violation(&self) -> Option<(usize, usize)> {
        let n = self.members.len();
        (0..n)
            .cartesian_product(0..n)
            .find(|&(i, j)| i != j && is_subset(self.members[i], self.members[j]))
    }

    /// Lexicographically least sorted member list over the orbit of `self`
    /// under `group`.
    pub fn canonical_form(&self, group: SymmetryGroup) -> Result<Family, FamilyError> {
        let m = self.ground_size;
        if m > MAX_CANON_GROUND {
            return Err(FamilyError::CanonCapacity(m));
        }
        let mut best = self.sorted().members;
        if self.members.is_empty() {
            return Ok(self.sorted());
        }
        let mut image = vec![0u64; self.members.len()];
        let mut cand = vec![0u64; self.members.len()];
        for perm in (0..m).permutations(m) {
            for (dst, &w) in image.iter_mut().zip(&self.members) {
                *dst = apply_perm(w, &perm);
            }
            match group {
                SymmetryGroup::PermutationsOnly => {
                    cand.copy_from_slice(&image);
                    cand.sort_unstable();
                    if cand < best {
                        best.copy_from_slice(&cand);
                    }
                }
                SymmetryGroup::PermutationsAndSwitching => {
                    // The least orbit element contains the empty set, so only
                    // switch sets that map some member to it need trying.
                    for &pivot in &image {
                        for (dst, &w) in cand.iter_mut().zip(&image) {
                            *dst = w ^ pivot;
                        }
                        cand.sort_unstable();
                        if cand < best {
                            best.copy_from_slice(&cand);
                        }
                    }
                }
            }
        }
        Ok(Family {
            ground_size: m,
            members: best,
        })
    }

    fn check_element(&self, v: usize) -> Result<(), FamilyError> {
        if v >= self.ground_size {
            Err(FamilyError::ElementOutOfRange {
                element: v,
                ground_size: self.ground_size,
            })
        } else {
            Ok(())
        }
    }
}

#[inline]
pub(crate) fn apply_perm(w: u64, perm: &[usize]) -> u64 {
    bits::elements(w).fold(0, |acc, i| acc | 1 << perm[i])
}

/// Deletes bit `v` from `w`, shifting higher bits down.
#[inline]
pub(crate) fn compact(w: u64, v: usize) -> u64 {
    let low = w & full_mask(v);
    let high = if v + 1 >= 64 { 0 } else { (w >> (v + 1)) << v };
    low | high
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} [", self.ground_size)?;
        for (i, &w) in self.members.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", bits::fmt_set(w))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fam(m: usize, sets: &[&[usize]]) -> Family {
        Family::new(m, sets).unwrap()
    }

    #[test]
    fn new_family_encodes_members() {
        let f = fam(2, &[&[0, 1], &[1]]);
        assert_eq!(f.ground_size(), 2);
        assert_eq!(f.members(), &[0b11, 0b10]);
        let e = fam(3, &[]);
        assert!(e.is_empty());
        assert_eq!(e.ground_size(), 3);
    }

    #[test]
    fn new_family_rejects_bad_input() {
        assert_eq!(
            Family::new(1, &[vec![1]]),
            Err(FamilyError::IndexOutOfRange {
                member: 0,
                index: 1,
                ground_size: 1
            })
        );
        assert_eq!(
            Family::new::<Vec<usize>>(65, &[]),
            Err(FamilyError::Capacity(65))
        );
        assert!(Family::from_words(2, vec![0b100]).is_err());
        assert!(Family::from_words(64, vec![u64::MAX]).is_ok());
    }

    #[test]
    fn dual_of_small_system() {
        let f = fam(3, &[&[0, 1], &[1, 2]]);
        let d = f.dual().unwrap();
        assert_eq!(d, fam(2, &[&[0], &[0, 1], &[1]]));
    }

    #[test]
    fn dual_is_involutive_on_distinct_system() {
        let f = fam(2, &[&[0, 1], &[1]]);
        assert_eq!(f.dual().unwrap().dual().unwrap(), f);
    }

    #[test]
    fn dual_of_duplicate_members_is_improper() {
        let f = fam(2, &[&[0, 1], &[0, 1]]);
        let d = f.dual().unwrap();
        assert_eq!(d, fam(2, &[&[0, 1], &[0, 1]]));
        assert!(!d.is_proper());
    }

    #[test]
    fn dual_capacity() {
        let f = Family::from_words(1, vec![0; 65]).unwrap();
        assert_eq!(f.dual(), Err(FamilyError::DualCapacity(65)));
    }

    #[test]
    fn switch_complements_bit() {
        let f = fam(1, &[&[], &[0]]);
        assert_eq!(f.switch(0).unwrap(), fam(1, &[&[0], &[]]));
        assert!(f.switch(1).is_err());
    }

    #[test]
    fn switch_on_two_subsets_of_five() {
        let f = Family::layer(5, 2).unwrap();
        let s = f.switch(0).unwrap();
        for (&before, &after) in f.members().iter().zip(s.members()) {
            if before & 1 == 1 {
                assert_eq!(after, before & !1);
                assert_eq!(after.count_ones(), 1);
            } else {
                assert_eq!(after, before | 1);
                assert_eq!(after.count_ones(), 3);
            }
        }
    }

    #[test]
    fn relabel_examples() {
        let f = fam(2, &[&[0]]);
        assert_eq!(f.relabel(&[0, 1]).unwrap(), f);
        assert_eq!(f.relabel(&[1, 0]).unwrap(), fam(2, &[&[1]]));
        assert_eq!(f.relabel(&[0, 0]), Err(FamilyError::NotPermutation(2)));
        assert_eq!(f.relabel(&[0]), Err(FamilyError::NotPermutation(2)));
    }

    #[test]
    fn canonical_form_examples() {
        let f = fam(2, &[&[1]]);
        assert_eq!(
            f.canonical_form(SymmetryGroup::PermutationsOnly).unwrap(),
            fam(2, &[&[0]])
        );
        let g = fam(2, &[&[0, 1]]);
        assert_eq!(
            g.canonical_form(SymmetryGroup::PermutationsAndSwitching)
                .unwrap(),
            fam(2, &[&[]])
        );
        assert_eq!(
            Family::empty(10)
                .unwrap()
                .canonical_form(SymmetryGroup::PermutationsOnly),
            Err(FamilyError::CanonCapacity(10))
        );
    }

    /// Canonical form by enumerating every (permutation, switch set) pair.
    fn canon_brute(f: &Family, switching: bool) -> Vec<u64> {
        let m = f.ground_size();
        let switches: Vec<u64> = if switching {
            (0..1u64 << m).collect()
        } else {
            vec![0]
        };
        let mut best: Option<Vec<u64>> = None;
        for perm in (0..m).permutations(m) {
            for &s in &switches {
                let mut img: Vec<u64> = f
                    .members()
                    .iter()
                    .map(|&w| apply_perm(w, &perm) ^ s)
                    .collect();
                img.sort_unstable();
                if best.as_ref().is_none_or(|b| img < *b) {
                    best = Some(img);
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn canonical_form_matches_full_group_enumeration() {
        // Every family of up to 3 distinct subsets on 3 elements.
        let all: Vec<u64> = (0..8).collect();
        for size in 0..=3 {
            for combo in all.iter().copied().combinations(size) {
                let f = Family::from_words(3, combo).unwrap();
                for (group, sw) in [
                    (SymmetryGroup::PermutationsOnly, false),
                    (SymmetryGroup::PermutationsAndSwitching, true),
                ] {
                    assert_eq!(
                        f.canonical_form(group).unwrap().members(),
                        canon_brute(&f, sw)
                    );
                }
            }
        }
    }

    #[test]
    fn sperner_examples() {
        assert!(Family::layer(3, 2).unwrap().is_sperner());
        assert!(!fam(1, &[&[], &[0]]).is_sperner());
        let nested = fam(
            4,
            &[
                &[],
                &[0],
                &[1],
                &[0, 2],
                &[1, 3],
                &[0, 2, 3],
                &[1, 2, 3],
                &[0, 1, 2, 3],
            ],
        );
        assert!(!nested.is_sperner());
        assert!(!fam(2, &[&[0], &[0]]).is_sperner());
    }

    #[test]
    fn sperner_is_not_switch_invariant() {
        // Find, by enumeration on 2 elements, a Sperner family whose switch is not.
        let mut found = None;
        'outer: for mask in 0u32..16 {
            let words: Vec<u64> = (0..4).filter(|i| mask >> i & 1 == 1).collect();
            let f = Family::from_words(2, words).unwrap();
            for v in 0..2 {
                let s = f.switch(v).unwrap();
                if f.is_sperner() != s.is_sperner() {
                    found = Some((f, v));
                    break 'outer;
                }
            }
        }
        let (f, v) = found.expect("a violating pair exists on 2 elements");
        assert!(f.is_sperner());
        assert!(!f.switch(v).unwrap().is_sperner());
    }

    #[test]
    fn delete_element_compacts() {
        let f = fam(4, &[&[0, 2, 3], &[1]]);
        assert_eq!(f.delete_element(1).unwrap(), fam(3, &[&[0, 1, 2], &[]]));
        assert_eq!(compact(u64::MAX, 63), u64::MAX >> 1);
    }

    fn arb_family(max_m: usize) -> impl Strategy<Value = Family> {
        (0..=max_m).prop_flat_map(|m| {
            prop::collection::vec(0..=full_mask(m), 0..8)
                .prop_map(move |ws| Family::from_words(m, ws).unwrap())
        })
    }

    fn arb_perm(m: usize) -> impl Strategy<Value = Vec<usize>> {
        Just((0..m).collect::<Vec<_>>()).prop_shuffle()
    }

    proptest! {
        #[test]
        fn switch_is_involution(f in arb_family(8), v in 0usize..8) {
            prop_assume!(v < f.ground_size());
            prop_assert_eq!(f.switch(v).unwrap().switch(v).unwrap(), f);
        }

        #[test]
        fn switch_commutes_with_relabel(
            (f, perm) in arb_family(7).prop_flat_map(|f| { let m = f.ground_size(); (Just(f), arb_perm(m)) }),
            v in 0usize..7,
        ) {
            prop_assume!(v < f.ground_size());
            let a = f.switch(v).unwrap().relabel(&perm).unwrap();
            let b = f.relabel(&perm).unwrap().switch(perm[v]).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn relabel_inverse(
            (f, perm) in arb_family(8).prop_flat_map(|f| { let m = f.ground_size(); (Just(f), arb_perm(m)) }),
        ) {
            let mut inv = vec![0; perm.len()];
            for (i, &p) in perm.iter().enumerate() { inv[p] = i; }
            prop_assert_eq!(f.relabel(&perm).unwrap().relabel(&inv).unwrap(), f);
        }

        #[test]
        fn canonical_form_constant_on_orbits(
            (f, perm, w) in arb_family(5).prop_flat_map(|f| {
                let m = f.ground_size();
                (Just(f), arb_perm(m), 0..=full_mask(m))
            }),
        ) {
            let g = f.relabel(&perm).unwrap().switch_set(w);
            let cf = f.canonical_form(SymmetryGroup::PermutationsAndSwitching).unwrap();
            prop_assert_eq!(&cf, &g.canonical_form(SymmetryGroup::PermutationsAndSwitching).unwrap());
            prop_assert_eq!(&cf, &cf.canonical_form(SymmetryGroup::PermutationsAndSwitching).unwrap());
            let h = f.relabel(&perm).unwrap();
            prop_assert_eq!(
                f.canonical_form(SymmetryGroup::PermutationsOnly).unwrap(),
                h.canonical_form(SymmetryGroup::PermutationsOnly).unwrap()
            );
        }

        #[test]
        fn dual_involution_when_distinct(f in arb_family(6)) {
            let d = f.dual().unwrap();
            prop_assume!(f.is_proper() && d.is_proper());
            prop_assert_eq!(d.dual().unwrap(), f);
        }

        #[test]
        fn sperner_relabel_invariant(
            (f, perm) in arb_family(6).prop_flat_map(|f| { let m = f.ground_size(); (Just(f), arb_perm(m)) }),
        ) {
            prop_assert_eq!(f.is_sperner(), f.relabel(&perm).unwrap().is_sperner());
        }
    }
}
