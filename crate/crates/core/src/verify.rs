//! Decision procedures for the separation properties, with certificates.
//!
//! Primal checks take a system whose ground is the element set `V` and whose
//! members are query sets. Dual checks ([`is_nice`], [`find_separator`]) take
//! the family of element signatures.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::bits::{self, full_mask, is_subset};
use crate::family::{Family, FamilyError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("member index {index} out of range for a family of {len} members")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(
        "pair {index}: key is not a subset of the separator, or uses elements outside the ground"
    )]
    MalformedPair { index: usize },
    #[error(transparent)]
    Family(#[from] FamilyError),
}

/// A separator `S` together with the key `S ∩ F` of the member it singles out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SeparatorWitness {
    pub separator: u64,
    pub key: u64,
}

impl SeparatorWitness {
    pub fn new(separator: u64, key: u64) -> Option<Self> {
        is_subset(key, separator).then_some(SeparatorWitness { separator, key })
    }

    pub fn size(&self) -> usize {
        self.separator.count_ones() as usize
    }
}

impl fmt::Display for SeparatorWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S={} S'={}",
            bits::fmt_set(self.separator),
            bits::fmt_set(self.key)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Separating,
    CompletelySeparating,
    HyperCompletely(usize),
    HyperSeparating(usize),
    Nice(usize),
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Separating => write!(f, "separating"),
            Property::CompletelySeparating => write!(f, "completely separating"),
            Property::HyperCompletely(k) => write!(f, "{k}-hypercompletely separating"),
            Property::HyperSeparating(k) => write!(f, "{k}-hyperseparating"),
            Property::Nice(k) => write!(f, "nice (k={k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    /// Element signature: the set of member indices containing the element.
    Signature(u64),
    /// Member indices whose intersection is exactly the element.
    Subfamily(Vec<usize>),
    /// Separator and key. For primal hyperseparating certificates both are
    /// sets of member indices: the witness sets, and those containing the element.
    Separator(SeparatorWitness),
}

/// One witness per ground element (primal properties) or per member (niceness).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub property: Property,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counterexample {
    /// Two elements with identical signatures.
    InseparablePair(usize, usize),
    /// Every member containing the first element also contains the second.
    UnseparatedOrderedPair(usize, usize),
    /// A ground element without a witness.
    Element(usize),
    /// A dual member without a separator.
    Member(usize),
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Counterexample::InseparablePair(a, b) => {
                write!(f, "elements {a} and {b} have identical signatures")
            }
            Counterexample::UnseparatedOrderedPair(a, b) => {
                write!(f, "every set containing {a} also contains {b}")
            }
            Counterexample::Element(v) => write!(f, "element {v} has no witness"),
            Counterexample::Member(i) => write!(f, "member {i} has no separator"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Holds(Certificate),
    Fails(Counterexample),
}

impl Outcome {
    pub fn holds(&self) -> bool {
        matches!(self, Outcome::Holds(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Outcome::Holds(c) => Some(c),
            Outcome::Fails(_) => None,
        }
    }

    pub fn counterexample(&self) -> Option<Counterexample> {
        match self {
            Outcome::Holds(_) => None,
            Outcome::Fails(c) => Some(*c),
        }
    }
}

fn check_k(k: usize) -> Result<(), VerifyError> {
    if k == 0 {
        Err(VerifyError::ZeroK)
    } else {
        Ok(())
    }
}

/// Intersection of the members at `indices`; the whole ground when empty.
fn intersect(f: &Family, indices: &[usize]) -> u64 {
    indices
        .iter()
        .fold(full_mask(f.ground_size()), |acc, &i| acc & f.member(i))
}

pub fn is_separating(f: &Family) -> Outcome {
    let n = f.ground_size();
    let mut first_with: HashMap<u64, usize> = HashMap::with_capacity(n);
    let mut witnesses = Vec::with_capacity(n);
    for v in 0..n {
        let sig = f.signature(v);
        if let Some(&u) = first_with.get(&sig) {
            return Outcome::Fails(Counterexample::InseparablePair(u, v));
        }
        first_with.insert(sig, v);
        witnesses.push(Witness::Signature(sig));
    }
    Outcome::Holds(Certificate {
        property: Property::Separating,
        witnesses,
    })
}

pub fn is_completely_separating(f: &Family) -> Outcome {
    let n = f.ground_size();
    let mut witnesses = Vec::with_capacity(n);
    for v in 0..n {
        let containing: Vec<usize> = (0..f.len())
            .filter(|&i| f.member(i) >> v & 1 == 1)
            .collect();
        let rest = intersect(f, &containing) & !(1 << v);
        if rest != 0 {
            let u = rest.trailing_zeros() as usize;
            return Outcome::Fails(Counterexample::UnseparatedOrderedPair(v, u));
        }
        witnesses.push(Witness::Subfamily(containing));
    }
    Outcome::Holds(Certificate {
        property: Property::CompletelySeparating,
        witnesses,
    })
}

/// Smallest, then lexicographically first, subfamily of at most `k` members
/// intersecting exactly in `{v}`.
fn hcs_witness(f: &Family, v: usize, k: usize) -> Option<Vec<usize>> {
    let target = 1u64 << v;
    let containing: Vec<usize> = (0..f.len())
        .filter(|&i| f.member(i) & target != 0)
        .collect();
    if containing.is_empty() || intersect(f, &containing) != target {
        return None;
    }
    fn dfs(
        f: &Family,
        pool: &[usize],
        start: usize,
        left: usize,
        acc: u64,
        target: u64,
        chosen: &mut Vec<usize>,
    ) -> bool {
        if left == 0 {
            return acc == target;
        }
        for p in start..pool.len() {
            chosen.push(pool[p]);
            if dfs(
                f,
                pool,
                p + 1,
                left - 1,
                acc & f.member(pool[p]),
                target,
                chosen,
            ) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    let full = full_mask(f.ground_size());
    (1..=k.min(containing.len())).find_map(|size| {
        let mut chosen = Vec::with_capacity(size);
        dfs(f, &containing, 0, size, full, target, &mut chosen).then_some(chosen)
    })
}

pub fn is_k_hypercompletely_separating(f: &Family, k: usize) -> Result<Outcome, VerifyError> {
    check_k(k)?;
    let mut witnesses = Vec::with_capacity(f.ground_size());
    for v in 0..f.ground_size() {
        match hcs_witness(f, v, k) {
            Some(t) => witnesses.push(Witness::Subfamily(t)),
            None => return Ok(Outcome::Fails(Counterexample::Element(v))),
        }
    }
    Ok(Outcome::Holds(Certificate {
        property: Property::HyperCompletely(k),
        witnesses,
    }))
}

/// Least separator of member `i` of the dual family `d`, ordered by
/// (size, numeric value), with `|S| <= k`.
pub fn find_separator(
    d: &Family,
    i: usize,
    k: usize,
) -> Result<Option<SeparatorWitness>, VerifyError> {
    check_k(k)?;
    if i >= d.len() {
        return Err(VerifyError::IndexOutOfRange {
            index: i,
            len: d.len(),
        });
    }
    let me = d.member(i);
    let diffs: Vec<u64> = d
        .members()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &w)| w ^ me)
        .collect();
    if diffs.contains(&0) {
        return Ok(None);
    }
    // S separates iff it hits every difference set.
    Ok(bits::subsets_up_to(d.ground_size(), k)
        .find(|&s| diffs.iter().all(|&x| x & s != 0))
        .map(|s| SeparatorWitness {
            separator: s,
            key: me & s,
        }))
}

pub fn is_nice(d: &Family, k: usize) -> Result<Outcome, VerifyError> {
    check_k(k)?;
    let mut witnesses = Vec::with_capacity(d.len());
    for i in 0..d.len() {
        match find_separator(d, i, k)? {
            Some(w) => witnesses.push(Witness::Separator(w)),
            None => return Ok(Outcome::Fails(Counterexample::Member(i))),
        }
    }
    Ok(Outcome::Holds(Certificate {
        property: Property::Nice(k),
        witnesses,
    }))
}

/// Checks niceness of the dual. Separator and key of each element's witness
/// index the primal members: the witness sets, and those containing the element.
pub fn is_k_hyperseparating(f: &Family, k: usize) -> Result<Outcome, VerifyError> {
    check_k(k)?;
    let d = f.dual()?;
    Ok(match is_nice(&d, k)? {
        Outcome::Holds(c) => Outcome::Holds(Certificate {
            property: Property::HyperSeparating(k),
            witnesses: c.witnesses,
        }),
        Outcome::Fails(Counterexample::Member(v)) => Outcome::Fails(Counterexample::Element(v)),
        Outcome::Fails(other) => Outcome::Fails(other),
    })
}

/// Re-checks one separator witness for member `i` of `d` by scanning every member.
pub fn recheck_separator(d: &Family, i: usize, w: &SeparatorWitness, k: usize) -> bool {
    if i >= d.len() || w.size() > k || w.separator & !full_mask(d.ground_size()) != 0 {
        return false;
    }
    if d.member(i) & w.separator != w.key {
        return false;
    }
    d.members()
        .iter()
        .enumerate()
        .filter(|&(_, &g)| g & w.separator == w.key)
        .count()
        == 1
}

/// Re-validates every witness of `cert` against `f` without reusing the
/// search code that produced it.
pub fn recheck_certificate(f: &Family, cert: &Certificate) -> bool {
    let n = f.ground_size();
    let member_ok = |idx: &[usize]| idx.iter().all(|&i| i < f.len());
    match cert.property {
        Property::Separating => {
            cert.witnesses.len() == n
                && cert.witnesses.iter().enumerate().all(|(v, w)| match w {
                    Witness::Signature(sig) => {
                        f.signature(v) == *sig
                            && (0..n).filter(|&u| f.signature(u) == *sig).count() == 1
                    }
                    _ => false,
                })
        }
        Property::CompletelySeparating => {
            cert.witnesses.len() == n
                && cert.witnesses.iter().enumerate().all(|(v, w)| match w {
                    Witness::Subfamily(t) => member_ok(t) && intersect(f, t) == 1 << v,
                    _ => false,
                })
        }
        Property::HyperCompletely(k) => {
            cert.witnesses.len() == n
                && cert.witnesses.iter().enumerate().all(|(v, w)| match w {
                    Witness::Subfamily(t) => {
                        let mut sorted = t.clone();
                        sorted.sort_unstable();
                        sorted.dedup();
                        !t.is_empty()
                            && t.len() <= k
                            && sorted.len() == t.len()
                            && member_ok(t)
                            && intersect(f, t) == 1 << v
                    }
                    _ => false,
                })
        }
        Property::Nice(k) => {
            cert.witnesses.len() == f.len()
                && cert.witnesses.iter().enumerate().all(|(i, w)| match w {
                    Witness::Separator(s) => recheck_separator(f, i, s, k),
                    _ => false,
                })
        }
        Property::HyperSeparating(k) => {
            // Pattern of element u on the witness sets S.
            let pattern = |u: usize, s: u64| {
                bits::elements(s)
                    .filter(|&i| f.member(i) >> u & 1 == 1)
                    .fold(0u64, |acc, i| acc | 1 << i)
            };
            cert.witnesses.len() == n
                && cert.witnesses.iter().enumerate().all(|(v, w)| match w {
                    Witness::Separator(s) => {
                        s.size() <= k
                            && f.len() <= 64
                            && s.separator & !full_mask(f.len()) == 0
                            && pattern(v, s.separator) == s.key
                            && (0..n).filter(|&u| pattern(u, s.separator) == s.key).count() == 1
                    }
                    _ => false,
                })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairViolation {
    DuplicatePair(usize, usize),
    OversizedSeparator(usize),
    /// Two pairs share a key and one separator contains the other.
    NotSperner {
        key: u64,
        smaller: usize,
        larger: usize,
    },
}

impl fmt::Display for PairViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairViolation::DuplicatePair(a, b) => write!(f, "pairs {a} and {b} are equal"),
            PairViolation::OversizedSeparator(i) => {
                write!(f, "pair {i} has a separator larger than k")
            }
            PairViolation::NotSperner {
                key,
                smaller,
                larger,
            } => write!(
                f,
                "key {}: separator of pair {smaller} is contained in that of pair {larger}",
                bits::fmt_set(*key)
            ),
        }
    }
}

/// Validates a family of (separator, key) pairs: distinct, separators of size
/// at most `k`, and for each key the separators form an antichain.
/// Returns `Ok(None)` when valid.
pub fn pair_family_valid(
    pairs: &[SeparatorWitness],
    m: usize,
    k: usize,
) -> Result<Option<PairViolation>, VerifyError> {
    let mask = full_mask(m);
    if let Some(index) = pairs
        .iter()
        .position(|p| !is_subset(p.key, p.separator) || p.separator & !mask != 0)
    {
        return Err(VerifyError::MalformedPair { index });
    }
    for (a, p) in pairs.iter().enumerate() {
        if p.size() > k {
            return Ok(Some(PairViolation::OversizedSeparator(a)));
        }
        for (b, q) in pairs.iter().enumerate().skip(a + 1) {
            if p == q {
                return Ok(Some(PairViolation::DuplicatePair(a, b)));
            }
        }
    }
    for (a, p) in pairs.iter().enumerate() {
        for (b, q) in pairs.iter().enumerate() {
            if a != b && p.key == q.key && is_subset(p.separator, q.separator) {
                return Ok(Some(PairViolation::NotSperner {
                    key: p.key,
                    smaller: a,
                    larger: b,
                }));
            }
        }
    }
    Ok(None)
}
