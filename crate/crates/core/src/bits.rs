//! Word-sized bit set helpers.

/// Largest ground set a single word can hold.
pub const MAX_GROUND: usize = 64;

/// Mask with the low `m` bits set.
#[inline]
pub fn full_mask(m: usize) -> u64 {
    if m >= 64 {
        u64::MAX
    } else {
        (1u64 << m) - 1
    }
}

#[inline]
pub fn is_subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

/// Iterates the set bits of `w` in increasing order.
pub fn elements(mut w: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if w == 0 {
            None
        } else {
            let i = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i)
        }
    })
}

pub fn to_indices(w: u64) -> Vec<usize> {
    elements(w).collect()
}

/// Builds a word from indices, all of which must be `< 64`.
pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> u64 {
    indices.into_iter().fold(0, |acc, i| acc | (1u64 << i))
}

/// Next word with the same popcount (Gosper's hack). Returns `None` on overflow.
#[inline]
pub fn next_same_popcount(w: u64) -> Option<u64> {
    if w == 0 {
        return None;
    }
    let c = w & w.wrapping_neg();
    let r = w.checked_add(c)?;
    Some((((r ^ w) >> 2) / c) | r)
}

/// All `size`-element subsets of `{0, .., m-1}`, in increasing numeric order.
pub fn subsets_of_size(m: usize, size: usize) -> impl Iterator<Item = u64> {
    let limit = full_mask(m);
    let mut next = if size > m {
        None
    } else if size == 0 {
        Some(0)
    } else {
        Some(full_mask(size))
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            next_same_popcount(cur).filter(|&w| w <= limit)
        };
        Some(cur)
    })
}

/// All subsets of `{0, .., m-1}` with at most `k` elements, ordered by
/// `(size, numeric value)`.
pub fn subsets_up_to(m: usize, k: usize) -> impl Iterator<Item = u64> {
    (0..=k.min(m)).flat_map(move |s| subsets_of_size(m, s))
}

/// Lexicographic order on sorted index lists, as used for `t`-subset
/// assignments. Distinct from numeric word order.
pub fn lex_subsets(m: usize, t: usize) -> Vec<u64> {
    let mut out: Vec<Vec<usize>> = subsets_of_size(m, t).map(to_indices).collect();
    out.sort();
    out.into_iter().map(from_indices).collect()
}

/// Formats a word as `{0,2,3}`.
pub fn fmt_set(w: u64) -> String {
    let inner: Vec<String> = elements(w).map(|i| i.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_subsets(m: usize, k: usize) -> Vec<u64> {
        let mut v: Vec<u64> = (0..1u64 << m)
            .filter(|w| w.count_ones() as usize <= k)
            .collect();
        v.sort_by_key(|w| (w.count_ones(), *w));
        v
    }

    #[test]
    fn subset_enumeration_matches_brute_force() {
        for m in 0..=7 {
            for k in 0..=m + 1 {
                let got: Vec<u64> = subsets_up_to(m, k).collect();
                assert_eq!(got, brute_subsets(m, k), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn full_width_subsets_terminate() {
        assert_eq!(subsets_of_size(64, 64).count(), 1);
        assert_eq!(subsets_of_size(64, 1).count(), 64);
        assert_eq!(subsets_of_size(3, 4).count(), 0);
    }

    #[test]
    fn lex_order_differs_from_numeric() {
        // {0,3} precedes {1,2} lexicographically but not numerically.
        let lex = lex_subsets(4, 2);
        assert_eq!(lex, vec![0b0011, 0b0101, 0b1001, 0b0110, 0b1010, 0b1100]);
    }

    #[test]
    fn index_round_trip() {
        assert_eq!(to_indices(from_indices([5, 0, 63])), vec![0, 5, 63]);
        assert_eq!(fmt_set(0b1011), "{0,1,3}");
        assert_eq!(fmt_set(0), "{}");
    }
}
