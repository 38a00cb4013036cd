//! Closed-form extremal values, computed by exact upward scans.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("binomial coefficient C({0}, {1}) overflows u64")]
    Overflow(u64, i64),
    #[error("n must be at least {min}, got {n}")]
    SmallN { n: u64, min: u64 },
    #[error("k must be at least 1")]
    ZeroK,
}

/// `C(m, j)`, zero outside `0..=m`.
pub fn binom(m: u64, j: i64) -> Result<u64, BoundsError> {
    if j < 0 || j as u64 > m {
        return Ok(0);
    }
    let j = (j as u64).min(m - j as u64);
    let mut acc: u128 = 1;
    for i in 0..j {
        // acc * (m - i) / (i + 1) stays integral at every step.
        acc = acc * (m - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(BoundsError::Overflow(m, j as i64));
        }
    }
    Ok(acc as u64)
}

/// Effective witness size: `k` when `m >= 2k - 1`, else `floor(m / 2)`.
pub fn k_prime(m: u64, k: u64) -> u64 {
    if m + 1 >= 2 * k {
        k
    } else {
        m / 2
    }
}

fn check_n(n: u64, min: u64) -> Result<(), BoundsError> {
    if n < min {
        Err(BoundsError::SmallN { n, min })
    } else {
        Ok(())
    }
}

/// Smallest `m >= start` with `pred(m)`; `pred` must eventually hold.
fn scan_up(
    start: u64,
    mut pred: impl FnMut(u64) -> Result<bool, BoundsError>,
) -> Result<u64, BoundsError> {
    let mut m = start;
    while !pred(m)? {
        m += 1;
    }
    Ok(m)
}

/// Smallest size of a k-hypercompletely separating system on `n` elements.
pub fn min_m_hcs(n: u64, k: u64) -> Result<u64, BoundsError> {
    check_n(n, 2)?;
    if k == 0 {
        return Err(BoundsError::ZeroK);
    }
    scan_up(1, |m| Ok(binom(m, k_prime(m, k) as i64)? >= n))
}

/// `ceil(log2 n)`: smallest size of a separating system on `n` elements.
pub fn separating_min(n: u64) -> Result<u64, BoundsError> {
    check_n(n, 1)?;
    scan_up(0, |m| Ok(m >= 64 || 1u64 << m >= n))
}

/// Smallest size of a completely separating system on `n` elements.
pub fn spencer_min(n: u64) -> Result<u64, BoundsError> {
    check_n(n, 2)?;
    scan_up(1, |m| Ok(binom(m, (m / 2) as i64)? >= n))
}

/// Smallest `m` with `C(m, 2) >= n`.
fn min_m_pairs(n: u64) -> Result<u64, BoundsError> {
    scan_up(0, |m| Ok(binom(m, 2)? >= n))
}

/// Exact minimum size of a 2-hyperseparating system on `n` elements.
pub fn f2_exact(n: u64) -> Result<u64, BoundsError> {
    check_n(n, 2)?;
    if n <= 10 {
        Ok(n.div_ceil(2))
    } else {
        min_m_pairs(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowerSource {
    /// Counting (separator, key) pairs: `2^k C(m, k) >= n`.
    PairFamily,
    /// Every k-hyperseparating system is separating: `2^m >= n`.
    InfoTheoretic,
}

impl fmt::Display for LowerSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerSource::PairFamily => write!(f, "pair-family"),
            LowerSource::InfoTheoretic => write!(f, "info-theoretic"),
        }
    }
}

/// Lower and upper bound on `f(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundPair {
    pub lower: u64,
    pub upper: u64,
    pub lower_source: LowerSource,
    /// The pair-family formula fell below `separating_min(n)` and was raised to it.
    pub lower_clamped: bool,
}

impl fmt::Display for BoundPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ≤ f ≤ {} [{}",
            self.lower, self.upper, self.lower_source
        )?;
        if self.lower_clamped {
            write!(f, ", clamped")?;
        }
        write!(f, "]")
    }
}

pub fn f_bounds(n: u64, k: u64) -> Result<BoundPair, BoundsError> {
    check_n(n, 2)?;
    if k == 0 {
        return Err(BoundsError::ZeroK);
    }
    let upper = min_m_hcs(n, k)?;
    let info = separating_min(n)?;
    let threshold = binom(2 * k - 1, k as i64)?;
    let (lower, lower_source, lower_clamped) = if n > threshold {
        let weight = 1u64
            .checked_shl(k as u32)
            .ok_or(BoundsError::Overflow(k, k as i64))?;
        let formula = scan_up(0, |m| {
            let c = binom(m, k as i64)?;
            Ok(c.checked_mul(weight).is_none_or(|x| x >= n))
        })?;
        (formula.max(info), LowerSource::PairFamily, info > formula)
    } else {
        (info, LowerSource::InfoTheoretic, false)
    };
    debug_assert!(lower <= upper);
    Ok(BoundPair {
        lower,
        upper,
        lower_source,
        lower_clamped,
    })
}
