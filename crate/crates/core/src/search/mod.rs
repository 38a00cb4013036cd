//! Exhaustive searches that re-derive the small extremal values.
//!
//! All family searches share one engine (see `engine`): depth-first over
//! strictly increasing subset sequences, with incremental separator masks,
//! hereditary candidate filtering and orbit rejection at shallow depths.
//! Results do not depend on the worker count.

mod engine;
mod pairs;

use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::family::{Family, SymmetryGroup};
use engine::{Config, Goal, NiceConstraint, UniqueSubsetConstraint};

pub use pairs::{max_antichain, max_pair_family, PairSearchReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("ground size {m} exceeds the exhaustive-search limit of {max}")]
    Capacity { m: usize, max: usize },
    #[error("k must be at least 1")]
    ZeroK,
    #[error("k = {k} exceeds the supported maximum of {max}")]
    LargeK { k: usize, max: usize },
    #[error("n = {n} does not fit on {m_max} elements (at most 2^{m_max} distinct members)")]
    TooLargeN { n: usize, m_max: usize },
    #[error("n must be at least 1")]
    ZeroN,
}

pub const MAX_NICE_GROUND: usize = 6;
pub const MAX_UNIQUE_SUBSET_GROUND: usize = 5;

/// Knobs shared by every search.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    /// Wall-clock budget; on expiry the best value so far is reported with
    /// `exhausted = false`.
    pub budget: Option<Duration>,
    /// Worker threads; 1 runs on the calling thread.
    pub threads: usize,
    /// Reject non-canonical prefixes up to `canon_depth` members.
    pub symmetry: bool,
    pub canon_depth: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: None,
            threads: 1,
            symmetry: true,
            canon_depth: 2,
        }
    }
}

impl SearchOptions {
    fn config(&self, m: usize, goal: Goal, group: SymmetryGroup) -> Config {
        Config {
            m,
            goal,
            symmetry: self.symmetry.then_some(group),
            canon_depth: self.canon_depth,
            split_depth: self.canon_depth + 2,
            threads: self.threads.max(1),
            deadline: self.budget.map(|b| Instant::now() + b),
        }
    }
}

/// Result of a maximization search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub best: usize,
    pub example: Family,
    /// True iff the whole reduced space was covered, making `best` optimal.
    pub exhausted: bool,
    pub nodes_visited: u64,
    pub budget: Option<Duration>,
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}, {} nodes)",
            self.best,
            if self.exhausted {
                "exhausted"
            } else {
                "budget expired"
            },
            self.nodes_visited
        )
    }
}

fn check_ground(m: usize, max: usize, k: usize) -> Result<(), SearchError> {
    if m > max {
        return Err(SearchError::Capacity { m, max });
    }
    if k == 0 {
        return Err(SearchError::ZeroK);
    }
    Ok(())
}

fn maximize<C: engine::Constraint>(
    c: &C,
    m: usize,
    group: SymmetryGroup,
    opts: &SearchOptions,
) -> SearchReport {
    let r = engine::run(c, &opts.config(m, Goal::Maximize, group));
    let members = r.best.unwrap_or_default();
    SearchReport {
        best: members.len(),
        example: Family::from_words(m, members).expect("search words fit the ground"),
        exhausted: r.completed,
        nodes_visited: r.nodes,
        budget: opts.budget,
    }
}

/// Largest family of distinct subsets of an `m`-set in which every member has
/// a separator of at most `k` elements.
pub fn max_nice_size(
    m: usize,
    k: usize,
    opts: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    check_ground(m, MAX_NICE_GROUND, k)?;
    Ok(maximize(
        &NiceConstraint::new(m, k),
        m,
        SymmetryGroup::PermutationsAndSwitching,
        opts,
    ))
}

/// Largest family of distinct subsets of an `m`-set in which every member
/// contains a subset of at most `k` elements lying in no other member.
/// Switching does not preserve this property, so only relabelings are used.
pub fn max_unique_subset_family(
    m: usize,
    k: usize,
    opts: &SearchOptions,
) -> Result<SearchReport, SearchError> {
    check_ground(m, MAX_UNIQUE_SUBSET_GROUND, k)?;
    Ok(maximize(
        &UniqueSubsetConstraint::new(m, k),
        m,
        SymmetryGroup::PermutationsOnly,
        opts,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Existence {
    Found(Family),
    Absent,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExistsReport {
    pub outcome: Existence,
    pub nodes_visited: u64,
}

/// Decides whether a nice family of `target` distinct subsets exists on `m` elements.
pub fn exists_nice_of_size(
    m: usize,
    k: usize,
    target: usize,
    opts: &SearchOptions,
) -> Result<ExistsReport, SearchError> {
    check_ground(m, MAX_NICE_GROUND, k)?;
    if target > 1 << m {
        return Ok(ExistsReport {
            outcome: Existence::Absent,
            nodes_visited: 0,
        });
    }
    let r = engine::run(
        &NiceConstraint::new(m, k),
        &opts.config(
            m,
            Goal::Reach(target),
            SymmetryGroup::PermutationsAndSwitching,
        ),
    );
    let outcome = match r.best {
        Some(members) => {
            Existence::Found(Family::from_words(m, members).expect("search words fit the ground"))
        }
        None if r.completed => Existence::Absent,
        None => Existence::BudgetExhausted,
    };
    Ok(ExistsReport {
        outcome,
        nodes_visited: r.nodes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelOutcome {
    /// `n > 2^m`: not enough distinct subsets.
    TooFewSubsets,
    Absent,
    Found,
    BudgetExhausted,
}

impl fmt::Display for LevelOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LevelOutcome::TooFewSubsets => "too few subsets",
            LevelOutcome::Absent => "absent",
            LevelOutcome::Found => "found",
            LevelOutcome::BudgetExhausted => "budget expired",
        };
        f.write_str(s)
    }
}

/// Result of [`min_m_hyperseparating`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinLevelReport {
    /// Smallest number of sets found to work.
    pub best: Option<usize>,
    /// The primal system: `best` members on `n` elements.
    pub example: Option<Family>,
    /// Outcome per tried ground size, ascending.
    pub levels: Vec<(usize, LevelOutcome)>,
    pub nodes_visited: u64,
}

impl MinLevelReport {
    /// True iff every level below `best` was proven impossible (and `best` was found).
    pub fn exhausted(&self) -> bool {
        self.best.is_some()
            && self.levels.iter().all(|(_, o)| {
                matches!(
                    o,
                    LevelOutcome::TooFewSubsets | LevelOutcome::Absent | LevelOutcome::Found
                )
            })
    }
}

/// Smallest `m <= m_max` admitting a nice family of `n` distinct subsets; by
/// duality, the minimum size of a k-hyperseparating system on `n` elements.
pub fn min_m_hyperseparating(
    n: usize,
    k: usize,
    m_max: usize,
    opts: &SearchOptions,
) -> Result<MinLevelReport, SearchError> {
    check_ground(m_max, MAX_NICE_GROUND, k)?;
    if n == 0 {
        return Err(SearchError::ZeroN);
    }
    if n > 1 << m_max {
        return Err(SearchError::TooLargeN { n, m_max });
    }
    let mut report = MinLevelReport {
        best: None,
        example: None,
        levels: Vec::new(),
        nodes_visited: 0,
    };
    for m in 0..=m_max {
        if n > 1 << m {
            report.levels.push((m, LevelOutcome::TooFewSubsets));
            continue;
        }
        let r = exists_nice_of_size(m, k, n, opts)?;
        report.nodes_visited += r.nodes_visited;
        match r.outcome {
            Existence::Found(d) => {
                report.levels.push((m, LevelOutcome::Found));
                report.best = Some(m);
                report.example = Some(d.dual().expect("at most 64 members"));
                break;
            }
            Existence::Absent => report.levels.push((m, LevelOutcome::Absent)),
            Existence::BudgetExhausted => report.levels.push((m, LevelOutcome::BudgetExhausted)),
        }
    }
    Ok(report)
}
