//! Depth-first search over families of distinct subsets under a hereditary
//! "every member keeps a private separator" constraint.
//!
//! Families are built as strictly increasing word sequences. Each node keeps,
//! per member, the mask of candidate separators no other member has destroyed;
//! a node dies when any mask empties. Candidates that cannot be added to a node
//! cannot be added to any extension of it, so children inherit a filtered
//! candidate list.
//!
//! Symmetry: a sorted family that is lexicographically least in its orbit has
//! least prefixes too, so prefixes up to `canon_depth` that are not in
//! canonical form are skipped without losing any orbit.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use crate::bits::{self, full_mask, is_subset};
use crate::family::{Family, SymmetryGroup};

/// How an intruding member destroys another member's separators.
pub(crate) trait Constraint: Sync {
    /// Separators a member `c` could own on its own.
    fn initial(&self, c: u64) -> u64;
    /// Separators of `victim` destroyed by the presence of `intruder`.
    fn kill(&self, victim: u64, intruder: u64) -> u64;
}

/// Separators are all sets of at most `k` elements; `S` separates `F` from `G`
/// unless `F ∩ S = G ∩ S`.
pub(crate) struct NiceConstraint {
    all: u64,
    /// `agree[x]`: separators disjoint from `x`.
    agree: Vec<u64>,
}

impl NiceConstraint {
    pub fn new(m: usize, k: usize) -> Self {
        let seps: Vec<u64> = bits::subsets_up_to(m, k).collect();
        assert!(seps.len() <= 64);
        let agree = (0..1u64 << m)
            .map(|x| {
                seps.iter()
                    .enumerate()
                    .filter(|(_, &s)| s & x == 0)
                    .fold(0u64, |acc, (i, _)| acc | 1 << i)
            })
            .collect();
        NiceConstraint {
            all: full_mask(seps.len()),
            agree,
        }
    }
}

impl Constraint for NiceConstraint {
    #[inline]
    fn initial(&self, _c: u64) -> u64 {
        self.all
    }

    #[inline]
    fn kill(&self, victim: u64, intruder: u64) -> u64 {
        self.agree[(victim ^ intruder) as usize]
    }
}

/// Each member must own a subset of size at most `k` lying in no other member.
pub(crate) struct UniqueSubsetConstraint {
    /// `within[w]`: separators contained in `w`.
    within: Vec<u64>,
}

impl UniqueSubsetConstraint {
    pub fn new(m: usize, k: usize) -> Self {
        let seps: Vec<u64> = bits::subsets_up_to(m, k).collect();
        assert!(seps.len() <= 64);
        let within = (0..1u64 << m)
            .map(|w| {
                seps.iter()
                    .enumerate()
                    .filter(|(_, &s)| is_subset(s, w))
                    .fold(0u64, |acc, (i, _)| acc | 1 << i)
            })
            .collect();
        UniqueSubsetConstraint { within }
    }
}

impl Constraint for UniqueSubsetConstraint {
    #[inline]
    fn initial(&self, c: u64) -> u64 {
        self.within[c as usize]
    }

    #[inline]
    fn kill(&self, _victim: u64, intruder: u64) -> u64 {
        self.within[intruder as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Goal {
    Maximize,
    Reach(usize),
}

pub(crate) struct Config {
    pub m: usize,
    pub goal: Goal,
    pub symmetry: Option<SymmetryGroup>,
    pub canon_depth: usize,
    pub split_depth: usize,
    pub threads: usize,
    pub deadline: Option<Instant>,
}

#[derive(Debug, Clone)]
pub(crate) struct EngineResult {
    /// Largest family found (Maximize), or the first family of the target size (Reach).
    pub best: Option<Vec<u64>>,
    pub completed: bool,
    pub nodes: u64,
}

#[derive(Clone)]
struct Node {
    members: Vec<u64>,
    masks: Vec<u64>,
}

struct Worker<'a, C> {
    c: &'a C,
    cfg: &'a Config,
    expired: &'a AtomicBool,
    nodes: u64,
    best_len: usize,
    best: Option<Vec<u64>>,
    /// Stop exploring (target reached, deadline, or a lower task already succeeded).
    halt: bool,
    cancel: Option<(&'a AtomicUsize, usize)>,
}

impl<'a, C: Constraint> Worker<'a, C> {
    fn new(c: &'a C, cfg: &'a Config, expired: &'a AtomicBool) -> Self {
        Worker {
            c,
            cfg,
            expired,
            nodes: 0,
            best_len: 0,
            best: None,
            halt: false,
            cancel: None,
        }
    }

    #[inline]
    fn viable(&self, node: &Node, cand: u64) -> bool {
        let mut own = self.c.initial(cand);
        for (&w, &mask) in node.members.iter().zip(&node.masks) {
            if mask & !self.c.kill(w, cand) == 0 {
                return false;
            }
            own &= !self.c.kill(cand, w);
        }
        own != 0
    }

    fn push(&self, node: &Node, cand: u64) -> Node {
        let mut members = node.members.clone();
        let mut masks: Vec<u64> = node
            .members
            .iter()
            .zip(&node.masks)
            .map(|(&w, &mask)| mask & !self.c.kill(w, cand))
            .collect();
        let own = node
            .members
            .iter()
            .fold(self.c.initial(cand), |acc, &w| acc & !self.c.kill(cand, w));
        members.push(cand);
        masks.push(own);
        Node { members, masks }
    }

    fn is_canonical(&self, members: &[u64]) -> bool {
        match self.cfg.symmetry {
            Some(group) if members.len() <= self.cfg.canon_depth => {
                let f =
                    Family::from_words(self.cfg.m, members.to_vec()).expect("words within ground");
                f.canonical_form(group)
                    .expect("search grounds are small")
                    .members()
                    == members
            }
            _ => true,
        }
    }

    fn tick(&mut self) {
        self.nodes += 1;
        if self.nodes & 0xfff == 0 {
            if let Some(d) = self.cfg.deadline {
                if Instant::now() >= d {
                    self.expired.store(true, Ordering::Relaxed);
                }
            }
            if let Some((found_at, me)) = self.cancel {
                if found_at.load(Ordering::Relaxed) < me {
                    self.halt = true;
                }
            }
        }
        if self.expired.load(Ordering::Relaxed) {
            self.halt = true;
        }
    }

    /// Visits `node`, returning true when the search should unwind.
    fn visit(&mut self, node: &Node) -> bool {
        let len = node.members.len();
        match self.cfg.goal {
            Goal::Maximize => {
                if len > self.best_len || self.best.is_none() {
                    self.best_len = len;
                    self.best = Some(node.members.clone());
                }
            }
            Goal::Reach(target) => {
                if len >= target {
                    self.best_len = len;
                    self.best = Some(node.members.clone());
                    self.halt = true;
                }
            }
        }
        self.halt
    }

    /// True when no extension of a node of size `len` with `remaining`
    /// candidates can matter.
    #[inline]
    fn hopeless(&self, len: usize, remaining: usize) -> bool {
        match self.cfg.goal {
            Goal::Maximize => self.best.is_some() && len + remaining <= self.best_len,
            Goal::Reach(target) => len + remaining < target,
        }
    }

    fn children(&self, node: &Node, cands: &[u64], idx: usize) -> Option<(Node, Vec<u64>)> {
        let child = self.push(node, cands[idx]);
        if !self.is_canonical(&child.members) {
            return None;
        }
        let next: Vec<u64> = cands[idx + 1..]
            .iter()
            .copied()
            .filter(|&x| self.viable(&child, x))
            .collect();
        Some((child, next))
    }

    fn dfs(&mut self, node: &Node, cands: &[u64]) {
        self.tick();
        if self.visit(node) {
            return;
        }
        let len = node.members.len();
        for idx in 0..cands.len() {
            if self.halt || self.hopeless(len, cands.len() - idx) {
                break;
            }
            if let Some((child, next)) = self.children(node, cands, idx) {
                if !self.hopeless(child.members.len(), next.len()) {
                    self.dfs(&child, &next);
                }
            }
        }
    }

    /// Walks the tree down to `split_depth`, returning the frontier as tasks.
    fn frontier(&mut self, node: &Node, cands: &[u64], out: &mut Vec<(Node, Vec<u64>)>) {
        if node.members.len() >= self.cfg.split_depth {
            out.push((node.clone(), cands.to_vec()));
            return;
        }
        self.tick();
        if self.visit(node) {
            return;
        }
        for idx in 0..cands.len() {
            if let Some((child, next)) = self.children(node, cands, idx) {
                if self.hopeless(child.members.len(), next.len()) {
                    continue;
                }
                self.frontier(&child, &next, out);
                if self.halt {
                    return;
                }
            }
        }
    }
}

pub(crate) fn run<C: Constraint>(c: &C, cfg: &Config) -> EngineResult {
    let expired = AtomicBool::new(false);
    let root = Node {
        members: Vec::new(),
        masks: Vec::new(),
    };
    let cands: Vec<u64> = (0..1u64 << cfg.m).collect();

    let mut head = Worker::new(c, cfg, &expired);
    let mut tasks = Vec::new();
    head.frontier(&root, &cands, &mut tasks);
    if head.halt {
        let completed = !expired.load(Ordering::Relaxed);
        return EngineResult {
            best: head.best,
            completed,
            nodes: head.nodes,
        };
    }

    let seed_len = head.best_len;
    let seed = head.best.clone();
    let found_at = AtomicUsize::new(usize::MAX);
    let solve = |(i, (node, next)): (usize, &(Node, Vec<u64>))| {
        let mut w = Worker::new(c, cfg, &expired);
        if let Goal::Reach(_) = cfg.goal {
            w.cancel = Some((&found_at, i));
            if found_at.load(Ordering::Relaxed) < i {
                return (None, 0u64, false);
            }
        } else {
            w.best_len = seed_len;
            w.best = seed.clone();
        }
        w.dfs(node, next);
        let hit = match cfg.goal {
            Goal::Reach(_) => w.best.is_some(),
            Goal::Maximize => w.best_len > seed_len,
        };
        if hit && matches!(cfg.goal, Goal::Reach(_)) {
            found_at.fetch_min(i, Ordering::Relaxed);
        }
        (if hit { w.best } else { None }, w.nodes, hit)
    };

    let results: Vec<(Option<Vec<u64>>, u64, bool)> = if cfg.threads <= 1 {
        tasks.iter().enumerate().map(solve).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .expect("thread pool");
        pool.install(|| tasks.par_iter().enumerate().map(solve).collect())
    };

    let mut nodes = head.nodes;
    let mut best = seed;
    let mut best_len = seed_len;
    match cfg.goal {
        Goal::Maximize => {
            for (found, n, _) in results {
                nodes += n;
                if let Some(f) = found {
                    // Strictly larger only: earlier tasks win ties.
                    if f.len() > best_len {
                        best_len = f.len();
                        best = Some(f);
                    }
                }
            }
        }
        Goal::Reach(_) => {
            best = None;
            for (found, n, hit) in results {
                nodes += n;
                if hit {
                    best = found;
                    break;
                }
            }
        }
    }
    EngineResult {
        best,
        completed: !expired.load(Ordering::Relaxed),
        nodes,
    }
}
