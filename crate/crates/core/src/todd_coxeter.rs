//! Todd–Coxeter coset enumeration (HLT, optionally with lookahead).
//!
//! The working table keeps one row per allocated coset and one column per
//! letter (`2g` for generator `g`, `2g + 1` for its inverse). Coincidences are
//! resolved eagerly through a forwarding array; rows of merged cosets go back
//! on a free list once the coincidence queue is drained. Live cosets form a
//! doubly linked list in definition order, which is the order HLT processes
//! them in.
//!
//! A finished enumeration is compacted into a dense, standardized
//! [`CosetTable`]: cosets are renumbered in breadth-first order from the
//! subgroup coset, scanning letters in column order. Two enumerations of the
//! same coset space therefore produce identical tables regardless of strategy.

use std::fmt::Write as _;
use std::time::Instant;

use thiserror::Error;

use crate::permgrp::Permutation;
use crate::words::{Letter, Presentation, Word};

const NONE: u32 = u32::MAX;

/// Coset-definition strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Plain HLT: relators scanned and filled at each coset in turn.
    Hlt,
    /// HLT with lookahead sweeps whenever the live coset count has doubled
    /// since the previous sweep, and once more before giving up at the limit.
    #[default]
    HltLookahead,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumerationLimits {
    /// Maximum number of simultaneously allocated cosets. Must be at least 1.
    pub max_cosets: usize,
    /// Optional wall-clock budget in seconds.
    pub max_seconds: Option<f64>,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_cosets: 5_000_000,
            max_seconds: None,
        }
    }
}

impl EnumerationLimits {
    pub fn with_max_cosets(max_cosets: usize) -> Self {
        EnumerationLimits {
            max_cosets: max_cosets.max(1),
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Limit {
    Cosets(usize),
    Seconds(f64),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnumerationError {
    #[error("coset enumeration exceeded its budget ({limit:?}) after defining {defined} cosets ({live} live)")]
    LimitExceeded {
        limit: Limit,
        defined: u64,
        live: usize,
    },
    #[error("subgroup generator {index} uses generator {generator}, presentation has {count}")]
    BadSubgroupGenerator {
        index: usize,
        generator: usize,
        count: usize,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("coset table is not closed")]
    NotClosed,
    #[error("generator {0} out of range")]
    BadGenerator(usize),
}

/// Counters describing one enumeration run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub total_defined: u64,
    pub max_live: usize,
    pub coincidences: u64,
    pub lookaheads: u32,
}

/// A finished, compacted coset table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    generators: usize,
    rows: Vec<u32>,
    live_count: usize,
    stats: EnumerationStats,
}

/// One failed check from [`CosetTable::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Undefined { coset: usize, letter: usize },
    Incompatible { coset: usize, letter: usize },
    RelatorOpen { relator: usize, coset: usize },
    SubgroupGeneratorMoves { index: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl CosetTable {
    pub fn live_count(&self) -> usize {
        self.live_count
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn stats(&self) -> EnumerationStats {
        self.stats
    }

    fn ncols(&self) -> usize {
        2 * self.generators
    }

    /// Target of `coset` under `letter`, if defined.
    pub fn image(&self, coset: usize, letter: Letter) -> Option<usize> {
        match self.rows[coset * self.ncols() + letter.index()] {
            NONE => None,
            t => Some(t as usize),
        }
    }

    /// Overwrites a single entry. Intended for audits of [`validate`](Self::validate).
    pub fn set(&mut self, coset: usize, letter: Letter, target: Option<usize>) {
        let n = self.ncols();
        self.rows[coset * n + letter.index()] = target.map_or(NONE, |t| t as u32);
    }

    pub fn is_closed(&self) -> bool {
        !self.rows.contains(&NONE)
    }

    /// Follows `w` from `coset`; `None` if an entry on the way is undefined.
    pub fn trace(&self, coset: usize, w: &Word) -> Option<usize> {
        let n = self.ncols();
        let mut c = coset as u32;
        for l in w.letters() {
            c = self.rows[c as usize * n + l.index()];
            if c == NONE {
                return None;
            }
        }
        Some(c as usize)
    }

    /// Right-multiplication action of generator `g` on the cosets.
    pub fn coset_action(&self, g: usize) -> Result<Permutation, TableError> {
        if g >= self.generators {
            return Err(TableError::BadGenerator(g));
        }
        if !self.is_closed() {
            return Err(TableError::NotClosed);
        }
        let n = self.ncols();
        let images: Vec<u32> = (0..self.live_count)
            .map(|c| self.rows[c * n + 2 * g])
            .collect();
        Permutation::from_images(images).map_err(|_| TableError::NotClosed)
    }

    /// Actions of all generators.
    pub fn generator_actions(&self) -> Result<Vec<Permutation>, TableError> {
        (0..self.generators).map(|g| self.coset_action(g)).collect()
    }

    /// Independent audit: closure, compatibility, relator closure at every
    /// coset, and subgroup generators fixing coset 0.
    pub fn validate(&self, p: &Presentation, subgroup_generators: &[Word]) -> Validation {
        let n = self.ncols();
        let mut violations = Vec::new();
        for c in 0..self.live_count {
            for x in 0..n {
                let d = self.rows[c * n + x];
                if d == NONE || d as usize >= self.live_count {
                    violations.push(Violation::Undefined {
                        coset: c,
                        letter: x,
                    });
                } else if self.rows[d as usize * n + (x ^ 1)] != c as u32 {
                    violations.push(Violation::Incompatible {
                        coset: c,
                        letter: x,
                    });
                }
            }
        }
        if !violations.is_empty() {
            return Validation { violations };
        }
        for (ri, r) in p.relators().iter().enumerate() {
            for c in 0..self.live_count {
                if self.trace(c, r) != Some(c) {
                    violations.push(Violation::RelatorOpen {
                        relator: ri,
                        coset: c,
                    });
                }
            }
        }
        for (index, h) in subgroup_generators.iter().enumerate() {
            if self.trace(0, h) != Some(0) {
                violations.push(Violation::SubgroupGeneratorMoves { index });
            }
        }
        Validation { violations }
    }

    /// Debug dump: one line per coset, tab-separated targets in letter order
    /// `a, a^-1, b, b^-1, ...`; `-` marks an undefined entry.
    pub fn dump(&self) -> String {
        let n = self.ncols();
        let mut out = String::new();
        for c in 0..self.live_count {
            let row: Vec<String> = self.rows[c * n..(c + 1) * n]
                .iter()
                .map(|&t| {
                    if t == NONE {
                        "-".to_string()
                    } else {
                        t.to_string()
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", row.join("\t"));
        }
        out
    }
}

/// Enumerates the cosets of `⟨subgroup_generators⟩` in the group presented by
/// `p`, using HLT with lookahead.
pub fn enumerate(
    p: &Presentation,
    subgroup_generators: &[Word],
    limits: &EnumerationLimits,
) -> Result<CosetTable, EnumerationError> {
    enumerate_with(p, subgroup_generators, limits, Strategy::default())
}

pub fn enumerate_with(
    p: &Presentation,
    subgroup_generators: &[Word],
    limits: &EnumerationLimits,
    strategy: Strategy,
) -> Result<CosetTable, EnumerationError> {
    let count = p.generator_count();
    for (index, h) in subgroup_generators.iter().enumerate() {
        if let Some(generator) = h.max_generator().filter(|&g| g >= count) {
            return Err(EnumerationError::BadSubgroupGenerator {
                index,
                generator,
                count,
            });
        }
    }
    let mut e = Enumerator::new(p, limits, strategy);
    e.run(subgroup_generators)?;
    Ok(e.compact())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Def {
    Done,
    Retry,
    Exhausted,
}

struct Relator {
    letters: Vec<u32>,
    inverses: Vec<u32>,
}

struct Enumerator {
    ncols: usize,
    table: Vec<u32>,
    forward: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    tail: u32,
    free: Vec<u32>,
    queue: Vec<u32>,
    live: usize,
    relators: Vec<Relator>,
    max_cosets: usize,
    deadline: Option<(Instant, f64)>,
    strategy: Strategy,
    next_lookahead: usize,
    stats: EnumerationStats,
    failed: Option<Limit>,
}

impl Enumerator {
    fn new(p: &Presentation, limits: &EnumerationLimits, strategy: Strategy) -> Self {
        let ncols = 2 * p.generator_count();
        let relators = p
            .relators()
            .iter()
            .map(|r| Relator {
                letters: r.letters().iter().map(|l| l.index() as u32).collect(),
                inverses: r
                    .letters()
                    .iter()
                    .map(|l| l.inverse().index() as u32)
                    .collect(),
            })
            .collect();
        let mut e = Enumerator {
            ncols,
            table: Vec::new(),
            forward: Vec::new(),
            next: Vec::new(),
            prev: Vec::new(),
            tail: 0,
            free: Vec::new(),
            queue: Vec::new(),
            live: 0,
            relators,
            max_cosets: limits.max_cosets.max(1),
            deadline: limits.max_seconds.map(|s| (Instant::now(), s)),
            strategy,
            next_lookahead: 4096,
            stats: EnumerationStats::default(),
            failed: None,
        };
        e.alloc_row();
        e.next[0] = NONE;
        e.prev[0] = NONE;
        e.live = 1;
        e.stats.max_live = 1;
        e
    }

    #[inline]
    fn get(&self, c: u32, x: u32) -> u32 {
        self.table[c as usize * self.ncols + x as usize]
    }

    #[inline]
    fn put(&mut self, c: u32, x: u32, v: u32) {
        self.table[c as usize * self.ncols + x as usize] = v;
    }

    fn alloc_row(&mut self) -> u32 {
        if let Some(r) = self.free.pop() {
            let start = r as usize * self.ncols;
            self.table[start..start + self.ncols].fill(NONE);
            self.forward[r as usize] = r;
            r
        } else {
            let r = self.forward.len() as u32;
            self.table.extend(std::iter::repeat_n(NONE, self.ncols));
            self.forward.push(r);
            self.next.push(NONE);
            self.prev.push(NONE);
            r
        }
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.forward[c as usize] == c
    }

    fn check_budget(&mut self) -> bool {
        if self.failed.is_some() {
            return false;
        }
        if self.live >= self.max_cosets {
            if self.strategy == Strategy::HltLookahead {
                self.lookahead();
            }
            if self.live >= self.max_cosets {
                self.failed = Some(Limit::Cosets(self.max_cosets));
                return false;
            }
        }
        if self.stats.total_defined.is_multiple_of(4096) {
            if let Some((start, secs)) = self.deadline {
                if start.elapsed().as_secs_f64() > secs {
                    self.failed = Some(Limit::Seconds(secs));
                    return false;
                }
            }
        }
        true
    }

    /// Defines a new coset `c^x`.
    fn define(&mut self, c: u32, x: u32) -> Def {
        let sweeps = self.stats.lookaheads;
        if !self.check_budget() {
            return Def::Exhausted;
        }
        if self.stats.lookaheads != sweeps {
            // A lookahead ran; `c` may be dead or the entry already filled.
            return Def::Retry;
        }
        let d = self.alloc_row();
        self.put(c, x, d);
        self.put(d, x ^ 1, c);
        self.next[self.tail as usize] = d;
        self.prev[d as usize] = self.tail;
        self.next[d as usize] = NONE;
        self.tail = d;
        self.live += 1;
        self.stats.total_defined += 1;
        self.stats.max_live = self.stats.max_live.max(self.live);
        Def::Done
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.forward[r as usize] != r {
            r = self.forward[r as usize];
        }
        let mut x = c;
        while self.forward[x as usize] != r {
            let nx = self.forward[x as usize];
            self.forward[x as usize] = r;
            x = nx;
        }
        r
    }

    fn unlink(&mut self, c: u32) {
        let (p, n) = (self.prev[c as usize], self.next[c as usize]);
        if p != NONE {
            self.next[p as usize] = n;
        }
        if n != NONE {
            self.prev[n as usize] = p;
        } else {
            self.tail = p;
        }
    }

    fn merge(&mut self, a: u32, b: u32) {
        let a = self.rep(a);
        let b = self.rep(b);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.forward[hi as usize] = lo;
        self.unlink(hi);
        self.live -= 1;
        self.queue.push(hi);
        self.stats.coincidences += 1;
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        let mut qi = 0;
        while qi < self.queue.len() {
            let g = self.queue[qi];
            qi += 1;
            for x in 0..self.ncols as u32 {
                let d = self.get(g, x);
                if d == NONE {
                    continue;
                }
                self.put(d, x ^ 1, NONE);
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, x);
                if mx != NONE {
                    self.merge(nu, mx);
                    continue;
                }
                let nx = self.get(nu, x ^ 1);
                if nx != NONE {
                    self.merge(mu, nx);
                    continue;
                }
                self.put(mu, x, nu);
                self.put(nu, x ^ 1, mu);
            }
        }
        // Dead rows are unreferenced now; forwarding entries stay valid until
        // the row is reused, which only happens on a later definition.
        for i in 0..self.queue.len() {
            let g = self.queue[i];
            self.free.push(g);
        }
        self.queue.clear();
    }

    /// Scans `r` at `c`, defining cosets to fill gaps. Returns false if the
    /// budget ran out.
    fn scan_and_fill(&mut self, c: u32, ri: usize) -> bool {
        let len = self.relators[ri].letters.len();
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = len;
        loop {
            // forward
            while i < j {
                let x = self.relators[ri].letters[i];
                let t = self.get(f, x);
                if t == NONE {
                    break;
                }
                f = t;
                i += 1;
            }
            if i == j {
                if f != b {
                    self.coincidence(f, b);
                }
                return true;
            }
            // backward
            while j > i {
                let xi = self.relators[ri].inverses[j - 1];
                let t = self.get(b, xi);
                if t == NONE {
                    break;
                }
                b = t;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return true;
            }
            if j == i + 1 {
                let x = self.relators[ri].letters[i];
                self.put(f, x, b);
                self.put(b, x ^ 1, f);
                return true;
            }
            let x = self.relators[ri].letters[i];
            match self.define(f, x) {
                Def::Done => {}
                Def::Exhausted => return false,
                Def::Retry => {
                    if !self.is_live(c) {
                        return true;
                    }
                    f = c;
                    b = c;
                    i = 0;
                    j = len;
                }
            }
        }
    }

    /// Scans `r` at `c` without defining: records a deduction or coincidence
    /// if the scan completes or leaves a single gap.
    fn scan(&mut self, c: u32, ri: usize) {
        let len = self.relators[ri].letters.len();
        let mut f = c;
        let mut i = 0usize;
        while i < len {
            let t = self.get(f, self.relators[ri].letters[i]);
            if t == NONE {
                break;
            }
            f = t;
            i += 1;
        }
        if i == len {
            if f != c {
                self.coincidence(f, c);
            }
            return;
        }
        let mut b = c;
        let mut j = len;
        while j > i {
            let t = self.get(b, self.relators[ri].inverses[j - 1]);
            if t == NONE {
                break;
            }
            b = t;
            j -= 1;
        }
        if j == i {
            self.coincidence(f, b);
        } else if j == i + 1 {
            let x = self.relators[ri].letters[i];
            self.put(f, x, b);
            self.put(b, x ^ 1, f);
        }
    }

    fn successor(&self, c: u32) -> u32 {
        let mut s = self.next[c as usize];
        while s != NONE && !self.is_live(s) {
            s = self.next[s as usize];
        }
        s
    }

    fn lookahead(&mut self) {
        self.stats.lookaheads += 1;
        let mut c = 0u32;
        while c != NONE {
            for ri in 0..self.relators.len() {
                if !self.is_live(c) {
                    break;
                }
                self.scan(c, ri);
            }
            c = self.successor(c);
        }
        self.next_lookahead = (2 * self.live).max(4096);
    }

    fn scan_and_fill_word(&mut self, letters: &[u32]) -> bool {
        // Subgroup generators are scanned at coset 0 like one-off relators.
        self.relators.push(Relator {
            letters: letters.to_vec(),
            inverses: letters.iter().map(|x| x ^ 1).collect(),
        });
        let ri = self.relators.len() - 1;
        let ok = self.scan_and_fill(0, ri);
        self.relators.pop();
        ok
    }

    fn fail(&self) -> EnumerationError {
        EnumerationError::LimitExceeded {
            limit: self.failed.unwrap_or(Limit::Cosets(self.max_cosets)),
            defined: self.stats.total_defined,
            live: self.live,
        }
    }

    fn run(&mut self, subgroup: &[Word]) -> Result<(), EnumerationError> {
        for h in subgroup {
            let letters: Vec<u32> = h.letters().iter().map(|l| l.index() as u32).collect();
            if !letters.is_empty() && !self.scan_and_fill_word(&letters) {
                return Err(self.fail());
            }
        }
        loop {
            let mut c = 0u32;
            while c != NONE {
                for ri in 0..self.relators.len() {
                    if !self.is_live(c) {
                        break;
                    }
                    if !self.scan_and_fill(c, ri) {
                        return Err(self.fail());
                    }
                }
                for x in 0..self.ncols as u32 {
                    if !self.is_live(c) {
                        break;
                    }
                    if self.get(c, x) == NONE && self.define(c, x) == Def::Exhausted {
                        return Err(self.fail());
                    }
                }
                if self.strategy == Strategy::HltLookahead && self.live >= self.next_lookahead {
                    // `c` may die during the sweep; its stale `next` link
                    // still leads to the right successor.
                    self.lookahead();
                }
                c = self.successor(c);
            }
            if self.is_complete() {
                return Ok(());
            }
        }
    }

    fn is_complete(&self) -> bool {
        let mut c = 0u32;
        while c != NONE {
            let start = c as usize * self.ncols;
            if self.table[start..start + self.ncols].contains(&NONE) {
                return false;
            }
            c = self.next[c as usize];
        }
        true
    }

    /// Breadth-first renumbering from coset 0.
    fn compact(&self) -> CosetTable {
        let n = self.ncols;
        let mut newnum = vec![NONE; self.forward.len()];
        let mut order: Vec<u32> = Vec::with_capacity(self.live);
        newnum[0] = 0;
        order.push(0);
        let mut qi = 0;
        while qi < order.len() {
            let c = order[qi];
            qi += 1;
            for x in 0..n as u32 {
                let d = self.get(c, x);
                if newnum[d as usize] == NONE {
                    newnum[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        let mut rows = Vec::with_capacity(order.len() * n);
        for &c in &order {
            for x in 0..n as u32 {
                rows.push(newnum[self.get(c, x) as usize]);
            }
        }
        CosetTable {
            generators: n / 2,
            rows,
            live_count: order.len(),
            stats: self.stats,
        }
    }
}
