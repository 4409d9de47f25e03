//! The catalogue of von Dyck factor presentations with their expected
//! facts, and the runner that re-derives those facts.

use std::fmt;
use std::path::Path;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matgrp::{self, psl2_order, EpiBudget, EpiError, Epimorphism};
use crate::permgrp::{
    element_order, quotient_by_central, PermError, PermutationGroup, SimplicityMode,
    SimplicityVerdict, DEFAULT_SIMPLICITY_CAP,
};
use crate::todd_coxeter::{enumerate, EnumerationError, EnumerationLimits};
use crate::vondyck::{check_divisibility, genus, pairwise_coprime};
use crate::words::{parse_relator, parse_word, Presentation, Word};
use crate::zlinalg::{abelianization, subgroup_abelianization};

/// The corpus shipped with the crate.
pub const BUNDLED_CORPUS: &str = include_str!("../data/corpus.json");

/// Entries with a larger expected order only run when the stretch tier is
/// enabled.
pub const STRETCH_THRESHOLD: u64 = 100_000;

pub const DEFAULT_MC_TRIALS: u32 = 1000;
pub const DEFAULT_MC_SEED: u64 = 20_011_203;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Simplicity {
    Confirmed,
    Cover,
    /// Marked with an asterisk: simplicity was not established.
    Unconfirmed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub id: String,
    pub n: u32,
    /// Relators and relations over the generators `a`, `b`.
    pub relators: Vec<String>,
    pub expected_order: u64,
    pub claimed_group: String,
    pub simplicity: Simplicity,
    /// False for presentations marked with a dagger.
    pub efficient: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub central_word: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient_order: Option<u64>,
    /// Order of `a` when it differs from `n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator_order: Option<u32>,
    #[serde(default)]
    pub typo_suspect: bool,
}

fn ab() -> Vec<String> {
    vec!["a".to_string(), "b".to_string()]
}

/// `q` from `"A1(q)"` or `"cover:A1(q)"`.
fn a1_parameter(group: &str) -> Option<u32> {
    group
        .strip_prefix("cover:")
        .unwrap_or(group)
        .strip_prefix("A1(")?
        .strip_suffix(')')?
        .parse()
        .ok()
}

impl CorpusEntry {
    pub fn presentation(&self) -> Result<Presentation, CorpusError> {
        let relators = self
            .relators
            .iter()
            .map(|r| parse_relator(r, &ab()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| self.error("relators", e.to_string()))?;
        Presentation::new(ab(), relators).map_err(|e| self.error("relators", e.to_string()))
    }

    pub fn central_word(&self) -> Result<Option<Word>, CorpusError> {
        self.central_word
            .as_deref()
            .map(|w| parse_word(w, &ab()).map_err(|e| self.error("central_word", e.to_string())))
            .transpose()
    }

    /// `q` when the claimed group is `A1(q)` (not its cover).
    pub fn psl_parameter(&self) -> Option<u32> {
        (self.simplicity != Simplicity::Cover)
            .then(|| a1_parameter(&self.claimed_group))
            .flatten()
    }

    pub fn is_stretch(&self) -> bool {
        self.expected_order > STRETCH_THRESHOLD
    }

    /// The expected order of `a`.
    pub fn expected_generator_order(&self) -> u64 {
        let base = self.generator_order.unwrap_or(self.n) as u64;
        match (self.simplicity, self.generator_order) {
            (Simplicity::Cover, None) => 2 * base,
            _ => base,
        }
    }

    fn error(&self, field: &str, message: String) -> CorpusError {
        CorpusError::Entry {
            id: self.id.clone(),
            field: field.to_string(),
            message,
        }
    }

    fn check(&self) -> Result<(), CorpusError> {
        if self.expected_order == 0 {
            return Err(self.error("expected_order", "must be positive".into()));
        }
        if !(2..=4).contains(&self.relators.len()) {
            return Err(self.error(
                "relators",
                format!("{} relators, expected 2 to 4", self.relators.len()),
            ));
        }
        self.presentation()?;
        self.central_word()?;
        if self.simplicity == Simplicity::Cover {
            if self.central_word.is_none() {
                return Err(self.error("central_word", "cover entries need a central word".into()));
            }
            match self.quotient_order {
                Some(q) if 2 * q == self.expected_order => {}
                _ => {
                    return Err(
                        self.error("quotient_order", "must be half the expected order".into())
                    )
                }
            }
        }
        if self.typo_suspect {
            return Ok(());
        }
        if let Some(q) = a1_parameter(&self.claimed_group) {
            let order = psl2_order(q).map_err(|e| self.error("claimed_group", e.to_string()))?;
            let order = if self.simplicity == Simplicity::Cover {
                2 * order
            } else {
                order
            };
            if order != self.expected_order {
                return Err(self.error(
                    "expected_order",
                    format!(
                        "{} has order {order}, entry says {}",
                        self.claimed_group, self.expected_order
                    ),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed corpus: {0}")]
    Json(#[from] serde_json::Error),
    #[error("entry {id}, field {field}: {message}")]
    Entry {
        id: String,
        field: String,
        message: String,
    },
}

/// Splits an entry whose text contains `^±k` into a `+` and a `-` entry.
fn expand(entry: CorpusEntry) -> Vec<CorpusEntry> {
    let has_pm = |s: &String| s.contains('±');
    if !entry.relators.iter().any(has_pm) && !entry.central_word.as_ref().is_some_and(has_pm) {
        return vec![entry];
    }
    [("+", ""), ("-", "-")]
        .into_iter()
        .map(|(suffix, sign)| {
            let fix = |s: &String| s.replace('±', sign);
            CorpusEntry {
                id: format!("{}{suffix}", entry.id),
                relators: entry.relators.iter().map(fix).collect(),
                central_word: entry.central_word.as_ref().map(fix),
                ..entry.clone()
            }
        })
        .collect()
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>, CorpusError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let raw: Vec<CorpusEntry> = serde_json::from_str(text)?;
    let entries: Vec<CorpusEntry> = raw.into_iter().flat_map(expand).collect();
    for e in &entries {
        e.check()?;
    }
    let mut ids: Vec<&str> = entries.iter().map(|e| e.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(CorpusError::Entry {
            id: w[0].to_string(),
            field: "id".into(),
            message: "duplicate id".into(),
        });
    }
    Ok(entries)
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusEntry>, CorpusError> {
    parse_corpus(&std::fs::read_to_string(path)?)
}

pub fn bundled_corpus() -> Vec<CorpusEntry> {
    parse_corpus(BUNDLED_CORPUS).expect("bundled corpus is valid")
}

/// How simplicity is decided for each entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimplicityPolicy {
    /// Monte Carlo for unconfirmed entries and for groups above
    /// [`DEFAULT_SIMPLICITY_CAP`], deterministic otherwise.
    Auto {
        trials: u32,
        seed: u64,
    },
    Fixed(SimplicityMode),
    Skip,
}

impl Default for SimplicityPolicy {
    fn default() -> Self {
        SimplicityPolicy::Auto {
            trials: DEFAULT_MC_TRIALS,
            seed: DEFAULT_MC_SEED,
        }
    }
}

impl SimplicityPolicy {
    fn mode_for(&self, e: &CorpusEntry, order: u64) -> Option<SimplicityMode> {
        match *self {
            SimplicityPolicy::Skip => None,
            SimplicityPolicy::Fixed(m) => Some(m),
            SimplicityPolicy::Auto { trials, seed } => Some(
                if e.simplicity == Simplicity::Unconfirmed || order > DEFAULT_SIMPLICITY_CAP {
                    SimplicityMode::MonteCarlo { trials, seed }
                } else {
                    SimplicityMode::Deterministic {
                        cap: DEFAULT_SIMPLICITY_CAP,
                    }
                },
            ),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub limits: EnumerationLimits,
    pub simplicity: SimplicityPolicy,
    pub epi_budget: EpiBudget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum SimplicityOutcome {
    Simple,
    NotSimple {
        witness_order: u64,
        normal_subgroup_order: u64,
    },
    ProbablySimple {
        trials: u32,
    },
    NotRun {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Identification {
    EpiFound {
        q: u32,
        image_order: u64,
    },
    /// Search skipped by budget; the orders agree.
    OrderMatchOnly {
        q: u32,
    },
    /// Exhaustive search found no epimorphism.
    NoEpimorphism {
        q: u32,
    },
    NotApplicable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum BudgetOutcome {
    Completed,
    Skipped { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCheck {
    pub central_ok: bool,
    pub quotient_order: Option<u64>,
    pub quotient_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub typo_suspect: bool,
    pub order_found: Option<u64>,
    pub order_ok: bool,
    pub table_valid: Option<bool>,
    pub order_method: OrderMethod,
    pub abelianization: String,
    pub perfect_ok: bool,
    pub simplicity_result: SimplicityOutcome,
    pub generator_orders: Option<(u64, u64)>,
    pub generator_order_ok: Option<bool>,
    pub identification: Vec<Identification>,
    /// Exact genus as `p/q` or an integer, computed with `n = |a|`.
    pub genus: Option<String>,
    pub genus_integral: Option<bool>,
    pub divisibility_ok: Option<bool>,
    pub cover: Option<CoverCheck>,
    pub elapsed: f64,
    pub budget_outcome: BudgetOutcome,
    pub notes: Vec<String>,
}

impl VerificationReport {
    fn new(e: &CorpusEntry) -> Self {
        VerificationReport {
            id: e.id.clone(),
            typo_suspect: e.typo_suspect,
            order_found: None,
            order_ok: false,
            table_valid: None,
            order_method: OrderMethod::Regular,
            abelianization: String::new(),
            perfect_ok: false,
            simplicity_result: SimplicityOutcome::NotRun {
                reason: "not reached".into(),
            },
            generator_orders: None,
            generator_order_ok: None,
            identification: Vec::new(),
            genus: None,
            genus_integral: None,
            divisibility_ok: None,
            cover: None,
            elapsed: 0.0,
            budget_outcome: BudgetOutcome::Completed,
            notes: Vec::new(),
        }
    }

    fn skipped(e: &CorpusEntry, reason: String) -> Self {
        let mut r = VerificationReport::new(e);
        r.simplicity_result = SimplicityOutcome::NotRun {
            reason: reason.clone(),
        };
        r.budget_outcome = BudgetOutcome::Skipped { reason };
        r
    }

    /// The report with timing zeroed, for run-to-run comparisons.
    pub fn without_timing(&self) -> Self {
        VerificationReport {
            elapsed: 0.0,
            ..self.clone()
        }
    }

    pub fn completed(&self) -> bool {
        self.budget_outcome == BudgetOutcome::Completed
    }

    /// Does the report contradict the entry on a check that was run?
    pub fn has_mismatch(&self) -> bool {
        if !self.completed() {
            return false;
        }
        let identification_failed = self
            .identification
            .iter()
            .any(|i| matches!(i, Identification::NoEpimorphism { .. }));
        let cover_failed = self
            .cover
            .as_ref()
            .is_some_and(|c| !c.central_ok || !c.quotient_ok);
        !self.order_ok
            || !self.perfect_ok
            || self.table_valid == Some(false)
            || identification_failed
            || cover_failed
    }
}

fn to_u64(n: &BigUint) -> u64 {
    n.to_u64().unwrap_or(u64::MAX)
}

fn simplicity_outcome(v: SimplicityVerdict) -> SimplicityOutcome {
    match v {
        SimplicityVerdict::Simple => SimplicityOutcome::Simple,
        SimplicityVerdict::ProbablySimple { trials } => {
            SimplicityOutcome::ProbablySimple { trials }
        }
        SimplicityVerdict::NotSimple {
            witness,
            normal_subgroup_order,
        } => SimplicityOutcome::NotSimple {
            witness_order: to_u64(&element_order(&witness)),
            normal_subgroup_order: to_u64(&normal_subgroup_order),
        },
    }
}

/// PSL(2, q) parameters whose group the entry claims, including the
/// exceptional A1(4) = A1(5).
fn identification_targets(e: &CorpusEntry) -> Vec<u32> {
    match e.psl_parameter() {
        Some(5) => vec![5, 4],
        Some(4) => vec![4, 5],
        Some(q) => vec![q],
        None => Vec::new(),
    }
}

/// Runs the full pipeline on one entry. Failures are recorded in the report.
pub fn verify_entry(e: &CorpusEntry, opts: &VerifyOptions) -> VerificationReport {
    let start = Instant::now();
    let mut r = verify_inner(e, opts);
    r.elapsed = start.elapsed().as_secs_f64();
    r
}

fn verify_inner(e: &CorpusEntry, opts: &VerifyOptions) -> VerificationReport {
    let mut r = VerificationReport::new(e);
    let p = match e.presentation() {
        Ok(p) => p,
        Err(err) => {
            r.notes.push(err.to_string());
            return r;
        }
    };
    let ab = abelianization(&p);
    r.abelianization = ab.to_string();
    r.perfect_ok = ab.is_trivial();

    let (live, group) = match enumerate(&p, &[], &opts.limits) {
        Ok(table) => {
            r.table_valid = Some(table.validate(&p, &[]).is_valid());
            let live = table.live_count() as u64;
            let gens = table
                .generator_actions()
                .expect("enumeration returns a closed table");
            (
                live,
                PermutationGroup::new(live as usize, gens).expect("equal degrees"),
            )
        }
        Err(err @ EnumerationError::LimitExceeded { .. }) => match via_cyclic_subgroup(&p, opts) {
            Some(CyclicRoute {
                index,
                subgroup_order,
                valid,
                group,
            }) => {
                r.table_valid = Some(valid);
                r.order_method = OrderMethod::CyclicSubgroup {
                    index,
                    subgroup_order,
                };
                r.notes.push(format!("regular enumeration: {err}"));
                (index * subgroup_order, group)
            }
            None => {
                let mut s = VerificationReport::skipped(e, format!("budget: {err}"));
                s.abelianization = r.abelianization;
                s.perfect_ok = r.perfect_ok;
                return s;
            }
        },
        Err(err) => {
            r.notes.push(err.to_string());
            return r;
        }
    };
    r.order_found = Some(live);
    let group_order = to_u64(&group.order());
    if group_order != live {
        r.notes.push(format!(
            "permutation image has order {group_order}, expected {live}"
        ));
    }
    r.order_ok = live == e.expected_order && group_order == live;

    let (oa, ob) = (
        to_u64(&element_order(&group.generators()[0])),
        to_u64(&element_order(&group.generators()[1])),
    );
    r.generator_orders = Some((oa, ob));
    r.generator_order_ok = Some(oa == e.expected_generator_order());

    // Identification, keeping a faithful small image for Monte Carlo.
    let mut small: Option<PermutationGroup> = None;
    for q in identification_targets(e) {
        let id = match matgrp::find_epimorphism(&p, q, &opts.epi_budget) {
            Ok(Some(epi)) => {
                if epi.image_order == live && small.is_none() {
                    small = Some(p1_group(&epi));
                }
                Identification::EpiFound {
                    q,
                    image_order: epi.image_order,
                }
            }
            Ok(None) => Identification::NoEpimorphism { q },
            Err(EpiError::BudgetExhausted { .. }) => {
                if psl2_order(q).ok() == Some(live) {
                    Identification::OrderMatchOnly { q }
                } else {
                    r.notes.push(format!("order differs from |A1({q})|"));
                    Identification::NotApplicable
                }
            }
            Err(err) => {
                r.notes.push(err.to_string());
                Identification::NotApplicable
            }
        };
        r.identification.push(id);
    }
    if r.identification.is_empty() {
        r.identification.push(Identification::NotApplicable);
    }

    r.simplicity_result = match opts.simplicity.mode_for(e, live) {
        None => SimplicityOutcome::NotRun {
            reason: "disabled".into(),
        },
        Some(mode) => {
            let target = match (mode, &small) {
                (SimplicityMode::MonteCarlo { .. }, Some(s)) => s,
                _ => &group,
            };
            match target.is_simple(mode) {
                Ok(v) => simplicity_outcome(v),
                Err(err) => SimplicityOutcome::NotRun {
                    reason: err.to_string(),
                },
            }
        }
    };

    if e.simplicity != Simplicity::Cover && oa <= u32::MAX as u64 && pairwise_coprime(oa as u32) {
        let g = genus(live, oa as u32);
        r.genus = Some(g.to_string());
        r.genus_integral = Some(g.is_integer());
        r.divisibility_ok = Some(check_divisibility(live, oa as u32));
    }

    if e.simplicity == Simplicity::Cover {
        r.cover = Some(cover_check(e, &p, opts));
    }
    r
}

/// How the order in a report was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum OrderMethod {
    /// Enumeration over the trivial subgroup.
    Regular,
    /// `[G : <a>]` times `|<a>|`, the latter from the abelianized
    /// Reidemeister-Schreier presentation of `<a>`.
    CyclicSubgroup { index: u64, subgroup_order: u64 },
}

struct CyclicRoute {
    index: u64,
    subgroup_order: u64,
    valid: bool,
    group: PermutationGroup,
}

/// Fallback when the regular enumeration runs out of room: enumerate the
/// cosets of `<a>` instead. Only used when the action on those cosets is
/// faithful, so the permutation group still is the group.
fn via_cyclic_subgroup(p: &Presentation, opts: &VerifyOptions) -> Option<CyclicRoute> {
    let a = Word::generator_power(0, 1);
    let table = enumerate(p, std::slice::from_ref(&a), &opts.limits).ok()?;
    let subgroup_order = to_u64(
        &subgroup_abelianization(&table, p)
            .ok()?
            .order()?
            .to_biguint()?,
    );
    let index = table.live_count() as u64;
    let gens = table.generator_actions().ok()?;
    let group = PermutationGroup::new(index as usize, gens).ok()?;
    (to_u64(&group.order()) == index.checked_mul(subgroup_order)?).then(|| CyclicRoute {
        index,
        subgroup_order,
        valid: table.validate(p, &[a]).is_valid(),
        group,
    })
}

fn p1_group(epi: &Epimorphism) -> PermutationGroup {
    let f = matgrp::make_field(epi.q).expect("q came from a successful search");
    let (a, b) = epi.permutations(&f);
    PermutationGroup::new(a.degree(), vec![a, b]).expect("equal degrees")
}

fn cover_check(e: &CorpusEntry, p: &Presentation, opts: &VerifyOptions) -> CoverCheck {
    let w = e.central_word().ok().flatten().unwrap_or_default();
    match quotient_by_central(p, &w, &opts.limits) {
        Ok(q) => CoverCheck {
            central_ok: true,
            quotient_order: Some(q),
            quotient_ok: Some(q) == e.quotient_order,
        },
        Err(PermError::NotCentral) => CoverCheck {
            central_ok: false,
            quotient_order: None,
            quotient_ok: false,
        },
        Err(_) => CoverCheck {
            central_ok: true,
            quotient_order: None,
            quotient_ok: false,
        },
    }
}

/// Which entries a run covers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CorpusFilter {
    pub n: Option<u32>,
    pub max_order: Option<u64>,
    pub ids: Vec<String>,
    pub include_typo_suspects: bool,
    pub stretch: bool,
}

impl CorpusFilter {
    /// All non-typo entries; stretch entries appear as skipped.
    pub fn default_tier() -> Self {
        CorpusFilter::default()
    }

    pub fn selects(&self, e: &CorpusEntry) -> bool {
        self.n.is_none_or(|n| e.n == n)
            && self.max_order.is_none_or(|m| e.expected_order <= m)
            && (self.ids.is_empty() || self.ids.contains(&e.id))
            && (self.include_typo_suspects || !e.typo_suspect || !self.ids.is_empty())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub total: usize,
    pub completed: usize,
    pub skipped_stretch: usize,
    pub budget_exceeded: usize,
    pub order_ok: usize,
    pub mismatches: usize,
    pub typo_suspect_mismatches: usize,
    pub simple: usize,
    pub probably_simple: usize,
    pub not_simple: usize,
}

impl RunSummary {
    fn tally(reports: &[VerificationReport]) -> Self {
        let mut s = RunSummary {
            total: reports.len(),
            ..Default::default()
        };
        for r in reports {
            match &r.budget_outcome {
                BudgetOutcome::Completed => s.completed += 1,
                BudgetOutcome::Skipped { reason } if reason.starts_with("budget") => {
                    s.budget_exceeded += 1
                }
                BudgetOutcome::Skipped { .. } => s.skipped_stretch += 1,
            }
            s.order_ok += r.order_ok as usize;
            if r.has_mismatch() {
                if r.typo_suspect {
                    s.typo_suspect_mismatches += 1;
                } else {
                    s.mismatches += 1;
                }
            }
            match r.simplicity_result {
                SimplicityOutcome::Simple => s.simple += 1,
                SimplicityOutcome::ProbablySimple { .. } => s.probably_simple += 1,
                SimplicityOutcome::NotSimple { .. } => s.not_simple += 1,
                SimplicityOutcome::NotRun { .. } => {}
            }
        }
        s
    }

    /// 0 success, 1 mismatch on a non-typo entry, 3 budget exceeded.
    pub fn exit_code(&self) -> i32 {
        if self.mismatches > 0 {
            1
        } else if self.budget_exceeded > 0 {
            3
        } else {
            0
        }
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} entries: {} completed, {} stretch skipped, {} over budget; {} order ok, {} mismatches ({} more on typo suspects); simple {}, probably simple {}, not simple {}",
            self.total,
            self.completed,
            self.skipped_stretch,
            self.budget_exceeded,
            self.order_ok,
            self.mismatches,
            self.typo_suspect_mismatches,
            self.simple,
            self.probably_simple,
            self.not_simple
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusRun {
    pub reports: Vec<VerificationReport>,
    pub summary: RunSummary,
}

/// Verifies the selected entries on `jobs` worker threads (all cores when
/// `None`). Reports come back in entry order.
pub fn run_corpus(
    entries: &[CorpusEntry],
    filter: &CorpusFilter,
    opts: &VerifyOptions,
    jobs: Option<usize>,
) -> CorpusRun {
    let selected: Vec<&CorpusEntry> = entries.iter().filter(|e| filter.selects(e)).collect();
    let work = || -> Vec<VerificationReport> {
        selected
            .par_iter()
            .map(|e| {
                if e.is_stretch() && !filter.stretch {
                    VerificationReport::skipped(e, "stretch tier".into())
                } else {
                    verify_entry(e, opts)
                }
            })
            .collect()
    };
    let reports = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    let summary = RunSummary::tally(&reports);
    CorpusRun { reports, summary }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_loads() {
        let entries = bundled_corpus();
        assert!(entries.len() >= 100);
        let ns: std::collections::BTreeSet<u32> = entries.iter().map(|e| e.n).collect();
        assert!(ns.contains(&7) && ns.contains(&47));
        let first = entries.iter().find(|e| e.id == "A1(7).w1").unwrap();
        assert_eq!(first.expected_order, 168);
        assert_eq!(first.relators[2], "(a*b^-1)^4");
    }

    #[test]
    fn plus_minus_expands() {
        let entries = bundled_corpus();
        let plus = entries.iter().find(|e| e.id == "A1(7).w3+").unwrap();
        let minus = entries.iter().find(|e| e.id == "A1(7).w3-").unwrap();
        assert!(plus.relators[1].contains("^3"));
        assert!(minus.relators[1].contains("^-3"));
        assert!(!entries.iter().any(|e| e.id == "A1(7).w3"));
    }

    #[test]
    fn empty_and_malformed() {
        assert!(parse_corpus("").unwrap().is_empty());
        assert!(parse_corpus("[]").unwrap().is_empty());
        let bad = r#"[{"id":"x","n":7,"relators":["a*b*a=b*a*b","a*(b"],"expected_order":1,
            "claimed_group":"?","simplicity":"confirmed","efficient":true,"typo_suspect":false}]"#;
        match parse_corpus(bad) {
            Err(CorpusError::Entry { id, field, .. }) => {
                assert_eq!(id, "x");
                assert_eq!(field, "relators");
            }
            other => panic!("{other:?}"),
        }
        let wrong_order = r#"[{"id":"y","n":7,"relators":["a*b*a=b*a*b","a*b^2*a=b^5"],
            "expected_order":170,"claimed_group":"A1(7)","simplicity":"confirmed",
            "efficient":true,"typo_suspect":false}]"#;
        assert!(matches!(
            parse_corpus(wrong_order),
            Err(CorpusError::Entry { field, .. }) if field == "expected_order"
        ));
    }

    #[test]
    fn verifies_a5() {
        let entries = bundled_corpus();
        let e = entries.iter().find(|e| e.id == "A1(5).w1").unwrap();
        let r = verify_entry(e, &VerifyOptions::default());
        assert_eq!(r.order_found, Some(60));
        assert!(r.order_ok && r.perfect_ok);
        assert_eq!(r.simplicity_result, SimplicityOutcome::Simple);
        assert_eq!(
            r.identification,
            vec![
                Identification::EpiFound {
                    q: 5,
                    image_order: 60
                },
                Identification::EpiFound {
                    q: 4,
                    image_order: 60
                }
            ]
        );
        assert_eq!(r.genus.as_deref(), Some("0"));
        assert!(!r.has_mismatch());
    }

    #[test]
    fn stretch_entries_skip_by_default() {
        let entries = bundled_corpus();
        let filter = CorpusFilter {
            ids: vec!["J2.w1+".into()],
            ..Default::default()
        };
        let run = run_corpus(&entries, &filter, &VerifyOptions::default(), Some(1));
        assert_eq!(run.reports.len(), 1);
        assert!(!run.reports[0].completed());
        assert_eq!(run.summary.exit_code(), 0);
    }
}
