//! Randomized verification suites around the reductions.
//!
//! Every trial ends as exactly one of pass, fail (with a replayable
//! counterexample) or skipped (with a reason). Trials run in parallel and are
//! merged by index, so equal configurations give equal reports apart from the
//! wall-time fields.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{local_search, verify_local_optimum, PivotRule, ProblemBinding, Termination};
use crate::error::{Error, Result};
use crate::format::{serialize_instance, serialize_source};
use crate::greedy::{greedy_cover, greedy_packing};
use crate::reductions::{
    reduce, CatalogBinding, CcWeight, ConsistencyVerdict, InventoryMode, ReductionId,
    ReductionOptions, ReductionOutput, TsScheme, CATALOG_P, CATALOG_Q,
};
use crate::set_problems::{
    pq_distance, Metric, ScInstance, SetBinding, SetProblemInstance, Solution, SpInstance,
    WeightedCollection,
};
use crate::source_problems::{gen_cnf, gen_posnae, gen_tricolored_mca, Assignment, McaInstance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Consistency,
    Pullback,
    Offset,
    Greedy,
}

impl SuiteKind {
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Consistency => "consistency",
            SuiteKind::Pullback => "pullback",
            SuiteKind::Offset => "offset",
            SuiteKind::Greedy => "greedy",
        }
    }
}

/// Where the target search starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartMode {
    /// The problem's canonical initial solution.
    Canonical,
    /// A random feasible solution drawn from the trial seed.
    #[default]
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub reduction: ReductionId,
    pub trials: usize,
    pub seed: u64,
    /// Constraint counts for table sources, cycled over the trials.
    pub constraint_counts: Vec<usize>,
    /// Domain sizes for table sources, cycled over the trials.
    pub domain_sizes: Vec<usize>,
    pub num_vars: usize,
    pub num_clauses: usize,
    pub clause_len: usize,
    pub weight_low: u64,
    pub weight_high: u64,
    pub zero_fraction: f64,
    pub pivot: PivotRule,
    pub start: StartMode,
    pub options: ReductionOptions,
    pub metric: Metric,
    /// Largest neighborhood an exhaustive scan may enumerate.
    pub cap: usize,
    /// Most improving moves per search.
    pub budget: usize,
    /// Extra (2,12) scan of W3DM catalog fixpoints, reported but not asserted.
    pub pq_scan: bool,
}

impl ExperimentConfig {
    /// Desk-scale defaults for one reduction.
    pub fn for_reduction(reduction: ReductionId) -> Self {
        let mut cfg = ExperimentConfig {
            reduction,
            trials: 100,
            seed: 1,
            constraint_counts: vec![2, 4, 6],
            domain_sizes: vec![2, 3],
            num_vars: 5,
            num_clauses: 8,
            clause_len: 3,
            weight_low: 2,
            weight_high: 9,
            zero_fraction: 0.0,
            pivot: PivotRule::FirstImprovement,
            start: StartMode::Random,
            options: ReductionOptions::default(),
            metric: Metric::Exchange,
            cap: 1 << 22,
            budget: 100_000,
            pq_scan: false,
        };
        match reduction {
            ReductionId::W3dm | ReductionId::X3c => {
                cfg.constraint_counts = vec![2];
                cfg.trials = 50;
            }
            ReductionId::Sb => {
                cfg.num_vars = 4;
                cfg.num_clauses = 6;
            }
            ReductionId::Ip => {
                cfg.num_clauses = 6;
            }
            _ => {}
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.cap == 0 || self.budget == 0 {
            return Err(Error::Config("caps and budgets must be positive".into()));
        }
        if self.constraint_counts.is_empty() || self.domain_sizes.is_empty() {
            return Err(Error::Config("size lists must not be empty".into()));
        }
        if self.weight_low > self.weight_high {
            return Err(Error::Config("weight_low exceeds weight_high".into()));
        }
        Ok(())
    }

    /// Name of the discrepancy mode this configuration observes, if any.
    pub fn observation_mode(&self) -> Option<String> {
        let mut modes = Vec::new();
        if matches!(self.reduction, ReductionId::Ts) {
            if self.options.ts_scheme == TsScheme::PaperLiteral {
                modes.push("scheme: paper_literal".to_string());
            }
            if self.options.ts_separation != Default::default() {
                modes.push(format!("separation: {}", self.options.ts_separation.name()));
            }
        }
        if matches!(self.reduction, ReductionId::W3dm | ReductionId::X3c)
            && self.options.inventory == InventoryMode::PaperFormula
        {
            modes.push("inventory: paper_formula".to_string());
        }
        if self.reduction == ReductionId::Cc && self.options.cc_weight == CcWeight::PaperLiteral {
            modes.push("cc_weight: paper_literal".to_string());
        }
        (!modes.is_empty()).then(|| modes.join(", "))
    }

    /// Seed stream of trial `index`.
    pub fn trial_rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail { reason: String },
    Skipped { reason: String },
}

impl Outcome {
    fn label(&self) -> &'static str {
        match self {
            Outcome::Pass => "pass",
            Outcome::Fail { .. } => "fail",
            Outcome::Skipped { .. } => "skipped",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub source_seed: u64,
    pub source_digest: String,
    pub reduced_digest: String,
    pub steps: usize,
    pub final_cost: Option<String>,
    pub terminated: Option<Termination>,
    pub consistency: Option<ConsistencyVerdict>,
    pub pullback_local_opt: Option<bool>,
    pub offset_identity: Option<bool>,
    /// Catalog moves checked against the (6,12) neighborhood.
    pub catalog_moves_checked: usize,
    /// Outcome of the optional (2,12) scan at the catalog fixpoint.
    pub pq_scan_local_opt: Option<bool>,
    pub outcome: Outcome,
    pub wall_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    pub source_seed: u64,
    pub reason: String,
    pub source: String,
    pub reduced: String,
    pub solution: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: SuiteKind,
    pub config: ExperimentConfig,
    pub observation_mode: Option<String>,
    pub records: Vec<TrialRecord>,
    pub counterexamples: Vec<Counterexample>,
    pub summary: Summary,
}

impl SuiteReport {
    fn assemble(
        suite: SuiteKind,
        config: &ExperimentConfig,
        results: Vec<(TrialRecord, Option<Counterexample>)>,
    ) -> Self {
        let mut summary = Summary::default();
        let mut records = Vec::with_capacity(results.len());
        let mut counterexamples = Vec::new();
        for (record, cex) in results {
            match record.outcome {
                Outcome::Pass => summary.passed += 1,
                Outcome::Fail { .. } => summary.failed += 1,
                Outcome::Skipped { .. } => summary.skipped += 1,
            }
            records.push(record);
            counterexamples.extend(cex);
        }
        SuiteReport {
            suite,
            config: config.clone(),
            observation_mode: config.observation_mode(),
            records,
            counterexamples,
            summary,
        }
    }

    /// Every trial passed; skips and failures both count against this.
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0 && self.summary.skipped == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Wall times zeroed, for byte comparisons across runs.
    pub fn without_times(&self) -> Self {
        let mut r = self.clone();
        for rec in &mut r.records {
            rec.wall_ms = 0;
        }
        r
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "suite {} reduction {} trials {} seed {}",
            self.suite.name(),
            self.config.reduction,
            self.config.trials,
            self.config.seed
        );
        if let Some(mode) = &self.observation_mode {
            let _ = writeln!(out, "observation {mode}");
        }
        for r in &self.records {
            let _ = write!(
                out,
                "trial {} {} source {} reduced {} steps {}",
                r.index + 1,
                r.outcome.label(),
                r.source_digest,
                r.reduced_digest,
                r.steps
            );
            match &r.outcome {
                Outcome::Fail { reason } | Outcome::Skipped { reason } => {
                    let _ = writeln!(out, " : {reason}");
                }
                Outcome::Pass => out.push('\n'),
            }
        }
        for c in &self.counterexamples {
            let _ = writeln!(
                out,
                "counterexample trial {} seed {} : {}",
                c.trial + 1,
                c.source_seed,
                c.reason
            );
            let _ = writeln!(out, "solution {}", c.solution);
            for line in c.source.lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
        let _ = writeln!(
            out,
            "summary passed {} failed {} skipped {}",
            self.summary.passed, self.summary.failed, self.summary.skipped
        );
        out
    }
}

/// First 16 hex digits of the SHA-256 of `text`.
pub fn digest(text: &str) -> String {
    hex::encode(&Sha256::digest(text.as_bytes())[..8])
}

/// Source instance of trial `index`.
pub fn trial_source(cfg: &ExperimentConfig, index: usize) -> Result<(McaInstance, u64)> {
    let mut rng = cfg.trial_rng(index);
    let seed: u64 = rng.gen();
    let source = generate_source(cfg, index, seed)?;
    Ok((source, seed))
}

fn generate_source(cfg: &ExperimentConfig, index: usize, seed: u64) -> Result<McaInstance> {
    let id = cfg.reduction;
    match id {
        ReductionId::W3dm | ReductionId::X3c | ReductionId::Sp | ReductionId::Sc => {
            let m = cfg.constraint_counts[index % cfg.constraint_counts.len()];
            let r =
                cfg.domain_sizes[(index / cfg.constraint_counts.len()) % cfg.domain_sizes.len()];
            let inst = gen_tricolored_mca(
                m,
                r,
                cfg.weight_low,
                cfg.weight_high,
                cfg.zero_fraction,
                seed,
            )?;
            Ok(inst.with_sense(id.source_sense()))
        }
        ReductionId::Ssp | ReductionId::Ts => {
            let pairs = cfg.num_vars * cfg.num_vars.saturating_sub(1) / 2;
            gen_posnae(
                cfg.num_vars,
                cfg.num_clauses.min(pairs),
                false,
                cfg.weight_high,
                seed,
            )
        }
        ReductionId::Ip => {
            let pairs = cfg.num_vars * cfg.num_vars.saturating_sub(1) / 2;
            gen_posnae(
                cfg.num_vars,
                cfg.num_clauses.min(pairs),
                true,
                cfg.weight_high,
                seed,
            )
        }
        ReductionId::Sb | ReductionId::Hs | ReductionId::Cc => gen_cnf(
            cfg.num_vars,
            cfg.num_clauses,
            cfg.clause_len,
            cfg.weight_high,
            seed,
        ),
    }
}

struct TrialContext {
    record: TrialRecord,
    source_text: String,
    reduced_text: String,
}

impl TrialContext {
    fn finish(
        mut self,
        outcome: Outcome,
        solution: Option<&Solution>,
        started: Instant,
    ) -> (TrialRecord, Option<Counterexample>) {
        self.record.wall_ms = started.elapsed().as_millis() as u64;
        let cex = match &outcome {
            Outcome::Fail { reason } => Some(Counterexample {
                trial: self.record.index,
                source_seed: self.record.source_seed,
                reason: reason.clone(),
                source: self.source_text,
                reduced: self.reduced_text,
                solution: solution.map(|s| s.to_string()).unwrap_or_default(),
            }),
            _ => None,
        };
        self.record.outcome = outcome;
        (self.record, cex)
    }
}

fn trial_pivot(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> PivotRule {
    match cfg.pivot {
        PivotRule::RandomImprovement { .. } => PivotRule::RandomImprovement { seed: rng.gen() },
        rule => rule,
    }
}

/// Runs one consistency or pull-back trial. Deterministic in `(cfg, index)`.
pub fn run_trial(
    cfg: &ExperimentConfig,
    index: usize,
    pullback: bool,
) -> (TrialRecord, Option<Counterexample>) {
    let started = Instant::now();
    let mut rng = cfg.trial_rng(index);
    let seed: u64 = rng.gen();
    let mut ctx = TrialContext {
        record: TrialRecord {
            index,
            source_seed: seed,
            source_digest: String::new(),
            reduced_digest: String::new(),
            steps: 0,
            final_cost: None,
            terminated: None,
            consistency: None,
            pullback_local_opt: None,
            offset_identity: None,
            catalog_moves_checked: 0,
            pq_scan_local_opt: None,
            outcome: Outcome::Pass,
            wall_ms: 0,
        },
        source_text: String::new(),
        reduced_text: String::new(),
    };
    let source = match generate_source(cfg, index, seed) {
        Ok(s) => s,
        Err(e) => {
            return ctx.finish(
                Outcome::Skipped {
                    reason: format!("generator: {e}"),
                },
                None,
                started,
            )
        }
    };
    ctx.source_text = serialize_source(&source);
    ctx.record.source_digest = digest(&ctx.source_text);
    let output = match reduce(cfg.reduction, &source, cfg.options) {
        Ok(o) => o,
        Err(e) => {
            return ctx.finish(
                Outcome::Fail {
                    reason: format!("reduction failed: {e}"),
                },
                None,
                started,
            )
        }
    };
    ctx.reduced_text = serialize_instance(&output.target);
    ctx.record.reduced_digest = digest(&ctx.reduced_text);
    let pivot = trial_pivot(cfg, &mut rng);

    let searched = if output.gadgets().is_some() {
        catalog_search(cfg, &output, pivot, &mut rng, &mut ctx.record)
    } else {
        kdiffer_search(cfg, &output, pivot, &mut rng, &mut ctx.record)
    };
    let final_solution = match searched {
        Ok(SearchEnd::Optimum(s)) => s,
        Ok(SearchEnd::Skip(reason)) => {
            return ctx.finish(Outcome::Skipped { reason }, None, started)
        }
        Ok(SearchEnd::Fail(reason, s)) => {
            return ctx.finish(Outcome::Fail { reason }, Some(&s), started)
        }
        Err(e) => {
            return ctx.finish(
                Outcome::Fail {
                    reason: format!("search error: {e}"),
                },
                None,
                started,
            )
        }
    };

    let verdict = match output.is_consistent(&final_solution) {
        Ok(v) => v,
        Err(e) => {
            return ctx.finish(
                Outcome::Fail {
                    reason: format!("consistency check: {e}"),
                },
                Some(&final_solution),
                started,
            )
        }
    };
    let consistent = verdict.consistent;
    let violation = verdict.violation.clone();
    ctx.record.consistency = Some(verdict);
    if let Ok(offset) = output.cost_offset() {
        if consistent {
            let lhs = output.target.cost(&final_solution);
            let rhs = output
                .pull_back(&final_solution)
                .and_then(|a| source.cost(&a));
            ctx.record.offset_identity = Some(match (lhs, rhs) {
                (Ok(l), Ok(r)) => l == r + offset,
                _ => false,
            });
        }
    }
    if !consistent {
        let reason = format!(
            "local optimum is not {}: {}",
            output.id.predicate(),
            violation.unwrap_or_default()
        );
        return ctx.finish(Outcome::Fail { reason }, Some(&final_solution), started);
    }
    if ctx.record.offset_identity == Some(false) {
        return ctx.finish(
            Outcome::Fail {
                reason: "cost offset identity violated".into(),
            },
            Some(&final_solution),
            started,
        );
    }
    if pullback {
        let assignment = match output.pull_back(&final_solution) {
            Ok(a) => a,
            Err(e) => {
                return ctx.finish(
                    Outcome::Fail {
                        reason: format!("pull-back: {e}"),
                    },
                    Some(&final_solution),
                    started,
                )
            }
        };
        match source.improving_flip(&assignment) {
            Ok(None) => ctx.record.pullback_local_opt = Some(true),
            Ok(Some((x, v, gain))) => {
                ctx.record.pullback_local_opt = Some(false);
                let reason = format!(
                    "pulled-back assignment {assignment} improves by {gain} when variable {} takes value {}",
                    x + 1,
                    v + 1
                );
                return ctx.finish(Outcome::Fail { reason }, Some(&final_solution), started);
            }
            Err(e) => {
                return ctx.finish(
                    Outcome::Fail {
                        reason: format!("flip scan: {e}"),
                    },
                    Some(&final_solution),
                    started,
                )
            }
        }
    }
    ctx.finish(Outcome::Pass, Some(&final_solution), started)
}

enum SearchEnd {
    Optimum(Solution),
    Skip(String),
    Fail(String, Solution),
}

/// A random feasible solution; covers are thinned to a random minimal cover.
fn random_start(target: &SetProblemInstance, rng: &mut ChaCha8Rng) -> Result<Solution> {
    let start = target.random_solution(rng)?;
    match (target, start) {
        (SetProblemInstance::Sc(sc), Solution::Collection(mut chosen)) => {
            let mut order: Vec<usize> = chosen.iter().copied().collect();
            order.shuffle(rng);
            for i in order {
                chosen.remove(&i);
                if !sc.collection.covers(&chosen) {
                    chosen.insert(i);
                }
            }
            Ok(Solution::Collection(chosen))
        }
        (_, start) => Ok(start),
    }
}

fn kdiffer_search(
    cfg: &ExperimentConfig,
    output: &ReductionOutput,
    pivot: PivotRule,
    rng: &mut ChaCha8Rng,
    record: &mut TrialRecord,
) -> Result<SearchEnd> {
    let k = output
        .id
        .search_k()
        .expect("catalog reductions handled elsewhere");
    let binding = SetBinding::new(&output.target, k)
        .with_metric(cfg.metric)
        .with_cap(cfg.cap);
    let start = match cfg.start {
        StartMode::Canonical => binding.initial_solution()?,
        StartMode::Random => random_start(&output.target, rng)?,
    };
    let report = match local_search(&binding, start, pivot, cfg.budget) {
        Ok(r) => r,
        Err(Error::NeighborhoodTooLarge { limit }) => {
            return Ok(SearchEnd::Skip(format!("neighborhood above cap {limit}")))
        }
        Err(e) => return Err(e),
    };
    record.steps = report.steps;
    record.final_cost = Some(report.final_cost.to_string());
    record.terminated = Some(report.terminated);
    if report.terminated == Termination::BudgetExhausted {
        return Ok(SearchEnd::Skip(format!(
            "budget of {} moves exhausted",
            cfg.budget
        )));
    }
    match verify_local_optimum(&binding, &report.final_solution, cfg.cap) {
        Ok(cert) if cert.is_locally_optimal() => Ok(SearchEnd::Optimum(report.final_solution)),
        Ok(_) => Ok(SearchEnd::Fail(
            "search fixpoint has an improving neighbor".into(),
            report.final_solution,
        )),
        Err(Error::NeighborhoodTooLarge { limit }) => Ok(SearchEnd::Skip(format!(
            "certificate scan above cap {limit}"
        ))),
        Err(e) => Err(e),
    }
}

fn catalog_search(
    cfg: &ExperimentConfig,
    output: &ReductionOutput,
    pivot: PivotRule,
    rng: &mut ChaCha8Rng,
    record: &mut TrialRecord,
) -> Result<SearchEnd> {
    let binding = CatalogBinding::new(output)?;
    let start = match cfg.start {
        StartMode::Canonical => binding.initial_solution()?,
        StartMode::Random => crate::reductions::random_matching_solution(output, rng)?,
    };
    let report = local_search(&binding, start, pivot, cfg.budget)?;
    record.steps = report.steps;
    record.final_cost = Some(report.final_cost.to_string());
    record.terminated = Some(report.terminated);
    if report.terminated == Termination::BudgetExhausted {
        return Ok(SearchEnd::Skip(format!(
            "budget of {} moves exhausted",
            cfg.budget
        )));
    }
    let fixpoint = report.final_solution;
    // every move offered at the fixpoint must stay inside the (6,12) neighborhood
    let as_matching = |s: &Solution| -> Option<BTreeSet<[usize; 3]>> {
        match s {
            Solution::Matching(m) => Some(m.clone()),
            Solution::Cover(c) => {
                let n = output.gadgets()?.n;
                Some(c.iter().map(|t| [t[0], t[1] - n, t[2] - 2 * n]).collect())
            }
            _ => None,
        }
    };
    let here = as_matching(&fixpoint).expect("catalog search stays on matchings");
    for mv in binding.moves(&fixpoint) {
        let there = as_matching(&mv.solution).expect("catalog moves are matchings");
        let (p, q) = pq_distance(&here, &there);
        record.catalog_moves_checked += 1;
        if p > CATALOG_P || q > CATALOG_Q {
            return Ok(SearchEnd::Fail(
                format!(
                    "{} move outside the ({CATALOG_P},{CATALOG_Q}) neighborhood: ({p},{q})",
                    mv.kind
                ),
                fixpoint,
            ));
        }
    }
    if cfg.pq_scan {
        if let SetProblemInstance::W3dm(_) = &output.target {
            let scan = SetBinding::pq(&output.target, 2, CATALOG_Q, cfg.cap);
            record.pq_scan_local_opt = verify_local_optimum(&scan, &fixpoint, cfg.cap)
                .ok()
                .map(|c| c.is_locally_optimal());
        }
    }
    Ok(SearchEnd::Optimum(fixpoint))
}

fn run_trials(
    cfg: &ExperimentConfig,
    pullback: bool,
) -> Vec<(TrialRecord, Option<Counterexample>)> {
    (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, i, pullback))
        .collect()
}

/// Searches every reduced instance to a local optimum and checks consistency.
pub fn run_consistency_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    Ok(SuiteReport::assemble(
        SuiteKind::Consistency,
        cfg,
        run_trials(cfg, false),
    ))
}

/// As the consistency suite, and also checks that the pulled-back assignment
/// is 1-flip optimal for the source.
pub fn run_pullback_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    Ok(SuiteReport::assemble(
        SuiteKind::Pullback,
        cfg,
        run_trials(cfg, true),
    ))
}

/// Checks `cost_target(encode(a)) = cost_source(a) + offset` for every
/// assignment of the source. Returns the number of assignments checked and
/// the failures.
pub fn offset_identities(output: &ReductionOutput) -> Result<(usize, Vec<(Assignment, String)>)> {
    let offset = output.cost_offset()?;
    let src = &output.source;
    let mut failures = Vec::new();
    let mut total = 0;
    for a in Assignment::enumerate(src.num_vars, src.domain_size) {
        total += 1;
        let s = output.encode(&a)?;
        let verdict = output.is_consistent(&s)?;
        if !verdict.consistent {
            failures.push((
                a,
                format!("encoding is not consistent: {:?}", verdict.violation),
            ));
            continue;
        }
        if output.pull_back(&s)? != a {
            failures.push((a, "pull-back does not invert the encoding".into()));
            continue;
        }
        let lhs = output.target.cost(&s)?;
        let rhs = src.cost(&a)? + &offset;
        if lhs != rhs {
            failures.push((
                a,
                format!("target cost {lhs} but source cost plus offset {rhs}"),
            ));
        }
    }
    Ok((total, failures))
}

/// Offset identities over tiny random sources (|X| ≤ 4 for binary sources).
pub fn run_offset_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    if cfg.reduction == ReductionId::Ts {
        reduce(cfg.reduction, &gen_posnae(2, 1, false, 1, 0)?, cfg.options)?.cost_offset()?;
    }
    if matches!(cfg.reduction, ReductionId::W3dm | ReductionId::X3c)
        && cfg.options.inventory == InventoryMode::PaperFormula
    {
        return Err(Error::NoAffineOffset(
            "the shared-zero inventory has no standard assignments".into(),
        ));
    }
    let mut tiny = cfg.clone();
    tiny.constraint_counts = vec![2];
    tiny.num_vars = cfg.num_vars.min(4);
    tiny.num_clauses = cfg.num_clauses.min(6);
    let results = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let started = Instant::now();
            let mut rng = tiny.trial_rng(i);
            let seed: u64 = rng.gen();
            let mut ctx = TrialContext {
                record: TrialRecord {
                    index: i,
                    source_seed: seed,
                    source_digest: String::new(),
                    reduced_digest: String::new(),
                    steps: 0,
                    final_cost: None,
                    terminated: None,
                    consistency: None,
                    pullback_local_opt: None,
                    offset_identity: None,
                    catalog_moves_checked: 0,
                    pq_scan_local_opt: None,
                    outcome: Outcome::Pass,
                    wall_ms: 0,
                },
                source_text: String::new(),
                reduced_text: String::new(),
            };
            let source = match generate_source(&tiny, i, seed) {
                Ok(s) => s,
                Err(e) => {
                    return ctx.finish(
                        Outcome::Skipped {
                            reason: format!("generator: {e}"),
                        },
                        None,
                        started,
                    )
                }
            };
            ctx.source_text = serialize_source(&source);
            ctx.record.source_digest = digest(&ctx.source_text);
            let checked = reduce(tiny.reduction, &source, tiny.options).and_then(|out| {
                ctx.reduced_text = serialize_instance(&out.target);
                offset_identities(&out)
            });
            ctx.record.reduced_digest = digest(&ctx.reduced_text);
            match checked {
                Ok((total, failures)) => {
                    ctx.record.steps = total;
                    ctx.record.offset_identity = Some(failures.is_empty());
                    match failures.into_iter().next() {
                        None => ctx.finish(Outcome::Pass, None, started),
                        Some((a, why)) => ctx.finish(
                            Outcome::Fail {
                                reason: format!("assignment {a}: {why}"),
                            },
                            None,
                            started,
                        ),
                    }
                }
                Err(e) => ctx.finish(
                    Outcome::Fail {
                        reason: e.to_string(),
                    },
                    None,
                    started,
                ),
            }
        })
        .collect();
    Ok(SuiteReport::assemble(SuiteKind::Offset, cfg, results))
}

/// Random set packing instance with `|B| ≤ max_ground`, `|M| ≤ max_sets`
/// and weights in `1..=weight_high`.
pub fn random_sp<R: Rng>(
    max_ground: usize,
    max_sets: usize,
    weight_high: u64,
    rng: &mut R,
) -> SpInstance {
    let collection = random_collection(max_ground, max_sets, weight_high, rng);
    let m_c = rng.gen_range(1..=collection.len() + 1);
    SpInstance { collection, m_c }
}

/// Random set cover instance; uncovered elements are added to random sets.
pub fn random_sc<R: Rng>(
    max_ground: usize,
    max_sets: usize,
    weight_high: u64,
    rng: &mut R,
) -> ScInstance {
    let mut collection = random_collection(max_ground, max_sets.max(1), weight_high, rng);
    if collection.is_empty() {
        collection.push([], 1u32);
    }
    for e in 0..collection.ground {
        if !collection.sets.iter().any(|s| s.contains(e)) {
            let i = rng.gen_range(0..collection.len());
            collection.sets[i].insert(e);
        }
    }
    ScInstance { collection }
}

fn random_collection<R: Rng>(
    max_ground: usize,
    max_sets: usize,
    weight_high: u64,
    rng: &mut R,
) -> WeightedCollection {
    let ground = rng.gen_range(1..=max_ground.max(1));
    let count = rng.gen_range(0..=max_sets);
    let mut c = WeightedCollection::empty(ground);
    for _ in 0..count {
        let density = rng.gen_range(0.15..0.6);
        let members: Vec<usize> = (0..ground).filter(|_| rng.gen_bool(density)).collect();
        let w = rng.gen_range(1..=weight_high.max(1));
        c.push(members, w);
    }
    c
}

/// Greedy packing and greedy cover on random instances, each output
/// certified by an exhaustive 1-differ scan. Trials alternate between the two.
pub fn run_greedy_suite(cfg: &ExperimentConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let results = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let started = Instant::now();
            let mut rng = cfg.trial_rng(i);
            let seed: u64 = rng.gen();
            let mut inst_rng = ChaCha8Rng::seed_from_u64(seed);
            let (inst, solution) = if i % 2 == 0 {
                let sp = random_sp(12, 10, cfg.weight_high, &mut inst_rng);
                let s = Solution::Collection(greedy_packing(&sp));
                (SetProblemInstance::Sp(sp), Ok(s))
            } else {
                let sc = random_sc(12, 10, cfg.weight_high, &mut inst_rng);
                let s = greedy_cover(&sc).map(Solution::Collection);
                (SetProblemInstance::Sc(sc), s)
            };
            let text = serialize_instance(&inst);
            let mut ctx = TrialContext {
                record: TrialRecord {
                    index: i,
                    source_seed: seed,
                    source_digest: digest(&text),
                    reduced_digest: String::new(),
                    steps: 0,
                    final_cost: None,
                    terminated: None,
                    consistency: None,
                    pullback_local_opt: None,
                    offset_identity: None,
                    catalog_moves_checked: 0,
                    pq_scan_local_opt: None,
                    outcome: Outcome::Pass,
                    wall_ms: 0,
                },
                source_text: text,
                reduced_text: String::new(),
            };
            let solution = match solution {
                Ok(s) => s,
                Err(e) => {
                    return ctx.finish(
                        Outcome::Fail {
                            reason: e.to_string(),
                        },
                        None,
                        started,
                    )
                }
            };
            let binding = SetBinding::new(&inst, 1)
                .with_metric(cfg.metric)
                .with_cap(cfg.cap);
            match verify_local_optimum(&binding, &solution, cfg.cap) {
                Ok(cert) => {
                    ctx.record.steps = cert.neighborhood_size_scanned;
                    ctx.record.final_cost = Some(cert.cost.to_string());
                    ctx.record.pullback_local_opt = Some(cert.is_locally_optimal());
                    match cert.witness {
                        None => ctx.finish(Outcome::Pass, Some(&solution), started),
                        Some((w, c)) => ctx.finish(
                            Outcome::Fail {
                                reason: format!("{w} improves the cost to {c}"),
                            },
                            Some(&solution),
                            started,
                        ),
                    }
                }
                Err(Error::NeighborhoodTooLarge { limit }) => ctx.finish(
                    Outcome::Skipped {
                        reason: format!("neighborhood above cap {limit}"),
                    },
                    None,
                    started,
                ),
                Err(e) => ctx.finish(
                    Outcome::Fail {
                        reason: e.to_string(),
                    },
                    Some(&solution),
                    started,
                ),
            }
        })
        .collect();
    Ok(SuiteReport::assemble(SuiteKind::Greedy, cfg, results))
}

pub fn run_suite(kind: SuiteKind, cfg: &ExperimentConfig) -> Result<SuiteReport> {
    match kind {
        SuiteKind::Consistency => run_consistency_suite(cfg),
        SuiteKind::Pullback => run_pullback_suite(cfg),
        SuiteKind::Offset => run_offset_suite(cfg),
        SuiteKind::Greedy => run_greedy_suite(cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digests_are_stable() {
        assert_eq!(digest("problem sp\n"), digest("problem sp\n"));
        assert_eq!(digest("").len(), 16);
    }

    #[test]
    fn hs_suite_passes() {
        let mut cfg = ExperimentConfig::for_reduction(ReductionId::Hs);
        cfg.trials = 8;
        let report = run_pullback_suite(&cfg).unwrap();
        assert!(report.all_passed(), "{}", report.to_text());
    }

    #[test]
    fn equal_configs_give_equal_reports() {
        let mut cfg = ExperimentConfig::for_reduction(ReductionId::Ssp);
        cfg.trials = 6;
        let a = run_pullback_suite(&cfg).unwrap().without_times();
        let b = run_pullback_suite(&cfg).unwrap().without_times();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn literal_ts_scheme_has_no_offset_suite() {
        let mut cfg = ExperimentConfig::for_reduction(ReductionId::Ts);
        cfg.options.ts_scheme = TsScheme::PaperLiteral;
        assert!(matches!(
            run_offset_suite(&cfg),
            Err(Error::NoAffineOffset(_))
        ));
    }
}
