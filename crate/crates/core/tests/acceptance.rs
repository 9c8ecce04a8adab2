//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pls_lab::engine::{
    improvement_step, local_search, trajectory_is_monotone, verify_local_optimum, PivotRule,
    ProblemBinding,
};
use pls_lab::harness::{
    run_greedy_suite, run_offset_suite, run_pullback_suite, ExperimentConfig, SuiteReport,
};
use pls_lab::reductions::{CcWeight, InventoryMode, ReductionId, TsScheme};
use pls_lab::set_problems::{random_instance, RandomKind, SetBinding, SetProblemInstance};

type Check = Result<String, String>;

fn suite_or_err(report: pls_lab::error::Result<SuiteReport>) -> Result<SuiteReport, String> {
    report.map_err(|e| e.to_string())
}

fn first_problem(report: &SuiteReport) -> String {
    report
        .records
        .iter()
        .find_map(|r| match &r.outcome {
            pls_lab::harness::Outcome::Pass => None,
            other => Some(format!("trial {}: {other:?}", r.index + 1)),
        })
        .unwrap_or_default()
}

const BINARY: [ReductionId; 8] = [
    ReductionId::Sp,
    ReductionId::Sc,
    ReductionId::Ssp,
    ReductionId::Ts,
    ReductionId::Sb,
    ReductionId::Hs,
    ReductionId::Ip,
    ReductionId::Cc,
];

/// Criteria 1 and 2 share their trials.
fn pullback_reports() -> Result<Vec<SuiteReport>, String> {
    BINARY
        .iter()
        .map(|&id| suite_or_err(run_pullback_suite(&ExperimentConfig::for_reduction(id))))
        .collect()
}

fn criterion_1(reports: &[SuiteReport]) -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in reports {
        let consistent = r
            .records
            .iter()
            .filter(|t| t.consistency.as_ref().is_some_and(|v| v.consistent))
            .count();
        ok &= consistent == 100 && r.records.len() == 100;
        parts.push(format!(
            "{} {consistent}/{}",
            r.config.reduction,
            r.records.len()
        ));
        if consistent != r.records.len() {
            parts.push(first_problem(r));
        }
    }
    let line = parts.join(", ");
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_2(reports: &[SuiteReport]) -> Check {
    let mut parts = Vec::new();
    let mut ok = true;
    for r in reports {
        let optimal = r
            .records
            .iter()
            .filter(|t| t.pullback_local_opt == Some(true))
            .count();
        ok &= optimal == 100 && r.all_passed();
        parts.push(format!(
            "{} {optimal}/{}",
            r.config.reduction,
            r.records.len()
        ));
        if !r.all_passed() {
            parts.push(first_problem(r));
        }
    }
    let line = parts.join(", ");
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn criterion_3() -> Check {
    let cfg = ExperimentConfig::for_reduction(ReductionId::W3dm);
    if cfg.trials != 50 || cfg.constraint_counts != [2] || cfg.domain_sizes != [2, 3] {
        return Err(format!("unexpected defaults {cfg:?}"));
    }
    let report = suite_or_err(run_pullback_suite(&cfg))?;
    let standard = report
        .records
        .iter()
        .filter(|t| t.consistency.as_ref().is_some_and(|v| v.consistent))
        .count();
    let pulled = report
        .records
        .iter()
        .filter(|t| t.pullback_local_opt == Some(true))
        .count();
    let moves: usize = report.records.iter().map(|t| t.catalog_moves_checked).sum();
    let line = format!(
        "standard {standard}/50, 1-flip optimal {pulled}/50, {moves} catalog moves inside (6,12)"
    );
    if report.all_passed() && standard == 50 && pulled == 50 && moves > 0 {
        Ok(line)
    } else {
        Err(format!("{line}; {}", first_problem(&report)))
    }
}

fn criterion_4() -> Check {
    let mut total = 0usize;
    for id in ReductionId::ALL {
        let mut cfg = ExperimentConfig::for_reduction(id);
        cfg.trials = 30;
        let report = suite_or_err(run_offset_suite(&cfg))?;
        if !report.all_passed() {
            return Err(format!("{id}: {}", first_problem(&report)));
        }
        total += report.records.iter().map(|t| t.steps).sum::<usize>();
    }
    Ok(format!(
        "{total} encoded assignments over {} reductions match exactly",
        ReductionId::ALL.len()
    ))
}

fn criterion_5() -> Check {
    let mut cfg = ExperimentConfig::for_reduction(ReductionId::Sp);
    cfg.trials = 400;
    let started = Instant::now();
    let report = suite_or_err(run_greedy_suite(&cfg))?;
    let secs = started.elapsed().as_secs_f64();
    let line = format!("{}/400 certified in {secs:.1}s", report.summary.passed);
    if report.summary.passed == 400 && secs < 60.0 {
        Ok(line)
    } else {
        Err(format!("{line}; {}", first_problem(&report)))
    }
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for kind in RandomKind::ALL {
        for _ in 0..1000 {
            let inst = random_instance(kind, 6, 6, 9, &mut rng);
            let s = inst.random_solution(&mut rng).map_err(|e| e.to_string())?;
            let ours = inst.cost(&s).map_err(|e| format!("{kind:?}: {e}"))?;
            let oracle = common::oracle_cost(&inst, &s);
            if oracle.as_ref() != Some(&ours) {
                return Err(format!(
                    "{kind:?}: cost {ours} but oracle {oracle:?} on {s}"
                ));
            }
        }
    }
    Ok(format!("{} problems x 1000 pairs", RandomKind::ALL.len()))
}

fn engine_run(inst: &SetProblemInstance, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let k = rng.gen_range(1..=2);
    let binding = SetBinding::new(inst, k);
    let rule = match rng.gen_range(0..3) {
        0 => PivotRule::FirstImprovement,
        1 => PivotRule::BestImprovement,
        _ => PivotRule::RandomImprovement { seed: rng.gen() },
    };
    let start = inst.random_solution(rng).map_err(|e| e.to_string())?;
    let report = local_search(&binding, start.clone(), rule, 10_000).map_err(|e| e.to_string())?;
    if !trajectory_is_monotone(&report, binding.sense()) {
        return Err(format!("non-monotone trajectory from {start}"));
    }
    let end = &report.final_solution;
    if improvement_step(&binding, end, rule)
        .map_err(|e| e.to_string())?
        .is_some()
    {
        return Err(format!("fixpoint {end} still improves"));
    }
    let again = local_search(&binding, end.clone(), rule, 10_000).map_err(|e| e.to_string())?;
    if again.steps != 0 || &again.final_solution != end {
        return Err(format!("search from fixpoint {end} moved"));
    }
    let cert = verify_local_optimum(&binding, end, 1 << 20).map_err(|e| e.to_string())?;
    if !cert.is_locally_optimal() {
        return Err(format!("fixpoint {end} fails its certificate"));
    }
    for s in [&start, end] {
        let around: Vec<_> = binding
            .neighbors(s)
            .map_err(|e| e.to_string())?
            .map(|n| n.solution)
            .collect();
        for t in around {
            if !binding.is_feasible(&t) {
                return Err(format!("infeasible neighbor {t} of {s}"));
            }
            let back = binding
                .neighbors(&t)
                .map_err(|e| e.to_string())?
                .any(|n| &n.solution == s);
            if !back {
                return Err(format!("{t} is a neighbor of {s} but not conversely"));
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut runs = 0;
    for kind in RandomKind::ALL {
        for _ in 0..100 {
            let inst = random_instance(kind, 6, 6, 9, &mut rng);
            engine_run(&inst, &mut rng).map_err(|e| format!("{kind:?}: {e}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} searches"))
}

fn criterion_8() -> Check {
    let mut parts = Vec::new();
    let mut ts = ExperimentConfig::for_reduction(ReductionId::Ts);
    ts.options.ts_scheme = TsScheme::PaperLiteral;
    let mut w3dm = ExperimentConfig::for_reduction(ReductionId::W3dm);
    w3dm.options.inventory = InventoryMode::PaperFormula;
    let mut cc = ExperimentConfig::for_reduction(ReductionId::Cc);
    cc.options.cc_weight = CcWeight::PaperLiteral;
    for cfg in [ts, w3dm, cc] {
        let report = suite_or_err(run_pullback_suite(&cfg))?;
        if report.observation_mode.is_none() {
            return Err(format!(
                "{} report is not marked as an observation",
                cfg.reduction
            ));
        }
        parts.push(format!(
            "{} [{}] {} counterexamples",
            cfg.reduction,
            report.observation_mode.unwrap_or_default(),
            report.counterexamples.len()
        ));
    }
    Ok(parts.join(", "))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let reports = pullback_reports();
    let shared = |f: fn(&[SuiteReport]) -> Check| match &reports {
        Ok(r) => f(r),
        Err(e) => Err(e.clone()),
    };
    let results = [
        shared(criterion_1),
        shared(criterion_2),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
    ];
    let mut failed = 0;
    for (i, r) in results.iter().enumerate() {
        match r {
            Ok(detail) => println!("criterion {}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "acceptance finished in {:.1}s",
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
