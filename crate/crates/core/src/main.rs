use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pls_lab::engine::{local_search, verify_local_optimum, PivotRule, ProblemBinding, Termination};
use pls_lab::error::{Error, Result};
use pls_lab::format::{
    format_assignment, parse_assignment, parse_file, parse_solution_for, serialize_instance,
    serialize_source, Document,
};
use pls_lab::greedy::{greedy_cover, greedy_packing};
use pls_lab::harness::{random_sc, random_sp, run_suite, ExperimentConfig, StartMode, SuiteKind};
use pls_lab::reductions::{
    reduce, CcWeight, InventoryMode, ReductionId, ReductionOptions, ReductionOutput, TsScheme,
};
use pls_lab::set_problems::{Metric, SeparationMode, SetBinding, SetProblemInstance, Solution};
use pls_lab::source_problems::{
    gen_cnf, gen_posnae, gen_tricolored_mca, McaInstance, SourceBinding,
};

#[derive(Parser)]
#[command(
    name = "pls-lab",
    version,
    about = "Local search laboratory for weighted set problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance.
    Gen(GenArgs),
    /// Reduce a source instance to a set problem.
    Reduce(ReduceArgs),
    /// Run local search or a greedy algorithm on an instance.
    Solve(SolveArgs),
    /// Check feasibility, cost and local optimality of a solution.
    Verify(VerifyArgs),
    /// Run a randomized verification suite.
    Suite(SuiteArgs),
    /// Map a reduced solution back to the source.
    Pullback(PullbackArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GenProblem {
    Mca,
    Minca,
    Posnae,
    Cnf,
    Sp,
    Sc,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    problem: GenProblem,
    /// Constraint count for table sources (even).
    #[arg(long, default_value_t = 2)]
    constraints: usize,
    #[arg(long, default_value_t = 2)]
    domain: usize,
    #[arg(long, default_value_t = 5)]
    vars: usize,
    #[arg(long, default_value_t = 8)]
    clauses: usize,
    #[arg(long, default_value_t = 3)]
    clause_len: usize,
    #[arg(long, default_value_t = 2)]
    weight_low: u64,
    #[arg(long, default_value_t = 9)]
    weight_high: u64,
    #[arg(long, default_value_t = 0.0)]
    zero_fraction: f64,
    /// Close POSNAE instances over all variable pairs.
    #[arg(long)]
    all_pairs: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct OptionArgs {
    #[arg(long, value_enum, default_value_t = SchemeArg::Corrected)]
    scheme: SchemeArg,
    #[arg(long, value_enum, default_value_t = SeparationArg::TwoSided)]
    separation: SeparationArg,
    /// Medium triples weigh this many W.
    #[arg(long, default_value_t = 3)]
    medium_multiplier: u32,
    #[arg(long, value_enum, default_value_t = InventoryArg::Balanced)]
    inventory: InventoryArg,
    /// W used by the clique-cover reduction.
    #[arg(long, value_enum, default_value_t = SchemeArg::Corrected)]
    cc_weight: SchemeArg,
}

impl OptionArgs {
    fn options(&self) -> ReductionOptions {
        ReductionOptions {
            ts_scheme: match self.scheme {
                SchemeArg::Corrected => TsScheme::Corrected,
                SchemeArg::PaperLiteral => TsScheme::PaperLiteral,
            },
            ts_separation: match self.separation {
                SeparationArg::TwoSided => SeparationMode::TwoSided,
                SeparationArg::OneSided => SeparationMode::OneSided,
            },
            medium_multiplier: self.medium_multiplier,
            inventory: match self.inventory {
                InventoryArg::Balanced => InventoryMode::Balanced,
                InventoryArg::PaperFormula => InventoryMode::PaperFormula,
            },
            cc_weight: match self.cc_weight {
                SchemeArg::Corrected => CcWeight::Corrected,
                SchemeArg::PaperLiteral => CcWeight::PaperLiteral,
            },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Corrected,
    PaperLiteral,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeparationArg {
    TwoSided,
    OneSided,
}

#[derive(Clone, Copy, ValueEnum)]
enum InventoryArg {
    Balanced,
    PaperFormula,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long)]
    from: PathBuf,
    #[arg(long, value_parser = parse_reduction)]
    to: ReductionId,
    #[command(flatten)]
    options: OptionArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    LocalSearch,
    GreedyPacking,
    GreedyCover,
}

#[derive(Clone, Copy, ValueEnum)]
enum PivotArg {
    First,
    Best,
    Random,
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Exchange,
    SymmetricDifference,
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, value_enum, default_value_t = MetricArg::Exchange)]
    metric: MetricArg,
    #[arg(long, default_value_t = 1 << 22)]
    cap: usize,
}

impl SearchArgs {
    fn metric(&self) -> Metric {
        match self.metric {
            MetricArg::Exchange => Metric::Exchange,
            MetricArg::SymmetricDifference => Metric::SymmetricDifference,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    file: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::LocalSearch)]
    algo: Algo,
    #[arg(long, value_enum, default_value_t = PivotArg::First)]
    pivot: PivotArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long, default_value_t = 100_000)]
    budget: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    file: PathBuf,
    /// Solution text, e.g. "collection 1 3" or "assignment 1 2 2".
    #[arg(long)]
    solution: String,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Consistency,
    Pullback,
    Offset,
    Greedy,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, value_parser = parse_reduction)]
    reduction: ReductionId,
    #[arg(long, value_enum, default_value_t = SuiteArg::Pullback)]
    suite: SuiteArg,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    options: OptionArgs,
    #[arg(long, value_enum, default_value_t = PivotArg::First)]
    pivot: PivotArg,
    /// Start searches at the canonical solution instead of a random one.
    #[arg(long)]
    canonical_start: bool,
    #[arg(long)]
    vars: Option<usize>,
    #[arg(long)]
    clauses: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    constraints: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    domains: Option<Vec<usize>>,
    #[arg(long)]
    zero_fraction: Option<f64>,
    /// Also scan W3DM catalog fixpoints with the (2,12) neighborhood.
    #[arg(long)]
    pq_scan: bool,
    /// Write the report here; the JSON variant goes next to it with a .json suffix.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Print the JSON report instead of the text one.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PullbackArgs {
    #[arg(long, value_parser = parse_reduction)]
    reduction: ReductionId,
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    reduced: PathBuf,
    #[arg(long)]
    solution: String,
    #[command(flatten)]
    options: OptionArgs,
}

fn parse_reduction(s: &str) -> std::result::Result<ReductionId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Exit status: 0 when every assertion held, 1 on a counterexample.
enum Status {
    Ok,
    Counterexample,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pivot_rule(p: PivotArg, seed: u64) -> PivotRule {
    match p {
        PivotArg::First => PivotRule::FirstImprovement,
        PivotArg::Best => PivotRule::BestImprovement,
        PivotArg::Random => PivotRule::RandomImprovement { seed },
    }
}

fn gen(args: GenArgs) -> Result<Status> {
    let text = match args.problem {
        GenProblem::Mca | GenProblem::Minca => {
            let inst = gen_tricolored_mca(
                args.constraints,
                args.domain,
                args.weight_low,
                args.weight_high,
                args.zero_fraction,
                args.seed,
            )?;
            let sense = match args.problem {
                GenProblem::Minca => pls_lab::engine::Sense::Minimize,
                _ => pls_lab::engine::Sense::Maximize,
            };
            serialize_source(&inst.with_sense(sense))
        }
        GenProblem::Posnae => serialize_source(&gen_posnae(
            args.vars,
            args.clauses,
            args.all_pairs,
            args.weight_high,
            args.seed,
        )?),
        GenProblem::Cnf => serialize_source(&gen_cnf(
            args.vars,
            args.clauses,
            args.clause_len,
            args.weight_high,
            args.seed,
        )?),
        GenProblem::Sp => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            serialize_instance(&SetProblemInstance::Sp(random_sp(
                12,
                10,
                args.weight_high,
                &mut rng,
            )))
        }
        GenProblem::Sc => {
            let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
            serialize_instance(&SetProblemInstance::Sc(random_sc(
                12,
                10,
                args.weight_high,
                &mut rng,
            )))
        }
    };
    emit(args.out.as_ref(), &text)?;
    Ok(Status::Ok)
}

fn reduced_text(output: &ReductionOutput) -> String {
    let mut text = serialize_instance(&output.target);
    let o = &output.options;
    text.push_str(&format!("meta reduction {}\n", output.id));
    text.push_str(&format!("meta bigw {}\n", output.big_w));
    match output.cost_offset() {
        Ok(offset) => text.push_str(&format!("meta offset {offset}\n")),
        Err(_) => text.push_str("meta offset none\n"),
    }
    text.push_str(&format!("meta scheme {}\n", o.ts_scheme.name()));
    text.push_str(&format!("meta separation {}\n", o.ts_separation.name()));
    text.push_str(&format!("meta medium_multiplier {}\n", o.medium_multiplier));
    text.push_str(&format!("meta inventory {}\n", o.inventory.name()));
    text.push_str(&format!("meta cc_weight {}\n", o.cc_weight.name()));
    text
}

fn load_source(path: &Path) -> Result<McaInstance> {
    match parse_file(&read(path)?)?.document {
        Document::Source(s) => Ok(s),
        Document::Target(t) => Err(Error::Config(format!(
            "{} holds a {} instance, expected a source problem",
            path.display(),
            t.tag()
        ))),
    }
}

fn reduce_cmd(args: ReduceArgs) -> Result<Status> {
    let source = load_source(&args.from)?;
    let output = reduce(args.to, &source, args.options.options())?;
    emit(args.out.as_ref(), &reduced_text(&output))?;
    Ok(Status::Ok)
}

fn print_report(report: &pls_lab::engine::SearchReport<Solution>) {
    println!("start {} cost {}", report.start, report.start_cost);
    for (i, step) in report.trajectory.iter().enumerate() {
        println!("step {} {} cost {}", i + 1, step.description, step.cost);
    }
    println!(
        "final {} cost {} steps {} {}",
        report.final_solution,
        report.final_cost,
        report.steps,
        match report.terminated {
            Termination::LocalOpt => "local_opt",
            Termination::BudgetExhausted => "budget_exhausted",
        }
    );
}

struct AssignmentView<'a>(&'a pls_lab::source_problems::Assignment);

impl std::fmt::Display for AssignmentView<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_assignment(self.0))
    }
}

fn solve(args: SolveArgs) -> Result<Status> {
    let rule = pivot_rule(args.pivot, args.seed);
    match parse_file(&read(&args.file)?)?.document {
        Document::Source(source) => {
            let binding = SourceBinding { instance: &source };
            let report = local_search(&binding, binding.initial_solution()?, rule, args.budget)?;
            println!(
                "start {} cost {}",
                format_assignment(&report.start),
                report.start_cost
            );
            for (i, step) in report.trajectory.iter().enumerate() {
                println!("step {} {} cost {}", i + 1, step.description, step.cost);
            }
            println!(
                "final {} cost {} steps {}",
                AssignmentView(&report.final_solution),
                report.final_cost,
                report.steps
            );
            Ok(Status::Ok)
        }
        Document::Target(inst) => {
            let binding = SetBinding::new(&inst, args.search.k)
                .with_metric(args.search.metric())
                .with_cap(args.search.cap);
            match args.algo {
                Algo::LocalSearch => {
                    let report =
                        local_search(&binding, binding.initial_solution()?, rule, args.budget)?;
                    print_report(&report);
                }
                Algo::GreedyPacking | Algo::GreedyCover => {
                    let chosen = match (&inst, args.algo) {
                        (SetProblemInstance::Sp(sp), Algo::GreedyPacking) => greedy_packing(sp),
                        (SetProblemInstance::Sc(sc), Algo::GreedyCover) => greedy_cover(sc)?,
                        _ => {
                            return Err(Error::Config(format!(
                                "this algorithm does not apply to a {} instance",
                                inst.tag()
                            )))
                        }
                    };
                    let s = Solution::Collection(chosen);
                    println!("final {s} cost {}", inst.cost(&s)?);
                }
            }
            Ok(Status::Ok)
        }
    }
}

fn verify(args: VerifyArgs) -> Result<Status> {
    match parse_file(&read(&args.file)?)?.document {
        Document::Source(source) => {
            let a = parse_assignment(&args.solution)?;
            let cost = source.cost(&a)?;
            println!("feasible yes cost {cost}");
            match source.improving_flip(&a)? {
                None => {
                    println!(
                        "locally_optimal yes neighbors {}",
                        source.num_vars * (source.domain_size - 1)
                    );
                    Ok(Status::Ok)
                }
                Some((x, v, gain)) => {
                    println!(
                        "locally_optimal no flip variable {} to {} gains {gain}",
                        x + 1,
                        v + 1
                    );
                    Ok(Status::Counterexample)
                }
            }
        }
        Document::Target(inst) => {
            let s = parse_solution_for(&inst, &args.solution)?;
            if !inst.feasible(&s)? {
                println!("feasible no");
                return Ok(Status::Counterexample);
            }
            println!("feasible yes cost {}", inst.cost(&s)?);
            let binding = SetBinding::new(&inst, args.search.k)
                .with_metric(args.search.metric())
                .with_cap(args.search.cap);
            let cert = verify_local_optimum(&binding, &s, args.search.cap)?;
            match cert.witness {
                None => {
                    println!(
                        "locally_optimal yes neighbors {}",
                        cert.neighborhood_size_scanned
                    );
                    Ok(Status::Ok)
                }
                Some((w, c)) => {
                    println!("locally_optimal no witness {w} cost {c}");
                    Ok(Status::Counterexample)
                }
            }
        }
    }
}

fn suite(args: SuiteArgs) -> Result<Status> {
    let mut cfg = ExperimentConfig::for_reduction(args.reduction);
    let kind = match args.suite {
        SuiteArg::Consistency => SuiteKind::Consistency,
        SuiteArg::Pullback => SuiteKind::Pullback,
        SuiteArg::Offset => SuiteKind::Offset,
        SuiteArg::Greedy => SuiteKind::Greedy,
    };
    if kind == SuiteKind::Greedy {
        cfg.trials = 400;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    cfg.seed = args.seed;
    cfg.options = args.options.options();
    cfg.pivot = pivot_rule(args.pivot, args.seed);
    if args.canonical_start {
        cfg.start = StartMode::Canonical;
    }
    if let Some(v) = args.vars {
        cfg.num_vars = v;
    }
    if let Some(c) = args.clauses {
        cfg.num_clauses = c;
    }
    if let Some(c) = args.constraints {
        cfg.constraint_counts = c;
    }
    if let Some(d) = args.domains {
        cfg.domain_sizes = d;
    }
    if let Some(z) = args.zero_fraction {
        cfg.zero_fraction = z;
    }
    cfg.pq_scan = args.pq_scan;
    let report = run_suite(kind, &cfg)?;
    if let Some(path) = &args.report {
        emit(Some(path), &report.to_text())?;
        emit(Some(&path.with_extension("json")), &report.to_json())?;
    }
    if args.json {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    if report.summary.failed > 0 && report.observation_mode.is_none() {
        Ok(Status::Counterexample)
    } else {
        Ok(Status::Ok)
    }
}

fn pullback(args: PullbackArgs) -> Result<Status> {
    let source = load_source(&args.source)?;
    let reduced = parse_file(&read(&args.reduced)?)?;
    let Document::Target(target) = reduced.document else {
        return Err(Error::Config(
            "the reduced file holds a source problem".into(),
        ));
    };
    let mut options = args.options.options();
    if let Some(s) = reduced.meta.get("scheme") {
        options.ts_scheme = s.parse()?;
    }
    if let Some(s) = reduced.meta.get("cc_weight") {
        options.cc_weight = s.parse()?;
    }
    if let Some(s) = reduced.meta.get("inventory") {
        options.inventory = s.parse()?;
    }
    if let Some(s) = reduced.meta.get("medium_multiplier") {
        options.medium_multiplier = s
            .parse()
            .map_err(|_| Error::Config(format!("bad medium multiplier '{s}'")))?;
    }
    if let Some(s) = reduced.meta.get("separation") {
        options.ts_separation = match s.as_str() {
            "one_sided" => SeparationMode::OneSided,
            _ => SeparationMode::TwoSided,
        };
    }
    let output = reduce(args.reduction, &source, options)?;
    if output.target != target {
        return Err(Error::Config(
            "the reduced file does not match the reduction of the source".into(),
        ));
    }
    let s = parse_solution_for(&output.target, &args.solution)?;
    let verdict = output.is_consistent(&s)?;
    println!(
        "{} {}{}",
        verdict.predicate,
        if verdict.consistent { "yes" } else { "no" },
        verdict
            .violation
            .map(|v| format!(" ({v})"))
            .unwrap_or_default()
    );
    let a = output.pull_back(&s)?;
    println!("{} cost {}", format_assignment(&a), source.cost(&a)?);
    let source_opt = source.is_local_opt(&a)?;
    println!(
        "source_locally_optimal {}",
        if source_opt { "yes" } else { "no" }
    );
    let Some(k) = args.reduction.search_k() else {
        return Ok(Status::Ok);
    };
    let binding = SetBinding::new(&output.target, k);
    let target_opt = verify_local_optimum(&binding, &s, binding.cap)?.is_locally_optimal();
    println!(
        "target_locally_optimal {}",
        if target_opt { "yes" } else { "no" }
    );
    if target_opt && !source_opt {
        Ok(Status::Counterexample)
    } else {
        Ok(Status::Ok)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Reduce(a) => reduce_cmd(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Suite(a) => suite(a),
        Command::Pullback(a) => pullback(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Counterexample) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
