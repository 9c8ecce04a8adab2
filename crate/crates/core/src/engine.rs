//! Generic improvement-based local search.
//!
//! A [`ProblemBinding`] supplies feasibility, exact cost, a neighbor stream and a
//! canonical start. The engine only ever accepts strictly improving moves, so a
//! run either ends at a local optimum or when the step budget runs out.
//! [`verify_local_optimum`] scans the complete neighborhood and never passes
//! silently when the scan is cut short.

use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact, unbounded cost values.
pub type Cost = BigInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// True when `candidate` is strictly better than `current`.
    pub fn improves(self, candidate: &Cost, current: &Cost) -> bool {
        match self {
            Sense::Maximize => candidate > current,
            Sense::Minimize => candidate < current,
        }
    }

    /// Sign used in affine cost correspondences.
    pub fn sign(self) -> i32 {
        match self {
            Sense::Maximize => 1,
            Sense::Minimize => -1,
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Maximize => f.write_str("maximize"),
            Sense::Minimize => f.write_str("minimize"),
        }
    }
}

/// One candidate emitted by a neighbor stream; `kind` names the move family.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighbor<S> {
    pub kind: &'static str,
    pub solution: S,
}

impl<S> Neighbor<S> {
    pub fn new(kind: &'static str, solution: S) -> Self {
        Neighbor { kind, solution }
    }
}

pub type NeighborStream<'a, S> = Box<dyn Iterator<Item = Neighbor<S>> + 'a>;

/// The problem side of a local search: instance, objective, neighborhood and start.
///
/// Implementations must keep `cost` deterministic, emit only feasible
/// neighbors and return a feasible `initial_solution`.
pub trait ProblemBinding {
    type Solution: Clone + PartialEq + fmt::Debug;

    fn kind(&self) -> String;
    fn sense(&self) -> Sense;
    fn is_feasible(&self, solution: &Self::Solution) -> bool;
    fn cost(&self, solution: &Self::Solution) -> Result<Cost>;
    fn neighbors<'a>(
        &'a self,
        solution: &'a Self::Solution,
    ) -> Result<NeighborStream<'a, Self::Solution>>;
    fn initial_solution(&self) -> Result<Self::Solution>;

    /// Human readable move description, only called for accepted moves.
    fn describe_move(&self, _from: &Self::Solution, to: &Neighbor<Self::Solution>) -> String {
        to.kind.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PivotRule {
    #[default]
    FirstImprovement,
    /// Extremal cost; ties go to the earliest neighbor in enumeration order.
    BestImprovement,
    /// Uniform choice among all improving neighbors.
    RandomImprovement { seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub kind: String,
    pub description: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub description: String,
    pub cost: Cost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    LocalOpt,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchReport<S> {
    pub start: S,
    pub start_cost: Cost,
    pub trajectory: Vec<Step>,
    pub final_solution: S,
    pub final_cost: Cost,
    pub steps: usize,
    pub terminated: Termination,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    LocallyOptimal,
    Improvable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<S> {
    pub solution: S,
    pub cost: Cost,
    pub neighborhood_size_scanned: usize,
    pub witness: Option<(S, Cost)>,
    pub verdict: Verdict,
}

impl<S> Certificate<S> {
    pub fn is_locally_optimal(&self) -> bool {
        self.verdict == Verdict::LocallyOptimal
    }
}

fn check_start<B: ProblemBinding>(binding: &B, s: &B::Solution) -> Result<Cost> {
    if !binding.is_feasible(s) {
        return Err(Error::InfeasibleStart(format!(
            "{} solution {:?}",
            binding.kind(),
            s
        )));
    }
    binding.cost(s)
}

fn step_with<B: ProblemBinding>(
    binding: &B,
    s: &B::Solution,
    current: &Cost,
    rule: PivotRule,
    rng: &mut ChaCha8Rng,
) -> Result<Option<(Move, B::Solution, Cost)>> {
    let sense = binding.sense();
    let mut chosen: Option<(Neighbor<B::Solution>, Cost)> = None;
    let mut improving_seen = 0u64;

    for neighbor in binding.neighbors(s)? {
        debug_assert!(binding.is_feasible(&neighbor.solution));
        let cost = binding.cost(&neighbor.solution)?;
        if !sense.improves(&cost, current) {
            continue;
        }
        match rule {
            PivotRule::FirstImprovement => {
                chosen = Some((neighbor, cost));
                break;
            }
            PivotRule::BestImprovement => {
                let better = chosen
                    .as_ref()
                    .map_or(true, |(_, best)| sense.improves(&cost, best));
                if better {
                    chosen = Some((neighbor, cost));
                }
            }
            PivotRule::RandomImprovement { .. } => {
                // reservoir sampling over the improving neighbors
                improving_seen += 1;
                if rng.gen_range(0..improving_seen) == 0 {
                    chosen = Some((neighbor, cost));
                }
            }
        }
    }

    Ok(chosen.map(|(neighbor, cost)| {
        let mv = Move {
            kind: neighbor.kind.to_string(),
            description: binding.describe_move(s, &neighbor),
        };
        (mv, neighbor.solution, cost)
    }))
}

fn rng_for(rule: PivotRule) -> ChaCha8Rng {
    match rule {
        PivotRule::RandomImprovement { seed } => ChaCha8Rng::seed_from_u64(seed),
        _ => ChaCha8Rng::seed_from_u64(0),
    }
}

/// One call of the improve routine: a strictly better neighbor chosen by `rule`,
/// or `None` when `s` has no better neighbor.
pub fn improvement_step<B: ProblemBinding>(
    binding: &B,
    s: &B::Solution,
    rule: PivotRule,
) -> Result<Option<(Move, B::Solution)>> {
    let current = check_start(binding, s)?;
    let mut rng = rng_for(rule);
    Ok(step_with(binding, s, &current, rule, &mut rng)?.map(|(mv, next, _)| (mv, next)))
}

/// Repeats improvement steps until none applies or `budget` moves were accepted.
pub fn local_search<B: ProblemBinding>(
    binding: &B,
    start: B::Solution,
    rule: PivotRule,
    budget: usize,
) -> Result<SearchReport<B::Solution>> {
    let start_cost = check_start(binding, &start)?;
    let mut rng = rng_for(rule);
    let mut current = start.clone();
    let mut current_cost = start_cost.clone();
    let mut trajectory = Vec::new();

    let terminated = loop {
        let Some((mv, next, cost)) = step_with(binding, &current, &current_cost, rule, &mut rng)?
        else {
            break Termination::LocalOpt;
        };
        if trajectory.len() >= budget {
            break Termination::BudgetExhausted;
        }
        trajectory.push(Step {
            description: mv.description,
            cost: cost.clone(),
        });
        current = next;
        current_cost = cost;
    };

    Ok(SearchReport {
        start,
        start_cost,
        steps: trajectory.len(),
        trajectory,
        final_solution: current,
        final_cost: current_cost,
        terminated,
    })
}

/// Exhaustive scan of the neighborhood of `s`.
///
/// Fails with [`Error::NeighborhoodTooLarge`] once more than `cap` neighbors
/// have been enumerated without finding an improvement.
pub fn verify_local_optimum<B: ProblemBinding>(
    binding: &B,
    s: &B::Solution,
    cap: usize,
) -> Result<Certificate<B::Solution>> {
    let cost = check_start(binding, s)?;
    let sense = binding.sense();
    let mut scanned = 0usize;
    for neighbor in binding.neighbors(s)? {
        scanned += 1;
        if scanned > cap {
            return Err(Error::NeighborhoodTooLarge { limit: cap });
        }
        let neighbor_cost = binding.cost(&neighbor.solution)?;
        if sense.improves(&neighbor_cost, &cost) {
            return Ok(Certificate {
                solution: s.clone(),
                cost,
                neighborhood_size_scanned: scanned,
                witness: Some((neighbor.solution, neighbor_cost)),
                verdict: Verdict::Improvable,
            });
        }
    }
    Ok(Certificate {
        solution: s.clone(),
        cost,
        neighborhood_size_scanned: scanned,
        witness: None,
        verdict: Verdict::LocallyOptimal,
    })
}

/// True when costs along the report strictly improve in the objective sense.
pub fn trajectory_is_monotone<S>(report: &SearchReport<S>, sense: Sense) -> bool {
    let mut previous = &report.start_cost;
    for step in &report.trajectory {
        if !sense.improves(&step.cost, previous) {
            return false;
        }
        previous = &step.cost;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integers 0..=limit on a line, cost = value, neighbors = value ± 1.
    struct Line {
        limit: i64,
        sense: Sense,
    }

    impl ProblemBinding for Line {
        type Solution = i64;

        fn kind(&self) -> String {
            "line".into()
        }
        fn sense(&self) -> Sense {
            self.sense
        }
        fn is_feasible(&self, s: &i64) -> bool {
            (0..=self.limit).contains(s)
        }
        fn cost(&self, s: &i64) -> Result<Cost> {
            Ok(Cost::from(*s))
        }
        fn neighbors<'a>(&'a self, s: &'a i64) -> Result<NeighborStream<'a, i64>> {
            let s = *s;
            Ok(Box::new(
                [s - 1, s + 1]
                    .into_iter()
                    .filter(move |v| (0..=self.limit).contains(v))
                    .map(|v| Neighbor::new("shift", v)),
            ))
        }
        fn initial_solution(&self) -> Result<i64> {
            Ok(0)
        }
    }

    #[test]
    fn climbs_to_the_end() {
        let line = Line {
            limit: 5,
            sense: Sense::Maximize,
        };
        let report = local_search(&line, 0, PivotRule::FirstImprovement, 100).unwrap();
        assert_eq!(report.final_solution, 5);
        assert_eq!(report.steps, 5);
        assert_eq!(report.terminated, Termination::LocalOpt);
        assert!(trajectory_is_monotone(&report, Sense::Maximize));
    }

    #[test]
    fn zero_budget() {
        let line = Line {
            limit: 5,
            sense: Sense::Maximize,
        };
        let report = local_search(&line, 2, PivotRule::FirstImprovement, 0).unwrap();
        assert_eq!(report.steps, 0);
        assert_eq!(report.terminated, Termination::BudgetExhausted);
        let report = local_search(&line, 5, PivotRule::FirstImprovement, 0).unwrap();
        assert_eq!(report.terminated, Termination::LocalOpt);
    }

    #[test]
    fn infeasible_start_is_rejected() {
        let line = Line {
            limit: 5,
            sense: Sense::Minimize,
        };
        assert!(matches!(
            local_search(&line, 9, PivotRule::FirstImprovement, 3),
            Err(Error::InfeasibleStart(_))
        ));
        assert!(matches!(
            improvement_step(&line, &-1, PivotRule::BestImprovement),
            Err(Error::InfeasibleStart(_))
        ));
    }

    #[test]
    fn cap_is_never_a_silent_pass() {
        let line = Line {
            limit: 5,
            sense: Sense::Minimize,
        };
        // 0 is optimal for minimize but its single neighbor exceeds a zero cap
        assert_eq!(
            verify_local_optimum(&line, &0, 0),
            Err(Error::NeighborhoodTooLarge { limit: 0 })
        );
        let cert = verify_local_optimum(&line, &0, 10).unwrap();
        assert!(cert.is_locally_optimal());
        assert_eq!(cert.neighborhood_size_scanned, 1);
    }

    #[test]
    fn random_rule_is_reproducible() {
        let line = Line {
            limit: 50,
            sense: Sense::Maximize,
        };
        let rule = PivotRule::RandomImprovement { seed: 7 };
        let a = local_search(&line, 3, rule, 100).unwrap();
        let b = local_search(&line, 3, rule, 100).unwrap();
        assert_eq!(a, b);
    }
}
