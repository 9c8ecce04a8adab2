//! Generalized satisfiability sources: table constraints (max and min),
//! positive not-all-equal 2-clauses and weighted CNF.
//!
//! Assignments store 0-based value indices. For the binary problems index 0
//! is value 1 ("false" for CNF) and index 1 is value 2
//! ("true"). The canonical initial assignment sets every index to 0.

use std::fmt;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{Cost, Neighbor, NeighborStream, ProblemBinding, Sense};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Blue,
    Red,
    White,
}

impl Color {
    pub const ALL: [Color; 3] = [Color::Blue, Color::Red, Color::White];

    /// Coordinate of the matching this color owns: boys, girls, homes.
    pub fn coordinate(self) -> usize {
        match self {
            Color::Blue => 0,
            Color::Red => 1,
            Color::White => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Blue => "blue",
            Color::Red => "red",
            Color::White => "white",
        }
    }

    pub fn from_name(s: &str) -> Option<Color> {
        match s {
            "blue" => Some(Color::Blue),
            "red" => Some(Color::Red),
            "white" => Some(Color::White),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantics {
    Table,
    Nae,
    CnfDisjunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintBody {
    /// Dense table over `[r]^p`, first scope variable most significant.
    Table(Vec<Cost>),
    /// Pays the weight when the two scope variables differ.
    Nae(Cost),
    /// Pays the weight when some literal is satisfied; `negated[k]` flips scope[k].
    Clause { negated: Vec<bool>, weight: Cost },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub scope: Vec<usize>,
    pub body: ConstraintBody,
}

impl Constraint {
    pub fn table(scope: Vec<usize>, table: Vec<Cost>) -> Self {
        Constraint {
            scope,
            body: ConstraintBody::Table(table),
        }
    }

    pub fn nae(x: usize, y: usize, weight: impl Into<Cost>) -> Self {
        Constraint {
            scope: vec![x, y],
            body: ConstraintBody::Nae(weight.into()),
        }
    }

    /// Literals as `(variable, negated)`.
    pub fn clause(literals: &[(usize, bool)], weight: impl Into<Cost>) -> Self {
        Constraint {
            scope: literals.iter().map(|&(v, _)| v).collect(),
            body: ConstraintBody::Clause {
                negated: literals.iter().map(|&(_, n)| n).collect(),
                weight: weight.into(),
            },
        }
    }

    /// Weight of the constraint under the values of its scope.
    pub fn evaluate(&self, values: &[usize], domain_size: usize) -> Cost {
        match &self.body {
            ConstraintBody::Table(table) => table[table_index(values, domain_size)].clone(),
            ConstraintBody::Nae(w) => {
                if values[0] != values[1] {
                    w.clone()
                } else {
                    Cost::zero()
                }
            }
            ConstraintBody::Clause { negated, weight } => {
                let satisfied = values.iter().zip(negated).any(|(&v, &neg)| (v == 1) != neg);
                if satisfied {
                    weight.clone()
                } else {
                    Cost::zero()
                }
            }
        }
    }

    /// Sum of every weight the constraint can pay (all table rows for tables).
    pub fn total_weight(&self) -> Cost {
        match &self.body {
            ConstraintBody::Table(t) => t.iter().sum(),
            ConstraintBody::Nae(w) => w.clone(),
            ConstraintBody::Clause { weight, .. } => weight.clone(),
        }
    }

    pub fn max_weight(&self) -> Cost {
        match &self.body {
            ConstraintBody::Table(t) => t.iter().max().cloned().unwrap_or_default(),
            ConstraintBody::Nae(w) => w.clone(),
            ConstraintBody::Clause { weight, .. } => weight.clone(),
        }
    }
}

pub fn table_index(values: &[usize], domain_size: usize) -> usize {
    values.iter().fold(0, |acc, &v| acc * domain_size + v)
}

/// Inverse of [`table_index`].
pub fn table_values(mut index: usize, arity: usize, domain_size: usize) -> Vec<usize> {
    let mut values = vec![0; arity];
    for slot in values.iter_mut().rev() {
        *slot = index % domain_size;
        index /= domain_size;
    }
    values
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    pub fn uniform(num_vars: usize, value: usize) -> Self {
        Assignment(vec![value; num_vars])
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn with(&self, var: usize, value: usize) -> Self {
        let mut next = self.clone();
        next.0[var] = value;
        next
    }

    /// Every assignment over `num_vars` variables, in lexicographic order.
    pub fn enumerate(num_vars: usize, domain_size: usize) -> impl Iterator<Item = Assignment> {
        let total = domain_size.pow(num_vars as u32);
        (0..total).map(move |i| Assignment(table_values(i, num_vars, domain_size)))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A constraint assignment instance. Covers MCA, MINCA (`sense = Minimize`),
/// POSNAE (`Nae`) and CNF (`CnfDisjunction`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McaInstance {
    pub num_vars: usize,
    pub domain_size: usize,
    pub constraints: Vec<Constraint>,
    pub occurrence_bound: Option<usize>,
    pub sense: Sense,
    pub semantics: Semantics,
    pub coloring: Option<Vec<Color>>,
    /// 1-based position of every variable.
    pub order: Vec<usize>,
    pub max_clause_len: Option<usize>,
}

impl McaInstance {
    pub fn new(
        num_vars: usize,
        domain_size: usize,
        semantics: Semantics,
        sense: Sense,
        constraints: Vec<Constraint>,
    ) -> Result<Self> {
        let inst = McaInstance {
            num_vars,
            domain_size,
            constraints,
            occurrence_bound: None,
            sense,
            semantics,
            coloring: None,
            order: (1..=num_vars).collect(),
            max_clause_len: None,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn posnae(num_vars: usize, constraints: Vec<Constraint>) -> Result<Self> {
        Self::new(num_vars, 2, Semantics::Nae, Sense::Maximize, constraints)
    }

    pub fn cnf(num_vars: usize, constraints: Vec<Constraint>) -> Result<Self> {
        Self::new(
            num_vars,
            2,
            Semantics::CnfDisjunction,
            Sense::Maximize,
            constraints,
        )
    }

    pub fn with_coloring(mut self, coloring: Vec<Color>) -> Result<Self> {
        self.coloring = Some(coloring);
        self.validate()?;
        Ok(self)
    }

    pub fn with_sense(mut self, sense: Sense) -> Self {
        self.sense = sense;
        self
    }

    pub fn with_occurrence_bound(mut self, q: usize) -> Result<Self> {
        self.occurrence_bound = Some(q);
        self.validate()?;
        Ok(self)
    }

    pub fn with_max_clause_len(mut self, h: usize) -> Result<Self> {
        self.max_clause_len = Some(h);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        if self.domain_size < 2 {
            return bad(format!("domain size {} < 2", self.domain_size));
        }
        if self.order.len() != self.num_vars {
            return bad("variable order has wrong length".into());
        }
        let mut seen = vec![false; self.num_vars];
        for &p in &self.order {
            if p == 0 || p > self.num_vars || seen[p - 1] {
                return bad("variable order is not a permutation".into());
            }
            seen[p - 1] = true;
        }
        if matches!(self.semantics, Semantics::Nae | Semantics::CnfDisjunction)
            && self.domain_size != 2
        {
            return bad("binary semantics need domain size 2".into());
        }
        for (ci, c) in self.constraints.iter().enumerate() {
            let mut scope = c.scope.clone();
            scope.sort_unstable();
            scope.dedup();
            if scope.len() != c.scope.len() {
                return bad(format!("constraint {} repeats a variable", ci + 1));
            }
            if let Some(&v) = c.scope.iter().find(|&&v| v >= self.num_vars) {
                return bad(format!(
                    "constraint {} uses unknown variable {}",
                    ci + 1,
                    v + 1
                ));
            }
            match (&c.body, self.semantics) {
                (ConstraintBody::Table(t), Semantics::Table) => {
                    if t.len() != self.domain_size.pow(c.scope.len() as u32) {
                        return bad(format!(
                            "constraint {} table has {} entries",
                            ci + 1,
                            t.len()
                        ));
                    }
                    if t.iter().any(|w| w < &Cost::zero()) {
                        return bad(format!("constraint {} has a negative weight", ci + 1));
                    }
                }
                (ConstraintBody::Nae(w), Semantics::Nae) => {
                    if c.scope.len() != 2 {
                        return bad(format!("nae clause {} must have two variables", ci + 1));
                    }
                    if w < &Cost::zero() {
                        return bad(format!("clause {} has a negative weight", ci + 1));
                    }
                }
                (ConstraintBody::Clause { negated, weight }, Semantics::CnfDisjunction) => {
                    if negated.len() != c.scope.len() || c.scope.is_empty() {
                        return bad(format!("clause {} is malformed", ci + 1));
                    }
                    if let Some(h) = self.max_clause_len {
                        if c.scope.len() > h {
                            return bad(format!("clause {} longer than {}", ci + 1, h));
                        }
                    }
                    if weight < &Cost::zero() {
                        return bad(format!("clause {} has a negative weight", ci + 1));
                    }
                }
                _ => return bad(format!("constraint {} does not match semantics", ci + 1)),
            }
        }
        if let Some(q) = self.occurrence_bound {
            if let Some(v) = (0..self.num_vars).find(|&v| self.occurrences(v) > q) {
                return bad(format!("variable {} appears more than {} times", v + 1, q));
            }
        }
        if let Some(colors) = &self.coloring {
            if colors.len() != self.num_vars {
                return bad("coloring has wrong length".into());
            }
        }
        Ok(())
    }

    pub fn occurrences(&self, var: usize) -> usize {
        self.constraints
            .iter()
            .filter(|c| c.scope.contains(&var))
            .count()
    }

    /// Constraint indices that mention `var`, in constraint order.
    pub fn constraints_of(&self, var: usize) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.scope.contains(&var))
            .map(|(i, _)| i)
            .collect()
    }

    /// 1-based occurrence number of `var` in constraint `ci` w.r.t. constraint order.
    pub fn occurrence_number(&self, var: usize, ci: usize) -> Option<usize> {
        self.constraints_of(var)
            .iter()
            .position(|&c| c == ci)
            .map(|p| p + 1)
    }

    /// Checks the profile the W3DM, SP and SC reductions rely on.
    pub fn check_tricolored(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidInstance(format!("not tri-colored: {msg}")));
        if self.semantics != Semantics::Table {
            return bad("needs table constraints");
        }
        let Some(colors) = &self.coloring else {
            return bad("no coloring");
        };
        if self.num_vars % 3 != 0 {
            return bad("variable count not divisible by 3");
        }
        for color in Color::ALL {
            if colors.iter().filter(|&&c| c == color).count() != self.num_vars / 3 {
                return bad("color classes differ in size");
            }
        }
        for c in &self.constraints {
            if c.scope.len() != 3 {
                return bad("constraint without three variables");
            }
            let mut cs: Vec<Color> = c.scope.iter().map(|&v| colors[v]).collect();
            cs.sort();
            cs.dedup();
            if cs.len() != 3 {
                return bad("constraint repeats a color");
            }
        }
        if (0..self.num_vars).any(|v| self.occurrences(v) != 2) {
            return bad("a variable does not appear exactly twice");
        }
        Ok(())
    }

    /// Sum over all constraints of every weight they can pay.
    pub fn total_weight(&self) -> Cost {
        self.constraints.iter().map(Constraint::total_weight).sum()
    }

    pub fn initial_assignment(&self) -> Assignment {
        Assignment::uniform(self.num_vars, 0)
    }

    fn check_assignment(&self, a: &Assignment) -> Result<()> {
        if a.len() != self.num_vars {
            return Err(Error::PartialAssignment {
                expected: self.num_vars,
                got: a.len(),
            });
        }
        if let Some(v) = a.0.iter().find(|&&v| v >= self.domain_size) {
            return Err(Error::Infeasible(format!(
                "value index {v} outside domain of size {}",
                self.domain_size
            )));
        }
        Ok(())
    }

    pub fn cost(&self, a: &Assignment) -> Result<Cost> {
        self.check_assignment(a)?;
        let mut total = Cost::zero();
        let mut values = Vec::with_capacity(4);
        for c in &self.constraints {
            values.clear();
            values.extend(c.scope.iter().map(|&v| a.0[v]));
            total += c.evaluate(&values, self.domain_size);
        }
        Ok(total)
    }

    /// All assignments at Hamming distance one: `num_vars * (r - 1)` of them.
    pub fn flip_neighbors<'a>(
        &'a self,
        a: &'a Assignment,
    ) -> impl Iterator<Item = Assignment> + 'a {
        (0..self.num_vars).flat_map(move |var| {
            (0..self.domain_size)
                .filter(move |&value| value != a.0[var])
                .map(move |value| a.with(var, value))
        })
    }

    /// Exhaustive 1-flip scan under the instance's objective sense.
    pub fn is_local_opt(&self, a: &Assignment) -> Result<bool> {
        Ok(self.improving_flip(a)?.is_none())
    }

    /// First improving flip as `(variable, new value, gain)`.
    pub fn improving_flip(&self, a: &Assignment) -> Result<Option<(usize, usize, Cost)>> {
        let current = self.cost(a)?;
        for var in 0..self.num_vars {
            for value in 0..self.domain_size {
                if value == a.0[var] {
                    continue;
                }
                let c = self.cost(&a.with(var, value))?;
                if self.sense.improves(&c, &current) {
                    let gain = (&c - &current) * self.sense.sign();
                    return Ok(Some((var, value, gain)));
                }
            }
        }
        Ok(None)
    }

    /// Adds `shift` to every table entry; the improving-flip relation is unchanged.
    pub fn shift_tables(&self, shift: &Cost) -> Self {
        let mut next = self.clone();
        for c in &mut next.constraints {
            match &mut c.body {
                ConstraintBody::Table(t) => t.iter_mut().for_each(|w| *w += shift),
                ConstraintBody::Nae(w) => *w += shift,
                ConstraintBody::Clause { weight, .. } => *weight += shift,
            }
        }
        next
    }
}

/// Binds a source instance to the search engine with the 1-flip neighborhood.
pub struct SourceBinding<'a> {
    pub instance: &'a McaInstance,
}

impl<'a> ProblemBinding for SourceBinding<'a> {
    type Solution = Assignment;

    fn kind(&self) -> String {
        format!("{:?}", self.instance.semantics).to_lowercase()
    }

    fn sense(&self) -> Sense {
        self.instance.sense
    }

    fn is_feasible(&self, a: &Assignment) -> bool {
        self.instance.check_assignment(a).is_ok()
    }

    fn cost(&self, a: &Assignment) -> Result<Cost> {
        self.instance.cost(a)
    }

    fn neighbors<'b>(&'b self, a: &'b Assignment) -> Result<NeighborStream<'b, Assignment>> {
        Ok(Box::new(
            self.instance
                .flip_neighbors(a)
                .map(|n| Neighbor::new("flip", n)),
        ))
    }

    fn initial_solution(&self) -> Result<Assignment> {
        Ok(self.instance.initial_assignment())
    }
}

/// Random tri-colored (3, 2, r) instance with `m` constraints.
///
/// Variables `0..m/2` are blue, `m/2..m` red and `m..3m/2` white; every scope
/// is ordered (blue, red, white). Non-zero entries are drawn from
/// `[weight_low, weight_high]`; each entry is zeroed with probability
/// `zero_fraction`.
pub fn gen_tricolored_mca(
    m: usize,
    r: usize,
    weight_low: u64,
    weight_high: u64,
    zero_fraction: f64,
    seed: u64,
) -> Result<McaInstance> {
    if m == 0 || m % 2 != 0 {
        return Err(Error::Config(format!(
            "constraint count {m} must be even and positive"
        )));
    }
    if weight_low < 2 || weight_high < weight_low {
        return Err(Error::Config(format!(
            "weight range [{weight_low}, {weight_high}] must satisfy 2 <= low <= high"
        )));
    }
    if r < 2 {
        return Err(Error::Config("domain size must be at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class = m / 2;
    let num_vars = 3 * class;
    let mut slots: Vec<Vec<usize>> = Vec::with_capacity(3);
    for color in 0..3 {
        let mut s: Vec<usize> = (0..class)
            .flat_map(|v| [color * class + v, color * class + v])
            .collect();
        s.shuffle(&mut rng);
        slots.push(s);
    }
    let entries = r.pow(3);
    let constraints = (0..m)
        .map(|i| {
            let table = (0..entries)
                .map(|_| {
                    if rng.gen_bool(zero_fraction.clamp(0.0, 1.0)) {
                        Cost::zero()
                    } else {
                        Cost::from(rng.gen_range(weight_low..=weight_high))
                    }
                })
                .collect();
            Constraint::table(vec![slots[0][i], slots[1][i], slots[2][i]], table)
        })
        .collect();
    let coloring = (0..num_vars).map(|v| Color::ALL[v / class]).collect();
    McaInstance::new(num_vars, r, Semantics::Table, Sense::Maximize, constraints)?
        .with_coloring(coloring)?
        .with_occurrence_bound(2)
}

/// Random POSNAE instance over distinct variable pairs.
///
/// With `all_pairs`, every pair missing from the sample is added with weight 0.
pub fn gen_posnae(
    num_vars: usize,
    num_clauses: usize,
    all_pairs: bool,
    weight_high: u64,
    seed: u64,
) -> Result<McaInstance> {
    if num_vars < 2 {
        return Err(Error::Config("POSNAE needs at least two variables".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = (0..num_vars)
        .flat_map(|x| ((x + 1)..num_vars).map(move |y| (x, y)))
        .collect();
    if num_clauses > pairs.len() {
        return Err(Error::Config(format!(
            "{num_clauses} clauses exceed the {} distinct pairs",
            pairs.len()
        )));
    }
    pairs.shuffle(&mut rng);
    let (chosen, rest) = pairs.split_at(num_clauses);
    let mut constraints: Vec<Constraint> = chosen
        .iter()
        .map(|&(x, y)| Constraint::nae(x, y, rng.gen_range(1..=weight_high.max(1))))
        .collect();
    if all_pairs {
        let mut missing = rest.to_vec();
        missing.sort_unstable();
        constraints.extend(missing.into_iter().map(|(x, y)| Constraint::nae(x, y, 0)));
    }
    McaInstance::posnae(num_vars, constraints)
}

/// Random CNF instance; clause lengths uniform in `1..=min(h, num_vars)`.
pub fn gen_cnf(
    num_vars: usize,
    num_clauses: usize,
    max_clause_len: usize,
    weight_high: u64,
    seed: u64,
) -> Result<McaInstance> {
    if max_clause_len < 1 {
        return Err(Error::Config(
            "maximum clause length must be at least 1".into(),
        ));
    }
    if num_vars < 1 {
        return Err(Error::Config("CNF needs at least one variable".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars: Vec<usize> = (0..num_vars).collect();
    let constraints = (0..num_clauses)
        .map(|_| {
            let len = rng.gen_range(1..=max_clause_len.min(num_vars));
            let mut scope: Vec<usize> = vars.choose_multiple(&mut rng, len).copied().collect();
            scope.sort_unstable();
            let literals: Vec<(usize, bool)> =
                scope.into_iter().map(|v| (v, rng.gen_bool(0.5))).collect();
            Constraint::clause(&literals, rng.gen_range(1..=weight_high.max(1)))
        })
        .collect();
    McaInstance::cnf(num_vars, constraints)?.with_max_clause_len(max_clause_len)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> Cost {
        Cost::from(v)
    }

    /// X = {x, y, z}, r = 2, C1 pays 2 on (1,1,1) and 5 on (2,2,2), C2 pays 3 on (2,2,2).
    pub(crate) fn i0() -> McaInstance {
        let mut t1 = vec![c(0); 8];
        t1[0] = c(2);
        t1[7] = c(5);
        let mut t2 = vec![c(0); 8];
        t2[7] = c(3);
        McaInstance::new(
            3,
            2,
            Semantics::Table,
            Sense::Maximize,
            vec![
                Constraint::table(vec![0, 1, 2], t1),
                Constraint::table(vec![0, 1, 2], t2),
            ],
        )
        .unwrap()
        .with_coloring(vec![Color::Blue, Color::Red, Color::White])
        .unwrap()
    }

    #[test]
    fn table_cost_of_i0() {
        assert_eq!(i0().cost(&Assignment(vec![1, 1, 1])).unwrap(), c(8));
        assert_eq!(i0().cost(&Assignment(vec![0, 0, 0])).unwrap(), c(2));
        assert!(i0().check_tricolored().is_ok());
    }

    #[test]
    fn nae_and_cnf_costs() {
        let i1 = McaInstance::posnae(2, vec![Constraint::nae(0, 1, 3)]).unwrap();
        assert_eq!(i1.cost(&Assignment(vec![0, 0])).unwrap(), c(0));
        assert_eq!(i1.cost(&Assignment(vec![0, 1])).unwrap(), c(3));
        // x or not y
        let i2 =
            McaInstance::cnf(2, vec![Constraint::clause(&[(0, false), (1, true)], 3)]).unwrap();
        assert_eq!(i2.cost(&Assignment(vec![0, 1])).unwrap(), c(0));
        assert_eq!(i2.cost(&Assignment(vec![1, 1])).unwrap(), c(3));
    }

    #[test]
    fn partial_assignment_is_an_error() {
        assert!(matches!(
            i0().cost(&Assignment(vec![0, 0])),
            Err(Error::PartialAssignment {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn flip_neighbor_counts() {
        let inst = i0();
        assert_eq!(inst.flip_neighbors(&Assignment(vec![0, 0, 0])).count(), 3);
        let ternary = McaInstance::new(2, 3, Semantics::Table, Sense::Maximize, vec![]).unwrap();
        assert_eq!(ternary.flip_neighbors(&Assignment(vec![0, 2])).count(), 4);
        let i1 = McaInstance::posnae(2, vec![Constraint::nae(0, 1, 3)]).unwrap();
        let costs: Vec<Cost> = i1
            .flip_neighbors(&Assignment(vec![0, 0]))
            .map(|a| i1.cost(&a).unwrap())
            .collect();
        assert_eq!(costs, vec![c(3), c(3)]);
    }

    #[test]
    fn local_optimality_of_source() {
        let i1 = McaInstance::posnae(2, vec![Constraint::nae(0, 1, 3)]).unwrap();
        assert!(i1.is_local_opt(&Assignment(vec![0, 1])).unwrap());
        assert!(!i1.is_local_opt(&Assignment(vec![0, 0])).unwrap());
        let zero = McaInstance::new(
            1,
            3,
            Semantics::Table,
            Sense::Maximize,
            vec![Constraint::table(vec![0], vec![c(0); 3])],
        )
        .unwrap();
        for v in 0..3 {
            assert!(zero.is_local_opt(&Assignment(vec![v])).unwrap());
        }
    }

    #[test]
    fn tricolored_generator_shape() {
        let two = gen_tricolored_mca(2, 2, 2, 9, 0.0, 1).unwrap();
        assert_eq!(two.num_vars, 3);
        let mut s0 = two.constraints[0].scope.clone();
        let mut s1 = two.constraints[1].scope.clone();
        s0.sort();
        s1.sort();
        assert_eq!(s0, s1);

        let four = gen_tricolored_mca(4, 2, 2, 9, 0.3, 5).unwrap();
        assert_eq!(four.num_vars, 6);
        for con in &four.constraints {
            let ConstraintBody::Table(t) = &con.body else {
                panic!()
            };
            assert_eq!(t.len(), 8);
        }
        four.check_tricolored().unwrap();
        assert_eq!(four, gen_tricolored_mca(4, 2, 2, 9, 0.3, 5).unwrap());
        assert!(gen_tricolored_mca(3, 2, 2, 9, 0.0, 5).is_err());
    }

    #[test]
    fn posnae_and_cnf_generators() {
        let one = gen_posnae(2, 1, false, 10, 3).unwrap();
        assert_eq!(one.constraints.len(), 1);
        assert_eq!(one.constraints[0].scope.len(), 2);
        let closed = gen_posnae(3, 1, true, 10, 3).unwrap();
        assert_eq!(closed.constraints.len(), 3);
        let cnf = gen_cnf(4, 3, 3, 10, 3).unwrap();
        assert_eq!(cnf.constraints.len(), 3);
        assert!(cnf
            .constraints
            .iter()
            .all(|c| (1..=3).contains(&c.scope.len())));
        assert!(gen_cnf(4, 3, 0, 10, 3).is_err());
    }
}
