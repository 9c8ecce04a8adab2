//! Gadget reductions from the constraint problems to the set problems.
//!
//! Every reduction keeps a copy of its source so that pull-back, encoding and
//! consistency checks need nothing beyond the [`ReductionOutput`].

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::engine::{Cost, Neighbor, NeighborStream, ProblemBinding, Sense};
use crate::error::{Error, Result};
use crate::set_problems::{
    pq_distance, CcInstance, HsInstance, IpInstance, SbInstance, ScInstance, SeparationMode,
    SetProblemInstance, Solution, SpInstance, SspInstance, TsInstance, W3dmInstance,
    WeightedCollection, X3cInstance,
};
use crate::source_problems::{
    table_index, table_values, Assignment, Color, ConstraintBody, McaInstance, Semantics,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionId {
    W3dm,
    X3c,
    Sp,
    Ssp,
    Sc,
    Ts,
    Sb,
    Hs,
    Ip,
    Cc,
}

impl ReductionId {
    pub const ALL: [ReductionId; 10] = [
        ReductionId::W3dm,
        ReductionId::X3c,
        ReductionId::Sp,
        ReductionId::Ssp,
        ReductionId::Sc,
        ReductionId::Ts,
        ReductionId::Sb,
        ReductionId::Hs,
        ReductionId::Ip,
        ReductionId::Cc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReductionId::W3dm => "w3dm",
            ReductionId::X3c => "x3c",
            ReductionId::Sp => "sp",
            ReductionId::Ssp => "ssp",
            ReductionId::Sc => "sc",
            ReductionId::Ts => "ts",
            ReductionId::Sb => "sb",
            ReductionId::Hs => "hs",
            ReductionId::Ip => "ip",
            ReductionId::Cc => "cc",
        }
    }

    /// Semantics the source instance must have.
    pub fn source_semantics(self) -> Semantics {
        match self {
            ReductionId::W3dm | ReductionId::X3c | ReductionId::Sp | ReductionId::Sc => {
                Semantics::Table
            }
            ReductionId::Ssp | ReductionId::Ts | ReductionId::Ip => Semantics::Nae,
            ReductionId::Sb | ReductionId::Hs | ReductionId::Cc => Semantics::CnfDisjunction,
        }
    }

    /// Objective sense the source instance must have.
    pub fn source_sense(self) -> Sense {
        match self {
            ReductionId::Sc => Sense::Minimize,
            _ => Sense::Maximize,
        }
    }

    /// k of the k-differ neighborhood the consistency argument uses; `None`
    /// means the W3DM move catalog.
    pub fn search_k(self) -> Option<usize> {
        match self {
            ReductionId::W3dm | ReductionId::X3c => None,
            ReductionId::Sp | ReductionId::Sc => Some(2),
            _ => Some(1),
        }
    }

    pub fn predicate(self) -> &'static str {
        match self {
            ReductionId::W3dm | ReductionId::X3c => "standard_assignment",
            ReductionId::Sp | ReductionId::Sc => "set_consistent",
            ReductionId::Ssp => "always_consistent",
            ReductionId::Ts => "positive_element_consistent",
            ReductionId::Sb => "single_set_consistent",
            ReductionId::Hs | ReductionId::Cc => "element_consistent",
            ReductionId::Ip => "position_consistent",
        }
    }
}

impl fmt::Display for ReductionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReductionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ReductionId::ALL
            .into_iter()
            .find(|id| id.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown reduction '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TsScheme {
    /// 1 on complementary pairs, W+1 on every other pair, plus the clause
    /// weight on pairs that satisfy a clause.
    #[default]
    Corrected,
    /// Clause pairs W+1+w, same-index pairs without a clause W+1, else 1.
    PaperLiteral,
}

impl TsScheme {
    pub fn name(self) -> &'static str {
        match self {
            TsScheme::Corrected => "corrected",
            TsScheme::PaperLiteral => "paper_literal",
        }
    }
}

impl FromStr for TsScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "corrected" => Ok(TsScheme::Corrected),
            "paper_literal" => Ok(TsScheme::PaperLiteral),
            _ => Err(Error::Config(format!("unknown pair weight scheme '{s}'"))),
        }
    }
}

/// Choice of W in the clique-cover reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcWeight {
    /// Clause weight times satisfying assignments, summed, plus one.
    #[default]
    Corrected,
    /// The shared W of every other reduction.
    PaperLiteral,
}

impl CcWeight {
    pub fn name(self) -> &'static str {
        match self {
            CcWeight::Corrected => "corrected",
            CcWeight::PaperLiteral => "paper_literal",
        }
    }
}

impl FromStr for CcWeight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "corrected" => Ok(CcWeight::Corrected),
            "paper_literal" => Ok(CcWeight::PaperLiteral),
            _ => Err(Error::Config(format!("unknown clique cover weight '{s}'"))),
        }
    }
}

/// Zero elements per variable in the matching reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InventoryMode {
    /// Two zero elements per variable: N = 2r|X| + 2|X|/3.
    #[default]
    Balanced,
    /// One zero element shared by both larges: N = 2r|X| + |X|/3. No
    /// standard assignment exists in this mode.
    PaperFormula,
}

impl InventoryMode {
    pub fn name(self) -> &'static str {
        match self {
            InventoryMode::Balanced => "balanced",
            InventoryMode::PaperFormula => "paper_formula",
        }
    }
}

impl FromStr for InventoryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "balanced" => Ok(InventoryMode::Balanced),
            "paper_formula" => Ok(InventoryMode::PaperFormula),
            _ => Err(Error::Config(format!("unknown inventory mode '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReductionOptions {
    pub ts_scheme: TsScheme,
    pub ts_separation: SeparationMode,
    /// Medium triples weigh this many W.
    pub medium_multiplier: u32,
    pub inventory: InventoryMode,
    pub cc_weight: CcWeight,
}

impl Default for ReductionOptions {
    fn default() -> Self {
        ReductionOptions {
            ts_scheme: TsScheme::Corrected,
            ts_separation: SeparationMode::TwoSided,
            medium_multiplier: 3,
            inventory: InventoryMode::Balanced,
            cc_weight: CcWeight::Corrected,
        }
    }
}

/// Sum of every weight the source can pay, plus one.
pub fn big_w(source: &McaInstance) -> Cost {
    source.total_weight() + Cost::one()
}

/// Every clause-set weight of the clique-cover target, summed, plus one.
pub fn cc_big_w(source: &McaInstance) -> Result<Cost> {
    check_source(ReductionId::Cc, source)?;
    let mut total = Cost::one();
    for ci in 0..source.constraints.len() {
        let (_, _, weight) = clause_parts(source, ci);
        total += weight * satisfying_literal_sets(source, ci).len();
    }
    Ok(total)
}

/// Element naming and triple catalog of the matching reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetMap {
    pub n: usize,
    pub r: usize,
    pub colors: Vec<Color>,
    /// `elements[x][class][s][v]` for occurrence `s` and value index `v`.
    pub elements: Vec<[[Vec<usize>; 2]; 3]>,
    /// `zero[x][s]`, inside the class of x's color.
    pub zero: Vec<[usize; 2]>,
    /// Per constraint: participating variable per class and its 0-based
    /// occurrence number.
    pub roles: Vec<([usize; 3], [usize; 3])>,
    pub large_weight: Cost,
    pub medium_weight: Cost,
    pub inventory: InventoryMode,
    /// Element names per class.
    pub names: [Vec<String>; 3],
}

impl GadgetMap {
    fn class_of(&self, x: usize) -> usize {
        self.colors[x].coordinate()
    }

    pub fn large(&self, x: usize, v: usize, s: usize) -> [usize; 3] {
        let home = self.class_of(x);
        let mut t = [0; 3];
        for (k, slot) in t.iter_mut().enumerate() {
            *slot = if k == home {
                self.zero[x][s]
            } else {
                self.elements[x][k][s][v]
            };
        }
        t
    }

    pub fn medium(&self, x: usize, v: usize, s: usize) -> [usize; 3] {
        let crossed = if self.colors[x] == Color::White { 1 } else { 2 };
        let mut t = [0; 3];
        for (k, slot) in t.iter_mut().enumerate() {
            let occ = if k == crossed { 1 - s } else { s };
            *slot = self.elements[x][k][occ][v];
        }
        t
    }

    /// Small triple of constraint `p` with values given per class.
    pub fn small(&self, p: usize, values: [usize; 3]) -> [usize; 3] {
        let (vars, occ) = self.roles[p];
        [
            self.elements[vars[0]][0][occ[0]][values[0]],
            self.elements[vars[1]][1][occ[1]][values[1]],
            self.elements[vars[2]][2][occ[2]][values[2]],
        ]
    }

    fn constraint_values(&self, p: usize, a: &[usize]) -> [usize; 3] {
        let vars = self.roles[p].0;
        [a[vars[0]], a[vars[1]], a[vars[2]]]
    }

    /// Value whose larges appear in `s`, if exactly one gadget has any.
    pub fn decode(&self, s: &BTreeSet<[usize; 3]>, x: usize) -> Option<usize> {
        let mut found = (0..self.r)
            .filter(|&v| s.contains(&self.large(x, v, 0)) || s.contains(&self.large(x, v, 1)));
        let v = found.next()?;
        found.next().is_none().then_some(v)
    }

    /// Value `v` when x has both larges on `v` and both mediums everywhere else.
    pub fn standard_value(&self, s: &BTreeSet<[usize; 3]>, x: usize) -> Option<usize> {
        let v = (0..self.r).find(|&v| s.contains(&self.large(x, v, 0)))?;
        let ok = s.contains(&self.large(x, v, 1))
            && (0..self.r)
                .filter(|&u| u != v)
                .all(|u| s.contains(&self.medium(x, u, 0)) && s.contains(&self.medium(x, u, 1)));
        ok.then_some(v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Metadata {
    Gadgets(Box<GadgetMap>),
    /// Constraint-set families; `base` is the index of the first family set.
    Families {
        base: usize,
        first_occurrence: Vec<usize>,
    },
    /// Literal ground set: x ↦ 2x, x̄ ↦ 2x+1 (SB, HS, CC).
    Literals,
    /// Index ground set: x_i ↦ 2x+i (TS).
    Indexed {
        scheme: TsScheme,
    },
    /// Variable ground set (SSP).
    Variables,
    /// `by_position[p]` is the variable at position p (IP).
    Positions {
        by_position: Vec<usize>,
        m: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub id: ReductionId,
    pub source: McaInstance,
    pub target: SetProblemInstance,
    pub big_w: Cost,
    pub options: ReductionOptions,
    pub meta: Metadata,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyVerdict {
    pub consistent: bool,
    pub predicate: String,
    pub violation: Option<String>,
}

impl ConsistencyVerdict {
    fn ok(id: ReductionId) -> Self {
        ConsistencyVerdict {
            consistent: true,
            predicate: id.predicate().to_string(),
            violation: None,
        }
    }

    fn violated(id: ReductionId, why: impl Into<String>) -> Self {
        ConsistencyVerdict {
            consistent: false,
            predicate: id.predicate().to_string(),
            violation: Some(why.into()),
        }
    }
}

fn check_source(id: ReductionId, source: &McaInstance) -> Result<()> {
    source.validate()?;
    if source.semantics != id.source_semantics() {
        return Err(Error::InvalidInstance(format!(
            "{id} reduction needs {:?} semantics, got {:?}",
            id.source_semantics(),
            source.semantics
        )));
    }
    if source.sense != id.source_sense() {
        return Err(Error::InvalidInstance(format!(
            "{id} reduction needs a {:?} source",
            id.source_sense()
        )));
    }
    Ok(())
}

/// Literal element of variable `x` under value index `v` (1 = true).
pub fn literal(x: usize, v: usize) -> usize {
    if v == 1 {
        2 * x
    } else {
        2 * x + 1
    }
}

fn literal_labels(num_vars: usize) -> Vec<String> {
    (0..num_vars)
        .flat_map(|x| [format!("x{}", x + 1), format!("~x{}", x + 1)])
        .collect()
}

fn clause_parts(source: &McaInstance, ci: usize) -> (&[usize], &[bool], &Cost) {
    let c = &source.constraints[ci];
    match &c.body {
        ConstraintBody::Clause { negated, weight } => (&c.scope, negated, weight),
        _ => unreachable!("checked by check_source"),
    }
}

fn nae_weight(source: &McaInstance, ci: usize) -> &Cost {
    match &source.constraints[ci].body {
        ConstraintBody::Nae(w) => w,
        _ => unreachable!("checked by check_source"),
    }
}

fn pairs(n: usize) -> Cost {
    Cost::from(n * n.saturating_sub(1) / 2)
}

/// Builds Φ(source) for the given target.
pub fn reduce(
    id: ReductionId,
    source: &McaInstance,
    options: ReductionOptions,
) -> Result<ReductionOutput> {
    check_source(id, source)?;
    let w = match (id, options.cc_weight) {
        (ReductionId::Cc, CcWeight::Corrected) => cc_big_w(source)?,
        _ => big_w(source),
    };
    let (target, meta) = match id {
        ReductionId::W3dm | ReductionId::X3c => reduce_matching(id, source, &w, options)?,
        ReductionId::Sp | ReductionId::Sc => reduce_families(id, source, &w)?,
        ReductionId::Ssp => reduce_ssp(source)?,
        ReductionId::Ts => reduce_ts(source, &w, options)?,
        ReductionId::Sb => reduce_sb(source, &w)?,
        ReductionId::Hs => reduce_hs(source, &w)?,
        ReductionId::Ip => reduce_ip(source, &w)?,
        ReductionId::Cc => reduce_cc(source, &w)?,
    };
    target.validate()?;
    Ok(ReductionOutput {
        id,
        source: source.clone(),
        target,
        big_w: w,
        options,
        meta,
    })
}

fn reduce_matching(
    id: ReductionId,
    source: &McaInstance,
    w: &Cost,
    options: ReductionOptions,
) -> Result<(SetProblemInstance, Metadata)> {
    source.check_tricolored()?;
    let colors = source
        .coloring
        .clone()
        .expect("checked by check_tricolored");
    let r = source.domain_size;
    let nv = source.num_vars;
    let class_letter = ['b', 'g', 'h'];

    let mut next = [0usize; 3];
    let mut names: [Vec<String>; 3] = Default::default();
    let mut elements = Vec::with_capacity(nv);
    let mut zero = Vec::with_capacity(nv);
    for (x, color) in colors.iter().enumerate() {
        let home = color.coordinate();
        let mut per_class: [[Vec<usize>; 2]; 3] = Default::default();
        let mut z = [0usize; 2];
        for k in 0..3 {
            for s in 0..2 {
                if k == home {
                    if s == 1 && options.inventory == InventoryMode::PaperFormula {
                        z[1] = z[0];
                    } else {
                        z[s] = next[k];
                        names[k].push(format!("{}{}_x{}(0)", class_letter[k], s + 1, x + 1));
                        next[k] += 1;
                    }
                }
                for v in 0..r {
                    per_class[k][s].push(next[k]);
                    names[k].push(format!(
                        "{}{}_x{}({})",
                        class_letter[k],
                        s + 1,
                        x + 1,
                        v + 1
                    ));
                    next[k] += 1;
                }
            }
        }
        elements.push(per_class);
        zero.push(z);
    }
    debug_assert!(next[0] == next[1] && next[1] == next[2]);
    let n = next[0];

    let mut roles = Vec::with_capacity(source.constraints.len());
    for (p, c) in source.constraints.iter().enumerate() {
        let mut vars = [0usize; 3];
        let mut occ = [0usize; 3];
        for &x in &c.scope {
            let k = colors[x].coordinate();
            vars[k] = x;
            occ[k] = source.occurrence_number(x, p).expect("x is in scope") - 1;
        }
        roles.push((vars, occ));
    }

    let map = GadgetMap {
        n,
        r,
        colors,
        elements,
        zero,
        roles,
        large_weight: w * 7,
        medium_weight: w * options.medium_multiplier,
        inventory: options.inventory,
        names,
    };

    let mut weights: BTreeMap<[usize; 3], Cost> = BTreeMap::new();
    for x in 0..nv {
        for v in 0..r {
            for s in 0..2 {
                weights.insert(map.large(x, v, s), map.large_weight.clone());
                weights.insert(map.medium(x, v, s), map.medium_weight.clone());
            }
        }
    }
    for (p, c) in source.constraints.iter().enumerate() {
        for idx in 0..r.pow(3) {
            let values = table_values(idx, 3, r);
            let mut scoped = Vec::with_capacity(3);
            for &x in &c.scope {
                scoped.push(values[map.class_of(x)]);
            }
            let weight = c.evaluate(&scoped, r);
            if !weight.is_zero() {
                weights.insert(map.small(p, [values[0], values[1], values[2]]), weight);
            }
        }
    }

    let target = if id == ReductionId::W3dm {
        SetProblemInstance::W3dm(W3dmInstance { n, weights })
    } else {
        let labels = map.names.iter().flatten().cloned().collect();
        SetProblemInstance::X3c(X3cInstance {
            ground: 3 * n,
            labels,
            weights: weights
                .into_iter()
                .map(|(t, w)| (to_cover_triple(n, t), w))
                .collect(),
        })
    };
    Ok((target, Metadata::Gadgets(Box::new(map))))
}

fn to_cover_triple(n: usize, t: [usize; 3]) -> [usize; 3] {
    [t[0], n + t[1], 2 * n + t[2]]
}

fn matching_to_cover(n: usize, m: &BTreeSet<[usize; 3]>) -> BTreeSet<[usize; 3]> {
    m.iter().map(|&t| to_cover_triple(n, t)).collect()
}

/// Reads a cover as a matching when every set takes one element per class.
fn cover_to_matching(n: usize, c: &BTreeSet<[usize; 3]>) -> Option<BTreeSet<[usize; 3]>> {
    c.iter()
        .map(|t| {
            (t[0] < n && (n..2 * n).contains(&t[1]) && (2 * n..3 * n).contains(&t[2]))
                .then(|| [t[0], t[1] - n, t[2] - 2 * n])
        })
        .collect()
}

struct FamilyLayout<'a> {
    source: &'a McaInstance,
    singletons: bool,
}

impl FamilyLayout<'_> {
    fn m(&self) -> usize {
        self.source.constraints.len()
    }

    fn c_elem(&self, i: usize) -> usize {
        if self.singletons {
            self.m() + i
        } else {
            i
        }
    }

    fn x_elem(&self, x: usize, j: usize) -> usize {
        let offset = if self.singletons {
            2 * self.m()
        } else {
            self.m()
        };
        offset + x * self.source.domain_size + j
    }

    fn base(&self) -> usize {
        if self.singletons {
            self.m()
        } else {
            0
        }
    }

    fn family_len(&self, i: usize) -> usize {
        self.source
            .domain_size
            .pow(self.source.constraints[i].scope.len() as u32)
    }

    fn family_start(&self, i: usize) -> usize {
        self.base() + (0..i).map(|p| self.family_len(p)).sum::<usize>()
    }

    /// (constraint, table index) of a family set.
    fn locate(&self, set: usize) -> Option<(usize, usize)> {
        let mut start = self.base();
        if set < start {
            return None;
        }
        for i in 0..self.m() {
            let len = self.family_len(i);
            if set < start + len {
                return Some((i, set - start));
            }
            start += len;
        }
        None
    }
}

fn reduce_families(
    id: ReductionId,
    source: &McaInstance,
    w: &Cost,
) -> Result<(SetProblemInstance, Metadata)> {
    if let Some(x) = (0..source.num_vars).find(|&x| source.occurrences(x) != 2) {
        return Err(Error::InvalidInstance(format!(
            "variable {} appears {} times, the set encodings need exactly 2",
            x + 1,
            source.occurrences(x)
        )));
    }
    let layout = FamilyLayout {
        source,
        singletons: id == ReductionId::Sp,
    };
    let m = layout.m();
    let r = source.domain_size;
    let ground = layout.x_elem(source.num_vars, 0);
    let mut labels = Vec::with_capacity(ground);
    if layout.singletons {
        labels.extend((1..=m).map(|i| format!("e{i}")));
    }
    labels.extend((1..=m).map(|i| format!("c{i}")));
    for x in 0..source.num_vars {
        labels.extend((1..=r).map(|j| format!("x{}_{j}", x + 1)));
    }
    let first: Vec<usize> = (0..source.num_vars)
        .map(|x| source.constraints_of(x)[0])
        .collect();

    let mut collection = WeightedCollection::empty(ground).with_labels(labels);
    if layout.singletons {
        for i in 0..m {
            collection.push([i], 1u32);
        }
    }
    for (i, c) in source.constraints.iter().enumerate() {
        debug_assert_eq!(collection.len(), layout.family_start(i));
        for idx in 0..layout.family_len(i) {
            let values = table_values(idx, c.scope.len(), r);
            let mut members = vec![layout.c_elem(i)];
            for (&u, &a) in c.scope.iter().zip(&values) {
                if first[u] == i {
                    members.push(layout.x_elem(u, a));
                } else {
                    members.extend((0..r).filter(|&j| j != a).map(|j| layout.x_elem(u, j)));
                }
            }
            let mut weight = c.evaluate(&values, r);
            if id == ReductionId::Sc {
                weight += w;
            }
            collection.push(members, weight);
        }
    }
    let base = layout.base();
    let target = match id {
        ReductionId::Sp => SetProblemInstance::Sp(SpInstance { collection, m_c: m }),
        _ => SetProblemInstance::Sc(ScInstance { collection }),
    };
    Ok((
        target,
        Metadata::Families {
            base,
            first_occurrence: first,
        },
    ))
}

fn reduce_ssp(source: &McaInstance) -> Result<(SetProblemInstance, Metadata)> {
    let labels = (1..=source.num_vars).map(|x| format!("x{x}")).collect();
    let mut collection = WeightedCollection::empty(source.num_vars).with_labels(labels);
    for (ci, c) in source.constraints.iter().enumerate() {
        collection.push(c.scope.iter().copied(), nae_weight(source, ci).clone());
    }
    Ok((
        SetProblemInstance::Ssp(SspInstance { collection }),
        Metadata::Variables,
    ))
}

fn reduce_ts(
    source: &McaInstance,
    w: &Cost,
    options: ReductionOptions,
) -> Result<(SetProblemInstance, Metadata)> {
    let nv = source.num_vars;
    let g = 2 * nv;
    let labels = (0..nv)
        .flat_map(|x| [format!("x{}_0", x + 1), format!("x{}_1", x + 1)])
        .collect();
    let mut collection = WeightedCollection::empty(g).with_labels(labels);
    for e in 0..g {
        collection.push([e], 0u32);
    }
    let mut clause_weight: BTreeMap<(usize, usize), Cost> = BTreeMap::new();
    for (ci, c) in source.constraints.iter().enumerate() {
        let (x, y) = (c.scope[0].min(c.scope[1]), c.scope[0].max(c.scope[1]));
        *clause_weight.entry((x, y)).or_default() += nae_weight(source, ci);
    }
    let base: Cost = w + 1u32;
    let mut pair = vec![vec![Cost::zero(); g]; g];
    for a in 0..g {
        for b in (a + 1)..g {
            let (x, i) = (a / 2, a % 2);
            let (y, j) = (b / 2, b % 2);
            let clause = clause_weight.get(&(x, y));
            let value = if x == y {
                Cost::one()
            } else {
                match options.ts_scheme {
                    TsScheme::Corrected => match clause {
                        Some(wc) if i != j => &base + wc,
                        _ => base.clone(),
                    },
                    TsScheme::PaperLiteral => match clause {
                        Some(wc) if i != j => &base + wc,
                        Some(_) => Cost::one(),
                        None if i == j => base.clone(),
                        None => Cost::one(),
                    },
                }
            };
            pair[a][b] = value.clone();
            pair[b][a] = value;
        }
    }
    Ok((
        SetProblemInstance::Ts(TsInstance {
            collection,
            pair_weights: pair,
            m_b: nv,
            separation: options.ts_separation,
        }),
        Metadata::Indexed {
            scheme: options.ts_scheme,
        },
    ))
}

/// Literal set of every satisfying assignment of clause `ci`, in table order.
fn satisfying_literal_sets(source: &McaInstance, ci: usize) -> Vec<Vec<usize>> {
    let (scope, _, _) = clause_parts(source, ci);
    (0..1usize << scope.len())
        .map(|idx| table_values(idx, scope.len(), 2))
        .filter(|values| clause_is_satisfied(source, ci, values))
        .map(|values| {
            scope
                .iter()
                .zip(&values)
                .map(|(&x, &v)| literal(x, v))
                .collect()
        })
        .collect()
}

fn clause_is_satisfied(source: &McaInstance, ci: usize, values: &[usize]) -> bool {
    let (_, negated, _) = clause_parts(source, ci);
    values.iter().zip(negated).any(|(&v, &neg)| (v == 1) != neg)
}

fn reduce_sb(source: &McaInstance, w: &Cost) -> Result<(SetProblemInstance, Metadata)> {
    let nv = source.num_vars;
    let mut collection = WeightedCollection::empty(2 * nv).with_labels(literal_labels(nv));
    for x in 0..nv {
        collection.push([literal(x, 1)], w * 2);
        collection.push([literal(x, 0)], w * 2);
    }
    for (x, y) in (0..nv).tuple_combinations() {
        for (vx, vy) in [(1, 1), (0, 1), (1, 0), (0, 0)] {
            collection.push([literal(x, vx), literal(y, vy)], w.clone());
        }
    }
    for ci in 0..source.constraints.len() {
        let weight = clause_parts(source, ci).2.clone();
        for set in satisfying_literal_sets(source, ci) {
            collection.push(set, weight.clone());
        }
    }
    Ok((
        SetProblemInstance::Sb(SbInstance {
            collection,
            m_c: nv,
        }),
        Metadata::Literals,
    ))
}

fn reduce_hs(source: &McaInstance, w: &Cost) -> Result<(SetProblemInstance, Metadata)> {
    let nv = source.num_vars;
    let mut collection = WeightedCollection::empty(2 * nv).with_labels(literal_labels(nv));
    for x in 0..nv {
        collection.push([literal(x, 1), literal(x, 0)], w.clone());
    }
    for ci in 0..source.constraints.len() {
        let (scope, negated, weight) = clause_parts(source, ci);
        let lits = scope
            .iter()
            .zip(negated)
            .map(|(&x, &neg)| literal(x, if neg { 0 } else { 1 }));
        collection.push(lits, weight.clone());
    }
    Ok((
        SetProblemInstance::Hs(HsInstance {
            collection,
            m_b: nv,
        }),
        Metadata::Literals,
    ))
}

fn reduce_cc(source: &McaInstance, w: &Cost) -> Result<(SetProblemInstance, Metadata)> {
    let nv = source.num_vars;
    let g = 2 * nv;
    let rest = |x: usize| (0..g).filter(move |&e| e / 2 != x);
    let mut n_side = WeightedCollection::empty(g).with_labels(literal_labels(nv));
    let mut m_side = WeightedCollection::empty(g).with_labels(literal_labels(nv));
    for x in 0..nv {
        n_side.push(rest(x), w * 2);
    }
    for x in 0..nv {
        for v in [1, 0] {
            m_side.push(rest(x).chain([literal(x, v)]), w.clone());
        }
    }
    for ci in 0..source.constraints.len() {
        let (scope, _, weight) = clause_parts(source, ci);
        let fan_out: Vec<usize> = (0..g).filter(|e| !scope.contains(&(e / 2))).collect();
        for set in satisfying_literal_sets(source, ci) {
            m_side.push(fan_out.iter().copied().chain(set), weight.clone());
        }
    }
    let w_shift = n_side.total_weight();
    Ok((
        SetProblemInstance::Cc(CcInstance {
            m_side,
            n_side,
            w_shift,
        }),
        Metadata::Literals,
    ))
}

fn reduce_ip(source: &McaInstance, w: &Cost) -> Result<(SetProblemInstance, Metadata)> {
    let nv = source.num_vars;
    let mut pair_clause: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (ci, c) in source.constraints.iter().enumerate() {
        let key = (c.scope[0].min(c.scope[1]), c.scope[0].max(c.scope[1]));
        if pair_clause.insert(key, ci).is_some() {
            return Err(Error::InvalidInstance(format!(
                "variables {} and {} share more than one clause",
                key.0 + 1,
                key.1 + 1
            )));
        }
    }
    if let Some((x, y)) = (0..nv)
        .tuple_combinations()
        .find(|&(x, y)| !pair_clause.contains_key(&(x, y)))
    {
        return Err(Error::InvalidInstance(format!(
            "variables {} and {} share no clause; close the instance over all pairs",
            x + 1,
            y + 1
        )));
    }
    let m = 2 * source.constraints.len();
    let sigma = &source.order;
    let mut by_position = vec![0usize; nv];
    for x in 0..nv {
        by_position[sigma[x] - 1] = x;
    }

    // clause elements x_i^{C_j}, then padding per (x, i)
    let mut labels = Vec::new();
    let mut clause_elem: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for (ci, c) in source.constraints.iter().enumerate() {
        for &x in &c.scope {
            for i in 0..2 {
                clause_elem.insert((x, i, ci), labels.len());
                labels.push(format!("x{}_{i}^C{}", x + 1, ci + 1));
            }
        }
    }
    let mut donor_members: Vec<Vec<usize>> = Vec::with_capacity(2 * nv);
    for x in 0..nv {
        let clauses = source.constraints_of(x);
        let padding = m - 2 * clauses.len() + sigma[x];
        for i in 0..2 {
            let mut members = Vec::new();
            for &ci in &clauses {
                let y = *source.constraints[ci]
                    .scope
                    .iter()
                    .find(|&&y| y != x)
                    .expect("nae clauses have two variables");
                members.push(clause_elem[&(x, i, ci)]);
                members.push(clause_elem[&(y, 1 - i, ci)]);
            }
            for l in 1..=padding {
                members.push(labels.len());
                labels.push(format!("x{}_{i}^{l}", x + 1));
            }
            donor_members.push(members);
        }
    }
    let ground = labels.len();
    let mut donors = WeightedCollection::empty(ground).with_labels(labels);
    for members in donor_members {
        donors.push(members, 0u32);
    }

    let mut a = vec![vec![2usize; nv]; nv];
    let mut b = vec![vec![Cost::zero(); nv]; nv];
    for p in 0..nv {
        a[p][p] = m + p + 1;
        b[p][p] = w.clone();
        for q in 0..nv {
            if p != q {
                let (x, y) = (by_position[p], by_position[q]);
                b[p][q] = nae_weight(source, pair_clause[&(x.min(y), x.max(y))]).clone();
            }
        }
    }
    Ok((
        SetProblemInstance::Ip(IpInstance { a, b, donors }),
        Metadata::Positions { by_position, m },
    ))
}

impl ReductionOutput {
    pub fn gadgets(&self) -> Option<&GadgetMap> {
        match &self.meta {
            Metadata::Gadgets(g) => Some(g),
            _ => None,
        }
    }

    fn matching_of(&self, s: &Solution) -> Option<BTreeSet<[usize; 3]>> {
        match (s, self.gadgets()) {
            (Solution::Matching(m), _) => Some(m.clone()),
            (Solution::Cover(c), Some(g)) => cover_to_matching(g.n, c),
            _ => None,
        }
    }

    fn check_feasible(&self, s: &Solution) -> Result<()> {
        if !self.target.feasible(s)? {
            return Err(Error::Infeasible(format!("{} solution {s}", self.id)));
        }
        Ok(())
    }

    /// Evaluates the reduction's consistency predicate on a feasible solution.
    pub fn is_consistent(&self, s: &Solution) -> Result<ConsistencyVerdict> {
        self.check_feasible(s)?;
        let id = self.id;
        let nv = self.source.num_vars;
        Ok(match (&self.meta, s) {
            (Metadata::Gadgets(g), _) => {
                let Some(matching) = self.matching_of(s) else {
                    return Ok(ConsistencyVerdict::violated(
                        id,
                        "cover is not matching-shaped",
                    ));
                };
                let mut values = Vec::with_capacity(nv);
                for x in 0..nv {
                    match g.standard_value(&matching, x) {
                        Some(v) => values.push(v),
                        None => {
                            return Ok(ConsistencyVerdict::violated(
                                id,
                                format!("variable {} has no complete gadget", x + 1),
                            ))
                        }
                    }
                }
                for p in 0..self.source.constraints.len() {
                    let t = g.small(p, g.constraint_values(p, &values));
                    if !matching.contains(&t) {
                        return Ok(ConsistencyVerdict::violated(
                            id,
                            format!("constraint {} lacks its evaluation triple", p + 1),
                        ));
                    }
                }
                ConsistencyVerdict::ok(id)
            }
            (Metadata::Families { base, .. }, Solution::Collection(sets)) => {
                let layout = FamilyLayout {
                    source: &self.source,
                    singletons: id == ReductionId::Sp,
                };
                let m = layout.m();
                if sets.len() != m {
                    return Ok(ConsistencyVerdict::violated(
                        id,
                        format!("{} sets chosen, {m} needed", sets.len()),
                    ));
                }
                let mut families = BTreeSet::new();
                for &set in sets {
                    match layout.locate(set) {
                        Some((i, _)) if set >= *base => {
                            if !families.insert(i) {
                                return Ok(ConsistencyVerdict::violated(
                                    id,
                                    format!("two sets of constraint {}", i + 1),
                                ));
                            }
                        }
                        _ => {
                            return Ok(ConsistencyVerdict::violated(
                                id,
                                format!("set {} is not a constraint set", set + 1),
                            ))
                        }
                    }
                }
                if id == ReductionId::Sp {
                    let c = match &self.target {
                        SetProblemInstance::Sp(sp) => &sp.collection,
                        _ => unreachable!(),
                    };
                    if let Some((a, b)) = sets
                        .iter()
                        .tuple_combinations()
                        .find(|&(&a, &b)| !c.sets[a].is_disjoint(&c.sets[b]))
                    {
                        return Ok(ConsistencyVerdict::violated(
                            id,
                            format!("sets {} and {} intersect", a + 1, b + 1),
                        ));
                    }
                }
                ConsistencyVerdict::ok(id)
            }
            (Metadata::Variables, Solution::Partition(_)) => ConsistencyVerdict::ok(id),
            (Metadata::Indexed { .. }, Solution::Collection(sets)) => {
                let elems: BTreeSet<usize> = sets.clone();
                literal_consistency(id, nv, &elems)
            }
            (Metadata::Literals, Solution::Basis(basis)) => {
                if let Some(big) = basis.iter().find(|b| b.len() != 1) {
                    return Ok(ConsistencyVerdict::violated(
                        id,
                        format!("basis member {big} is not a singleton"),
                    ));
                }
                let elems: BTreeSet<usize> = basis.iter().flat_map(|b| b.iter()).collect();
                literal_consistency(id, nv, &elems)
            }
            (Metadata::Literals, Solution::Elements(elems)) => literal_consistency(id, nv, elems),
            (Metadata::Positions { by_position, .. }, Solution::SetVector(v)) => {
                for (p, &d) in v.iter().enumerate() {
                    let x = by_position[p];
                    if d / 2 != x {
                        return Ok(ConsistencyVerdict::violated(
                            id,
                            format!("position {} holds a set of the wrong size", p + 1),
                        ));
                    }
                }
                ConsistencyVerdict::ok(id)
            }
            _ => {
                return Err(Error::VariantMismatch {
                    problem: id.to_string(),
                    got: s.variant_name().to_string(),
                })
            }
        })
    }

    /// Ψ: the induced assignment of a consistent solution, else the source's
    /// canonical initial assignment.
    pub fn pull_back(&self, s: &Solution) -> Result<Assignment> {
        if !self.is_consistent(s)?.consistent {
            return Ok(self.source.initial_assignment());
        }
        let nv = self.source.num_vars;
        let mut values = vec![0usize; nv];
        match (&self.meta, s) {
            (Metadata::Gadgets(g), _) => {
                let matching = self.matching_of(s).expect("consistent");
                for (x, slot) in values.iter_mut().enumerate() {
                    *slot = g.standard_value(&matching, x).expect("consistent");
                }
            }
            (
                Metadata::Families {
                    first_occurrence, ..
                },
                Solution::Collection(sets),
            ) => {
                let layout = FamilyLayout {
                    source: &self.source,
                    singletons: self.id == ReductionId::Sp,
                };
                for &set in sets {
                    let (i, idx) = layout.locate(set).expect("consistent");
                    let scope = &self.source.constraints[i].scope;
                    let vals = table_values(idx, scope.len(), self.source.domain_size);
                    for (&x, &v) in scope.iter().zip(&vals) {
                        if first_occurrence[x] == i {
                            values[x] = v;
                        }
                    }
                }
            }
            (Metadata::Variables, Solution::Partition(p)) => {
                for (x, &side) in p.iter().enumerate() {
                    values[x] = usize::from(side);
                }
            }
            (Metadata::Indexed { .. }, Solution::Collection(sets)) => {
                for &e in sets {
                    values[e / 2] = e % 2;
                }
            }
            (Metadata::Literals, Solution::Basis(basis)) => {
                for e in basis.iter().flat_map(|b| b.iter()) {
                    values[e / 2] = literal_value(e);
                }
            }
            (Metadata::Literals, Solution::Elements(elems)) => {
                for &e in elems {
                    values[e / 2] = literal_value(e);
                }
            }
            (Metadata::Positions { .. }, Solution::SetVector(v)) => {
                for &d in v {
                    values[d / 2] = d % 2;
                }
            }
            _ => unreachable!("is_consistent rejected the mismatch"),
        }
        Ok(Assignment(values))
    }

    /// The consistent solution that encodes `a`.
    pub fn encode(&self, a: &Assignment) -> Result<Solution> {
        self.source.cost(a)?;
        let values = a.values();
        let nv = self.source.num_vars;
        Ok(match &self.meta {
            Metadata::Gadgets(g) => {
                if g.inventory == InventoryMode::PaperFormula {
                    return Err(Error::Infeasible(
                        "the shared-zero inventory admits no standard assignment".into(),
                    ));
                }
                let mut m = BTreeSet::new();
                for (x, &v) in values.iter().enumerate() {
                    for s in 0..2 {
                        m.insert(g.large(x, v, s));
                        for u in (0..g.r).filter(|&u| u != v) {
                            m.insert(g.medium(x, u, s));
                        }
                    }
                }
                for p in 0..self.source.constraints.len() {
                    m.insert(g.small(p, g.constraint_values(p, values)));
                }
                if self.id == ReductionId::X3c {
                    Solution::Cover(matching_to_cover(g.n, &m))
                } else {
                    Solution::Matching(m)
                }
            }
            Metadata::Families { .. } => {
                let layout = FamilyLayout {
                    source: &self.source,
                    singletons: self.id == ReductionId::Sp,
                };
                Solution::Collection(
                    self.source
                        .constraints
                        .iter()
                        .enumerate()
                        .map(|(i, c)| {
                            let vals: Vec<usize> = c.scope.iter().map(|&x| values[x]).collect();
                            layout.family_start(i) + table_index(&vals, self.source.domain_size)
                        })
                        .collect(),
                )
            }
            Metadata::Variables => Solution::Partition(values.iter().map(|&v| v == 1).collect()),
            Metadata::Indexed { .. } => {
                Solution::Collection((0..nv).map(|x| 2 * x + values[x]).collect())
            }
            Metadata::Literals => {
                let lits = (0..nv).map(|x| literal(x, values[x]));
                match self.id {
                    ReductionId::Sb => {
                        let g = 2 * nv;
                        Solution::Basis(
                            lits.map(|l| crate::set_problems::ElementSet::from_elements(g, [l]))
                                .collect(),
                        )
                    }
                    _ => Solution::Elements(lits.collect()),
                }
            }
            Metadata::Positions { by_position, .. } => {
                Solution::SetVector(by_position.iter().map(|&x| 2 * x + values[x]).collect())
            }
        })
    }

    /// Δ with cost_target(s) = cost_source(Ψ(s)) + Δ on consistent solutions.
    pub fn cost_offset(&self) -> Result<Cost> {
        let w = &self.big_w;
        let nv = self.source.num_vars;
        let x = Cost::from(nv);
        Ok(match self.id {
            ReductionId::Sp | ReductionId::Ssp => Cost::zero(),
            ReductionId::Sc => w * self.source.constraints.len(),
            ReductionId::Hs | ReductionId::Ip => w * &x,
            ReductionId::Sb => w * 2u32 * &x + w * pairs(nv),
            ReductionId::Cc => match &self.target {
                SetProblemInstance::Cc(cc) => w * &x + &cc.w_shift,
                _ => unreachable!(),
            },
            ReductionId::Ts => {
                if self.options.ts_scheme != TsScheme::Corrected {
                    return Err(Error::NoAffineOffset(
                        "the literal pair weights are not affine in the source cost".into(),
                    ));
                }
                if self.options.ts_separation != SeparationMode::TwoSided {
                    return Err(Error::NoAffineOffset(
                        "one-sided separation reverses the sign of the source cost".into(),
                    ));
                }
                (w + 1) * pairs(nv)
            }
            ReductionId::W3dm | ReductionId::X3c => {
                if self.options.inventory == InventoryMode::PaperFormula {
                    return Err(Error::NoAffineOffset(
                        "the shared-zero inventory has no standard assignments".into(),
                    ));
                }
                let med = w * self.options.medium_multiplier;
                let r_minus = Cost::from(self.source.domain_size - 1);
                x * (w * 14u32 + med * 2u32 * r_minus)
            }
        })
    }
}

fn literal_value(e: usize) -> usize {
    1 - e % 2
}

fn literal_consistency(id: ReductionId, nv: usize, elems: &BTreeSet<usize>) -> ConsistencyVerdict {
    if elems.len() != nv {
        return ConsistencyVerdict::violated(
            id,
            format!("{} literals chosen, {nv} needed", elems.len()),
        );
    }
    if let Some(&e) = elems
        .iter()
        .find(|&&e| e % 2 == 0 && elems.contains(&(e + 1)))
    {
        return ConsistencyVerdict::violated(id, format!("complementary pair x{}", e / 2 + 1));
    }
    ConsistencyVerdict::ok(id)
}

/// Regroups `s` so that every triple of `install` is present. Triples that
/// share an element with `install` are removed and the freed elements are
/// matched again in sorted order.
fn install(s: &BTreeSet<[usize; 3]>, install: &[[usize; 3]]) -> Option<BTreeSet<[usize; 3]>> {
    let mut used: [HashSet<usize>; 3] = Default::default();
    for t in install {
        for k in 0..3 {
            if !used[k].insert(t[k]) {
                return None;
            }
        }
    }
    let removed: Vec<[usize; 3]> = s
        .iter()
        .filter(|t| (0..3).any(|k| used[k].contains(&t[k])))
        .copied()
        .collect();
    let mut freed: [Vec<usize>; 3] = Default::default();
    for t in &removed {
        for k in 0..3 {
            if !used[k].contains(&t[k]) {
                freed[k].push(t[k]);
            }
        }
    }
    for f in freed.iter_mut() {
        f.sort_unstable();
    }
    let mut next = s.clone();
    for t in &removed {
        next.remove(t);
    }
    next.extend(install.iter().copied());
    for j in 0..freed[0].len() {
        next.insert([freed[0][j], freed[1][j], freed[2][j]]);
    }
    (next != *s).then_some(next)
}

/// Most triples a catalog move may replace.
pub const CATALOG_P: usize = 6;
/// Most boys and girls a catalog move may relocate.
pub const CATALOG_Q: usize = 12;

/// Structured moves of the matching reduction: build-large, build-medium,
/// consolidate, build-small and reassign. Every move stays inside the
/// (6,12) neighborhood.
pub fn w3dm_move_catalog(
    g: &GadgetMap,
    source: &McaInstance,
    s: &BTreeSet<[usize; 3]>,
) -> Vec<Neighbor<BTreeSet<[usize; 3]>>> {
    let nv = g.colors.len();
    let r = g.r;
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let mut emit = |kind: &'static str, triples: Vec<[usize; 3]>| {
        if let Some(next) = install(s, &triples) {
            let (p, q) = pq_distance(s, &next);
            if p <= CATALOG_P && q <= CATALOG_Q && seen.insert(next.clone()) {
                out.push(Neighbor::new(kind, next));
            }
        }
    };

    for x in 0..nv {
        for v in 0..r {
            for k in 0..2 {
                let t = g.large(x, v, k);
                if !s.contains(&t) {
                    emit("build-large", vec![t]);
                }
            }
        }
    }
    for x in 0..nv {
        for v in 0..r {
            for k in 0..2 {
                let t = g.medium(x, v, k);
                if !s.contains(&t) {
                    emit("build-medium", vec![t]);
                }
            }
        }
    }
    for x in 0..nv {
        let with_large: Vec<usize> = (0..r)
            .filter(|&v| s.contains(&g.large(x, v, 0)) || s.contains(&g.large(x, v, 1)))
            .collect();
        for (&i, &j) in with_large.iter().cartesian_product(&with_large) {
            if i == j {
                continue;
            }
            let missing: Vec<[usize; 3]> = (0..2)
                .map(|k| g.large(x, i, k))
                .filter(|t| !s.contains(t))
                .collect();
            let mediums = [g.medium(x, j, 0), g.medium(x, j, 1)];
            for large_set in
                (1..=missing.len()).flat_map(|n| missing.iter().copied().combinations(n))
            {
                for medium_set in (1..=2).flat_map(|n| mediums.iter().copied().combinations(n)) {
                    let mut t = large_set.clone();
                    t.extend(medium_set);
                    emit("consolidate", t);
                }
            }
        }
    }
    let decoded: Vec<Option<usize>> = (0..nv).map(|x| g.decode(s, x)).collect();
    for p in 0..source.constraints.len() {
        let vars = g.roles[p].0;
        let Some(values) = vars
            .iter()
            .map(|&x| decoded[x])
            .collect::<Option<Vec<usize>>>()
        else {
            continue;
        };
        let t = g.small(p, [values[0], values[1], values[2]]);
        if !s.contains(&t) {
            emit("build-small", vec![t]);
        }
    }
    for x in 0..nv {
        let Some(v) = g.standard_value(s, x) else {
            continue;
        };
        let constraints = source.constraints_of(x);
        let others_decoded = constraints
            .iter()
            .all(|&p| g.roles[p].0.iter().all(|&y| y == x || decoded[y].is_some()));
        if !others_decoded {
            continue;
        }
        for j in (0..r).filter(|&j| j != v) {
            let mut t = vec![
                g.large(x, j, 0),
                g.large(x, j, 1),
                g.medium(x, v, 0),
                g.medium(x, v, 1),
            ];
            for &p in &constraints {
                let vars = g.roles[p].0;
                let values: Vec<usize> = vars
                    .iter()
                    .map(|&y| {
                        if y == x {
                            j
                        } else {
                            decoded[y].expect("checked")
                        }
                    })
                    .collect();
                t.push(g.small(p, [values[0], values[1], values[2]]));
            }
            emit("reassign", t);
        }
    }
    out
}

/// Binds a matching or exact-cover reduction to the engine with the move catalog.
pub struct CatalogBinding<'a> {
    pub output: &'a ReductionOutput,
}

impl<'a> CatalogBinding<'a> {
    pub fn new(output: &'a ReductionOutput) -> Result<Self> {
        if output.gadgets().is_none() {
            return Err(Error::Config(format!(
                "the move catalog needs a w3dm or x3c reduction, got {}",
                output.id
            )));
        }
        Ok(CatalogBinding { output })
    }

    fn gadgets(&self) -> &GadgetMap {
        self.output.gadgets().expect("checked in new")
    }

    /// Catalog moves of `s` as target solutions.
    pub fn moves(&self, s: &Solution) -> Vec<Neighbor<Solution>> {
        let g = self.gadgets();
        let Some(matching) = self.output.matching_of(s) else {
            return Vec::new();
        };
        let as_cover = matches!(s, Solution::Cover(_));
        w3dm_move_catalog(g, &self.output.source, &matching)
            .into_iter()
            .map(|n| {
                let solution = if as_cover {
                    Solution::Cover(matching_to_cover(g.n, &n.solution))
                } else {
                    Solution::Matching(n.solution)
                };
                Neighbor::new(n.kind, solution)
            })
            .collect()
    }
}

impl<'a> ProblemBinding for CatalogBinding<'a> {
    type Solution = Solution;

    fn kind(&self) -> String {
        format!("{}-catalog", self.output.id)
    }

    fn sense(&self) -> Sense {
        self.output.target.sense()
    }

    fn is_feasible(&self, s: &Solution) -> bool {
        self.output.target.feasible(s).unwrap_or(false)
    }

    fn cost(&self, s: &Solution) -> Result<Cost> {
        self.output.target.cost(s)
    }

    fn neighbors<'b>(&'b self, s: &'b Solution) -> Result<NeighborStream<'b, Solution>> {
        Ok(Box::new(self.moves(s).into_iter()))
    }

    fn initial_solution(&self) -> Result<Solution> {
        let n = self.gadgets().n;
        let identity: BTreeSet<[usize; 3]> = (0..n).map(|i| [i, i, i]).collect();
        Ok(match self.output.id {
            ReductionId::X3c => Solution::Cover(matching_to_cover(n, &identity)),
            _ => Solution::Matching(identity),
        })
    }

    fn describe_move(&self, _from: &Solution, to: &Neighbor<Solution>) -> String {
        to.kind.to_string()
    }
}

/// A uniformly random matching of the reduced instance, as a target solution.
pub fn random_matching_solution<R: rand::Rng>(
    output: &ReductionOutput,
    rng: &mut R,
) -> Result<Solution> {
    let g = output
        .gadgets()
        .ok_or_else(|| Error::Config("not a matching reduction".into()))?;
    let m = match SetProblemInstance::W3dm(W3dmInstance {
        n: g.n,
        weights: BTreeMap::new(),
    })
    .random_solution(rng)?
    {
        Solution::Matching(m) => m,
        _ => unreachable!(),
    };
    Ok(match output.id {
        ReductionId::X3c => Solution::Cover(matching_to_cover(g.n, &m)),
        _ => Solution::Matching(m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::set_problems::ElementSet;
    use crate::source_problems::Constraint;

    fn c(v: i64) -> Cost {
        Cost::from(v)
    }

    /// x blue, y red, z white; C1 pays 2 at (1,1,1) and 5 at (2,2,2), C2 pays 3 at (2,2,2).
    fn i0() -> McaInstance {
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

    fn i1() -> McaInstance {
        McaInstance::posnae(2, vec![Constraint::nae(0, 1, 3)]).unwrap()
    }

    /// x ∨ ¬y with weight 3.
    fn i2() -> McaInstance {
        McaInstance::cnf(2, vec![Constraint::clause(&[(0, false), (1, true)], 3)]).unwrap()
    }

    fn reduce_default(id: ReductionId, src: &McaInstance) -> ReductionOutput {
        reduce(id, src, ReductionOptions::default()).unwrap()
    }

    #[test]
    fn big_w_values() {
        assert_eq!(big_w(&i0()), c(11));
        assert_eq!(big_w(&i2()), c(4));
        let zero = McaInstance::new(
            1,
            2,
            Semantics::Table,
            Sense::Maximize,
            vec![Constraint::table(vec![0], vec![c(0), c(0)])],
        )
        .unwrap();
        assert_eq!(big_w(&zero), c(1));
    }

    #[test]
    fn w3dm_shape_on_i0() {
        let out = reduce_default(ReductionId::W3dm, &i0());
        let SetProblemInstance::W3dm(inst) = &out.target else {
            panic!()
        };
        assert_eq!(inst.n, 14);
        let larges = inst.weights.values().filter(|w| **w == c(77)).count();
        let mediums = inst.weights.values().filter(|w| **w == c(33)).count();
        assert_eq!((larges, mediums), (12, 12));
        let g = out.gadgets().unwrap();
        let smalls: BTreeSet<[usize; 3]> = (0..2)
            .flat_map(|p| (0..8).map(move |idx| (p, idx)))
            .map(|(p, idx)| {
                let v = table_values(idx, 3, 2);
                g.small(p, [v[0], v[1], v[2]])
            })
            .collect();
        assert_eq!(smalls.len(), 16);

        let shared = reduce(
            ReductionId::W3dm,
            &i0(),
            ReductionOptions {
                inventory: InventoryMode::PaperFormula,
                ..Default::default()
            },
        )
        .unwrap();
        let SetProblemInstance::W3dm(inst) = &shared.target else {
            panic!()
        };
        assert_eq!(inst.n, 13);
    }

    #[test]
    fn w3dm_standard_assignment_round_trip() {
        let src = i0();
        let out = reduce_default(ReductionId::W3dm, &src);
        let offset = out.cost_offset().unwrap();
        assert_eq!(offset, c(3 * (14 * 11 + 6 * 11)));
        for a in Assignment::enumerate(3, 2) {
            let s = out.encode(&a).unwrap();
            assert!(out.target.feasible(&s).unwrap());
            assert!(out.is_consistent(&s).unwrap().consistent);
            assert_eq!(out.pull_back(&s).unwrap(), a);
            assert_eq!(
                out.target.cost(&s).unwrap(),
                src.cost(&a).unwrap() + &offset
            );
        }
    }

    #[test]
    fn sp_shape_and_consistency_on_i0() {
        let out = reduce_default(ReductionId::Sp, &i0());
        let SetProblemInstance::Sp(sp) = &out.target else {
            panic!()
        };
        assert_eq!(sp.collection.ground, 10);
        assert_eq!(sp.collection.len(), 18);
        assert_eq!(sp.m_c, 2);
        // C1 at (2,2,2) is the last set of the first family
        assert_eq!(sp.collection.weights[2 + 7], c(5));
        let good = Solution::collection([2 + 7, 10 + 7]);
        assert!(out.is_consistent(&good).unwrap().consistent);
        assert_eq!(out.pull_back(&good).unwrap(), Assignment(vec![1, 1, 1]));
        let bad = Solution::collection([2, 10 + 7]);
        assert!(!out.is_consistent(&bad).unwrap().consistent);
        assert_eq!(out.pull_back(&bad).unwrap(), Assignment(vec![0, 0, 0]));
    }

    #[test]
    fn sc_shape_on_i0() {
        let src = i0().with_sense(Sense::Minimize);
        let out = reduce_default(ReductionId::Sc, &src);
        let SetProblemInstance::Sc(sc) = &out.target else {
            panic!()
        };
        assert_eq!((sc.collection.ground, sc.collection.len()), (8, 16));
        assert!(sc.collection.weights.iter().all(|w| *w >= c(11)));
        assert_eq!(out.cost_offset().unwrap(), c(22));
        assert!(reduce(ReductionId::Sc, &i0(), ReductionOptions::default()).is_err());
    }

    #[test]
    fn ssp_on_i1() {
        let out = reduce_default(ReductionId::Ssp, &i1());
        let SetProblemInstance::Ssp(ssp) = &out.target else {
            panic!()
        };
        assert_eq!(ssp.collection.len(), 1);
        assert_eq!(ssp.collection.weights[0], c(3));
        assert_eq!(
            out.pull_back(&Solution::Partition(vec![false, true]))
                .unwrap(),
            Assignment(vec![0, 1])
        );
        assert_eq!(out.cost_offset().unwrap(), c(0));
    }

    #[test]
    fn ts_pair_weights_on_i1() {
        let out = reduce_default(ReductionId::Ts, &i1());
        let SetProblemInstance::Ts(ts) = &out.target else {
            panic!()
        };
        // x0 = 0, x1 = 1, y0 = 2, y1 = 3
        assert_eq!(ts.pair_weights[0][3], c(8));
        assert_eq!(ts.pair_weights[1][2], c(8));
        assert_eq!(ts.pair_weights[0][2], c(5));
        assert_eq!(ts.pair_weights[1][3], c(5));
        assert_eq!(ts.pair_weights[0][1], c(1));
        assert_eq!(
            out.target.cost(&Solution::collection([0, 3])).unwrap(),
            c(8)
        );

        let literal = reduce(
            ReductionId::Ts,
            &i1(),
            ReductionOptions {
                ts_scheme: TsScheme::PaperLiteral,
                ..Default::default()
            },
        )
        .unwrap();
        let SetProblemInstance::Ts(ts) = &literal.target else {
            panic!()
        };
        assert_eq!(ts.pair_weights[0][2], c(1));
        assert!(matches!(
            literal.cost_offset(),
            Err(Error::NoAffineOffset(_))
        ));
    }

    #[test]
    fn sb_on_i2() {
        let out = reduce_default(ReductionId::Sb, &i2());
        let SetProblemInstance::Sb(sb) = &out.target else {
            panic!()
        };
        assert_eq!(sb.collection.len(), 11);
        assert_eq!(sb.m_c, 2);
        let xy = ElementSet::from_elements(4, [0, 2]);
        let weights: Vec<Cost> = sb
            .collection
            .sets
            .iter()
            .zip(&sb.collection.weights)
            .filter(|(s, _)| **s == xy)
            .map(|(_, w)| w.clone())
            .collect();
        assert_eq!(weights, vec![c(4), c(3)]);
    }

    #[test]
    fn hs_on_i2() {
        let out = reduce_default(ReductionId::Hs, &i2());
        let s = Solution::elements([0, 3]);
        assert_eq!(out.target.cost(&s).unwrap(), c(11));
        assert_eq!(out.cost_offset().unwrap(), c(8));
        assert_eq!(out.pull_back(&s).unwrap(), Assignment(vec![1, 0]));
        let v = out.is_consistent(&Solution::elements([0, 1])).unwrap();
        assert!(!v.consistent);
        assert!(v.violation.unwrap().contains("complementary pair x1"));
    }

    #[test]
    fn ip_on_i1() {
        let out = reduce_default(ReductionId::Ip, &i1());
        let SetProblemInstance::Ip(ip) = &out.target else {
            panic!()
        };
        assert_eq!(ip.a, vec![vec![3, 2], vec![2, 4]]);
        assert_eq!(ip.b, vec![vec![c(4), c(3)], vec![c(3), c(4)]]);
        assert_eq!(ip.donors.sets[0].len(), 3);
        assert_eq!(ip.donors.sets[2].len(), 4);
        assert_eq!(
            out.target.cost(&Solution::SetVector(vec![0, 3])).unwrap(),
            c(11)
        );
        assert_eq!(
            out.target.cost(&Solution::SetVector(vec![0, 2])).unwrap(),
            c(8)
        );
        let open = McaInstance::posnae(3, vec![Constraint::nae(0, 1, 3)]).unwrap();
        assert!(reduce(ReductionId::Ip, &open, ReductionOptions::default()).is_err());
    }

    #[test]
    fn cc_on_i2() {
        let options = ReductionOptions {
            cc_weight: CcWeight::PaperLiteral,
            ..ReductionOptions::default()
        };
        let out = reduce(ReductionId::Cc, &i2(), options).unwrap();
        let SetProblemInstance::Cc(cc) = &out.target else {
            panic!()
        };
        assert_eq!(cc.w_shift, c(16));
        assert_eq!(cc.n_side.len(), 2);
        assert_eq!(cc.m_side.len(), 4 + 3);
        let s = Solution::elements([0, 3]);
        assert_eq!(out.target.cost(&s).unwrap(), c(27));
        assert_eq!(out.cost_offset().unwrap(), c(24));
    }

    #[test]
    fn cc_corrected_weight() {
        // one clause, three satisfying assignments, weight 3
        assert_eq!(cc_big_w(&i2()).unwrap(), c(10));
        let out = reduce_default(ReductionId::Cc, &i2());
        assert_eq!(out.big_w, c(10));
        let SetProblemInstance::Cc(cc) = &out.target else {
            panic!()
        };
        assert_eq!(cc.w_shift, c(40));
        assert_eq!(
            out.target.cost(&Solution::elements([0, 3])).unwrap(),
            c(10 + 10 + 3 + 40)
        );
    }

    #[test]
    fn catalog_finds_consolidation() {
        let src = i0();
        let out = reduce_default(ReductionId::W3dm, &src);
        let g = out.gadgets().unwrap();
        let standard = match out.encode(&Assignment(vec![0, 0, 0])).unwrap() {
            Solution::Matching(m) => m,
            _ => unreachable!(),
        };
        // move one large of x onto gadget 1
        let split = install(&standard, &[g.large(0, 1, 1)]).unwrap();
        let moves = w3dm_move_catalog(g, &src, &split);
        assert!(moves.iter().any(|n| n.kind == "consolidate"));
        for n in &moves {
            let (p, q) = pq_distance(&split, &n.solution);
            assert!(p <= CATALOG_P && q <= CATALOG_Q);
        }
    }
}
