//! The ten weighted set problems: feasibility, exact costs, canonical starts
//! and the k-differ / (p,q) neighborhoods.
//!
//! Elements and set indices are 0-based internally. The text format and all
//! human-facing output are 1-based.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::{Cost, Neighbor, NeighborStream, ProblemBinding, Sense};
use crate::error::{Error, Result};

/// Subset of a ground set `0..capacity`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElementSet(FixedBitSet);

impl ElementSet {
    pub fn empty(capacity: usize) -> Self {
        ElementSet(FixedBitSet::with_capacity(capacity))
    }

    pub fn full(capacity: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(capacity);
        bits.insert_range(..);
        ElementSet(bits)
    }

    pub fn from_elements(capacity: usize, elements: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(capacity);
        for e in elements {
            set.insert(e);
        }
        set
    }

    /// Bit `i` of `mask` becomes element `i`.
    pub fn from_mask(capacity: usize, mask: u64) -> Self {
        Self::from_elements(
            capacity,
            (0..capacity.min(64)).filter(|i| mask >> i & 1 == 1),
        )
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, e: usize) {
        self.0.insert(e);
    }

    pub fn remove(&mut self, e: usize) {
        self.0.set(e, false);
    }

    pub fn contains(&self, e: usize) -> bool {
        self.0.contains(e)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn elements(&self) -> Vec<usize> {
        self.0.ones().collect()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &ElementSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn intersection_count(&self, other: &ElementSet) -> usize {
        self.0.intersection_count(&other.0)
    }

    pub fn union_with(&mut self, other: &ElementSet) {
        self.0.union_with(&other.0);
    }
}

impl Ord for ElementSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .ones()
            .cmp(other.0.ones())
            .then(self.capacity().cmp(&other.capacity()))
    }
}

impl PartialOrd for ElementSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.ones()).finish()
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|e| (e + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(" "))
    }
}

/// Indexed family of weighted subsets; duplicates with distinct indices are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedCollection {
    pub ground: usize,
    pub labels: Vec<String>,
    pub sets: Vec<ElementSet>,
    pub weights: Vec<Cost>,
}

pub fn default_labels(ground: usize) -> Vec<String> {
    (1..=ground).map(|i| i.to_string()).collect()
}

impl WeightedCollection {
    pub fn new(ground: usize, sets: Vec<Vec<usize>>, weights: Vec<Cost>) -> Result<Self> {
        if sets.len() != weights.len() {
            return Err(Error::InvalidInstance(format!(
                "{} sets but {} weights",
                sets.len(),
                weights.len()
            )));
        }
        let mut built = Vec::with_capacity(sets.len());
        for (i, s) in sets.into_iter().enumerate() {
            if let Some(e) = s.iter().find(|&&e| e >= ground) {
                return Err(Error::InvalidInstance(format!(
                    "set {} contains element {} outside ground set of size {ground}",
                    i + 1,
                    e + 1
                )));
            }
            built.push(ElementSet::from_elements(ground, s));
        }
        let c = WeightedCollection {
            ground,
            labels: default_labels(ground),
            sets: built,
            weights,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn empty(ground: usize) -> Self {
        WeightedCollection {
            ground,
            labels: default_labels(ground),
            sets: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn push(&mut self, elements: impl IntoIterator<Item = usize>, weight: impl Into<Cost>) {
        self.sets
            .push(ElementSet::from_elements(self.ground, elements));
        self.weights.push(weight.into());
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.len() != self.ground {
            return Err(Error::InvalidInstance(
                "label count differs from ground size".into(),
            ));
        }
        if self.sets.len() != self.weights.len() {
            return Err(Error::InvalidInstance(
                "set and weight counts differ".into(),
            ));
        }
        if let Some(i) = self.weights.iter().position(|w| w < &Cost::zero()) {
            return Err(Error::InvalidInstance(format!(
                "set {} has a negative weight",
                i + 1
            )));
        }
        if let Some(i) = self.sets.iter().position(|s| s.capacity() != self.ground) {
            return Err(Error::InvalidInstance(format!(
                "set {} has the wrong capacity",
                i + 1
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn total_weight(&self) -> Cost {
        self.weights.iter().sum()
    }

    pub fn union_of<'a>(&self, indices: impl IntoIterator<Item = &'a usize>) -> ElementSet {
        let mut u = ElementSet::empty(self.ground);
        for &i in indices {
            u.union_with(&self.sets[i]);
        }
        u
    }

    pub fn covers<'a>(&self, indices: impl IntoIterator<Item = &'a usize>) -> bool {
        self.union_of(indices).len() == self.ground
    }
}

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMode {
    /// Both endpoints must be isolated by some member.
    #[default]
    TwoSided,
    /// One member containing exactly one endpoint suffices.
    OneSided,
}

impl SeparationMode {
    pub fn name(self) -> &'static str {
        match self {
            SeparationMode::TwoSided => "two_sided",
            SeparationMode::OneSided => "one_sided",
        }
    }
}

/// How the distance between two subset solutions is measured.
#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// An add, a delete or an exchange of one describing element is one step:
    /// distance = max(|removed|, |added|).
    #[default]
    Exchange,
    /// distance = |removed| + |added|.
    SymmetricDifference,
}

impl Metric {
    pub fn distance(self, removed: usize, added: usize) -> usize {
        match self {
            Metric::Exchange => removed.max(added),
            Metric::SymmetricDifference => removed + added,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct W3dmInstance {
    pub n: usize,
    /// Sparse; absent triples weigh 0.
    pub weights: BTreeMap<[usize; 3], Cost>,
}

impl W3dmInstance {
    pub fn weight(&self, t: &[usize; 3]) -> Cost {
        self.weights.get(t).cloned().unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct X3cInstance {
    pub ground: usize,
    pub labels: Vec<String>,
    /// Sorted 3-sets; every other 3-set weighs 0.
    pub weights: BTreeMap<[usize; 3], Cost>,
}

impl X3cInstance {
    pub fn weight(&self, t: &[usize; 3]) -> Cost {
        self.weights.get(t).cloned().unwrap_or_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpInstance {
    pub collection: WeightedCollection,
    pub m_c: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SspInstance {
    pub collection: WeightedCollection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScInstance {
    pub collection: WeightedCollection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TsInstance {
    pub collection: WeightedCollection,
    /// Dense symmetric pair weights with a zero diagonal.
    pub pair_weights: Vec<Vec<Cost>>,
    pub m_b: usize,
    pub separation: SeparationMode,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SbInstance {
    pub collection: WeightedCollection,
    pub m_c: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsInstance {
    pub collection: WeightedCollection,
    pub m_b: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpInstance {
    pub a: Vec<Vec<usize>>,
    pub b: Vec<Vec<Cost>>,
    /// Donor sets; their weights are unused.
    pub donors: WeightedCollection,
}

impl IpInstance {
    pub fn n(&self) -> usize {
        self.a.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcInstance {
    pub m_side: WeightedCollection,
    pub n_side: WeightedCollection,
    pub w_shift: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetProblemInstance {
    W3dm(W3dmInstance),
    X3c(X3cInstance),
    Sp(SpInstance),
    Ssp(SspInstance),
    Sc(ScInstance),
    Ts(TsInstance),
    Sb(SbInstance),
    Hs(HsInstance),
    Ip(IpInstance),
    Cc(CcInstance),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Solution {
    Collection(BTreeSet<usize>),
    Elements(BTreeSet<usize>),
    /// `true` places the element in S2.
    Partition(Vec<bool>),
    SetVector(Vec<usize>),
    Basis(BTreeSet<ElementSet>),
    /// Triples (boy, girl, home).
    Matching(BTreeSet<[usize; 3]>),
    /// Sorted 3-sets of an exact cover.
    Cover(BTreeSet<[usize; 3]>),
}

impl Solution {
    pub fn variant_name(&self) -> &'static str {
        match self {
            Solution::Collection(_) => "collection",
            Solution::Elements(_) => "elements",
            Solution::Partition(_) => "partition",
            Solution::SetVector(_) => "vector",
            Solution::Basis(_) => "basis",
            Solution::Matching(_) => "matching",
            Solution::Cover(_) => "cover",
        }
    }

    pub fn collection(items: impl IntoIterator<Item = usize>) -> Self {
        Solution::Collection(items.into_iter().collect())
    }

    pub fn elements(items: impl IntoIterator<Item = usize>) -> Self {
        Solution::Elements(items.into_iter().collect())
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).join(" ")
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Solution::Collection(s) => write!(f, "collection {}", join(s.iter().map(|i| i + 1))),
            Solution::Elements(s) => write!(f, "elements {}", join(s.iter().map(|i| i + 1))),
            Solution::Partition(p) => {
                write!(
                    f,
                    "partition {}",
                    join(p.iter().map(|&b| if b { 2 } else { 1 }))
                )
            }
            Solution::SetVector(v) => write!(f, "vector {}", join(v.iter().map(|i| i + 1))),
            Solution::Basis(b) => write!(f, "basis {}", join(b.iter())),
            Solution::Matching(m) => write!(
                f,
                "matching {}",
                join(
                    m.iter()
                        .map(|t| format!("({},{},{})", t[0] + 1, t[1] + 1, t[2] + 1))
                )
            ),
            Solution::Cover(c) => write!(
                f,
                "cover {}",
                join(
                    c.iter()
                        .map(|t| format!("{{{} {} {}}}", t[0] + 1, t[1] + 1, t[2] + 1))
                )
            ),
        }
    }
}

fn mismatch(problem: &str, got: &Solution) -> Error {
    Error::VariantMismatch {
        problem: problem.to_string(),
        got: got.variant_name().to_string(),
    }
}

fn square_symmetric<T: PartialEq>(m: &[Vec<T>], n: usize, what: &str) -> Result<()> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(Error::InvalidInstance(format!("{what} is not {n}x{n}")));
    }
    for i in 0..n {
        for j in 0..i {
            if m[i][j] != m[j][i] {
                return Err(Error::InvalidInstance(format!("{what} is not symmetric")));
            }
        }
    }
    Ok(())
}

/// Whether `matching` is a perfect matching over `[n]^3`.
pub fn is_matching(n: usize, matching: &BTreeSet<[usize; 3]>) -> bool {
    if matching.len() != n {
        return false;
    }
    let mut seen = vec![[false; 3]; n];
    for t in matching {
        for k in 0..3 {
            if t[k] >= n || seen[t[k]][k] {
                return false;
            }
            seen[t[k]][k] = true;
        }
    }
    true
}

/// Whether `cover` is an exact cover of `0..ground` by 3-sets.
pub fn is_exact_cover(ground: usize, cover: &BTreeSet<[usize; 3]>) -> bool {
    let mut seen = vec![false; ground];
    for t in cover {
        if t[0] >= t[1] || t[1] >= t[2] || t[2] >= ground {
            return false;
        }
        for &e in t {
            if seen[e] {
                return false;
            }
            seen[e] = true;
        }
    }
    seen.iter().all(|&b| b)
}

impl SetProblemInstance {
    pub fn tag(&self) -> &'static str {
        match self {
            SetProblemInstance::W3dm(_) => "w3dm",
            SetProblemInstance::X3c(_) => "x3c",
            SetProblemInstance::Sp(_) => "sp",
            SetProblemInstance::Ssp(_) => "ssp",
            SetProblemInstance::Sc(_) => "sc",
            SetProblemInstance::Ts(_) => "ts",
            SetProblemInstance::Sb(_) => "sb",
            SetProblemInstance::Hs(_) => "hs",
            SetProblemInstance::Ip(_) => "ip",
            SetProblemInstance::Cc(_) => "cc",
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            SetProblemInstance::Sc(_) => Sense::Minimize,
            _ => Sense::Maximize,
        }
    }

    /// Size of the ground set the solutions range over.
    pub fn ground_size(&self) -> usize {
        match self {
            SetProblemInstance::W3dm(i) => i.n,
            SetProblemInstance::X3c(i) => i.ground,
            SetProblemInstance::Sp(i) => i.collection.ground,
            SetProblemInstance::Ssp(i) => i.collection.ground,
            SetProblemInstance::Sc(i) => i.collection.ground,
            SetProblemInstance::Ts(i) => i.collection.ground,
            SetProblemInstance::Sb(i) => i.collection.ground,
            SetProblemInstance::Hs(i) => i.collection.ground,
            SetProblemInstance::Ip(i) => i.donors.ground,
            SetProblemInstance::Cc(i) => i.m_side.ground,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        match self {
            SetProblemInstance::W3dm(i) => {
                if let Some(t) = i.weights.keys().find(|t| t.iter().any(|&c| c >= i.n)) {
                    return bad(format!("triple {t:?} outside [{}]", i.n));
                }
                if i.weights.values().any(|w| w < &Cost::zero()) {
                    return bad("negative triple weight".into());
                }
            }
            SetProblemInstance::X3c(i) => {
                if i.ground % 3 != 0 {
                    return bad(format!("ground size {} not divisible by 3", i.ground));
                }
                if i.labels.len() != i.ground {
                    return bad("label count differs from ground size".into());
                }
                for (t, w) in &i.weights {
                    if !(t[0] < t[1] && t[1] < t[2] && t[2] < i.ground) {
                        return bad(format!("malformed 3-set {t:?}"));
                    }
                    if w < &Cost::zero() {
                        return bad("negative set weight".into());
                    }
                }
            }
            SetProblemInstance::Sp(i) => i.collection.validate()?,
            SetProblemInstance::Ssp(i) => i.collection.validate()?,
            SetProblemInstance::Sc(i) => i.collection.validate()?,
            SetProblemInstance::Ts(i) => {
                i.collection.validate()?;
                square_symmetric(&i.pair_weights, i.collection.ground, "pair weight matrix")?;
                if i.pair_weights.iter().flatten().any(|w| w < &Cost::zero()) {
                    return bad("negative pair weight".into());
                }
            }
            SetProblemInstance::Sb(i) => {
                i.collection.validate()?;
                if i.m_c == 0 {
                    return bad("set basis needs m_C >= 1".into());
                }
            }
            SetProblemInstance::Hs(i) => i.collection.validate()?,
            SetProblemInstance::Ip(i) => {
                i.donors.validate()?;
                let n = i.a.len();
                square_symmetric(&i.a, n, "matrix A")?;
                square_symmetric(&i.b, n, "matrix B")?;
                if i.donors.len() < n {
                    return bad(format!("{} donors for {n} positions", i.donors.len()));
                }
                if i.b.iter().flatten().any(|w| w < &Cost::zero()) {
                    return bad("negative entry in matrix B".into());
                }
            }
            SetProblemInstance::Cc(i) => {
                i.m_side.validate()?;
                i.n_side.validate()?;
                if i.m_side.ground != i.n_side.ground {
                    return bad("collections over different ground sets".into());
                }
                if i.w_shift < i.n_side.total_weight() {
                    return bad("shift smaller than the N-side weight".into());
                }
            }
        }
        Ok(())
    }

    pub fn feasible(&self, s: &Solution) -> Result<bool> {
        let ok = match (self, s) {
            (SetProblemInstance::W3dm(i), Solution::Matching(m)) => is_matching(i.n, m),
            (SetProblemInstance::X3c(i), Solution::Cover(c)) => is_exact_cover(i.ground, c),
            (SetProblemInstance::Sp(i), Solution::Collection(c)) => {
                c.len() <= i.m_c && c.iter().all(|&j| j < i.collection.len())
            }
            (SetProblemInstance::Ssp(i), Solution::Partition(p)) => p.len() == i.collection.ground,
            (SetProblemInstance::Sc(i), Solution::Collection(c)) => {
                c.iter().all(|&j| j < i.collection.len()) && i.collection.covers(c)
            }
            (SetProblemInstance::Ts(i), Solution::Collection(c)) => {
                !c.is_empty() && c.len() <= i.m_b && c.iter().all(|&j| j < i.collection.len())
            }
            (SetProblemInstance::Sb(i), Solution::Basis(b)) => {
                b.len() == i.m_c && b.iter().all(|s| s.capacity() == i.collection.ground)
            }
            (SetProblemInstance::Hs(i), Solution::Elements(e)) => {
                e.len() <= i.m_b && e.iter().all(|&x| x < i.collection.ground)
            }
            (SetProblemInstance::Ip(i), Solution::SetVector(v)) => {
                v.len() == i.n() && v.iter().all(|&d| d < i.donors.len())
            }
            (SetProblemInstance::Cc(i), Solution::Elements(e)) => {
                e.iter().all(|&x| x < i.m_side.ground)
            }
            _ => return Err(mismatch(self.tag(), s)),
        };
        Ok(ok)
    }

    /// Exact cost; infeasible solutions are an error.
    pub fn cost(&self, s: &Solution) -> Result<Cost> {
        if !self.feasible(s)? {
            return Err(Error::Infeasible(format!("{} solution {s}", self.tag())));
        }
        Ok(match (self, s) {
            (SetProblemInstance::W3dm(i), Solution::Matching(m)) => {
                m.iter().map(|t| i.weight(t)).sum()
            }
            (SetProblemInstance::X3c(i), Solution::Cover(c)) => c.iter().map(|t| i.weight(t)).sum(),
            (SetProblemInstance::Sp(i), Solution::Collection(c)) => cost_sp(&i.collection, c),
            (SetProblemInstance::Ssp(i), Solution::Partition(p)) => cost_ssp(&i.collection, p),
            (SetProblemInstance::Sc(i), Solution::Collection(c)) => {
                c.iter().map(|&j| &i.collection.weights[j]).sum()
            }
            (SetProblemInstance::Ts(i), Solution::Collection(c)) => cost_ts(i, c),
            (SetProblemInstance::Sb(i), Solution::Basis(b)) => cost_sb(&i.collection, b),
            (SetProblemInstance::Hs(i), Solution::Elements(e)) => cost_hs(&i.collection, e),
            (SetProblemInstance::Ip(i), Solution::SetVector(v)) => cost_ip(i, v),
            (SetProblemInstance::Cc(i), Solution::Elements(e)) => cost_cc(i, e),
            _ => unreachable!("feasible() rejected the mismatch"),
        })
    }

    /// The canonical feasible start.
    pub fn init_solution(&self) -> Result<Solution> {
        let fail = |msg: &str| Err(Error::Infeasible(format!("no initial solution: {msg}")));
        match self {
            SetProblemInstance::W3dm(i) => {
                Ok(Solution::Matching((0..i.n).map(|j| [j, j, j]).collect()))
            }
            SetProblemInstance::X3c(i) => {
                if i.ground % 3 != 0 {
                    return fail("ground size not divisible by 3");
                }
                Ok(Solution::Cover(
                    (0..i.ground / 3)
                        .map(|j| [3 * j, 3 * j + 1, 3 * j + 2])
                        .collect(),
                ))
            }
            SetProblemInstance::Sp(_) => Ok(Solution::Collection(BTreeSet::new())),
            SetProblemInstance::Hs(_) | SetProblemInstance::Cc(_) => {
                Ok(Solution::Elements(BTreeSet::new()))
            }
            SetProblemInstance::Ssp(i) => Ok(Solution::Partition(vec![false; i.collection.ground])),
            SetProblemInstance::Sc(i) => {
                let all: BTreeSet<usize> = (0..i.collection.len()).collect();
                if !i.collection.covers(&all) {
                    return fail("the collection does not cover the ground set");
                }
                Ok(Solution::Collection(all))
            }
            SetProblemInstance::Ts(i) => {
                if i.collection.is_empty() || i.m_b == 0 {
                    return fail("test set needs a set and m_B >= 1");
                }
                Ok(Solution::collection([0]))
            }
            SetProblemInstance::Sb(i) => {
                if i.collection.ground < i.m_c {
                    return fail("fewer elements than basis members");
                }
                let g = i.collection.ground;
                Ok(Solution::Basis(
                    (0..i.m_c)
                        .map(|e| ElementSet::from_elements(g, [e]))
                        .collect(),
                ))
            }
            SetProblemInstance::Ip(i) => {
                if i.donors.is_empty() && i.n() > 0 {
                    return fail("no donor sets");
                }
                Ok(Solution::SetVector(vec![0; i.n()]))
            }
        }
    }

    /// Upper bound on the k-differ neighborhood size, used to refuse huge scans.
    pub fn neighborhood_bound(&self, s: &Solution, k: usize, metric: Metric) -> u128 {
        fn binom(n: usize, r: usize) -> u128 {
            if r > n {
                return 0;
            }
            (0..r).fold(1u128, |acc, i| {
                acc.saturating_mul((n - i) as u128) / (i as u128 + 1)
            })
        }
        let subset = |size: usize, universe: usize| -> u128 {
            let mut total = 0u128;
            for r in 0..=k {
                for a in 0..=k {
                    if (r, a) != (0, 0) && metric.distance(r, a) <= k {
                        total = total.saturating_add(
                            binom(size, r).saturating_mul(binom(universe - size, a)),
                        );
                    }
                }
            }
            total
        };
        match (self, s) {
            (SetProblemInstance::Sp(i), Solution::Collection(c)) => {
                subset(c.len(), i.collection.len())
            }
            (SetProblemInstance::Sc(i), Solution::Collection(c)) => {
                subset(c.len(), i.collection.len())
            }
            (SetProblemInstance::Ts(i), Solution::Collection(c)) => {
                subset(c.len(), i.collection.len())
            }
            (SetProblemInstance::Hs(i), Solution::Elements(e)) => {
                subset(e.len(), i.collection.ground)
            }
            (SetProblemInstance::Cc(i), Solution::Elements(e)) => subset(e.len(), i.m_side.ground),
            (SetProblemInstance::Ssp(i), Solution::Partition(_)) => {
                (1..=k).map(|t| binom(i.collection.ground, t)).sum()
            }
            (SetProblemInstance::Ip(i), Solution::SetVector(_)) => (1..=k)
                .map(|t| {
                    binom(i.n(), t).saturating_mul(
                        ((i.donors.len().saturating_sub(1)) as u128).saturating_pow(t as u32),
                    )
                })
                .sum(),
            (SetProblemInstance::Sb(i), Solution::Basis(_)) => {
                let g = i.collection.ground;
                if g >= 100 {
                    return u128::MAX;
                }
                let universe = 1u128 << g;
                (1..=k)
                    .map(|t| {
                        let mut c = 1u128;
                        for j in 0..t {
                            c = c.saturating_mul(universe.saturating_sub(j as u128))
                                / (j as u128 + 1);
                        }
                        binom(i.m_c, t).saturating_mul(c)
                    })
                    .fold(0u128, |a, b| a.saturating_add(b))
            }
            (SetProblemInstance::X3c(i), Solution::Cover(_)) => {
                // partitions of 3t freed elements into t triples
                let sets = i.ground / 3;
                (1..=k)
                    .map(|t| {
                        let mut ways = 1u128;
                        for j in 0..t {
                            ways = ways.saturating_mul(binom(3 * (t - j) - 1, 2));
                        }
                        binom(sets, t).saturating_mul(ways)
                    })
                    .fold(0u128, |a, b| a.saturating_add(b))
            }
            (SetProblemInstance::W3dm(i), Solution::Matching(_)) => (2..=k)
                .map(|t| {
                    let f = (1..=t as u128).product::<u128>();
                    binom(i.n, t).saturating_mul(f.saturating_mul(f))
                })
                .fold(0u128, |a, b| a.saturating_add(b)),
            _ => u128::MAX,
        }
    }

    /// All feasible solutions at describing-element distance `1..=k`.
    ///
    /// Fails with [`Error::NeighborhoodTooLarge`] when the neighborhood bound
    /// exceeds `cap`.
    pub fn kdiffer_neighbors<'a>(
        &'a self,
        s: &'a Solution,
        k: usize,
        metric: Metric,
        cap: usize,
    ) -> Result<Box<dyn Iterator<Item = Solution> + 'a>> {
        if !self.feasible(s)? {
            return Err(Error::Infeasible(format!("{} solution {s}", self.tag())));
        }
        if self.neighborhood_bound(s, k, metric) > cap as u128 {
            return Err(Error::NeighborhoodTooLarge { limit: cap });
        }
        Ok(match (self, s) {
            (SetProblemInstance::W3dm(i), Solution::Matching(m)) => {
                Box::new(w3dm_pq_neighbors(i, m, k, usize::MAX, usize::MAX)?.into_iter())
            }
            (SetProblemInstance::X3c(_), Solution::Cover(c)) => Box::new(x3c_neighbors(c, k)),
            (
                SetProblemInstance::Sp(_) | SetProblemInstance::Sc(_) | SetProblemInstance::Ts(_),
                Solution::Collection(c),
            ) => {
                let universe = match self {
                    SetProblemInstance::Sp(i) => i.collection.len(),
                    SetProblemInstance::Sc(i) => i.collection.len(),
                    SetProblemInstance::Ts(i) => i.collection.len(),
                    _ => unreachable!(),
                };
                Box::new(
                    subset_neighbors(c, universe, k, metric)
                        .map(Solution::Collection)
                        .filter(move |n| self.feasible(n).unwrap_or(false)),
                )
            }
            (SetProblemInstance::Hs(_) | SetProblemInstance::Cc(_), Solution::Elements(e)) => {
                let universe = self.ground_size();
                Box::new(
                    subset_neighbors(e, universe, k, metric)
                        .map(Solution::Elements)
                        .filter(move |n| self.feasible(n).unwrap_or(false)),
                )
            }
            (SetProblemInstance::Ssp(_), Solution::Partition(p)) => {
                let n = p.len();
                Box::new((1..=k.min(n)).flat_map(move |t| {
                    (0..n).combinations(t).map(move |flip| {
                        let mut q = p.clone();
                        for e in flip {
                            q[e] = !q[e];
                        }
                        Solution::Partition(q)
                    })
                }))
            }
            (SetProblemInstance::Ip(i), Solution::SetVector(v)) => {
                let n = v.len();
                let l = i.donors.len();
                Box::new((1..=k.min(n)).flat_map(move |t| {
                    (0..n).combinations(t).flat_map(move |positions| {
                        positions
                            .iter()
                            .map(|&p| (0..l).filter(move |&d| d != v[p]))
                            .multi_cartesian_product()
                            .map(move |choice| {
                                let mut w = v.clone();
                                for (&p, d) in positions.iter().zip(choice) {
                                    w[p] = d;
                                }
                                Solution::SetVector(w)
                            })
                    })
                }))
            }
            (SetProblemInstance::Sb(i), Solution::Basis(b)) => {
                Box::new(basis_neighbors(i.collection.ground, b, k))
            }
            _ => return Err(mismatch(self.tag(), s)),
        })
    }

    /// A uniformly drawn feasible solution (up to problem-specific repairs).
    pub fn random_solution<R: Rng>(&self, rng: &mut R) -> Result<Solution> {
        fn random_subset<R: Rng>(
            universe: usize,
            max: usize,
            min: usize,
            rng: &mut R,
        ) -> BTreeSet<usize> {
            let size = rng.gen_range(min.min(universe)..=max.min(universe));
            let mut items: Vec<usize> = (0..universe).collect();
            items.shuffle(rng);
            items.into_iter().take(size).collect()
        }
        Ok(match self {
            SetProblemInstance::W3dm(i) => {
                let mut girls: Vec<usize> = (0..i.n).collect();
                let mut homes: Vec<usize> = (0..i.n).collect();
                girls.shuffle(rng);
                homes.shuffle(rng);
                Solution::Matching((0..i.n).map(|b| [b, girls[b], homes[b]]).collect())
            }
            SetProblemInstance::X3c(i) => {
                let mut elems: Vec<usize> = (0..i.ground).collect();
                elems.shuffle(rng);
                Solution::Cover(
                    elems
                        .chunks(3)
                        .map(|c| {
                            let mut t = [c[0], c[1], c[2]];
                            t.sort_unstable();
                            t
                        })
                        .collect(),
                )
            }
            SetProblemInstance::Sp(i) => {
                Solution::Collection(random_subset(i.collection.len(), i.m_c, 0, rng))
            }
            SetProblemInstance::Sc(i) => {
                let all: BTreeSet<usize> = (0..i.collection.len()).collect();
                if !i.collection.covers(&all) {
                    return self.init_solution();
                }
                let mut order: Vec<usize> = all.into_iter().collect();
                order.shuffle(rng);
                let mut chosen = random_subset(i.collection.len(), i.collection.len(), 0, rng);
                for j in order {
                    if i.collection.covers(&chosen) {
                        break;
                    }
                    chosen.insert(j);
                }
                Solution::Collection(chosen)
            }
            SetProblemInstance::Ssp(i) => Solution::Partition(
                (0..i.collection.ground)
                    .map(|_| rng.gen_bool(0.5))
                    .collect(),
            ),
            SetProblemInstance::Ts(i) => {
                if i.collection.is_empty() || i.m_b == 0 {
                    return self.init_solution();
                }
                Solution::Collection(random_subset(i.collection.len(), i.m_b, 1, rng))
            }
            SetProblemInstance::Sb(i) => {
                let g = i.collection.ground;
                if g < 63 && (1u64 << g) < i.m_c as u64 {
                    return self.init_solution();
                }
                let mut basis = BTreeSet::new();
                while basis.len() < i.m_c {
                    let members = (0..g).filter(|_| rng.gen_bool(0.5));
                    basis.insert(ElementSet::from_elements(g, members));
                }
                Solution::Basis(basis)
            }
            SetProblemInstance::Hs(i) => {
                Solution::Elements(random_subset(i.collection.ground, i.m_b, 0, rng))
            }
            SetProblemInstance::Ip(i) => {
                if i.donors.is_empty() {
                    return self.init_solution();
                }
                Solution::SetVector(
                    (0..i.n())
                        .map(|_| rng.gen_range(0..i.donors.len()))
                        .collect(),
                )
            }
            SetProblemInstance::Cc(i) => {
                Solution::Elements(random_subset(i.m_side.ground, i.m_side.ground, 0, rng))
            }
        })
    }
}

/// Members of `s` that are disjoint from every other member pay their weight.
pub fn cost_sp(c: &WeightedCollection, s: &BTreeSet<usize>) -> Cost {
    s.iter()
        .filter(|&&i| {
            s.iter()
                .all(|&j| j == i || c.sets[i].is_disjoint(&c.sets[j]))
        })
        .map(|&i| &c.weights[i])
        .sum()
}

pub fn cost_ssp(c: &WeightedCollection, side: &[bool]) -> Cost {
    c.sets
        .iter()
        .zip(&c.weights)
        .filter(|(set, _)| set.iter().any(|e| !side[e]) && set.iter().any(|e| side[e]))
        .map(|(_, w)| w)
        .sum()
}

pub fn cost_ts(inst: &TsInstance, s: &BTreeSet<usize>) -> Cost {
    let g = inst.collection.ground;
    let chosen: Vec<&ElementSet> = s.iter().map(|&i| &inst.collection.sets[i]).collect();
    let signatures: Vec<ElementSet> = (0..g)
        .map(|e| {
            ElementSet::from_elements(
                chosen.len(),
                chosen
                    .iter()
                    .enumerate()
                    .filter(|(_, set)| set.contains(e))
                    .map(|(p, _)| p),
            )
        })
        .collect();
    let mut total = Cost::zero();
    for i in 0..g {
        for j in (i + 1)..g {
            let (si, sj) = (&signatures[i], &signatures[j]);
            let separated = match inst.separation {
                SeparationMode::TwoSided => !si.is_subset(sj) && !sj.is_subset(si),
                SeparationMode::OneSided => si != sj,
            };
            if separated {
                total += &inst.pair_weights[i][j];
            }
        }
    }
    total
}

/// `target` is a union of basis members iff the members it contains cover it.
pub fn expressible(basis: &BTreeSet<ElementSet>, target: &ElementSet) -> bool {
    let mut u = ElementSet::empty(target.capacity());
    for b in basis.iter().filter(|b| b.is_subset(target)) {
        u.union_with(b);
    }
    &u == target
}

pub fn cost_sb(c: &WeightedCollection, basis: &BTreeSet<ElementSet>) -> Cost {
    c.sets
        .iter()
        .zip(&c.weights)
        .filter(|(set, _)| expressible(basis, set))
        .map(|(_, w)| w)
        .sum()
}

pub fn cost_hs(c: &WeightedCollection, s: &BTreeSet<usize>) -> Cost {
    c.sets
        .iter()
        .zip(&c.weights)
        .filter(|(set, _)| s.iter().any(|&e| set.contains(e)))
        .map(|(_, w)| w)
        .sum()
}

pub fn cost_ip(inst: &IpInstance, v: &[usize]) -> Cost {
    let mut total = Cost::zero();
    for i in 0..v.len() {
        for j in i..v.len() {
            let common = inst.donors.sets[v[i]].intersection_count(&inst.donors.sets[v[j]]);
            if common == inst.a[i][j] {
                total += &inst.b[i][j];
            }
        }
    }
    total
}

pub fn cost_cc(inst: &CcInstance, s: &BTreeSet<usize>) -> Cost {
    let set = ElementSet::from_elements(inst.m_side.ground, s.iter().copied());
    let inside = |c: &WeightedCollection| -> Cost {
        c.sets
            .iter()
            .zip(&c.weights)
            .filter(|(d, _)| set.is_subset(d))
            .map(|(_, w)| w)
            .sum()
    };
    inside(&inst.m_side) - inside(&inst.n_side) + &inst.w_shift
}

/// Subsets of `0..universe` obtained from `s` by removing `r` and adding `a`
/// elements with `metric.distance(r, a)` in `1..=k`. Order: by `r`, then `a`,
/// then lexicographic combinations.
pub fn subset_neighbors<'a>(
    s: &'a BTreeSet<usize>,
    universe: usize,
    k: usize,
    metric: Metric,
) -> impl Iterator<Item = BTreeSet<usize>> + 'a {
    let inside: Vec<usize> = s.iter().copied().collect();
    let outside: Vec<usize> = (0..universe).filter(|e| !s.contains(e)).collect();
    let shapes: Vec<(usize, usize)> = (0..=k)
        .flat_map(|r| (0..=k).map(move |a| (r, a)))
        .filter(|&(r, a)| (r, a) != (0, 0) && metric.distance(r, a) <= k)
        .filter(|&(r, a)| r <= inside.len() && a <= outside.len())
        .collect();
    shapes.into_iter().flat_map(move |(r, a)| {
        let outside = outside.clone();
        inside
            .clone()
            .into_iter()
            .combinations(r)
            .flat_map(move |removed| {
                let outside = outside.clone();
                outside.into_iter().combinations(a).map(move |added| {
                    let mut next = s.clone();
                    for e in &removed {
                        next.remove(e);
                    }
                    next.extend(added);
                    next
                })
            })
    })
}

fn basis_neighbors(
    ground: usize,
    basis: &BTreeSet<ElementSet>,
    k: usize,
) -> impl Iterator<Item = Solution> + '_ {
    let members: Vec<ElementSet> = basis.iter().cloned().collect();
    let candidates: Vec<ElementSet> = (0..1u64 << ground)
        .map(|mask| ElementSet::from_mask(ground, mask))
        .filter(|c| !basis.contains(c))
        .collect();
    (1..=k.min(members.len())).flat_map(move |t| {
        let candidates = candidates.clone();
        members
            .clone()
            .into_iter()
            .combinations(t)
            .flat_map(move |removed| {
                candidates
                    .clone()
                    .into_iter()
                    .combinations(t)
                    .map(move |added| {
                        let mut next = basis.clone();
                        for r in &removed {
                            next.remove(r);
                        }
                        next.extend(added);
                        Solution::Basis(next)
                    })
            })
    })
}

/// Partitions of `elems` (sorted, length divisible by 3) into sorted triples.
fn triple_partitions(elems: &[usize]) -> Vec<Vec<[usize; 3]>> {
    if elems.is_empty() {
        return vec![Vec::new()];
    }
    let first = elems[0];
    let rest = &elems[1..];
    let mut out = Vec::new();
    for (i, j) in (0..rest.len()).tuple_combinations() {
        let remaining: Vec<usize> = rest
            .iter()
            .enumerate()
            .filter(|&(p, _)| p != i && p != j)
            .map(|(_, &e)| e)
            .collect();
        for mut tail in triple_partitions(&remaining) {
            tail.insert(0, [first, rest[i], rest[j]]);
            out.push(tail);
        }
    }
    out
}

/// Exact covers obtained by removing `t <= k` sets and regrouping their
/// elements so that none of the removed sets reappears.
fn x3c_neighbors(cover: &BTreeSet<[usize; 3]>, k: usize) -> impl Iterator<Item = Solution> + '_ {
    let sets: Vec<[usize; 3]> = cover.iter().copied().collect();
    (1..=k.min(sets.len())).flat_map(move |t| {
        sets.clone()
            .into_iter()
            .combinations(t)
            .flat_map(move |removed| {
                let mut freed: Vec<usize> = removed.iter().flatten().copied().collect();
                freed.sort_unstable();
                triple_partitions(&freed)
                    .into_iter()
                    .filter(|p| p.iter().all(|tr| !removed.contains(tr)))
                    .map(|p| {
                        let mut next = cover.clone();
                        for r in &removed {
                            next.remove(r);
                        }
                        next.extend(p);
                        Solution::Cover(next)
                    })
                    .collect::<Vec<_>>()
            })
    })
}

/// Number of boys plus girls whose home differs between two matchings.
pub fn relocations(from: &BTreeSet<[usize; 3]>, to: &BTreeSet<[usize; 3]>) -> usize {
    let homes = |m: &BTreeSet<[usize; 3]>, k: usize| -> BTreeMap<usize, usize> {
        m.iter().map(|t| (t[k], t[2])).collect()
    };
    let (boys_a, boys_b) = (homes(from, 0), homes(to, 0));
    let (girls_a, girls_b) = (homes(from, 1), homes(to, 1));
    let moved = |a: &BTreeMap<usize, usize>, b: &BTreeMap<usize, usize>| {
        a.iter().filter(|(x, h)| b.get(x) != Some(h)).count()
    };
    moved(&boys_a, &boys_b) + moved(&girls_a, &girls_b)
}

/// `(replaced triples, relocations)` between two matchings.
pub fn pq_distance(from: &BTreeSet<[usize; 3]>, to: &BTreeSet<[usize; 3]>) -> (usize, usize) {
    (from.difference(to).count(), relocations(from, to))
}

/// Exhaustive (p,q) neighborhood of a matching.
///
/// Every neighbor is produced exactly once: the removed triples are regrouped
/// by permuting girls and homes, and regroupings that keep one of the removed
/// triples are skipped. Refuses matchings with more than `cap` triples.
pub fn w3dm_pq_neighbors(
    inst: &W3dmInstance,
    s: &BTreeSet<[usize; 3]>,
    p: usize,
    q: usize,
    cap: usize,
) -> Result<Vec<Solution>> {
    if !is_matching(inst.n, s) {
        return Err(Error::Infeasible("not a perfect matching".into()));
    }
    if inst.n > cap {
        return Err(Error::NeighborhoodTooLarge { limit: cap });
    }
    let triples: Vec<[usize; 3]> = s.iter().copied().collect();
    let mut out = Vec::new();
    for t in 2..=p.min(triples.len()) {
        for removed in triples.iter().copied().combinations(t) {
            for girls in (0..t).permutations(t) {
                for homes in (0..t).permutations(t) {
                    let fresh: Vec<[usize; 3]> = (0..t)
                        .map(|j| [removed[j][0], removed[girls[j]][1], removed[homes[j]][2]])
                        .collect();
                    if fresh.iter().any(|tr| removed.contains(tr)) {
                        continue;
                    }
                    let mut next = s.clone();
                    for r in &removed {
                        next.remove(r);
                    }
                    next.extend(fresh);
                    if relocations(s, &next) <= q {
                        out.push(Solution::Matching(next));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Neighborhood selection for [`SetBinding`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NeighborhoodSpec {
    KDiffer {
        k: usize,
        metric: Metric,
    },
    /// W3DM only.
    Pq {
        p: usize,
        q: usize,
    },
}

/// Binds a set problem instance to the engine.
pub struct SetBinding<'a> {
    pub instance: &'a SetProblemInstance,
    pub neighborhood: NeighborhoodSpec,
    pub cap: usize,
}

impl<'a> SetBinding<'a> {
    pub fn new(instance: &'a SetProblemInstance, k: usize) -> Self {
        SetBinding {
            instance,
            neighborhood: NeighborhoodSpec::KDiffer {
                k,
                metric: Metric::Exchange,
            },
            cap: 1 << 22,
        }
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        if let NeighborhoodSpec::KDiffer { k, .. } = self.neighborhood {
            self.neighborhood = NeighborhoodSpec::KDiffer { k, metric };
        }
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn pq(instance: &'a SetProblemInstance, p: usize, q: usize, cap: usize) -> Self {
        SetBinding {
            instance,
            neighborhood: NeighborhoodSpec::Pq { p, q },
            cap,
        }
    }
}

impl<'a> ProblemBinding for SetBinding<'a> {
    type Solution = Solution;

    fn kind(&self) -> String {
        self.instance.tag().to_string()
    }

    fn sense(&self) -> Sense {
        self.instance.sense()
    }

    fn is_feasible(&self, s: &Solution) -> bool {
        self.instance.feasible(s).unwrap_or(false)
    }

    fn cost(&self, s: &Solution) -> Result<Cost> {
        self.instance.cost(s)
    }

    fn neighbors<'b>(&'b self, s: &'b Solution) -> Result<NeighborStream<'b, Solution>> {
        match self.neighborhood {
            NeighborhoodSpec::KDiffer { k, metric } => Ok(Box::new(
                self.instance
                    .kdiffer_neighbors(s, k, metric, self.cap)?
                    .map(|n| Neighbor::new("k-differ", n)),
            )),
            NeighborhoodSpec::Pq { p, q } => match (self.instance, s) {
                (SetProblemInstance::W3dm(i), Solution::Matching(m)) => Ok(Box::new(
                    w3dm_pq_neighbors(i, m, p, q, self.cap)?
                        .into_iter()
                        .map(|n| Neighbor::new("pq-rewire", n)),
                )),
                _ => Err(mismatch(self.instance.tag(), s)),
            },
        }
    }

    fn initial_solution(&self) -> Result<Solution> {
        self.instance.init_solution()
    }

    fn describe_move(&self, from: &Solution, to: &Neighbor<Solution>) -> String {
        describe_change(from, &to.solution)
    }
}

/// Short 1-based description of what changed between two solutions.
pub fn describe_change(from: &Solution, to: &Solution) -> String {
    fn diff(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> String {
        let removed: Vec<String> = a.difference(b).map(|i| (i + 1).to_string()).collect();
        let added: Vec<String> = b.difference(a).map(|i| (i + 1).to_string()).collect();
        format!("-[{}] +[{}]", removed.join(" "), added.join(" "))
    }
    match (from, to) {
        (Solution::Collection(a), Solution::Collection(b))
        | (Solution::Elements(a), Solution::Elements(b)) => diff(a, b),
        (Solution::Partition(a), Solution::Partition(b)) => {
            let moved: Vec<String> = (0..a.len())
                .filter(|&i| a[i] != b[i])
                .map(|i| (i + 1).to_string())
                .collect();
            format!("move [{}]", moved.join(" "))
        }
        (Solution::SetVector(a), Solution::SetVector(b)) => {
            let changed: Vec<String> = (0..a.len())
                .filter(|&i| a[i] != b[i])
                .map(|i| format!("{}:{}->{}", i + 1, a[i] + 1, b[i] + 1))
                .collect();
            format!("set {}", changed.join(" "))
        }
        (Solution::Basis(a), Solution::Basis(b)) => {
            format!("-[{}] +[{}]", join(a.difference(b)), join(b.difference(a)))
        }
        (Solution::Matching(a), Solution::Matching(b))
        | (Solution::Cover(a), Solution::Cover(b)) => {
            format!("replace {} triples", a.difference(b).count())
        }
        _ => "change".to_string(),
    }
}

/// Kinds of randomly generated set problem instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RandomKind {
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

impl RandomKind {
    pub const ALL: [RandomKind; 10] = [
        RandomKind::W3dm,
        RandomKind::X3c,
        RandomKind::Sp,
        RandomKind::Ssp,
        RandomKind::Sc,
        RandomKind::Ts,
        RandomKind::Sb,
        RandomKind::Hs,
        RandomKind::Ip,
        RandomKind::Cc,
    ];
}

/// Small random instance of the given kind: ground size `1..=max_ground`,
/// `0..=max_sets` sets, weights in `0..=weight_high`.
pub fn random_instance<R: Rng>(
    kind: RandomKind,
    max_ground: usize,
    max_sets: usize,
    weight_high: u64,
    rng: &mut R,
) -> SetProblemInstance {
    let ground = rng.gen_range(1..=max_ground.max(1));
    let weight = |rng: &mut R| Cost::from(rng.gen_range(0..=weight_high));
    let collection = |rng: &mut R, min_sets: usize| {
        let count = rng.gen_range(min_sets..=max_sets.max(min_sets));
        let mut c = WeightedCollection::empty(ground);
        for _ in 0..count {
            let members: Vec<usize> = (0..ground).filter(|_| rng.gen_bool(0.4)).collect();
            let w = weight(rng);
            c.push(members, w);
        }
        c
    };
    match kind {
        RandomKind::W3dm => {
            let n = rng.gen_range(1..=3);
            let mut weights = BTreeMap::new();
            for _ in 0..rng.gen_range(0..=n * n) {
                let t = [
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                ];
                weights.insert(t, Cost::from(rng.gen_range(0..=weight_high)));
            }
            SetProblemInstance::W3dm(W3dmInstance { n, weights })
        }
        RandomKind::X3c => {
            let g = 3 * rng.gen_range(1..=2);
            let mut weights = BTreeMap::new();
            for t in (0..g).combinations(3) {
                if rng.gen_bool(0.5) {
                    weights.insert(
                        [t[0], t[1], t[2]],
                        Cost::from(rng.gen_range(0..=weight_high)),
                    );
                }
            }
            SetProblemInstance::X3c(X3cInstance {
                ground: g,
                labels: default_labels(g),
                weights,
            })
        }
        RandomKind::Sp => {
            let c = collection(rng, 0);
            let m_c = rng.gen_range(0..=c.len() + 1);
            SetProblemInstance::Sp(SpInstance { collection: c, m_c })
        }
        RandomKind::Ssp => SetProblemInstance::Ssp(SspInstance {
            collection: collection(rng, 0),
        }),
        RandomKind::Sc => {
            let mut c = collection(rng, 1);
            // make the whole collection a cover
            let all: Vec<usize> = (0..c.len()).collect();
            let missing: Vec<usize> = {
                let u = c.union_of(&all);
                (0..ground).filter(|&e| !u.contains(e)).collect()
            };
            for e in missing {
                let j = rng.gen_range(0..c.len());
                c.sets[j].insert(e);
            }
            SetProblemInstance::Sc(ScInstance { collection: c })
        }
        RandomKind::Ts => {
            let c = collection(rng, 1);
            let mut pair = vec![vec![Cost::zero(); ground]; ground];
            for i in 0..ground {
                for j in (i + 1)..ground {
                    let w = weight(rng);
                    pair[i][j] = w.clone();
                    pair[j][i] = w;
                }
            }
            let m_b = rng.gen_range(1..=c.len());
            let separation = if rng.gen_bool(0.5) {
                SeparationMode::TwoSided
            } else {
                SeparationMode::OneSided
            };
            SetProblemInstance::Ts(TsInstance {
                collection: c,
                pair_weights: pair,
                m_b,
                separation,
            })
        }
        RandomKind::Sb => {
            let c = collection(rng, 0);
            let m_c = rng.gen_range(1..=ground.min(3));
            SetProblemInstance::Sb(SbInstance { collection: c, m_c })
        }
        RandomKind::Hs => {
            let c = collection(rng, 0);
            let m_b = rng.gen_range(0..=ground);
            SetProblemInstance::Hs(HsInstance { collection: c, m_b })
        }
        RandomKind::Ip => {
            let donors = collection(rng, 1);
            let n = rng.gen_range(1..=donors.len().min(3));
            let mut a = vec![vec![0usize; n]; n];
            let mut b = vec![vec![Cost::zero(); n]; n];
            for i in 0..n {
                for j in i..n {
                    let av = rng.gen_range(0..=ground.min(3));
                    let bv = weight(rng);
                    a[i][j] = av;
                    a[j][i] = av;
                    b[i][j] = bv.clone();
                    b[j][i] = bv;
                }
            }
            SetProblemInstance::Ip(IpInstance { a, b, donors })
        }
        RandomKind::Cc => {
            let m_side = collection(rng, 0);
            let n_side = collection(rng, 0);
            let w_shift = n_side.total_weight() + Cost::from(rng.gen_range(0..=2u64));
            SetProblemInstance::Cc(CcInstance {
                m_side,
                n_side,
                w_shift,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> Cost {
        Cost::from(v)
    }

    fn coll(ground: usize, sets: &[(&[usize], i64)]) -> WeightedCollection {
        WeightedCollection::new(
            ground,
            sets.iter().map(|(s, _)| s.to_vec()).collect(),
            sets.iter().map(|&(_, w)| c(w)).collect(),
        )
        .unwrap()
    }

    /// B = {1,2,3}, A = {1,2} w5, B' = {2,3} w4, C = {3} w2.
    fn abc() -> WeightedCollection {
        coll(3, &[(&[0, 1], 5), (&[1, 2], 4), (&[2], 2)])
    }

    #[test]
    fn sp_costs() {
        let sp = SetProblemInstance::Sp(SpInstance {
            collection: abc(),
            m_c: 3,
        });
        assert_eq!(sp.cost(&Solution::collection([])).unwrap(), c(0));
        assert_eq!(sp.cost(&Solution::collection([0, 1, 2])).unwrap(), c(0));
        assert_eq!(sp.cost(&Solution::collection([0, 2])).unwrap(), c(7));
        let tight = SetProblemInstance::Sp(SpInstance {
            collection: abc(),
            m_c: 1,
        });
        assert!(!tight.feasible(&Solution::collection([0, 2])).unwrap());
    }

    #[test]
    fn variant_mismatch_is_an_error() {
        let sp = SetProblemInstance::Sp(SpInstance {
            collection: abc(),
            m_c: 3,
        });
        assert!(matches!(
            sp.feasible(&Solution::Partition(vec![false; 3])),
            Err(Error::VariantMismatch { .. })
        ));
    }

    #[test]
    fn ssp_costs() {
        let ssp = SetProblemInstance::Ssp(SspInstance {
            collection: coll(2, &[(&[0, 1], 3)]),
        });
        assert_eq!(
            ssp.cost(&Solution::Partition(vec![false, false])).unwrap(),
            c(0)
        );
        assert_eq!(
            ssp.cost(&Solution::Partition(vec![false, true])).unwrap(),
            c(3)
        );
        let single = SetProblemInstance::Ssp(SspInstance {
            collection: coll(2, &[(&[0], 3)]),
        });
        for p in [[false, false], [false, true], [true, false], [true, true]] {
            assert_eq!(single.cost(&Solution::Partition(p.to_vec())).unwrap(), c(0));
        }
    }

    #[test]
    fn sc_costs() {
        let sc = SetProblemInstance::Sc(ScInstance { collection: abc() });
        assert!(sc.feasible(&Solution::collection([0, 1, 2])).unwrap());
        assert_eq!(sc.cost(&Solution::collection([0, 1, 2])).unwrap(), c(11));
        assert_eq!(sc.cost(&Solution::collection([0, 2])).unwrap(), c(7));
        assert!(matches!(
            sc.cost(&Solution::collection([0])),
            Err(Error::Infeasible(_))
        ));
        let empty = SetProblemInstance::Sc(ScInstance {
            collection: WeightedCollection::empty(0),
        });
        assert_eq!(empty.cost(&Solution::collection([])).unwrap(), c(0));
    }

    fn ts(sets: &[&[usize]], separation: SeparationMode) -> SetProblemInstance {
        let collection = coll(2, &sets.iter().map(|s| (*s, 0)).collect::<Vec<_>>());
        SetProblemInstance::Ts(TsInstance {
            collection,
            pair_weights: vec![vec![c(0), c(7)], vec![c(7), c(0)]],
            m_b: 2,
            separation,
        })
    }

    #[test]
    fn ts_separation_modes() {
        for mode in [SeparationMode::TwoSided, SeparationMode::OneSided] {
            let both = ts(&[&[0], &[1]], mode);
            assert_eq!(both.cost(&Solution::collection([0, 1])).unwrap(), c(7));
            let joint = ts(&[&[0, 1]], mode);
            assert_eq!(joint.cost(&Solution::collection([0])).unwrap(), c(0));
        }
        let only_u = ts(&[&[0]], SeparationMode::TwoSided);
        assert_eq!(only_u.cost(&Solution::collection([0])).unwrap(), c(0));
        let only_u = ts(&[&[0]], SeparationMode::OneSided);
        assert_eq!(only_u.cost(&Solution::collection([0])).unwrap(), c(7));
    }

    fn basis(ground: usize, members: &[&[usize]]) -> Solution {
        Solution::Basis(
            members
                .iter()
                .map(|m| ElementSet::from_elements(ground, m.iter().copied()))
                .collect(),
        )
    }

    #[test]
    fn sb_costs() {
        let whole = SetProblemInstance::Sb(SbInstance {
            collection: coll(2, &[(&[0, 1], 9)]),
            m_c: 1,
        });
        assert_eq!(whole.cost(&basis(2, &[&[0, 1]])).unwrap(), c(9));
        let sb = SetProblemInstance::Sb(SbInstance {
            collection: coll(3, &[(&[0, 1], 4), (&[0], 2), (&[2], 5)]),
            m_c: 2,
        });
        assert_eq!(sb.cost(&basis(3, &[&[0], &[1]])).unwrap(), c(6));
        assert_eq!(sb.init_solution().unwrap(), basis(3, &[&[0], &[1]]));
        let empty_target = SetProblemInstance::Sb(SbInstance {
            collection: coll(2, &[(&[], 3)]),
            m_c: 1,
        });
        assert_eq!(empty_target.cost(&basis(2, &[&[0]])).unwrap(), c(3));
    }

    #[test]
    fn hs_costs() {
        // x = 0, x̄ = 1, y = 2, ȳ = 3
        let hs = SetProblemInstance::Hs(HsInstance {
            collection: coll(4, &[(&[0, 1], 4), (&[0, 3], 3)]),
            m_b: 2,
        });
        assert_eq!(hs.cost(&Solution::elements([])).unwrap(), c(0));
        assert_eq!(hs.cost(&Solution::elements([0])).unwrap(), c(7));
        assert_eq!(hs.cost(&Solution::elements([3])).unwrap(), c(3));
    }

    #[test]
    fn ip_diagonal() {
        let donors = coll(3, &[(&[0, 1, 2], 0)]);
        let exact = SetProblemInstance::Ip(IpInstance {
            a: vec![vec![3]],
            b: vec![vec![c(5)]],
            donors: donors.clone(),
        });
        assert_eq!(exact.cost(&Solution::SetVector(vec![0])).unwrap(), c(5));
        let off = SetProblemInstance::Ip(IpInstance {
            a: vec![vec![4]],
            b: vec![vec![c(5)]],
            donors,
        });
        assert_eq!(off.cost(&Solution::SetVector(vec![0])).unwrap(), c(0));
    }

    #[test]
    fn cc_costs() {
        // a = 0, b = 1
        let cc = SetProblemInstance::Cc(CcInstance {
            m_side: coll(2, &[(&[0, 1], 3)]),
            n_side: coll(2, &[(&[0], 2)]),
            w_shift: c(2),
        });
        assert_eq!(cc.cost(&Solution::elements([])).unwrap(), c(3));
        assert_eq!(cc.cost(&Solution::elements([0])).unwrap(), c(3));
        let bigger = SetProblemInstance::Cc(CcInstance {
            m_side: coll(3, &[(&[0, 1], 3)]),
            n_side: coll(3, &[(&[0], 2)]),
            w_shift: c(2),
        });
        assert_eq!(bigger.cost(&Solution::elements([0, 1, 2])).unwrap(), c(2));
    }

    #[test]
    fn w3dm_and_x3c_costs() {
        let mut weights = BTreeMap::new();
        weights.insert([0, 0, 0], c(4));
        let w = SetProblemInstance::W3dm(W3dmInstance { n: 2, weights });
        let s = Solution::Matching([[0, 0, 0], [1, 1, 1]].into_iter().collect());
        assert_eq!(w.cost(&s).unwrap(), c(4));
        assert_eq!(w.init_solution().unwrap(), s);
        let zero = SetProblemInstance::W3dm(W3dmInstance {
            n: 3,
            weights: BTreeMap::new(),
        });
        assert_eq!(zero.cost(&zero.init_solution().unwrap()).unwrap(), c(0));

        let mut xw = BTreeMap::new();
        xw.insert([0, 1, 2], c(6));
        let x = SetProblemInstance::X3c(X3cInstance {
            ground: 3,
            labels: default_labels(3),
            weights: xw,
        });
        assert_eq!(
            x.cost(&Solution::Cover([[0, 1, 2]].into_iter().collect()))
                .unwrap(),
            c(6)
        );
        let six = SetProblemInstance::X3c(X3cInstance {
            ground: 6,
            labels: default_labels(6),
            weights: BTreeMap::new(),
        });
        assert!(!six
            .feasible(&Solution::Cover(
                [[0, 1, 2], [2, 3, 4]].into_iter().collect()
            ))
            .unwrap());
    }

    #[test]
    fn kdiffer_counts() {
        let s: BTreeSet<usize> = [0, 1].into_iter().collect();
        let sym = |k| subset_neighbors(&s, 4, k, Metric::SymmetricDifference).count();
        let exch = |k| subset_neighbors(&s, 4, k, Metric::Exchange).count();
        assert_eq!(sym(1), 4);
        // k = 2 adds the 4 swaps, 1 double removal and 1 double addition
        assert_eq!(sym(2), 10);
        assert_eq!(exch(1), 8);

        let ssp = SetProblemInstance::Ssp(SspInstance {
            collection: coll(5, &[]),
        });
        let p = ssp.init_solution().unwrap();
        assert_eq!(
            ssp.kdiffer_neighbors(&p, 1, Metric::Exchange, 100)
                .unwrap()
                .count(),
            5
        );
    }

    #[test]
    fn first_neighbor_of_empty_adds_first_set() {
        let s = BTreeSet::new();
        let first = subset_neighbors(&s, 3, 1, Metric::Exchange).next().unwrap();
        assert_eq!(first, [0].into_iter().collect());
    }

    #[test]
    fn pq_examples() {
        let inst = W3dmInstance {
            n: 2,
            weights: BTreeMap::new(),
        };
        let s: BTreeSet<[usize; 3]> = [[0, 0, 0], [1, 1, 1]].into_iter().collect();
        assert!(w3dm_pq_neighbors(&inst, &s, 1, 12, 10).unwrap().is_empty());
        assert!(w3dm_pq_neighbors(&inst, &s, 2, 0, 10).unwrap().is_empty());
        let got: BTreeSet<Solution> = w3dm_pq_neighbors(&inst, &s, 2, 4, 10)
            .unwrap()
            .into_iter()
            .collect();
        let want: BTreeSet<Solution> = [
            [[0, 0, 1], [1, 1, 0]],
            [[0, 1, 0], [1, 0, 1]],
            [[0, 1, 1], [1, 0, 0]],
        ]
        .into_iter()
        .map(|m| Solution::Matching(m.into_iter().collect()))
        .collect();
        assert_eq!(got, want);
        assert!(matches!(
            w3dm_pq_neighbors(&inst, &s, 2, 4, 1),
            Err(Error::NeighborhoodTooLarge { limit: 1 })
        ));
    }

    #[test]
    fn x3c_neighbors_regroup_exactly() {
        let x = SetProblemInstance::X3c(X3cInstance {
            ground: 6,
            labels: default_labels(6),
            weights: BTreeMap::new(),
        });
        let s = x.init_solution().unwrap();
        let n: Vec<Solution> = x
            .kdiffer_neighbors(&s, 2, Metric::Exchange, 1000)
            .unwrap()
            .collect();
        // 10 partitions of 6 elements into triples, minus the current one
        assert_eq!(n.len(), 9);
        assert!(n.iter().all(|m| x.feasible(m).unwrap()));
    }

    #[test]
    fn init_solutions() {
        let sb = SetProblemInstance::Sb(SbInstance {
            collection: coll(4, &[]),
            m_c: 2,
        });
        assert_eq!(sb.init_solution().unwrap(), basis(4, &[&[0], &[1]]));
        let too_small = SetProblemInstance::Sb(SbInstance {
            collection: coll(1, &[]),
            m_c: 2,
        });
        assert!(too_small.init_solution().is_err());
        let no_cover = SetProblemInstance::Sc(ScInstance {
            collection: coll(2, &[(&[0], 1)]),
        });
        assert!(no_cover.init_solution().is_err());
        let w = SetProblemInstance::W3dm(W3dmInstance {
            n: 3,
            weights: BTreeMap::new(),
        });
        assert_eq!(
            w.init_solution().unwrap(),
            Solution::Matching([[0, 0, 0], [1, 1, 1], [2, 2, 2]].into_iter().collect())
        );
    }

    #[test]
    fn basis_neighbors_exclude_current_members() {
        let sb = SetProblemInstance::Sb(SbInstance {
            collection: coll(2, &[]),
            m_c: 2,
        });
        let s = sb.init_solution().unwrap();
        // 2 members, each replaceable by one of the 2 subsets not in the basis
        let n: Vec<Solution> = sb
            .kdiffer_neighbors(&s, 1, Metric::Exchange, 100)
            .unwrap()
            .collect();
        assert_eq!(n.len(), 4);
        assert!(n.iter().all(|b| sb.feasible(b).unwrap()));
    }

    #[test]
    fn cap_refuses_large_scans() {
        let hs = SetProblemInstance::Hs(HsInstance {
            collection: coll(10, &[]),
            m_b: 10,
        });
        let s = hs.init_solution().unwrap();
        assert!(matches!(
            hs.kdiffer_neighbors(&s, 3, Metric::Exchange, 5).map(|_| ()),
            Err(Error::NeighborhoodTooLarge { limit: 5 })
        ));
    }
}
