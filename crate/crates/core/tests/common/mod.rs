//! Literal re-implementations of every cost function, written from the
//! definitions with plain loops over element lists.

#![allow(dead_code)]

use std::collections::BTreeSet;

use pls_lab::engine::Cost;
use pls_lab::set_problems::{
    ElementSet, SeparationMode, SetProblemInstance, Solution, WeightedCollection,
};

fn members(c: &WeightedCollection) -> Vec<Vec<usize>> {
    c.sets.iter().map(|s| s.elements()).collect()
}

fn share_element(a: &[usize], b: &[usize]) -> bool {
    a.iter().any(|e| b.contains(e))
}

fn subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|e| b.contains(e))
}

fn same_set(a: &[usize], b: &[usize]) -> bool {
    subset(a, b) && subset(b, a)
}

fn oracle_sp(c: &WeightedCollection, s: &BTreeSet<usize>) -> Cost {
    let sets = members(c);
    let mut total = Cost::from(0);
    for &i in s {
        let mut alone = true;
        for &j in s {
            if j != i && share_element(&sets[i], &sets[j]) {
                alone = false;
            }
        }
        if alone {
            total += &c.weights[i];
        }
    }
    total
}

fn oracle_ssp(c: &WeightedCollection, side: &[bool]) -> Cost {
    let mut total = Cost::from(0);
    for (set, w) in members(c).iter().zip(&c.weights) {
        let in_first = set.iter().any(|&e| !side[e]);
        let in_second = set.iter().any(|&e| side[e]);
        if in_first && in_second {
            total += w;
        }
    }
    total
}

fn oracle_sc(c: &WeightedCollection, s: &BTreeSet<usize>) -> Option<Cost> {
    let sets = members(c);
    for e in 0..c.ground {
        if !s.iter().any(|&i| sets[i].contains(&e)) {
            return None;
        }
    }
    Some(s.iter().map(|&i| c.weights[i].clone()).sum())
}

fn oracle_ts(
    c: &WeightedCollection,
    pair: &[Vec<Cost>],
    separation: SeparationMode,
    s: &BTreeSet<usize>,
) -> Cost {
    let sets = members(c);
    let mut total = Cost::from(0);
    for i in 0..c.ground {
        for j in (i + 1)..c.ground {
            let isolates = |a: usize, b: usize| {
                s.iter()
                    .any(|&p| sets[p].contains(&a) && !sets[p].contains(&b))
            };
            let counts = match separation {
                SeparationMode::TwoSided => isolates(i, j) && isolates(j, i),
                SeparationMode::OneSided => isolates(i, j) || isolates(j, i),
            };
            if counts {
                total += &pair[i][j];
            }
        }
    }
    total
}

fn oracle_sb(c: &WeightedCollection, basis: &BTreeSet<ElementSet>) -> Cost {
    let family: Vec<Vec<usize>> = basis.iter().map(|b| b.elements()).collect();
    let mut total = Cost::from(0);
    for (set, w) in members(c).iter().zip(&c.weights) {
        let mut expressible = false;
        for mask in 0..(1usize << family.len()) {
            let mut union: Vec<usize> = Vec::new();
            for (p, member) in family.iter().enumerate() {
                if mask >> p & 1 == 1 {
                    union.extend(member);
                }
            }
            if same_set(&union, set) {
                expressible = true;
            }
        }
        if expressible {
            total += w;
        }
    }
    total
}

fn oracle_hs(c: &WeightedCollection, s: &BTreeSet<usize>) -> Cost {
    let mut total = Cost::from(0);
    for (set, w) in members(c).iter().zip(&c.weights) {
        if s.iter().any(|e| set.contains(e)) {
            total += w;
        }
    }
    total
}

fn oracle_ip(a: &[Vec<usize>], b: &[Vec<Cost>], donors: &WeightedCollection, v: &[usize]) -> Cost {
    let sets = members(donors);
    let mut total = Cost::from(0);
    for i in 0..v.len() {
        for j in i..v.len() {
            let common = sets[v[i]].iter().filter(|e| sets[v[j]].contains(e)).count();
            if common == a[i][j] {
                total += &b[i][j];
            }
        }
    }
    total
}

fn oracle_cc(
    m: &WeightedCollection,
    n: &WeightedCollection,
    shift: &Cost,
    s: &BTreeSet<usize>,
) -> Cost {
    let chosen: Vec<usize> = s.iter().copied().collect();
    let mut total = shift.clone();
    for (set, w) in members(m).iter().zip(&m.weights) {
        if subset(&chosen, set) {
            total += w;
        }
    }
    for (set, w) in members(n).iter().zip(&n.weights) {
        if subset(&chosen, set) {
            total -= w;
        }
    }
    total
}

/// Cost of `s` by definition, or `None` when the definition does not apply.
pub fn oracle_cost(inst: &SetProblemInstance, s: &Solution) -> Option<Cost> {
    match (inst, s) {
        (SetProblemInstance::W3dm(i), Solution::Matching(m)) => Some(
            m.iter()
                .map(|t| i.weights.get(t).cloned().unwrap_or_default())
                .sum(),
        ),
        (SetProblemInstance::X3c(i), Solution::Cover(m)) => Some(
            m.iter()
                .map(|t| i.weights.get(t).cloned().unwrap_or_default())
                .sum(),
        ),
        (SetProblemInstance::Sp(i), Solution::Collection(s)) => Some(oracle_sp(&i.collection, s)),
        (SetProblemInstance::Ssp(i), Solution::Partition(p)) => Some(oracle_ssp(&i.collection, p)),
        (SetProblemInstance::Sc(i), Solution::Collection(s)) => oracle_sc(&i.collection, s),
        (SetProblemInstance::Ts(i), Solution::Collection(s)) => {
            Some(oracle_ts(&i.collection, &i.pair_weights, i.separation, s))
        }
        (SetProblemInstance::Sb(i), Solution::Basis(f)) => Some(oracle_sb(&i.collection, f)),
        (SetProblemInstance::Hs(i), Solution::Elements(s)) => Some(oracle_hs(&i.collection, s)),
        (SetProblemInstance::Ip(i), Solution::SetVector(v)) => {
            Some(oracle_ip(&i.a, &i.b, &i.donors, v))
        }
        (SetProblemInstance::Cc(i), Solution::Elements(s)) => {
            Some(oracle_cc(&i.m_side, &i.n_side, &i.w_shift, s))
        }
        _ => None,
    }
}
