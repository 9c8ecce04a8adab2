//! Greedy algorithms that reach 1-differ local optima of set packing and
//! set cover in polynomial time.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::set_problems::{ScInstance, SpInstance, WeightedCollection};

/// Set indices by weight descending, index ascending on ties.
fn heaviest_first(c: &WeightedCollection) -> Vec<usize> {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by(|&a, &b| c.weights[b].cmp(&c.weights[a]).then(a.cmp(&b)));
    order
}

/// Adds sets heaviest first whenever they are disjoint from everything chosen,
/// stopping once `m_C` sets are chosen.
pub fn greedy_packing(inst: &SpInstance) -> BTreeSet<usize> {
    let c = &inst.collection;
    let mut chosen = BTreeSet::new();
    for i in heaviest_first(c) {
        if chosen.len() >= inst.m_c {
            break;
        }
        if chosen
            .iter()
            .all(|&j: &usize| c.sets[i].is_disjoint(&c.sets[j]))
        {
            chosen.insert(i);
        }
    }
    chosen
}

/// Starts from the whole collection and drops sets heaviest first while the
/// rest still covers the ground set.
pub fn greedy_cover(inst: &ScInstance) -> Result<BTreeSet<usize>> {
    let c = &inst.collection;
    let mut chosen: BTreeSet<usize> = (0..c.len()).collect();
    if !c.covers(&chosen) {
        return Err(Error::Infeasible(
            "the collection does not cover the ground set".into(),
        ));
    }
    for i in heaviest_first(c) {
        chosen.remove(&i);
        if !c.covers(&chosen) {
            chosen.insert(i);
        }
    }
    Ok(chosen)
}
