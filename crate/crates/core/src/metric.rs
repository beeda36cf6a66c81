//! Breadth-first word metric.
//!
//! A [`MetricTable`] holds the spheres `S_0, ..., S_R` of the Cayley graph
//! around the identity, each sorted by the group's canonical key. It is the
//! independent length oracle against which every closed-form length in the
//! crate is checked.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::Group;

pub const DEFAULT_BUDGET: usize = 50_000_000;

pub struct MetricTable<G: Group> {
    group_id: String,
    horizon: u32,
    layers: Vec<Vec<G::Elem>>,
    lengths: HashMap<G::Elem, u32>,
}

impl<G: Group> Clone for MetricTable<G> {
    fn clone(&self) -> Self {
        MetricTable {
            group_id: self.group_id.clone(),
            horizon: self.horizon,
            layers: self.layers.clone(),
            lengths: self.lengths.clone(),
        }
    }
}

impl<G: Group> std::fmt::Debug for MetricTable<G> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricTable")
            .field("group_id", &self.group_id)
            .field("horizon", &self.horizon)
            .field("layer_sizes", &self.layer_sizes())
            .finish()
    }
}

impl<G: Group> PartialEq for MetricTable<G> {
    fn eq(&self, other: &Self) -> bool {
        self.group_id == other.group_id
            && self.horizon == other.horizon
            && self.layers == other.layers
    }
}

impl<G: Group> MetricTable<G> {
    /// Assembles a table from precomputed layers. Layers are re-sorted by
    /// key; no metric consistency check is made here.
    pub(crate) fn from_layers(group: &G, horizon: u32, mut layers: Vec<Vec<G::Elem>>) -> Self {
        let mut lengths = HashMap::new();
        for (r, layer) in layers.iter_mut().enumerate() {
            sort_by_key(group, layer);
            for x in layer.iter() {
                lengths.insert(x.clone(), r as u32);
            }
        }
        MetricTable {
            group_id: group.id(),
            horizon,
            layers,
            lengths,
        }
    }

    pub fn group_id(&self) -> &str {
        &self.group_id
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn layers(&self) -> &[Vec<G::Elem>] {
        &self.layers
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    /// Length of `x` if it lies in the ball of radius `horizon`.
    pub fn lookup(&self, x: &G::Elem) -> Option<u32> {
        self.lengths.get(x).copied()
    }

    pub fn contains(&self, x: &G::Elem) -> bool {
        self.lengths.contains_key(x)
    }

    pub fn sphere(&self, r: u32) -> Result<&[G::Elem]> {
        self.layers
            .get(r as usize)
            .map(Vec::as_slice)
            .ok_or(Error::OutOfHorizon {
                element: format!("sphere of radius {r}"),
                horizon: self.horizon,
                suggested: r,
            })
    }

    /// `B_r`, listed sphere by sphere.
    pub fn ball(&self, r: u32) -> Result<Vec<G::Elem>> {
        if r > self.horizon {
            return Err(Error::OutOfHorizon {
                element: format!("ball of radius {r}"),
                horizon: self.horizon,
                suggested: r,
            });
        }
        Ok(self.layers[..=r as usize].iter().flatten().cloned().collect())
    }

    pub fn ball_size(&self, r: u32) -> usize {
        self.layers
            .iter()
            .take(r as usize + 1)
            .map(Vec::len)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&G::Elem, u32)> {
        self.layers
            .iter()
            .enumerate()
            .flat_map(|(r, layer)| layer.iter().map(move |x| (x, r as u32)))
    }

    /// A geodesic word for `x`, choosing the lowest generator index at each
    /// step back toward the identity.
    pub fn geodesic_word(&self, group: &G, x: &G::Elem) -> Option<Vec<usize>> {
        let mut len = self.lookup(x)?;
        let gens = group.generators();
        let mut cur = x.clone();
        let mut word = Vec::with_capacity(len as usize);
        while len > 0 {
            let (j, prev) = (0..gens.len()).find_map(|j| {
                let prev = group.mul_generator(&cur, gens.inverse(j));
                (self.lookup(&prev) == Some(len - 1)).then_some((j, prev))
            })?;
            word.push(j);
            cur = prev;
            len -= 1;
        }
        word.reverse();
        Some(word)
    }
}

fn sort_by_key<G: Group>(group: &G, layer: &mut Vec<G::Elem>) {
    let mut keyed: Vec<(Vec<u8>, G::Elem)> = layer
        .drain(..)
        .map(|x| (group.encode(&x), x))
        .collect();
    keyed.par_sort_unstable_by(|a, b| a.0.cmp(&b.0));
    layer.extend(keyed.into_iter().map(|(_, x)| x));
}

/// Breadth-first construction of the ball of radius `horizon`.
///
/// Frontier expansion runs in parallel; each layer is deduplicated and
/// sorted by canonical key, so the result does not depend on scheduling.
pub fn bfs_metric<G: Group>(group: &G, horizon: u32, budget: usize) -> Result<MetricTable<G>> {
    let gens = group.generators().len();
    let e = group.identity();
    let mut lengths: HashMap<G::Elem, u32> = HashMap::new();
    lengths.insert(e.clone(), 0);
    let mut layers = vec![vec![e]];

    for r in 1..=horizon {
        let prev = &layers[r as usize - 1];
        let candidates: Vec<G::Elem> = prev
            .par_iter()
            .flat_map_iter(|x| (0..gens).map(move |j| group.mul_generator(x, j)))
            .collect();
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for y in candidates {
            if !lengths.contains_key(&y) && seen.insert(y.clone()) {
                next.push(y);
            }
        }
        if lengths.len() + next.len() > budget {
            return Err(Error::BudgetExceeded { budget, layer: r });
        }
        sort_by_key(group, &mut next);
        for y in &next {
            lengths.insert(y.clone(), r);
        }
        layers.push(next);
    }

    Ok(MetricTable {
        group_id: group.id(),
        horizon,
        layers,
        lengths,
    })
}

/// Exact word length of `x`.
///
/// Uses the table when `x` is inside the horizon and the group's closed
/// form when one applies; when both apply they must agree.
pub fn word_length<G: Group>(group: &G, x: &G::Elem, table: &MetricTable<G>) -> Result<u64> {
    let closed = group.closed_length(x);
    match (table.lookup(x), closed) {
        (Some(bfs), Some(closed)) if bfs as u64 != closed => Err(Error::Disagreement {
            element: group.format(x),
            bfs: bfs as u64,
            closed,
        }),
        (Some(bfs), _) => Ok(bfs as u64),
        (None, Some(closed)) => Ok(closed),
        (None, None) => Err(Error::OutOfHorizon {
            element: group.format(x),
            horizon: table.horizon(),
            suggested: table.horizon() + 1,
        }),
    }
}
