//! Dead ends, depth and backtracking.
//!
//! `g` is a dead end when no generator lengthens it. Its depth is the length
//! of the shortest generator path from `g` to an element strictly longer
//! than `g` (1 for elements that are not dead ends). The pocket depth is the
//! least drop below `|g|` that some escape path has to make. Strict depth is
//! the largest `k` with `|gw| <= |g| - r` for every `w` in `S_r`, `r <= k`.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::metric::{word_length, MetricTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Depth {
    Finite(u32),
    /// no escape within the search limit
    Exceeded(u32),
}

impl Depth {
    pub fn value(self) -> Option<u32> {
        match self {
            Depth::Finite(k) => Some(k),
            Depth::Exceeded(_) => None,
        }
    }
}

impl Serialize for Depth {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Depth::Finite(k) => ser.serialize_u32(*k),
            Depth::Exceeded(limit) => ser.serialize_str(&format!(">{limit}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Escape {
    pub depth: Depth,
    /// generator word of length `depth` leaving the pocket; empty when exceeded
    pub witness: Vec<usize>,
}

pub fn is_dead_end<G: Group>(group: &G, table: &MetricTable<G>, g: &G::Elem) -> Result<bool> {
    let len = word_length(group, g, table)?;
    for j in 0..group.generators().len() {
        if word_length(group, &group.mul_generator(g, j), table)? > len {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shortest escape path from `g`, searched up to `max_depth` steps.
pub fn depth<G: Group>(group: &G, table: &MetricTable<G>, g: &G::Elem, max_depth: u32) -> Result<Escape> {
    let len = word_length(group, g, table)?;
    let gens = group.generators().len();
    let mut parent: HashMap<G::Elem, (G::Elem, usize)> = HashMap::new();
    let mut frontier = vec![g.clone()];
    let mut seen = HashSet::new();
    seen.insert(g.clone());
    for step in 1..=max_depth {
        let mut next = Vec::new();
        for x in &frontier {
            for j in 0..gens {
                let y = group.mul_generator(x, j);
                if !seen.insert(y.clone()) {
                    continue;
                }
                parent.insert(y.clone(), (x.clone(), j));
                if word_length(group, &y, table)? > len {
                    let mut witness = Vec::with_capacity(step as usize);
                    let mut cur = y;
                    while let Some((prev, j)) = parent.get(&cur) {
                        witness.push(*j);
                        cur = prev.clone();
                    }
                    witness.reverse();
                    return Ok(Escape {
                        depth: Depth::Finite(step),
                        witness,
                    });
                }
                next.push(y);
            }
        }
        frontier = next;
    }
    Ok(Escape {
        depth: Depth::Exceeded(max_depth),
        witness: Vec::new(),
    })
}

/// Least `h` such that some path from `g` reaches length `|g| + 1` without
/// passing below `|g| - h`. `None` when no such `h <= max_drop` exists.
pub fn pocket_depth<G: Group>(
    group: &G,
    table: &MetricTable<G>,
    g: &G::Elem,
    max_drop: u32,
) -> Result<Option<u32>> {
    let len = word_length(group, g, table)?;
    let floor = len.saturating_sub(max_drop as u64);
    let mut best: HashMap<G::Elem, u64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(g.clone(), 0);
    // keyed by (drop, insertion order) so ties pop deterministically
    let mut queued = vec![g.clone()];
    heap.push(Reverse((0u64, 0usize)));
    while let Some(Reverse((drop, id))) = heap.pop() {
        let x = queued[id].clone();
        if best.get(&x).is_some_and(|&d| d < drop) {
            continue;
        }
        for j in 0..group.generators().len() {
            let y = group.mul_generator(&x, j);
            let ylen = word_length(group, &y, table)?;
            if ylen > len {
                return Ok(Some(drop as u32));
            }
            if ylen < floor {
                continue;
            }
            let ydrop = drop.max(len - ylen);
            if best.get(&y).is_none_or(|&d| ydrop < d) {
                best.insert(y.clone(), ydrop);
                heap.push(Reverse((ydrop, queued.len())));
                queued.push(y);
            }
        }
    }
    Ok(None)
}

/// Largest `k <= max_k` such that `|gw| <= |g| - r` for all `w` in `S_r`
/// and all `1 <= r <= k`.
pub fn strict_depth<G: Group>(group: &G, table: &MetricTable<G>, g: &G::Elem, max_k: u32) -> Result<u32> {
    let len = word_length(group, g, table)?;
    for r in 1..=max_k {
        if r as u64 > len {
            return Ok(r - 1);
        }
        let ok = table
            .sphere(r)?
            .par_iter()
            .map(|w| word_length(group, &group.compose(g, w), table).map(|l| l + r as u64 <= len))
            .collect::<Result<Vec<bool>>>()?
            .into_iter()
            .all(|b| b);
        if !ok {
            return Ok(r - 1);
        }
    }
    Ok(max_k)
}

/// Every `g w'` with `1 <= |w'| < depth(g)` and `|g w'| <= |g|`, sorted by
/// canonical key.
pub fn backtrack_elements<G: Group>(
    group: &G,
    table: &MetricTable<G>,
    g: &G::Elem,
    bound: u32,
) -> Result<Vec<G::Elem>> {
    if !is_dead_end(group, table, g)? {
        return Err(Error::NotDeadEnd {
            element: group.format(g),
        });
    }
    let k = match depth(group, table, g, bound)?.depth {
        Depth::Finite(k) => k,
        Depth::Exceeded(limit) => {
            return Err(Error::DepthExceeded {
                element: group.format(g),
                max_depth: limit,
            })
        }
    };
    let len = word_length(group, g, table)?;
    let mut out = Vec::new();
    for r in 1..k {
        for w in table.sphere(r)? {
            let x = group.compose(g, w);
            if word_length(group, &x, table)? <= len {
                out.push(x);
            }
        }
    }
    let mut keyed: Vec<(Vec<u8>, G::Elem)> = out.into_iter().map(|x| (group.encode(&x), x)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    Ok(keyed.into_iter().map(|(_, x)| x).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeadEndReport {
    pub element: String,
    pub length: u64,
    pub is_dead_end: bool,
    pub depth: Depth,
    /// escape word; `None` when no escape was found
    pub witness: Option<String>,
    pub pocket_depth: Option<u32>,
    pub strict_depth: u32,
}

pub fn dead_end_report<G: Group>(
    group: &G,
    table: &MetricTable<G>,
    g: &G::Elem,
    max_depth: u32,
) -> Result<DeadEndReport> {
    let length = word_length(group, g, table)?;
    let escape = depth(group, table, g, max_depth)?;
    let max_k = table.horizon().min(length as u32);
    Ok(DeadEndReport {
        element: group.format(g),
        length,
        is_dead_end: is_dead_end(group, table, g)?,
        depth: escape.depth,
        witness: escape
            .depth
            .value()
            .map(|_| group.generators().render_word(&escape.witness)),
        pocket_depth: pocket_depth(group, table, g, max_depth)?,
        strict_depth: strict_depth(group, table, g, max_k)?,
    })
}

/// Dead ends of `B_radius` in table order.
pub fn scan_dead_ends<G: Group>(group: &G, table: &MetricTable<G>, radius: u32) -> Result<Vec<G::Elem>> {
    let ball = table.ball(radius)?;
    let flags = ball
        .par_iter()
        .map(|x| is_dead_end(group, table, x))
        .collect::<Result<Vec<bool>>>()?;
    Ok(ball.into_iter().zip(flags).filter_map(|(x, f)| f.then_some(x)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{make_free, make_s3};
    use crate::lamplighter::{ll_make_dm, make_l2, LampConfig};
    use crate::metric::{bfs_metric, DEFAULT_BUDGET};

    fn l2_table(h: u32) -> (crate::lamplighter::Wreath, MetricTable<crate::lamplighter::Wreath>) {
        let l2 = make_l2();
        let t = bfs_metric(&l2, h, DEFAULT_BUDGET).unwrap();
        (l2, t)
    }

    #[test]
    fn dm_is_dead_end_and_t_is_not() {
        let (l2, table) = l2_table(4);
        assert!(is_dead_end(&l2, &table, &ll_make_dm(3).unwrap()).unwrap());
        assert!(!is_dead_end(&l2, &table, &LampConfig::lit([], 1)).unwrap());
        let e = depth(&l2, &table, &LampConfig::lit([], 1), 5).unwrap();
        assert_eq!(e.depth, Depth::Finite(1));
    }

    #[test]
    fn escape_and_pocket_depth_of_dm() {
        let (l2, table) = l2_table(7);
        for m in 1..=3u32 {
            let dm = ll_make_dm(m).unwrap();
            let esc = depth(&l2, &table, &dm, 12).unwrap();
            assert_eq!(esc.depth, Depth::Finite(2 * m + 1));
            assert_eq!(esc.witness.len() as u32, 2 * m + 1);
            let end = l2.compose(&dm, &l2.evaluate(&esc.witness));
            assert!(crate::lamplighter::ll_length(&end) > crate::lamplighter::ll_length(&dm));
            assert_eq!(pocket_depth(&l2, &table, &dm, 10).unwrap(), Some(m));
        }
        assert_eq!(pocket_depth(&l2, &table, &LampConfig::lit([], 2), 3).unwrap(), Some(0));
    }

    #[test]
    fn depth_limit_is_reported() {
        let (l2, table) = l2_table(4);
        let esc = depth(&l2, &table, &ll_make_dm(3).unwrap(), 3).unwrap();
        assert_eq!(esc.depth, Depth::Exceeded(3));
        assert!(esc.witness.is_empty());
    }

    #[test]
    fn strict_depth_examples() {
        let (l2, table) = l2_table(5);
        assert_eq!(strict_depth(&l2, &table, &ll_make_dm(1).unwrap(), 5).unwrap(), 1);
        assert_eq!(strict_depth(&l2, &table, &ll_make_dm(3).unwrap(), 5).unwrap(), 2);
        assert_eq!(strict_depth(&l2, &table, &ll_make_dm(4).unwrap(), 5).unwrap(), 2);
        assert_eq!(strict_depth(&l2, &table, &ll_make_dm(3).unwrap().shifted(1), 5).unwrap(), 0);
        assert_eq!(strict_depth(&l2, &table, &LampConfig::lit([], 3), 3).unwrap(), 0);
    }

    #[test]
    fn backtracks_of_d3() {
        let (l2, table) = l2_table(6);
        let d3 = ll_make_dm(3).unwrap();
        let back = backtrack_elements(&l2, &table, &d3, 10).unwrap();
        let t_powers: Vec<_> = back
            .iter()
            .filter(|x| x.lamps() == d3.lamps() && x.pos() != 0)
            .collect();
        // d_3 t^i for 0 < |i| < 7, the whole escape path but its last step
        assert_eq!(t_powers.len(), 12);
        let len = crate::lamplighter::ll_length(&d3);
        assert!(back.iter().all(|x| crate::lamplighter::ll_length(x) <= len));
        assert!(!back.contains(&d3));
    }

    #[test]
    fn backtracks_need_a_dead_end() {
        let (l2, table) = l2_table(3);
        assert!(matches!(
            backtrack_elements(&l2, &table, &LampConfig::lit([], 1), 5),
            Err(Error::NotDeadEnd { .. })
        ));
    }

    #[test]
    fn finite_group_top_never_escapes() {
        let s3 = make_s3();
        let table = bfs_metric(&s3, 3, DEFAULT_BUDGET).unwrap();
        let sts = s3.evaluate(&[0, 1, 0]);
        assert!(is_dead_end(&s3, &table, &sts).unwrap());
        assert_eq!(depth(&s3, &table, &sts, 5).unwrap().depth, Depth::Exceeded(5));
    }

    #[test]
    fn free_group_has_no_dead_ends() {
        let f2 = make_free(2);
        let table = bfs_metric(&f2, 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(scan_dead_ends(&f2, &table, 3).unwrap().len(), 0);
    }

    #[test]
    fn report_serializes() {
        let (l2, table) = l2_table(7);
        let rep = dead_end_report(&l2, &table, &ll_make_dm(2).unwrap(), 10).unwrap();
        assert_eq!((rep.length, rep.is_dead_end, rep.depth), (13, true, Depth::Finite(5)));
        assert_eq!(rep.pocket_depth, Some(2));
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["depth"], 5);
    }
}
