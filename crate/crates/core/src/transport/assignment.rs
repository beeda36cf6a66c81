//! Exact minimum-cost assignment on integer cost matrices.
//!
//! The solver is the shortest-augmenting-path Hungarian method with dual
//! potentials. The potentials certify optimality: a permutation is optimal
//! exactly when it only uses tight edges, which is how all optima are
//! enumerated.

use itertools::Itertools;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub total: i64,
    /// `perm[i]` is the column assigned to row `i`
    pub perm: Vec<usize>,
    row_potential: Vec<i64>,
    col_potential: Vec<i64>,
}

impl Assignment {
    /// Whether `cost[i][j]` has zero reduced cost.
    pub fn is_tight(&self, cost: &[Vec<i64>], i: usize, j: usize) -> bool {
        cost[i][j] - self.row_potential[i] - self.col_potential[j] == 0
    }
}

pub fn solve(cost: &[Vec<i64>]) -> Assignment {
    let n = cost.len();
    assert!(cost.iter().all(|row| row.len() == n), "cost matrix must be square");
    if n == 0 {
        return Assignment {
            total: 0,
            perm: Vec::new(),
            row_potential: Vec::new(),
            col_potential: Vec::new(),
        };
    }
    const INF: i64 = i64::MAX / 4;
    // 1-based with a virtual column 0
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![INF; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = INF;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[owner[j] - 1] = j - 1;
    }
    let total = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Assignment {
        total,
        perm,
        row_potential: u[1..].to_vec(),
        col_potential: v[1..].to_vec(),
    }
}

/// Whether rows `rows` can be matched into the free columns using only
/// edges allowed by `edge`.
fn has_matching(rows: &[usize], free: &[bool], edge: &dyn Fn(usize, usize) -> bool) -> bool {
    let n = free.len();
    let mut col_owner: Vec<Option<usize>> = vec![None; n];
    fn augment(
        i: usize,
        free: &[bool],
        edge: &dyn Fn(usize, usize) -> bool,
        seen: &mut [bool],
        col_owner: &mut [Option<usize>],
    ) -> bool {
        for j in 0..free.len() {
            if free[j] && !seen[j] && edge(i, j) {
                seen[j] = true;
                if col_owner[j].is_none_or(|k| augment(k, free, edge, seen, col_owner)) {
                    col_owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    rows.iter().all(|&i| {
        let mut seen = vec![false; n];
        augment(i, free, edge, &mut seen, &mut col_owner)
    })
}

/// Whether a perfect matching exists using only edges allowed by `edge`.
pub fn perfect_matching_exists(n: usize, edge: &dyn Fn(usize, usize) -> bool) -> bool {
    let rows: Vec<usize> = (0..n).collect();
    has_matching(&rows, &vec![true; n], edge)
}

/// All optimal permutations in lexicographic order, at most `cap` of them.
/// The flag reports whether the list was cut short.
pub fn optimal_permutations(cost: &[Vec<i64>], sol: &Assignment, cap: usize) -> (Vec<Vec<usize>>, bool) {
    let n = cost.len();
    let tight = |i: usize, j: usize| sol.is_tight(cost, i, j);
    let mut out = Vec::new();
    let mut perm = Vec::with_capacity(n);
    let mut free = vec![true; n];
    let truncated = !enumerate(0, n, &tight, &mut perm, &mut free, &mut out, cap);
    (out, truncated)
}

/// Returns false once the cap is hit.
fn enumerate(
    i: usize,
    n: usize,
    tight: &dyn Fn(usize, usize) -> bool,
    perm: &mut Vec<usize>,
    free: &mut [bool],
    out: &mut Vec<Vec<usize>>,
    cap: usize,
) -> bool {
    if i == n {
        if out.len() == cap {
            return false;
        }
        out.push(perm.clone());
        return true;
    }
    let rest: Vec<usize> = (i + 1..n).collect();
    for j in 0..n {
        if !free[j] || !tight(i, j) {
            continue;
        }
        free[j] = false;
        if has_matching(&rest, free, tight) {
            perm.push(j);
            let go_on = enumerate(i + 1, n, tight, perm, free, out, cap);
            perm.pop();
            if !go_on {
                free[j] = true;
                return false;
            }
        }
        free[j] = true;
    }
    true
}

/// Minimum over all `n!` permutations.
pub fn brute_force(cost: &[Vec<i64>]) -> i64 {
    let n = cost.len();
    (0..n)
        .permutations(n)
        .map(|p| p.iter().enumerate().map(|(i, &j)| cost[i][j]).sum())
        .min()
        .unwrap_or(0)
}
