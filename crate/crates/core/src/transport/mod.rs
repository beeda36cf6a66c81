//! Transport curvature between uniform measures on spheres or balls.
//!
//! For basepoints `x`, `y` and a support `U` (the sphere or ball of radius
//! `r` around the identity), the measures are uniform on `xU` and `yU`. The
//! optimal plan between two uniform measures of equal size is a
//! permutation, so `T1` is an assignment optimum divided by `|U|`, and
//! `kappa* = 1 - T1 / d(x, y)`. Row `i` and column `j` of the cost matrix
//! stand for `x u_i` and `y u_j`; the identity permutation is the plan that
//! pairs `x u` with `y u`.

pub mod assignment;

use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::curvature::{conjugators, Mode};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::metric::{word_length, MetricTable};
use crate::scalar::Scalar;

pub use assignment::{brute_force, solve, Assignment};

pub const DEFAULT_CAP: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec<E> {
    pub x: E,
    pub y: E,
    pub support: Mode,
    pub radius: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportResult<S> {
    pub support: Vec<String>,
    pub cost: Vec<Vec<u64>>,
    pub total: u64,
    pub t1: S,
    pub distance: u64,
    /// `None` when `x = y`
    pub kappa_star: Option<S>,
    /// optimal permutations, lexicographic, capped
    pub optimal: Vec<Vec<usize>>,
    pub truncated: bool,
    pub identity_cost: u64,
    pub identity_optimal: bool,
}

impl<S: Scalar> Serialize for TransportResult<S> {
    fn serialize<Ser: Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let mut st = ser.serialize_struct("TransportResult", 12)?;
        st.serialize_field("support", &self.support)?;
        st.serialize_field("cost", &self.cost)?;
        st.serialize_field("total", &self.total)?;
        st.serialize_field("t1", &self.t1.render())?;
        st.serialize_field("t1_float", &self.t1.approx())?;
        st.serialize_field("distance", &self.distance)?;
        st.serialize_field("kappa_star", &self.kappa_star.as_ref().map(Scalar::render))?;
        st.serialize_field("kappa_star_float", &self.kappa_star.as_ref().map(Scalar::approx))?;
        st.serialize_field("optimal", &self.optimal)?;
        st.serialize_field("truncated", &self.truncated)?;
        st.serialize_field("identity_cost", &self.identity_cost)?;
        st.serialize_field("identity_optimal", &self.identity_optimal)?;
        st.end()
    }
}

fn suggest_horizon(e: Error, r: u32, d: u64) -> Error {
    match e {
        Error::OutOfHorizon { element, horizon, .. } => Error::OutOfHorizon {
            element,
            horizon,
            suggested: (d as u32).saturating_add(2 * r),
        },
        other => other,
    }
}

/// Pairwise distances `d(x u_i, y u_j) = |u_i^-1 x^-1 y u_j|`.
pub fn cost_matrix<G: Group>(
    group: &G,
    table: &MetricTable<G>,
    x: &G::Elem,
    y: &G::Elem,
    support: &[G::Elem],
) -> Result<Vec<Vec<u64>>> {
    let g = group.difference(x, y);
    support
        .par_iter()
        .map(|u| {
            let left = group.compose(&group.invert(u), &g);
            support
                .iter()
                .map(|v| word_length(group, &group.compose(&left, v), table))
                .collect::<Result<Vec<u64>>>()
        })
        .collect()
}

fn signed(cost: &[Vec<u64>]) -> Vec<Vec<i64>> {
    cost.iter()
        .map(|row| row.iter().map(|&c| c as i64).collect())
        .collect()
}

pub fn transport_distance<G: Group, S: Scalar>(
    group: &G,
    table: &MetricTable<G>,
    spec: &MeasureSpec<G::Elem>,
    cap: usize,
) -> Result<TransportResult<S>> {
    if spec.radius == 0 && spec.support == Mode::Sphere {
        return Err(Error::InvalidIndex("transport radius must be at least 1".into()));
    }
    let d = word_length(group, &group.difference(&spec.x, &spec.y), table)?;
    let support = conjugators(table, spec.radius, spec.support)?;
    let cost = cost_matrix(group, table, &spec.x, &spec.y, &support)
        .map_err(|e| suggest_horizon(e, spec.radius, d))?;
    let icost = signed(&cost);
    let sol = solve(&icost);
    let (optimal, truncated) = assignment::optimal_permutations(&icost, &sol, cap);
    let n = support.len();
    let total = sol.total as u64;
    let identity_cost: u64 = (0..n).map(|i| cost[i][i]).sum();
    let t1 = S::ratio(total, n as u64);
    let kappa_star = (d > 0).then(|| S::ratio(1, 1) - t1.clone() / S::ratio(d, 1));
    Ok(TransportResult {
        support: support.iter().map(|u| group.format(u)).collect(),
        cost,
        total,
        t1,
        distance: d,
        kappa_star,
        optimal,
        truncated,
        identity_cost,
        identity_optimal: identity_cost == total,
    })
}

/// `kappa*(x, y)` at the given radius and support.
pub fn kappa_star<G: Group, S: Scalar>(
    group: &G,
    table: &MetricTable<G>,
    x: &G::Elem,
    y: &G::Elem,
    radius: u32,
    support: Mode,
) -> Result<S> {
    if x == y {
        return Err(Error::EqualPoints);
    }
    let spec = MeasureSpec {
        x: x.clone(),
        y: y.clone(),
        support,
        radius,
    };
    let res: TransportResult<S> = transport_distance(group, table, &spec, 1)?;
    Ok(res.kappa_star.expect("distinct points"))
}

/// Optimal permutations for the pair `(e, g)`.
pub fn optimal_permutations<G: Group, S: Scalar>(
    group: &G,
    table: &MetricTable<G>,
    g: &G::Elem,
    radius: u32,
    support: Mode,
    cap: usize,
) -> Result<TransportResult<S>> {
    let spec = MeasureSpec {
        x: group.identity(),
        y: g.clone(),
        support,
        radius,
    };
    transport_distance(group, table, &spec, cap)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeRow {
    pub element: String,
    pub length: u64,
    pub sphere_identity_optimal: bool,
    pub sphere_optima: usize,
    pub ball_identity_optimal: bool,
    pub ball_optima: usize,
    pub ball_optima_truncated: bool,
    /// some optimal ball plan maps every sphere `S_l`, `l <= r`, to itself
    pub sphere_preserving: bool,
    /// ball optimum equals the sum of the sphere optima for `l <= r`
    pub decomposes: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProbeReport {
    pub group: String,
    pub radius: u32,
    pub samples: usize,
    pub identity_always_optimal_sphere: bool,
    pub identity_always_optimal_ball: bool,
    pub sphere_preserving_always: bool,
    pub decomposes_always: bool,
    pub first_nontrivial: Option<String>,
    pub rows: Vec<ProbeRow>,
}

fn probe_one<G: Group>(group: &G, table: &MetricTable<G>, g: &G::Elem, r: u32, cap: usize) -> Result<ProbeRow> {
    let e = group.identity();
    let sphere_spec = MeasureSpec {
        x: e.clone(),
        y: g.clone(),
        support: Mode::Sphere,
        radius: r,
    };
    let sphere: TransportResult<f64> = transport_distance(group, table, &sphere_spec, cap)?;
    let ball_support = table.ball(r)?;
    let cost = signed(&cost_matrix(group, table, &e, g, &ball_support)?);
    let sol = solve(&cost);
    let (ball_optima, truncated) = assignment::optimal_permutations(&cost, &sol, cap);
    let identity_cost: i64 = (0..cost.len()).map(|i| cost[i][i]).sum();
    let layer: Vec<usize> = (0..=r as usize)
        .flat_map(|l| std::iter::repeat_n(l, table.layers()[l].len()))
        .collect();
    let sphere_preserving = assignment::perfect_matching_exists(cost.len(), &|i, j| {
        layer[i] == layer[j] && sol.is_tight(&cost, i, j)
    });
    let mut per_sphere = word_length(group, g, table)? as i64;
    for l in 1..=r {
        let spec = MeasureSpec {
            x: e.clone(),
            y: g.clone(),
            support: Mode::Sphere,
            radius: l,
        };
        let res: TransportResult<f64> = transport_distance(group, table, &spec, 1)?;
        per_sphere += res.total as i64;
    }
    Ok(ProbeRow {
        element: group.format(g),
        length: sphere.distance,
        sphere_identity_optimal: sphere.identity_optimal,
        sphere_optima: sphere.optimal.len(),
        ball_identity_optimal: identity_cost == sol.total,
        ball_optima: ball_optima.len(),
        ball_optima_truncated: truncated,
        sphere_preserving,
        decomposes: per_sphere == sol.total,
    })
}

/// Empirical answers to the permutation questions over `sample`; the
/// identity is skipped.
pub fn question_probe<G: Group>(
    group: &G,
    table: &MetricTable<G>,
    sample: &[G::Elem],
    r: u32,
    cap: usize,
) -> Result<ProbeReport> {
    let rows = sample
        .par_iter()
        .filter(|g| !group.is_identity(g))
        .map(|g| probe_one(group, table, g, r, cap))
        .collect::<Result<Vec<ProbeRow>>>()?;
    Ok(ProbeReport {
        group: group.id(),
        radius: r,
        samples: rows.len(),
        identity_always_optimal_sphere: rows.iter().all(|x| x.sphere_identity_optimal),
        identity_always_optimal_ball: rows.iter().all(|x| x.ball_identity_optimal),
        sphere_preserving_always: rows.iter().all(|x| x.sphere_preserving),
        decomposes_always: rows.iter().all(|x| x.decomposes),
        first_nontrivial: rows
            .iter()
            .find(|x| !x.sphere_identity_optimal)
            .map(|x| x.element.clone()),
        rows,
    })
}
