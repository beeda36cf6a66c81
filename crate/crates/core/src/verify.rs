//! The acceptance suite.
//!
//! Each criterion runs at pinned parameters and yields an [`Outcome`]. The
//! fast tier trims sample counts; the full tier runs every criterion at its
//! stated scale.

use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builtin::{make_free, make_s3, make_zn};
use crate::curvature::{gencon, kappa, Mode};
use crate::deadend::{depth, is_dead_end, pocket_depth, strict_depth, Depth};
use crate::error::Result;
use crate::group::Group;
use crate::heisenberg::{
    heis_ceil_jump, heis_density_experiment, heis_length, heis_length_high, heis_length_low,
    make_heisenberg, MalcevTriple,
};
use crate::houghton::{h2_g, h2_h, h2_min_length_bound, h2_u, make_h2, Orientation};
use crate::lamplighter::{ll_length, ll_make_dm, make_l2, make_wreath_cyclic, LampConfig};
use crate::metric::{bfs_metric, word_length, MetricTable, DEFAULT_BUDGET};
use crate::transport::{self, assignment, TransportResult};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Fast,
    Full,
}

impl std::str::FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fast" => Ok(Tier::Fast),
            "full" => Ok(Tier::Full),
            other => Err(format!("unknown tier {other:?} (expected fast or full)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {}. {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

type Check = (bool, String);

pub const CRITERIA: [(u32, &str); 9] = [
    (1, "lamplighter oracle agreement"),
    (2, "d_3 dossier"),
    (3, "lamplighter positive curvature"),
    (4, "lamplighter conjugation lemmas"),
    (5, "Houghton group"),
    (6, "Heisenberg length formula"),
    (7, "Heisenberg signs and density"),
    (8, "transport curvature"),
    (9, "strict depth and curvature"),
];

pub fn run_criterion(id: u32, tier: Tier) -> Outcome {
    let start = Instant::now();
    let result = match id {
        1 => lamplighter_oracle(),
        2 => d3_dossier(),
        3 => lamplighter_curvature(),
        4 => lamplighter_lemmas(),
        5 => houghton(),
        6 => heisenberg_formula(tier),
        7 => heisenberg_signs(tier),
        8 => transport_checks(tier),
        9 => strict_depth_proposition(),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
    Outcome {
        id,
        name: CRITERIA
            .iter()
            .find(|c| c.0 == id)
            .map_or("unknown", |c| c.1),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run(tier: Tier) -> Vec<Outcome> {
    CRITERIA.iter().map(|&(id, _)| run_criterion(id, tier)).collect()
}

fn q(p: i64, d: i64) -> Rational {
    Rational::new(p.into(), d.into())
}

fn closed_form_agrees<G: Group>(group: &G, table: &MetricTable<G>) -> (usize, usize) {
    let bad = table
        .iter()
        .filter(|(x, r)| group.closed_length(x) != Some(*r as u64))
        .count();
    (table.len(), bad)
}

fn lamplighter_oracle() -> Result<Check> {
    let l2 = make_l2();
    let (n2, bad2) = closed_form_agrees(&l2, &bfs_metric(&l2, 8, DEFAULT_BUDGET)?);
    let w3 = make_wreath_cyclic(3);
    let (n3, bad3) = closed_form_agrees(&w3, &bfs_metric(&w3, 6, DEFAULT_BUDGET)?);
    Ok((
        bad2 == 0 && bad3 == 0,
        format!("L2 B_8: {n2} elements, {bad2} disagreements; Z3 wr Z B_6: {n3} elements, {bad3} disagreements"),
    ))
}

fn d3_dossier() -> Result<Check> {
    let l2 = make_l2();
    let table = bfs_metric(&l2, 20, DEFAULT_BUDGET)?;
    let d3 = ll_make_dm(3)?;
    let len = word_length(&l2, &d3, &table)?;
    let profile = (0..8)
        .map(|i| word_length(&l2, &d3.shifted(i), &table))
        .collect::<Result<Vec<u64>>>()?;
    let mut ok = len == 19 && profile == [19, 18, 17, 16, 17, 18, 19, 20];
    let mut pockets = Vec::new();
    let mut escapes = Vec::new();
    for m in 1..=4u32 {
        let dm = ll_make_dm(m)?;
        let pocket = pocket_depth(&l2, &table, &dm, 2 * m)?;
        let escape = depth(&l2, &table, &dm, 4 * m)?.depth;
        ok &= is_dead_end(&l2, &table, &dm)?;
        ok &= pocket == Some(m) && escape == Depth::Finite(2 * m + 1);
        pockets.push(pocket.map_or("none".into(), |p| p.to_string()));
        escapes.push(escape.value().map_or("none".into(), |p| p.to_string()));
    }
    Ok((
        ok,
        format!(
            "|d_3| = {len}; profile {profile:?}; pocket depth of d_1..d_4 = [{}]; escape distance = [{}]",
            pockets.join(", "),
            escapes.join(", ")
        ),
    ))
}

fn lamplighter_curvature() -> Result<Check> {
    let l2 = make_l2();
    let table = bfs_metric(&l2, 20, DEFAULT_BUDGET)?;
    let mut ok = true;
    let mut checked = 0;
    for (m, k, rs) in [(5u32, 1i64, 1..=3u32), (5, 2, 1..=2), (4, 1, 1..=2)] {
        let g = ll_make_dm(m)?.shifted(k);
        for r in rs {
            for mode in [Mode::Sphere, Mode::Ball] {
                let rep = kappa::<_, Rational>(&l2, &table, &g, r, mode)?;
                checked += 1;
                if !rep.kappa.is_positive() {
                    ok = false;
                }
            }
        }
    }
    let g = ll_make_dm(3)?.shifted(1);
    let rep = kappa::<_, Rational>(&l2, &table, &g, 1, Mode::Sphere)?;
    let mut lengths: Vec<u64> = rep.breakdown.iter().map(|c| c.length).collect();
    lengths.sort();
    let aga = word_length(&l2, &l2.conjugate(&g, &l2.generator(0)), &table)?;
    let exact = rep.kappa == q(1, 27) && lengths == [16, 18, 18] && aga == 6 * 3 - 1 - 1;
    let mut aga_family = true;
    for m in 2..=6i64 {
        for k in 1..m {
            let g = ll_make_dm(m as u32)?.shifted(k);
            let aga = ll_length(&l2.conjugate(&g, &l2.generator(0))) as i64;
            aga_family &= aga == 6 * m - k - 1;
        }
    }
    Ok((
        ok && exact && aga_family,
        format!(
            "{checked} (m,k,r,mode) cases positive: {ok}; kappa_1(d_3 t) = {} from breakdown {lengths:?} (expected 1/27); |a d_m t^k a| = 6m-k-1 for m <= 6: {aga_family}",
            crate::scalar::Scalar::render(&rep.kappa)
        ),
    ))
}

fn lamplighter_lemmas() -> Result<Check> {
    let l2 = make_l2();
    let mut cases = 0u64;
    let mut bad = 0u64;
    for m in 1..=6i64 {
        let dm = ll_make_dm(m as u32)?;
        for k in 1..m {
            for r in 1..m - k {
                let t = |n: i64| l2.t_power(n);
                let base = ll_length(&dm.shifted(k));
                let a = ll_length(&l2.compose(&t(-r), &dm.shifted(k + r)));
                let b = ll_length(&l2.compose(&t(r), &dm.shifted(k - r)));
                cases += 1;
                if a != base || b != base {
                    bad += 1;
                }
            }
        }
        // every configuration with lamps at -m and m on and others inside
        let inner: Vec<i64> = (-m + 1..m).collect();
        for mask in 0u64..(1 << inner.len()) {
            let lit = inner
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &x)| x)
                .chain([-m, m]);
            for k in -(m - 1)..m {
                let w = LampConfig::lit(lit.clone(), k);
                let len = ll_length(&w);
                for r in -(m - 1 - k.abs())..=(m - 1 - k.abs()) {
                    let conj = l2.compose(&l2.compose(&l2.t_power(r), &w), &l2.t_power(-r));
                    cases += 1;
                    if ll_length(&conj) != len {
                        bad += 1;
                    }
                }
            }
        }
    }
    Ok((bad == 0, format!("{cases} instances for m <= 6, {bad} violations")))
}

fn houghton() -> Result<Check> {
    let h = make_h2();
    let horizon = 13;
    let table = bfs_metric(&h, horizon, DEFAULT_BUDGET)?;
    let u2 = h.evaluate(&h2_u(2, Orientation::NegFirst)?);
    let u2_pos = h.evaluate(&h2_u(2, Orientation::PosFirst)?);
    let u2_len = table.lookup(&u2);
    let g2 = h2_g(2)?;
    let g2_len = table.lookup(&g2);
    let g2_dead = is_dead_end(&h, &table, &g2)?;
    let h22 = h2_h(2, 2)?;
    let rep = kappa::<_, Rational>(&h, &table, &h22, 1, Mode::Sphere)?;
    let bound_ok = table
        .iter()
        .all(|(x, r)| h2_min_length_bound(x) <= r as u64);
    let ok = u2 == u2_pos && u2 == h22 && u2_len == Some(11) && g2_dead && rep.kappa.is_positive() && bound_ok;
    Ok((
        ok,
        format!(
            "horizon {horizon} ({} elements); |u_2| = {u2_len:?}; |g_2| = {g2_len:?}, dead end: {g2_dead}; kappa_1(h_22) = {}; moved-point bound holds on the ball: {bound_ok}",
            table.len(),
            crate::scalar::Scalar::render(&rep.kappa)
        ),
    ))
}

fn heisenberg_formula(tier: Tier) -> Result<Check> {
    let heis = make_heisenberg();
    let table = bfs_metric(&heis, 10, DEFAULT_BUDGET)?;
    let mut sector = 0;
    let mut bfs_bad = 0;
    for (x, r) in table.iter() {
        if x.in_sector() {
            sector += 1;
            if heis_length(x)? != r as u64 {
                bfs_bad += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut branch_bad = 0;
    for _ in 0..100 {
        let a = rng.gen_range(2..10_000i64);
        let b = rng.gen_range(1..a);
        let g = MalcevTriple::new(a, b, a * a - a * b);
        if heis_length_low(&g)? != heis_length_high(&g)? {
            branch_bad += 1;
        }
    }
    let a_max = if tier == Tier::Full { 50 } else { 20 };
    let mut ceil_cases = 0;
    let mut ceil_bad = 0;
    for a in 1..=a_max {
        for b in 0..=a {
            for t in 1..=3 {
                if b * t > a {
                    continue;
                }
                for c in 0..3 * a {
                    if c % a == 0 {
                        continue;
                    }
                    ceil_cases += 1;
                    if !heis_ceil_jump(a, b, c, t)?.agrees() {
                        ceil_bad += 1;
                    }
                }
            }
        }
    }
    Ok((
        bfs_bad == 0 && branch_bad == 0 && ceil_bad == 0,
        format!(
            "{sector} sector elements in B_10, {bfs_bad} mismatches; branch disagreements at C = A^2 - AB: {branch_bad}/100; ceiling cases A <= {a_max}, t <= 3: {ceil_cases} checked, {ceil_bad} wrong"
        ),
    ))
}

fn heisenberg_signs(tier: Tier) -> Result<Check> {
    let ks: &[u64] = if tier == Tier::Full { &[40, 80] } else { &[40] };
    let mut ok = true;
    let mut parts = Vec::new();
    for r in [1u32, 2] {
        for &k in ks {
            let rep = heis_density_experiment(k, r, false)?;
            let below = rep.bands_below_bound().len();
            let min_strict = rep
                .bands
                .iter()
                .map(|f| f.x_strict.min(f.y_strict).min(f.z_strict))
                .min()
                .unwrap_or_default();
            ok &= rep.actual.all_present() && rep.mismatches == 0 && below == 0;
            parts.push(format!(
                "r={r} k={k}: {} elements (+{} 0:{} -{}), {} mixed, {} mismatches, {} band pairs below 1/{} (min interior fraction {}/{})",
                rep.elements,
                rep.actual.positive,
                rep.actual.zero,
                rep.actual.negative,
                rep.mixed,
                rep.mismatches,
                below,
                5 * r,
                min_strict.numer(),
                min_strict.denom()
            ));
        }
    }
    Ok((ok, parts.join("; ")))
}

fn random_cost(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    (0..n)
        .map(|_| (0..n).map(|_| rng.gen_range(0..20)).collect())
        .collect()
}

/// `(kappa* >= comparison kappa, kappa* == comparison kappa)` for `(e, g)`.
fn compare_kappas<G: Group>(
    group: &G,
    table: &MetricTable<G>,
    g: &G::Elem,
    r: u32,
    mode: Mode,
) -> Result<(bool, bool)> {
    let star: Rational = transport::kappa_star(group, table, &group.identity(), g, r, mode)?;
    let comparison = kappa::<_, Rational>(group, table, g, r, mode)?.kappa;
    Ok((star >= comparison, star == comparison))
}

fn sample_dominance<G: Group>(
    group: &G,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(usize, usize)> {
    let radius = 4;
    let table = bfs_metric(group, radius + 2, DEFAULT_BUDGET)?;
    let pool: Vec<G::Elem> = table.ball(radius)?.into_iter().skip(1).collect();
    let mut bad = 0;
    for i in 0..count {
        let g = pool.choose(rng).expect("nonempty ball");
        let mode = if i % 2 == 0 { Mode::Sphere } else { Mode::Ball };
        if !compare_kappas(group, &table, g, 1, mode)?.0 {
            bad += 1;
        }
    }
    Ok((count, bad))
}

fn transport_checks(tier: Tier) -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (matrices, max_n) = if tier == Tier::Full { (200, 8) } else { (50, 7) };
    let mut solver_bad = 0;
    for i in 0..matrices {
        let n = 1 + i % max_n;
        let cost = random_cost(&mut rng, n);
        let sol = assignment::solve(&cost);
        if sol.total != assignment::brute_force(&cost) {
            solver_bad += 1;
        }
    }

    let s3 = make_s3();
    let table = bfs_metric(&s3, 3, DEFAULT_BUDGET)?;
    let s = s3.generator(0);
    let gc: Rational = gencon(&s3, &table, &s)?;
    let res: TransportResult<Rational> =
        transport::optimal_permutations(&s3, &table, &s, 1, Mode::Sphere, transport::DEFAULT_CAP)?;
    let sts = s3.evaluate(&[0, 1, 0]);
    let res_sts: TransportResult<Rational> =
        transport::optimal_permutations(&s3, &table, &sts, 1, Mode::Sphere, transport::DEFAULT_CAP)?;
    let s3_ok = gc == q(2, 1)
        && res.t1 == Rational::one()
        && res.kappa_star == Some(Rational::zero())
        && !res.identity_optimal
        && res_sts.identity_optimal;

    let z2 = make_zn(2);
    let ztable = bfs_metric(&z2, 8, DEFAULT_BUDGET)?;
    let mut z_bad = 0;
    let pairs = if tier == Tier::Full { 500 } else { 100 };
    for _ in 0..pairs {
        let x = vec![rng.gen_range(-20..=20i64), rng.gen_range(-20..=20i64)];
        let mut y = x.clone();
        while y == x {
            y = vec![x[0] + rng.gen_range(-3..=3i64), x[1] + rng.gen_range(-3..=3i64)];
        }
        let star: Rational = transport::kappa_star(&z2, &ztable, &x, &y, 1, Mode::Sphere)?;
        let g = z2.difference(&x, &y);
        let comparison = kappa::<_, Rational>(&z2, &ztable, &g, 1, Mode::Sphere)?.kappa;
        if star != comparison {
            z_bad += 1;
        }
    }

    let f2 = make_free(2);
    let ftable = bfs_metric(&f2, 6, DEFAULT_BUDGET)?;
    let mut f_bad = 0;
    let f_pool: Vec<_> = ftable.ball(4)?.into_iter().skip(1).collect();
    for g in &f_pool {
        if !compare_kappas(&f2, &ftable, g, 1, Mode::Sphere)?.1 {
            f_bad += 1;
        }
    }

    let per_group = if tier == Tier::Full { 112 } else { 20 };
    let mut instances = 0;
    let mut dom_bad = 0;
    let mut add = |(n, b): (usize, usize)| {
        instances += n;
        dom_bad += b;
    };
    add(sample_dominance(&make_zn(2), per_group, &mut rng)?);
    add(sample_dominance(&make_zn(3), per_group, &mut rng)?);
    add(sample_dominance(&make_free(2), per_group, &mut rng)?);
    add(sample_dominance(&make_free(3), per_group, &mut rng)?);
    add(sample_dominance(&make_s3(), per_group, &mut rng)?);
    add(sample_dominance(&make_l2(), per_group, &mut rng)?);
    add(sample_dominance(&make_wreath_cyclic(3), per_group, &mut rng)?);
    add(sample_dominance(&make_h2(), per_group, &mut rng)?);
    add(sample_dominance(&make_heisenberg(), per_group + 8, &mut rng)?);

    Ok((
        solver_bad == 0 && s3_ok && z_bad == 0 && f_bad == 0 && dom_bad == 0,
        format!(
            "solver vs brute force: {solver_bad}/{matrices} wrong; S_3: GenCon(s) = {}, T1 = {}, identity optimal for s: {}, for sts: {}; Z^2 pairs with kappa* != kappa: {z_bad}/{pairs}; F_2 B_4 elements with kappa* != kappa: {f_bad}/{}; kappa* < kappa_1 in {dom_bad}/{instances} sampled instances",
            crate::scalar::Scalar::render(&gc),
            crate::scalar::Scalar::render(&res.t1),
            res.identity_optimal,
            res_sts.identity_optimal,
            f_pool.len()
        ),
    ))
}

fn strict_depth_proposition() -> Result<Check> {
    let l2 = make_l2();
    let table = bfs_metric(&l2, 7, DEFAULT_BUDGET)?;
    let mut strict = 0;
    let mut instances = 0;
    let mut bad = 0;
    let mut deepest = 0;
    for (g, len) in table.iter() {
        let k = strict_depth(&l2, &table, g, len.min(table.horizon()))?;
        if k == 0 {
            continue;
        }
        strict += 1;
        deepest = deepest.max(k);
        for r in 1..k {
            instances += 1;
            if kappa::<_, Rational>(&l2, &table, g, r, Mode::Sphere)?.kappa.is_negative() {
                bad += 1;
            }
        }
    }
    let mut extra = Vec::new();
    for m in 2..=4u32 {
        let dm = ll_make_dm(m)?;
        let k = strict_depth(&l2, &table, &dm, table.horizon())?;
        for r in 1..k {
            instances += 1;
            let kap = kappa::<_, Rational>(&l2, &table, &dm, r, Mode::Sphere)?.kappa;
            if kap.is_negative() {
                bad += 1;
            }
        }
        extra.push(format!("d_{m}: {k}"));
    }
    Ok((
        bad == 0,
        format!(
            "{strict} strict dead ends in B_7 (largest strict depth {deepest}); strict depth of {}; {instances} (g, r < k) instances, {bad} with negative curvature",
            extra.join(", ")
        ),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_tier_passes_cheap_criteria() {
        for id in [1, 4, 6] {
            let out = run_criterion(id, Tier::Fast);
            assert!(out.passed, "{out}");
        }
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run_criterion(42, Tier::Fast).passed);
    }
}
