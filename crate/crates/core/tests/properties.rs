use std::collections::{BTreeMap, HashSet};

use curvlab::builtin::{free_gencon, make_free, make_s3, make_zn};
use curvlab::curvature::{comparison_distance, kappa, Mode};
use curvlab::deadend::{backtrack_elements, depth, is_dead_end, Depth};
use curvlab::heisenberg::{
    heis_ceil_jump, heis_compose, heis_invert, heis_length, heis_length_high, heis_length_low,
    heis_sign_predict, make_heisenberg, MalcevTriple, Sign, SectorSpec,
};
use curvlab::houghton::{h2_h, make_h2, HoughtonElement};
use curvlab::lamplighter::{
    ll_embed_in_dead_end, ll_geodesic, ll_length, ll_make_dm, make_l2, make_wreath_cyclic, LampConfig,
};
use curvlab::transport::{self, assignment};
use curvlab::{bfs_metric, Group, MetricTable, Rational, DEFAULT_BUDGET};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn word(gens: usize, max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..gens, 0..max)
}

/// Group-law and encoding checks on three random words.
fn check_laws<G: Group>(group: &G, a: &[usize], b: &[usize], c: &[usize]) {
    let (x, y, z) = (group.evaluate(a), group.evaluate(b), group.evaluate(c));
    let xy_z = group.compose(&group.compose(&x, &y), &z);
    let x_yz = group.compose(&x, &group.compose(&y, &z));
    assert_eq!(xy_z, x_yz);
    let mut ab = a.to_vec();
    ab.extend_from_slice(b);
    assert_eq!(group.evaluate(&ab), group.compose(&x, &y));
    assert_eq!(group.invert(&group.invert(&x)), x);
    assert!(group.is_identity(&group.compose(&x, &group.invert(&x))));
    let inv_word = group.generators().invert_word(a);
    assert_eq!(group.evaluate(&inv_word), group.invert(&x));
    assert_eq!(group.decode(&group.encode(&x)).as_ref(), Some(&x));
    assert_eq!(group.encode(&x) == group.encode(&y), x == y);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_laws_zn(a in word(6, 12), b in word(6, 12), c in word(6, 12)) {
        check_laws(&make_zn(3), &a, &b, &c);
    }

    #[test]
    fn group_laws_free(a in word(4, 12), b in word(4, 12), c in word(4, 12)) {
        check_laws(&make_free(2), &a, &b, &c);
    }

    #[test]
    fn group_laws_s3(a in word(2, 12), b in word(2, 12), c in word(2, 12)) {
        check_laws(&make_s3(), &a, &b, &c);
    }

    #[test]
    fn group_laws_l2(a in word(3, 14), b in word(3, 14), c in word(3, 14)) {
        check_laws(&make_l2(), &a, &b, &c);
    }

    #[test]
    fn group_laws_w3(a in word(4, 14), b in word(4, 14), c in word(4, 14)) {
        check_laws(&make_wreath_cyclic(3), &a, &b, &c);
    }

    #[test]
    fn group_laws_h2(a in word(3, 16), b in word(3, 16), c in word(3, 16)) {
        check_laws(&make_h2(), &a, &b, &c);
    }

    #[test]
    fn group_laws_heisenberg(a in word(4, 14), b in word(4, 14), c in word(4, 14)) {
        check_laws(&make_heisenberg(), &a, &b, &c);
    }

    #[test]
    fn geodesic_spells_configuration(
        lamps in prop::collection::btree_set(-8i64..8, 0..7),
        pos in -10i64..10,
    ) {
        let l2 = make_l2();
        let cfg = LampConfig::lit(lamps, pos);
        let w = ll_geodesic(&l2, &cfg);
        prop_assert_eq!(w.len() as u64, ll_length(&cfg));
        prop_assert_eq!(l2.evaluate(&w), cfg);
    }

    #[test]
    fn wreath_geodesic_spells_configuration(
        lamps in prop::collection::btree_map(-6i64..6, 1usize..3, 0..6),
        pos in -8i64..8,
    ) {
        let w3 = make_wreath_cyclic(3);
        let cfg = LampConfig::with_states(w3.base(), lamps, pos).unwrap();
        let w = ll_geodesic(&w3, &cfg);
        prop_assert_eq!(w.len() as u64, ll_length(&cfg));
        prop_assert_eq!(w3.evaluate(&w), cfg);
    }

    #[test]
    fn every_element_is_a_dead_end_prefix(
        lamps in prop::collection::btree_set(-6i64..6, 0..6),
        pos in -7i64..7,
    ) {
        let l2 = make_l2();
        let w = LampConfig::lit(lamps, pos);
        let emb = ll_embed_in_dead_end(&l2, &w).unwrap();
        let mut full = ll_geodesic(&l2, &w);
        full.extend(&emb.extension);
        let dm = ll_make_dm(emb.m).unwrap();
        prop_assert_eq!(l2.evaluate(&full), dm.clone());
        prop_assert_eq!(emb.geodesic, full.len() as u64 == ll_length(&dm));
        if !emb.geodesic {
            let (left, right) = (w.lamps().keys().next(), w.lamps().keys().last());
            let reach = [left, right].into_iter().flatten().map(|x| x.abs()).chain([w.pos().abs(), 1]);
            prop_assert_eq!(emb.m as i64, reach.max().unwrap());
        }
    }

    #[test]
    fn heisenberg_branches_meet(a in 2i64..5000, b_frac in 0.0f64..1.0) {
        let b = 1 + ((a - 1) as f64 * b_frac) as i64 % (a - 1);
        let g = MalcevTriple::new(a, b, a * a - a * b);
        prop_assert_eq!(heis_length_low(&g).unwrap(), heis_length_high(&g).unwrap());
    }

    #[test]
    fn ceiling_cases(a in 1i64..50, b in 0i64..50, c in 0i64..5000, t in 1i64..=3) {
        prop_assume!(b * t <= a && c % a != 0);
        prop_assert!(heis_ceil_jump(a, b, c, t).unwrap().agrees());
    }

    #[test]
    fn central_conjugation_is_trivial(a in 2i64..60, b in 1i64..59, c in 0i64..3000, n in -5i64..5) {
        prop_assume!(a > b);
        let g = MalcevTriple::new(a, b, c);
        let z = MalcevTriple::new(0, 0, n);
        let conj = heis_compose(&heis_invert(&z), &heis_compose(&g, &z));
        prop_assert_eq!(conj, g);
    }

    #[test]
    fn b_conjugation_cancels_in_pairs(a in 3i64..60, b in 1i64..58, c in 1i64..3000) {
        prop_assume!(a > b + 1 && c >= a && c + a <= a * a - a * b);
        let g = MalcevTriple::new(a, b, c);
        let heis = make_heisenberg();
        let up = heis_length(&heis.conjugate(&g, &heis.generator(2))).unwrap() as i64;
        let down = heis_length(&heis.conjugate(&g, &heis.generator(3))).unwrap() as i64;
        prop_assert_eq!(up + down, 2 * heis_length(&g).unwrap() as i64);
    }

    #[test]
    fn solver_is_relabel_invariant(
        n in 1usize..7,
        seed in prop::collection::vec(0i64..30, 49),
        shuffle in prop::collection::vec(any::<u32>(), 14),
    ) {
        let cost: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| seed[i * 7 + j]).collect()).collect();
        let mut rows: Vec<usize> = (0..n).collect();
        let mut cols: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            rows.swap(i, shuffle[i] as usize % (i + 1));
            cols.swap(i, shuffle[7 + i] as usize % (i + 1));
        }
        let permuted: Vec<Vec<i64>> = rows.iter().map(|&i| cols.iter().map(|&j| cost[i][j]).collect()).collect();
        let a = assignment::solve(&cost);
        let b = assignment::solve(&permuted);
        prop_assert_eq!(a.total, b.total);
        prop_assert_eq!(a.total, assignment::brute_force(&cost));
    }
}

#[test]
fn triangle_inequality_on_balls() {
    let f2 = make_free(2);
    let table = bfs_metric(&f2, 6, DEFAULT_BUDGET).unwrap();
    let ball = table.ball(3).unwrap();
    for x in ball.iter().step_by(7) {
        for y in ball.iter().step_by(5) {
            let xy = f2.compose(x, y);
            let d = table.lookup(&xy).unwrap();
            assert!(d <= table.lookup(x).unwrap() + table.lookup(y).unwrap());
        }
    }
    let heis = make_heisenberg();
    let table = bfs_metric(&heis, 8, DEFAULT_BUDGET).unwrap();
    let ball = table.ball(4).unwrap();
    for x in ball.iter().step_by(3) {
        for y in ball.iter().step_by(11) {
            let d = table.lookup(&heis.compose(x, y)).unwrap();
            assert!(d <= table.lookup(x).unwrap() + table.lookup(y).unwrap());
        }
    }
}

/// Sphere sizes around `h`, grown by generator steps from `h`.
fn spheres_around<G: Group>(group: &G, h: &G::Elem, radius: u32) -> Vec<usize> {
    let mut seen: HashSet<G::Elem> = HashSet::from([h.clone()]);
    let mut frontier = vec![h.clone()];
    let mut sizes = vec![1];
    for _ in 0..radius {
        let mut next = Vec::new();
        for x in &frontier {
            for j in 0..group.generators().len() {
                let y = group.mul_generator(x, j);
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        sizes.push(next.len());
        frontier = next;
    }
    sizes
}

fn check_transitive<G: Group>(group: &G, radius: u32) {
    let table = bfs_metric(group, radius + 2, DEFAULT_BUDGET).unwrap();
    for h in table.sphere(radius + 2).unwrap().iter().step_by(17).take(5) {
        assert_eq!(spheres_around(group, h, radius), table.layer_sizes()[..=radius as usize]);
    }
}

#[test]
fn sphere_sizes_do_not_depend_on_basepoint() {
    check_transitive(&make_l2(), 4);
    check_transitive(&make_h2(), 4);
    check_transitive(&make_heisenberg(), 4);
    check_transitive(&make_free(3), 3);
}

#[test]
fn layers_are_disjoint_and_generated() {
    let l2 = make_l2();
    let table = bfs_metric(&l2, 6, DEFAULT_BUDGET).unwrap();
    assert_eq!(table.sphere(0).unwrap(), &[l2.identity()]);
    let mut seen = HashSet::new();
    for (r, layer) in table.layers().iter().enumerate().skip(1) {
        for x in layer {
            assert!(seen.insert(x.clone()));
            let reached = (0..3).any(|j| {
                let prev = l2.mul_generator(x, l2.generators().inverse(j));
                table.lookup(&prev) == Some(r as u32 - 1)
            });
            assert!(reached);
        }
    }
    assert_eq!(table.len(), table.ball_size(6));
    // six elements of length two
    assert_eq!(table.sphere(2).unwrap().len(), 6);
}

fn check_report_invariants<G: Group>(group: &G, table: &MetricTable<G>, g: &G::Elem, r: u32) {
    for mode in [Mode::Sphere, Mode::Ball] {
        let rep = kappa::<_, Rational>(group, table, g, r, mode).unwrap();
        let sum: u64 = rep.breakdown.iter().map(|c| c.length).sum();
        let mean = Rational::new(sum.into(), (rep.breakdown.len() as u64).into());
        assert_eq!(rep.comparison_distance, mean);
        assert!(rep.kappa <= Rational::from_integer(1.into()));
    }
}

#[test]
fn ball_average_combines_sphere_averages() {
    let l2 = make_l2();
    let table = bfs_metric(&l2, 4, DEFAULT_BUDGET).unwrap();
    let g = ll_make_dm(3).unwrap().shifted(1);
    let r = 3;
    let ball: Rational = comparison_distance(&l2, &table, &g, r, Mode::Ball).unwrap();
    let mut total = Rational::from_integer((ll_length(&g)).into());
    for i in 1..=r {
        let s: Rational = comparison_distance(&l2, &table, &g, i, Mode::Sphere).unwrap();
        let n = table.sphere(i).unwrap().len() as u64;
        total += s * Rational::from_integer(n.into());
    }
    let expected = total / Rational::from_integer((table.ball_size(r) as u64).into());
    assert_eq!(ball, expected);
    check_report_invariants(&l2, &table, &g, 2);
}

#[test]
fn translation_invariance_of_comparison_distance() {
    let h2 = make_h2();
    let table = bfs_metric(&h2, 9, DEFAULT_BUDGET).unwrap();
    let g = h2.evaluate(&[2, 0, 2]);
    let direct: Rational = comparison_distance(&h2, &table, &g, 1, Mode::Sphere).unwrap();
    for h in table.sphere(2).unwrap() {
        let hg = h2.compose(h, &g);
        let sphere = table.sphere(1).unwrap();
        let sum: u64 = sphere
            .iter()
            .map(|w| {
                let d = h2.difference(&h2.compose(h, w), &h2.compose(&hg, w));
                table.lookup(&d).unwrap() as u64
            })
            .sum();
        assert_eq!(direct, Rational::new(sum.into(), (sphere.len() as u64).into()));
    }
}

#[test]
fn abelian_curvature_vanishes() {
    let z3 = make_zn(3);
    let table = bfs_metric(&z3, 3, DEFAULT_BUDGET).unwrap();
    for g in table.ball(3).unwrap().iter().skip(1) {
        for r in 1..=3 {
            assert!(kappa::<_, Rational>(&z3, &table, g, r, Mode::Sphere).unwrap().kappa.is_zero());
        }
    }
}

#[test]
fn free_group_radius_one_formula() {
    for n in 1..=3usize {
        let fnn = make_free(n);
        let table = bfs_metric(&fnn, 4, DEFAULT_BUDGET).unwrap();
        for g in table.ball(3).unwrap().iter().skip(1) {
            let cyclic = g.first().unwrap() ^ 1 != *g.last().unwrap();
            if !cyclic {
                assert!(free_gencon(n, g).is_err());
                continue;
            }
            let rep = kappa::<_, Rational>(&fnn, &table, g, 1, Mode::Sphere).unwrap();
            assert_eq!(rep.comparison_distance, free_gencon(n, g).unwrap());
            let len = g.len() as i64;
            let expected = -Rational::new((2 * n as i64 - 2).into(), (n as i64 * len).into());
            assert_eq!(rep.kappa, expected);
        }
    }
}

fn check_depth_one_iff_not_dead_end<G: Group>(group: &G, radius: u32) {
    let table = bfs_metric(group, radius + 1, DEFAULT_BUDGET).unwrap();
    for x in table.ball(radius).unwrap() {
        let dead = is_dead_end(group, &table, &x).unwrap();
        let d = depth(group, &table, &x, 1).unwrap().depth;
        assert_eq!(d == Depth::Finite(1), !dead, "{}", group.format(&x));
    }
}

#[test]
fn depth_one_exactly_off_dead_ends() {
    check_depth_one_iff_not_dead_end(&make_zn(2), 6);
    check_depth_one_iff_not_dead_end(&make_free(2), 5);
    check_depth_one_iff_not_dead_end(&make_s3(), 3);
    check_depth_one_iff_not_dead_end(&make_l2(), 6);
    check_depth_one_iff_not_dead_end(&make_wreath_cyclic(3), 5);
    check_depth_one_iff_not_dead_end(&make_h2(), 6);
    check_depth_one_iff_not_dead_end(&make_heisenberg(), 6);
}

#[test]
fn backtracks_stay_inside_the_ball() {
    let l2 = make_l2();
    let table = bfs_metric(&l2, 8, DEFAULT_BUDGET).unwrap();
    for m in 1..=3 {
        let dm = ll_make_dm(m).unwrap();
        let back = backtrack_elements(&l2, &table, &dm, 10).unwrap();
        assert!(back.iter().all(|x| ll_length(x) <= ll_length(&dm)));
        let t_powers = back.iter().filter(|x| x.lamps() == dm.lamps()).count() as u32;
        assert!(t_powers >= 2 * m - 2);
    }
}

#[test]
fn lamplighter_large_radius_positivity() {
    let l2 = make_l2();
    let table = bfs_metric(&l2, 4, DEFAULT_BUDGET).unwrap();
    for m in 2..=6i64 {
        for k in 1..m {
            for r in 1..(m - k).min(5) {
                let g = ll_make_dm(m as u32).unwrap().shifted(k);
                for mode in [Mode::Sphere, Mode::Ball] {
                    let rep = kappa::<_, Rational>(&l2, &table, &g, r as u32, mode).unwrap();
                    assert!(rep.kappa.is_positive(), "m={m} k={k} r={r} {mode}");
                }
            }
        }
    }
}

#[test]
fn wreath_generators_never_lengthen_shifted_dead_ends() {
    let w3 = make_wreath_cyclic(3);
    let table = bfs_metric(&w3, 2, DEFAULT_BUDGET).unwrap();
    for m in 2..=4u32 {
        for states in [vec![1; 2 * m as usize + 1], (0..2 * m as usize + 1).map(|i| 1 + i % 2).collect()] {
            let dm = curvlab::lamplighter::wr_make_dm(w3.base(), m, &states).unwrap();
            for l in -(m as i64 - 1)..m as i64 {
                let g = dm.shifted(l);
                let len = ll_length(&g);
                for w in table.sphere(1).unwrap() {
                    assert!(ll_length(&w3.conjugate(&g, w)) <= len);
                }
            }
        }
    }
}

#[test]
fn houghton_sigma_commutes_away_from_one() {
    let h2 = make_h2();
    let table = bfs_metric(&h2, 8, DEFAULT_BUDGET).unwrap();
    let sigma = h2.generator(curvlab::houghton::SIGMA);
    let mut checked = 0;
    for (x, _) in table.iter() {
        if x.shift() == 0 && !x.moved_points().contains(&1) && !x.moved_points().contains(&-1) {
            assert_eq!(h2.compose(&sigma, x), h2.compose(x, &sigma));
            checked += 1;
        }
    }
    assert!(checked > 1);
}

#[test]
fn houghton_conjugation_never_lengthens_h22() {
    let h2 = make_h2();
    let table = bfs_metric(&h2, 13, DEFAULT_BUDGET).unwrap();
    let h22 = h2_h(2, 2).unwrap();
    let len = table.lookup(&h22).unwrap();
    for w in table.sphere(1).unwrap() {
        assert!(table.lookup(&h2.conjugate(&h22, w)).unwrap() <= len);
    }
    let back = HoughtonElement::from_exceptions(&BTreeMap::from([(2, -2), (-2, 2)]), 0).unwrap();
    assert_eq!(back, h22);
}

#[test]
fn sign_prediction_matches_exact_curvature() {
    let heis = make_heisenberg();
    for r in 1..=2u32 {
        let table = bfs_metric(&heis, r, DEFAULT_BUDGET).unwrap();
        let spec = SectorSpec { r, k: 30 };
        for a in 2..30i64 {
            for b in 1..a {
                for c in 1..=(a * a - a * b) {
                    let g = MalcevTriple::new(a, b, c);
                    if !spec.contains(&g) {
                        continue;
                    }
                    let sign = heis_sign_predict(&g, r).unwrap();
                    if sign == Sign::Mixed {
                        continue;
                    }
                    let k = kappa::<_, Rational>(&heis, &table, &g, r, Mode::Sphere).unwrap().kappa;
                    let exact = if k.is_positive() {
                        Sign::Positive
                    } else if k.is_zero() {
                        Sign::Zero
                    } else {
                        Sign::Negative
                    };
                    assert_eq!(sign, exact, "{g:?} r={r}");
                }
            }
        }
    }
}

fn check_star_dominates<G: Group>(group: &G, radius: u32) {
    let table = bfs_metric(group, radius + 2, DEFAULT_BUDGET).unwrap();
    for g in table.ball(radius).unwrap().iter().skip(1) {
        for mode in [Mode::Sphere, Mode::Ball] {
            let res: curvlab::ExactTransportResult =
                transport::optimal_permutations(group, &table, g, 1, mode, 4).unwrap();
            assert!(res.total <= res.identity_cost);
            let comparison = kappa::<_, Rational>(group, &table, g, 1, mode).unwrap().kappa;
            assert!(res.kappa_star.unwrap() >= comparison);
        }
    }
}

#[test]
fn transport_dominates_comparison() {
    check_star_dominates(&make_s3(), 3);
    check_star_dominates(&make_l2(), 3);
    check_star_dominates(&make_h2(), 3);
    check_star_dominates(&make_heisenberg(), 3);
    check_star_dominates(&make_free(2), 2);
}

#[test]
fn float_and_exact_kappa_agree() {
    let l2 = make_l2();
    let table = bfs_metric(&l2, 3, DEFAULT_BUDGET).unwrap();
    let g = ll_make_dm(4).unwrap().shifted(1);
    let exact = kappa::<_, Rational>(&l2, &table, &g, 2, Mode::Sphere).unwrap();
    let float = kappa::<_, f64>(&l2, &table, &g, 2, Mode::Sphere).unwrap();
    let small = kappa::<_, num_rational::Ratio<i64>>(&l2, &table, &g, 2, Mode::Sphere).unwrap();
    use curvlab::Scalar;
    assert!((exact.kappa.approx() - float.kappa).abs() < 1e-12);
    assert_eq!(exact.kappa.render(), small.kappa.render());
}
