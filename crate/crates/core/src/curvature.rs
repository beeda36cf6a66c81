//! Comparison distances and comparison curvature.
//!
//! For `g != e` the comparison distance over a set `W` of conjugators is the
//! mean of `|w^-1 g w|` over `w` in `W`, and
//! `kappa = (|g| - comparison distance) / |g|`. `W` is the sphere `S_r`
//! (sphere mode) or the ball `B_r` (ball mode). Averages are carried in a
//! [`Scalar`]; use an exact rational whenever a sign matters.

use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::metric::{word_length, MetricTable};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sphere,
    Ball,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Sphere => "sphere",
            Mode::Ball => "ball",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sphere" => Ok(Mode::Sphere),
            "ball" => Ok(Mode::Ball),
            other => Err(format!("unknown mode {other:?} (expected sphere or ball)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjugateLength {
    pub conjugator: String,
    pub length: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport<S> {
    pub element: String,
    pub radius: u32,
    pub mode: Mode,
    pub base_length: u64,
    pub comparison_distance: S,
    pub kappa: S,
    pub breakdown: Vec<ConjugateLength>,
}

impl<S: Scalar> Serialize for CurvatureReport<S> {
    fn serialize<Ser: Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let mut st = ser.serialize_struct("CurvatureReport", 9)?;
        st.serialize_field("element", &self.element)?;
        st.serialize_field("radius", &self.radius)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("base_length", &self.base_length)?;
        st.serialize_field("comparison_distance", &self.comparison_distance.render())?;
        st.serialize_field("comparison_distance_float", &self.comparison_distance.approx())?;
        st.serialize_field("kappa", &self.kappa.render())?;
        st.serialize_field("kappa_float", &self.kappa.approx())?;
        st.serialize_field("breakdown", &self.breakdown)?;
        st.end()
    }
}

/// The conjugator set `S_r` or `B_r`, in table order.
pub fn conjugators<G: Group>(table: &MetricTable<G>, r: u32, mode: Mode) -> Result<Vec<G::Elem>> {
    match mode {
        Mode::Sphere => Ok(table.sphere(r)?.to_vec()),
        Mode::Ball => table.ball(r),
    }
}

fn check_args<G: Group>(group: &G, table: &MetricTable<G>, g: &G::Elem, r: u32) -> Result<u64> {
    if group.is_identity(g) {
        return Err(Error::IdentityElement);
    }
    if r == 0 {
        return Err(Error::InvalidIndex("comparison radius must be at least 1".into()));
    }
    let len = word_length(group, g, table)?;
    if r > table.horizon() {
        return Err(Error::OutOfHorizon {
            element: format!("sphere of radius {r}"),
            horizon: table.horizon(),
            suggested: r,
        });
    }
    Ok(len)
}

fn conjugate_lengths<G: Group>(
    group: &G,
    table: &MetricTable<G>,
    g: &G::Elem,
    base: u64,
    r: u32,
    set: &[G::Elem],
) -> Result<Vec<u64>> {
    set.par_iter()
        .map(|w| {
            word_length(group, &group.conjugate(g, w), table).map_err(|e| match e {
                Error::OutOfHorizon { element, horizon, .. } => Error::OutOfHorizon {
                    element,
                    horizon,
                    suggested: (base as u32).saturating_add(2 * r),
                },
                other => other,
            })
        })
        .collect()
}

/// Mean of `|w^-1 g w|` over `S_r` or `B_r`.
pub fn comparison_distance<G: Group, S: Scalar>(
    group: &G,
    table: &MetricTable<G>,
    g: &G::Elem,
    r: u32,
    mode: Mode,
) -> Result<S> {
    let base = check_args(group, table, g, r)?;
    let set = conjugators(table, r, mode)?;
    let lengths = conjugate_lengths(group, table, g, base, r, &set)?;
    Ok(S::ratio(lengths.iter().sum(), lengths.len() as u64))
}

/// `GenCon(g)`: the radius-one sphere average.
pub fn gencon<G: Group, S: Scalar>(group: &G, table: &MetricTable<G>, g: &G::Elem) -> Result<S> {
    comparison_distance(group, table, g, 1, Mode::Sphere)
}

pub fn kappa_from<S: Scalar>(base: u64, comparison: &S) -> S {
    let base_s = S::ratio(base, 1);
    (base_s.clone() - comparison.clone()) / base_s
}

pub fn kappa<G: Group, S: Scalar>(
    group: &G,
    table: &MetricTable<G>,
    g: &G::Elem,
    r: u32,
    mode: Mode,
) -> Result<CurvatureReport<S>> {
    let base = check_args(group, table, g, r)?;
    let set = conjugators(table, r, mode)?;
    let lengths = conjugate_lengths(group, table, g, base, r, &set)?;
    let comparison = S::ratio(lengths.iter().sum(), lengths.len() as u64);
    let breakdown = set
        .iter()
        .zip(&lengths)
        .map(|(w, &length)| ConjugateLength {
            conjugator: group.format(w),
            length,
        })
        .collect();
    Ok(CurvatureReport {
        element: group.format(g),
        radius: r,
        mode,
        base_length: base,
        kappa: kappa_from(base, &comparison),
        comparison_distance: comparison,
        breakdown,
    })
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;
    use crate::builtin::{free_gencon, make_free, make_s3, make_zn};
    use crate::metric::{bfs_metric, DEFAULT_BUDGET};

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p.into(), d.into())
    }

    #[test]
    fn abelian_comparison_is_length() {
        let z2 = make_zn(2);
        let table = bfs_metric(&z2, 3, DEFAULT_BUDGET).unwrap();
        for mode in [Mode::Sphere, Mode::Ball] {
            let cd: BigRational = comparison_distance(&z2, &table, &vec![1, 1], 3, mode).unwrap();
            assert_eq!(cd, q(2, 1));
        }
        let rep: CurvatureReport<BigRational> = kappa(&z2, &table, &vec![2, 3], 1, Mode::Sphere).unwrap();
        assert_eq!(rep.kappa, q(0, 1));
    }

    #[test]
    fn free_group_radius_one() {
        let f2 = make_free(2);
        let table = bfs_metric(&f2, 2, DEFAULT_BUDGET).unwrap();
        let ab = f2.evaluate(&[0, 2]);
        // brute force over the four generators
        let brute: u64 = (0..4)
            .map(|i| f2.conjugate(&ab, &f2.generator(i)).len() as u64)
            .sum();
        assert_eq!(q(brute as i64, 4), q(3, 1));
        let cd: BigRational = gencon(&f2, &table, &ab).unwrap();
        assert_eq!(cd, q(3, 1));
        assert_eq!(cd, free_gencon(2, &ab).unwrap());
        let rep: CurvatureReport<BigRational> = kappa(&f2, &table, &ab, 1, Mode::Sphere).unwrap();
        assert_eq!(rep.kappa, q(-1, 2));
        assert_eq!(rep.breakdown.len(), 4);
    }

    #[test]
    fn s3_gencon_of_s() {
        let s3 = make_s3();
        let table = bfs_metric(&s3, 3, DEFAULT_BUDGET).unwrap();
        let s = s3.generator(0);
        let cd: BigRational = gencon(&s3, &table, &s).unwrap();
        assert_eq!(cd, q(2, 1));
    }

    #[test]
    fn identity_and_zero_radius_rejected() {
        let z2 = make_zn(2);
        let table = bfs_metric(&z2, 2, DEFAULT_BUDGET).unwrap();
        assert!(matches!(
            comparison_distance::<_, BigRational>(&z2, &table, &vec![0, 0], 1, Mode::Sphere),
            Err(Error::IdentityElement)
        ));
        assert!(comparison_distance::<_, BigRational>(&z2, &table, &vec![1, 0], 0, Mode::Sphere).is_err());
        assert!(matches!(
            comparison_distance::<_, BigRational>(&z2, &table, &vec![1, 0], 3, Mode::Sphere),
            Err(Error::OutOfHorizon { .. })
        ));
    }

    #[test]
    fn out_of_horizon_suggests_enough() {
        let s3 = make_s3();
        let table = bfs_metric(&s3, 1, DEFAULT_BUDGET).unwrap();
        match comparison_distance::<_, BigRational>(&s3, &table, &s3.generator(0), 1, Mode::Sphere) {
            Err(Error::OutOfHorizon { suggested, .. }) => assert_eq!(suggested, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn float_and_exact_instantiations_agree() {
        let f3 = make_free(3);
        let table = bfs_metric(&f3, 2, DEFAULT_BUDGET).unwrap();
        let g = f3.evaluate(&[0, 2, 4]);
        let exact: BigRational = comparison_distance(&f3, &table, &g, 2, Mode::Ball).unwrap();
        let float: f64 = comparison_distance(&f3, &table, &g, 2, Mode::Ball).unwrap();
        assert!((exact.approx() - float).abs() < 1e-12);
    }

    #[test]
    fn report_serializes_rationals_as_text() {
        let f2 = make_free(2);
        let table = bfs_metric(&f2, 2, DEFAULT_BUDGET).unwrap();
        let rep: CurvatureReport<BigRational> =
            kappa(&f2, &table, &f2.evaluate(&[0, 2]), 1, Mode::Sphere).unwrap();
        let json = serde_json::to_value(&rep).unwrap();
        assert_eq!(json["kappa"], "-1/2");
        assert_eq!(json["comparison_distance"], "3/1");
        assert_eq!(json["mode"], "sphere");
        assert_eq!(json["breakdown"].as_array().unwrap().len(), 4);
    }
}
