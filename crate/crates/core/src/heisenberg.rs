//! The discrete Heisenberg group in Mal'cev coordinates.
//!
//! `(A, B, C)` stands for `a^A b^B c^C` with `c = a^-1 b^-1 a b` central.
//! In these coordinates
//! `(A, B, C)(A', B', C') = (A + A', B + B', C + C' - A'B)`, so conjugating
//! by `b` adds `A` to `C` and conjugating by `a` subtracts `B`.
//!
//! On the sector `A > B > 0`, `C >= 0` word length has a closed form with a
//! low-height branch (`C <= A^2 - AB`) and a high-height branch.

use num_integer::{Integer, Roots};
use num_rational::Ratio;
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{push_i64, read_i64, GeneratorSet, Group};
use crate::metric::{bfs_metric, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MalcevTriple {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl MalcevTriple {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        MalcevTriple { a, b, c }
    }

    pub fn in_sector(&self) -> bool {
        self.a > self.b && self.b > 0 && self.c >= 0
    }

    pub fn is_low_height(&self) -> bool {
        self.c <= self.a * self.a - self.a * self.b
    }
}

#[derive(Clone, Debug)]
pub struct Heisenberg {
    gens: GeneratorSet,
}

pub fn make_heisenberg() -> Heisenberg {
    Heisenberg {
        gens: GeneratorSet::paired(&["a", "b"], &[]),
    }
}

impl Default for Heisenberg {
    fn default() -> Self {
        make_heisenberg()
    }
}

pub fn heis_compose(x: &MalcevTriple, y: &MalcevTriple) -> MalcevTriple {
    MalcevTriple {
        a: x.a + y.a,
        b: x.b + y.b,
        c: x.c + y.c - y.a * x.b,
    }
}

pub fn heis_invert(x: &MalcevTriple) -> MalcevTriple {
    MalcevTriple {
        a: -x.a,
        b: -x.b,
        c: -x.c - x.a * x.b,
    }
}

impl Group for Heisenberg {
    type Elem = MalcevTriple;

    fn id(&self) -> String {
        "Heis".into()
    }

    fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    fn generator(&self, index: usize) -> MalcevTriple {
        match index {
            0 => MalcevTriple::new(1, 0, 0),
            1 => MalcevTriple::new(-1, 0, 0),
            2 => MalcevTriple::new(0, 1, 0),
            3 => MalcevTriple::new(0, -1, 0),
            _ => panic!("the Heisenberg group has four generators"),
        }
    }

    fn identity(&self) -> MalcevTriple {
        MalcevTriple::default()
    }

    fn compose(&self, x: &MalcevTriple, y: &MalcevTriple) -> MalcevTriple {
        heis_compose(x, y)
    }

    fn invert(&self, x: &MalcevTriple) -> MalcevTriple {
        heis_invert(x)
    }

    fn encode(&self, x: &MalcevTriple) -> Vec<u8> {
        let mut out = Vec::with_capacity(24);
        push_i64(&mut out, x.a);
        push_i64(&mut out, x.b);
        push_i64(&mut out, x.c);
        out
    }

    fn decode(&self, key: &[u8]) -> Option<MalcevTriple> {
        let (a, rest) = read_i64(key)?;
        let (b, rest) = read_i64(rest)?;
        let (c, rest) = read_i64(rest)?;
        rest.is_empty().then_some(MalcevTriple { a, b, c })
    }

    fn format(&self, x: &MalcevTriple) -> String {
        format!("Heis({},{},{})", x.a, x.b, x.c)
    }

    fn closed_length(&self, x: &MalcevTriple) -> Option<u64> {
        heis_length(x).ok()
    }
}

/// `ceil(2 sqrt(n))` for `n >= 0`, exactly.
pub fn ceil_two_sqrt(n: i64) -> i64 {
    let m = (4 * n).sqrt();
    if m * m == 4 * n {
        m
    } else {
        m + 1
    }
}

fn sector_check(g: &MalcevTriple) -> Result<()> {
    if g.in_sector() {
        Ok(())
    } else {
        Err(Error::OutOfSector {
            a: g.a,
            b: g.b,
            c: g.c,
        })
    }
}

/// `2 ceil(C/A) + A + B`.
pub fn heis_length_low(g: &MalcevTriple) -> Result<u64> {
    sector_check(g)?;
    Ok((2 * Integer::div_ceil(&g.c, &g.a) + g.a + g.b) as u64)
}

/// `2 ceil(2 sqrt(C + AB)) - A - B`.
pub fn heis_length_high(g: &MalcevTriple) -> Result<u64> {
    sector_check(g)?;
    Ok((2 * ceil_two_sqrt(g.c + g.a * g.b) - g.a - g.b) as u64)
}

/// Closed-form word length on the sector `A > B > 0`, `C >= 0`.
pub fn heis_length(g: &MalcevTriple) -> Result<u64> {
    if g.is_low_height() {
        heis_length_low(g)
    } else {
        heis_length_high(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CaseLabel {
    X,
    Y,
    Z,
    /// `s = Bt` or `s = A - Bt`
    Boundary,
    /// `s = 0`
    Degenerate,
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CaseLabel::X => "X",
            CaseLabel::Y => "Y",
            CaseLabel::Z => "Z",
            CaseLabel::Boundary => "boundary",
            CaseLabel::Degenerate => "degenerate",
        })
    }
}

/// Case of remainder `s = C mod A` for conjugation by `a^t`.
pub fn case_label(a: i64, b: i64, c: i64, t: i64) -> CaseLabel {
    let s = c.rem_euclid(a);
    let bt = b * t;
    if s == 0 {
        CaseLabel::Degenerate
    } else if s < bt {
        CaseLabel::X
    } else if s == bt || s == a - bt {
        CaseLabel::Boundary
    } else if s < a - bt {
        CaseLabel::Y
    } else {
        CaseLabel::Z
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CeilJump {
    /// `ceil((C + Bt)/A)`
    pub up: i64,
    /// `ceil((C - Bt)/A)`
    pub down: i64,
    pub case_up: i64,
    pub case_down: i64,
}

impl CeilJump {
    pub fn agrees(&self) -> bool {
        self.up == self.case_up && self.down == self.case_down
    }
}

/// Both ceilings directly and by the remainder case split; needs
/// `0 < s`, `Bt <= A`.
pub fn heis_ceil_jump(a: i64, b: i64, c: i64, t: i64) -> Result<CeilJump> {
    if a <= 0 {
        return Err(Error::InvalidIndex(format!("A must be positive, got {a}")));
    }
    let (k, s) = (c.div_euclid(a), c.rem_euclid(a));
    if s == 0 {
        return Err(Error::InvalidIndex(format!("degenerate remainder: A = {a} divides C = {c}")));
    }
    if b * t > a || b < 0 || t < 0 {
        return Err(Error::InvalidIndex(format!(
            "case split needs 0 <= Bt <= A, got B = {b}, t = {t}, A = {a}"
        )));
    }
    let bt = b * t;
    Ok(CeilJump {
        up: Integer::div_ceil(&(c + bt), &a),
        down: Integer::div_ceil(&(c - bt), &a),
        case_up: if s > a - bt { k + 2 } else { k + 1 },
        case_down: if s > bt { k + 1 } else { k },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "-")]
    Negative,
    #[serde(rename = "mixed")]
    Mixed,
}

impl Sign {
    pub fn of(value: i64) -> Sign {
        match value.signum() {
            1 => Sign::Positive,
            0 => Sign::Zero,
            _ => Sign::Negative,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Positive => "+",
            Sign::Zero => "0",
            Sign::Negative => "-",
            Sign::Mixed => "mixed",
        })
    }
}

/// The region `U` for radius `r` inside the ball of radius `k`, cut down to
/// low height and the band `A <= 5rB <= 2A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SectorSpec {
    pub r: u32,
    pub k: u64,
}

impl SectorSpec {
    pub fn band_contains(&self, a: i64, b: i64) -> bool {
        let r = self.r as i64;
        a > b && b > 0 && a - b >= 2 * r && a <= 5 * r * b && 5 * r * b <= 2 * a
    }

    pub fn contains(&self, g: &MalcevTriple) -> bool {
        let r = self.r as i64;
        if !self.band_contains(g.a, g.b) || g.c <= 0 || g.c < g.a * r || !g.is_low_height() {
            return false;
        }
        let len = heis_length_low(g).expect("band implies sector");
        len > 2 * self.r as u64 && len <= self.k
    }
}

/// Predicted sign of `kappa_r` from the case labels for `t = 1..=r`.
pub fn heis_sign_predict(g: &MalcevTriple, r: u32) -> Result<Sign> {
    let spec = SectorSpec { r, k: u64::MAX };
    if !spec.contains(g) {
        return Err(Error::OutOfSector {
            a: g.a,
            b: g.b,
            c: g.c,
        });
    }
    Ok(predict(g, r))
}

fn labels(g: &MalcevTriple, r: u32) -> Vec<CaseLabel> {
    (1..=r as i64).map(|t| case_label(g.a, g.b, g.c, t)).collect()
}

fn predict(g: &MalcevTriple, r: u32) -> Sign {
    let labels = labels(g, r);
    let first = labels[0];
    if labels.iter().any(|&l| l != first) {
        return Sign::Mixed;
    }
    match first {
        CaseLabel::X => Sign::Positive,
        CaseLabel::Y => Sign::Zero,
        CaseLabel::Z => Sign::Negative,
        _ => Sign::Mixed,
    }
}

/// `|g| |S_r| - sum |w^-1 g w|`, whose sign is the sign of `kappa_r`.
fn kappa_numerator(g: &MalcevTriple, sphere: &[MalcevTriple]) -> Result<(i64, i64)> {
    let base = heis_length(g)? as i64;
    let mut total = 0i64;
    for w in sphere {
        let conj = heis_compose(&heis_invert(w), &heis_compose(g, w));
        total += heis_length(&conj)? as i64;
    }
    let n = sphere.len() as i64;
    Ok((base * n - total, base * n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityRow {
    pub element: MalcevTriple,
    pub s: i64,
    pub labels: Vec<CaseLabel>,
    pub predicted: Sign,
    pub kappa: Ratio<i64>,
}

impl DensityRow {
    pub fn actual(&self) -> Sign {
        Sign::of(self.kappa.numer().signum())
    }
}

/// Remainder fractions of one band pair `(A, B)` over the `A - 1` nonzero
/// remainders. The closed fractions count the intervals `[1, B]`,
/// `[Br, A - Br]` and `[A - B, A - 1]`; the strict ones count remainders
/// labelled `X`, `Y` or `Z` for every `t <= r`, boundaries excluded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandFraction {
    pub a: i64,
    pub b: i64,
    pub x: Ratio<i64>,
    pub y: Ratio<i64>,
    pub z: Ratio<i64>,
    pub x_strict: Ratio<i64>,
    pub y_strict: Ratio<i64>,
    pub z_strict: Ratio<i64>,
}

impl BandFraction {
    pub fn new(a: i64, b: i64, r: u32) -> Self {
        let r64 = r as i64;
        let total = a - 1;
        let frac = |n: i64| Ratio::new(n.max(0), total);
        let mut strict = [0i64; 3];
        for s in 1..a {
            let labels: Vec<CaseLabel> = (1..=r64).map(|t| case_label(a, b, s, t)).collect();
            if labels.iter().all(|&l| l == labels[0]) {
                match labels[0] {
                    CaseLabel::X => strict[0] += 1,
                    CaseLabel::Y => strict[1] += 1,
                    CaseLabel::Z => strict[2] += 1,
                    _ => {}
                }
            }
        }
        BandFraction {
            a,
            b,
            x: frac(b),
            y: frac(a - 2 * b * r64 + 1),
            z: frac(b),
            x_strict: frac(strict[0]),
            y_strict: frac(strict[1]),
            z_strict: frac(strict[2]),
        }
    }

    pub fn min_closed(&self) -> Ratio<i64> {
        self.x.min(self.y).min(self.z)
    }
}

fn ratio_text(q: &Ratio<i64>) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

impl Serialize for BandFraction {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("BandFraction", 8)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("b", &self.b)?;
        st.serialize_field("x", &ratio_text(&self.x))?;
        st.serialize_field("y", &ratio_text(&self.y))?;
        st.serialize_field("z", &ratio_text(&self.z))?;
        st.serialize_field("x_strict", &ratio_text(&self.x_strict))?;
        st.serialize_field("y_strict", &ratio_text(&self.y_strict))?;
        st.serialize_field("z_strict", &ratio_text(&self.z_strict))?;
        st.end()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SignCounts {
    pub positive: u64,
    pub zero: u64,
    pub negative: u64,
}

impl SignCounts {
    fn add(&mut self, s: Sign) {
        match s {
            Sign::Positive => self.positive += 1,
            Sign::Zero => self.zero += 1,
            Sign::Negative => self.negative += 1,
            Sign::Mixed => {}
        }
    }

    fn merge(&mut self, other: &SignCounts) {
        self.positive += other.positive;
        self.zero += other.zero;
        self.negative += other.negative;
    }

    pub fn all_present(&self) -> bool {
        self.positive > 0 && self.zero > 0 && self.negative > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub spec: SectorSpec,
    pub elements: u64,
    /// exact signs of all sector elements
    pub actual: SignCounts,
    /// exact signs of elements with a non-mixed prediction
    pub predicted: SignCounts,
    pub mixed: u64,
    pub mismatches: u64,
    pub bands: Vec<BandFraction>,
    pub rows: Vec<DensityRow>,
}

impl DensityReport {
    pub fn bound(&self) -> Ratio<i64> {
        Ratio::new(1, 5 * self.spec.r as i64)
    }

    /// Band pairs whose closed remainder fractions fall below `1/(5r)`.
    pub fn bands_below_bound(&self) -> Vec<&BandFraction> {
        let bound = self.bound();
        self.bands.iter().filter(|f| f.min_closed() < bound).collect()
    }
}

impl Serialize for DensityReport {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("DensityReport", 9)?;
        st.serialize_field("r", &self.spec.r)?;
        st.serialize_field("k", &self.spec.k)?;
        st.serialize_field("elements", &self.elements)?;
        st.serialize_field("actual", &self.actual)?;
        st.serialize_field("predicted", &self.predicted)?;
        st.serialize_field("mixed", &self.mixed)?;
        st.serialize_field("mismatches", &self.mismatches)?;
        st.serialize_field("bound", &ratio_text(&self.bound()))?;
        st.serialize_field("bands", &self.bands)?;
        st.end()
    }
}

#[derive(Default)]
struct Partial {
    elements: u64,
    actual: SignCounts,
    predicted: SignCounts,
    mixed: u64,
    mismatches: u64,
    bands: Vec<BandFraction>,
    rows: Vec<DensityRow>,
}

/// Exhaustive sign census of the sector for radius `r` in the ball of
/// radius `k`. Rows are kept only when `keep_rows` is set.
pub fn heis_density_experiment(k: u64, r: u32, keep_rows: bool) -> Result<DensityReport> {
    if r == 0 {
        return Err(Error::InvalidIndex("radius must be at least 1".into()));
    }
    if k <= 2 * r as u64 {
        return Err(Error::EmptySector { k, r });
    }
    let heis = make_heisenberg();
    let table = bfs_metric(&heis, r, DEFAULT_BUDGET)?;
    let sphere = table.sphere(r)?.to_vec();
    let spec = SectorSpec { r, k };
    let parts: Vec<Partial> = (2..k as i64)
        .into_par_iter()
        .map(|a| census_for_a(a, &spec, &sphere, keep_rows))
        .collect::<Result<Vec<_>>>()?;
    let mut report = DensityReport {
        spec,
        elements: 0,
        actual: SignCounts::default(),
        predicted: SignCounts::default(),
        mixed: 0,
        mismatches: 0,
        bands: Vec::new(),
        rows: Vec::new(),
    };
    for p in parts {
        report.elements += p.elements;
        report.actual.merge(&p.actual);
        report.predicted.merge(&p.predicted);
        report.mixed += p.mixed;
        report.mismatches += p.mismatches;
        report.bands.extend(p.bands);
        report.rows.extend(p.rows);
    }
    if report.elements == 0 {
        return Err(Error::EmptySector { k, r });
    }
    Ok(report)
}

fn census_for_a(a: i64, spec: &SectorSpec, sphere: &[MalcevTriple], keep_rows: bool) -> Result<Partial> {
    let r = spec.r;
    let mut part = Partial::default();
    for b in 1..a {
        if !spec.band_contains(a, b) {
            continue;
        }
        let mut any = false;
        for c in (a * r as i64).max(1)..=(a * a - a * b) {
            let g = MalcevTriple::new(a, b, c);
            let len = heis_length_low(&g)?;
            if len > spec.k {
                break;
            }
            if !spec.contains(&g) {
                continue;
            }
            any = true;
            let (num, den) = kappa_numerator(&g, sphere)?;
            let actual = Sign::of(num);
            let predicted = predict(&g, r);
            part.elements += 1;
            part.actual.add(actual);
            if predicted == Sign::Mixed {
                part.mixed += 1;
            } else {
                part.predicted.add(actual);
                if predicted != actual {
                    part.mismatches += 1;
                }
            }
            if keep_rows {
                part.rows.push(DensityRow {
                    element: g,
                    s: c.rem_euclid(a),
                    labels: labels(&g, r),
                    predicted,
                    kappa: Ratio::new(num, den),
                });
            }
        }
        if any {
            part.bands.push(BandFraction::new(a, b, r));
        }
    }
    Ok(part)
}
