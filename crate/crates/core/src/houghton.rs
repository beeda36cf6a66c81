//! Houghton's group `H_2`.
//!
//! Beads are labelled by `Z \ {0}` in the order `..., -2, -1, 1, 2, ...`.
//! Internally a bead label `l` sits in slot `l - 1` for `l > 0` and slot `l`
//! for `l < 0`, so slots are all of `Z`. An element is a pair `(pi, p)` of a
//! finitely supported permutation of slots and a shift; it acts on slots by
//! `j -> pi(j + p)`. Products compose these actions right to left.
//!
//! Generators are `s` (translate every bead one step right, so `-1 -> 1`),
//! its inverse, and `sigma`, the transposition of beads `-1` and `1`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::group::{push_i64, read_i64, GeneratorSet, Group};

pub const S: usize = 0;
pub const S_INV: usize = 1;
pub const SIGMA: usize = 2;

fn slot(label: i64) -> i64 {
    if label > 0 {
        label - 1
    } else {
        label
    }
}

fn label(slot: i64) -> i64 {
    if slot >= 0 {
        slot + 1
    } else {
        slot
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoughtonElement {
    /// non-fixed points of the slot permutation
    perm: BTreeMap<i64, i64>,
    shift: i64,
}

impl HoughtonElement {
    pub fn shift(&self) -> i64 {
        self.shift
    }

    fn pi(&self, j: i64) -> i64 {
        self.perm.get(&j).copied().unwrap_or(j)
    }

    /// Image of bead `l`.
    pub fn apply(&self, l: i64) -> i64 {
        assert!(l != 0, "bead labels are nonzero");
        label(self.pi(slot(l) + self.shift))
    }

    /// Beads whose image differs from pure translation by `shift`.
    pub fn exceptions(&self) -> BTreeMap<i64, i64> {
        self.perm
            .iter()
            .map(|(&i, &v)| (label(i - self.shift), label(v)))
            .collect()
    }

    /// Element from its exception table and shift.
    pub fn from_exceptions(exceptions: &BTreeMap<i64, i64>, shift: i64) -> Result<Self> {
        let mut perm = BTreeMap::new();
        for (&from, &to) in exceptions {
            if from == 0 || to == 0 {
                return Err(Error::InvalidIndex("bead label 0 does not exist".into()));
            }
            let i = slot(from) + shift;
            let v = slot(to);
            if i != v {
                perm.insert(i, v);
            }
        }
        let domain: BTreeSet<i64> = perm.keys().copied().collect();
        let image: BTreeSet<i64> = perm.values().copied().collect();
        if domain != image || image.len() != perm.len() {
            return Err(Error::InvalidIndex(
                "exception table is not a bijection onto the translated beads".into(),
            ));
        }
        Ok(HoughtonElement { perm, shift })
    }

    /// Product of the transpositions `(l, -l)` over the given labels.
    pub fn swap_pairs(labels: impl IntoIterator<Item = i64>) -> Self {
        let mut perm = BTreeMap::new();
        for l in labels {
            let (a, b) = (slot(l.abs()), slot(-l.abs()));
            perm.insert(a, b);
            perm.insert(b, a);
        }
        HoughtonElement { perm, shift: 0 }
    }

    /// Beads permuted relative to the translation part.
    pub fn moved_points(&self) -> BTreeSet<i64> {
        self.perm.keys().map(|&i| label(i)).collect()
    }

    /// `max |r|` over moved beads; a lower bound for word length.
    pub fn min_length_bound(&self) -> u64 {
        self.moved_points()
            .iter()
            .map(|r| r.unsigned_abs())
            .max()
            .unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct Houghton {
    gens: GeneratorSet,
}

pub fn make_h2() -> Houghton {
    Houghton {
        gens: GeneratorSet::new(
            vec!["s".into(), "s^-1".into(), "sigma".into()],
            vec![S_INV, S, SIGMA],
        )
        .expect("H2 generators"),
    }
}

impl Default for Houghton {
    fn default() -> Self {
        make_h2()
    }
}

impl Group for Houghton {
    type Elem = HoughtonElement;

    fn id(&self) -> String {
        "H2".into()
    }

    fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    fn generator(&self, index: usize) -> HoughtonElement {
        match index {
            S => HoughtonElement {
                perm: BTreeMap::new(),
                shift: 1,
            },
            S_INV => HoughtonElement {
                perm: BTreeMap::new(),
                shift: -1,
            },
            SIGMA => HoughtonElement::swap_pairs([1]),
            _ => panic!("H2 has three generators"),
        }
    }

    fn identity(&self) -> HoughtonElement {
        HoughtonElement::default()
    }

    fn compose(&self, x: &HoughtonElement, y: &HoughtonElement) -> HoughtonElement {
        let p = x.shift;
        let candidates: BTreeSet<i64> = x
            .perm
            .keys()
            .copied()
            .chain(y.perm.keys().map(|&i| i + p))
            .collect();
        let perm = candidates
            .into_iter()
            .filter_map(|j| {
                let v = x.pi(p + y.pi(j - p));
                (v != j).then_some((j, v))
            })
            .collect();
        HoughtonElement {
            perm,
            shift: p + y.shift,
        }
    }

    fn invert(&self, x: &HoughtonElement) -> HoughtonElement {
        let p = x.shift;
        HoughtonElement {
            perm: x.perm.iter().map(|(&i, &v)| (v - p, i - p)).collect(),
            shift: -p,
        }
    }

    fn encode(&self, x: &HoughtonElement) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 16 * x.perm.len());
        push_i64(&mut out, x.shift);
        for (&i, &v) in &x.perm {
            push_i64(&mut out, i);
            push_i64(&mut out, v);
        }
        out
    }

    fn decode(&self, key: &[u8]) -> Option<HoughtonElement> {
        let (shift, mut rest) = read_i64(key)?;
        let mut perm = BTreeMap::new();
        while !rest.is_empty() {
            let (i, tail) = read_i64(rest)?;
            let (v, tail) = read_i64(tail)?;
            if i == v || perm.insert(i, v).is_some() {
                return None;
            }
            rest = tail;
        }
        let image: BTreeSet<i64> = perm.values().copied().collect();
        if image.len() != perm.len() || !image.iter().all(|v| perm.contains_key(v)) {
            return None;
        }
        Some(HoughtonElement { perm, shift })
    }

    fn format(&self, x: &HoughtonElement) -> String {
        let items: Vec<String> = x
            .exceptions()
            .iter()
            .map(|(a, b)| format!("{a}:{b}"))
            .collect();
        if items.is_empty() {
            format!("H2{{ ; shift={} }}", x.shift)
        } else {
            format!("H2{{ {} ; shift={} }}", items.join(", "), x.shift)
        }
    }

    fn closed_length(&self, _x: &HoughtonElement) -> Option<u64> {
        None
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// starts toward the negative beads
    NegFirst,
    PosFirst,
}

impl std::str::FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "neg" | "negfirst" => Ok(Orientation::NegFirst),
            "pos" | "posfirst" => Ok(Orientation::PosFirst),
            other => Err(format!("unknown orientation {other:?} (expected pos or neg)")),
        }
    }
}

fn repeat(word: &mut Vec<usize>, block: &[usize], times: usize) {
    for _ in 0..times {
        word.extend_from_slice(block);
    }
}

/// The spelling of `u_l`, of length `10l - 9`.
pub fn h2_u(l: u32, orientation: Orientation) -> Result<Vec<usize>> {
    if l < 1 {
        return Err(Error::InvalidIndex("u_l needs l >= 1".into()));
    }
    let n = (l - 1) as usize;
    let (out, back) = match orientation {
        Orientation::NegFirst => (S_INV, S),
        Orientation::PosFirst => (S, S_INV),
    };
    let mut word = Vec::with_capacity(10 * l as usize - 9);
    repeat(&mut word, &[out], n);
    repeat(&mut word, &[SIGMA, back], 2 * n);
    repeat(&mut word, &[SIGMA, out], 2 * n);
    word.push(SIGMA);
    repeat(&mut word, &[back], n);
    Ok(word)
}

fn check_km(k: u32, m: u32) -> Result<()> {
    if m < 1 || m > k {
        return Err(Error::InvalidIndex(format!("h(k, m) needs 1 <= m <= k, got ({k}, {m})")));
    }
    Ok(())
}

/// `h_{k,m}`: beads `l` and `-l` swapped for `m <= l <= k`.
pub fn h2_h(k: u32, m: u32) -> Result<HoughtonElement> {
    check_km(k, m)?;
    Ok(HoughtonElement::swap_pairs((m..=k).map(i64::from)))
}

pub fn h2_g(k: u32) -> Result<HoughtonElement> {
    h2_h(k, 1)
}

/// `u_k ... u_m` (descending) or `u_m ... u_k`.
pub fn h2_h_word(k: u32, m: u32, descending: bool, orientation: Orientation) -> Result<Vec<usize>> {
    check_km(k, m)?;
    let mut word = Vec::new();
    let ls: Vec<u32> = if descending {
        (m..=k).rev().collect()
    } else {
        (m..=k).collect()
    };
    for l in ls {
        word.extend(h2_u(l, orientation)?);
    }
    Ok(word)
}

pub fn h2_moved_points(x: &HoughtonElement) -> BTreeSet<i64> {
    x.moved_points()
}

pub fn h2_min_length_bound(x: &HoughtonElement) -> u64 {
    x.min_length_bound()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{bfs_metric, DEFAULT_BUDGET};

    #[test]
    fn generators_act_on_beads() {
        let h = make_h2();
        let s = h.generator(S);
        assert_eq!((s.apply(-1), s.apply(1), s.apply(-3)), (1, 2, -2));
        let sigma = h.generator(SIGMA);
        assert_eq!((sigma.apply(-1), sigma.apply(1), sigma.apply(2)), (1, -1, 2));
        assert_eq!(h.compose(&sigma, &sigma), h.identity());
        assert_eq!(h.compose(&s, &h.generator(S_INV)), h.identity());
    }

    #[test]
    fn product_composes_actions() {
        let h = make_h2();
        let x = h.evaluate(&[S, SIGMA, S, SIGMA]);
        let y = h.evaluate(&[SIGMA, S_INV, SIGMA]);
        let xy = h.compose(&x, &y);
        for l in [-5, -2, -1, 1, 2, 3, 7] {
            assert_eq!(xy.apply(l), x.apply(y.apply(l)));
        }
        assert_eq!(h.compose(&xy, &h.invert(&xy)), h.identity());
    }

    #[test]
    fn u2_swaps_beads_two() {
        let h = make_h2();
        for o in [Orientation::NegFirst, Orientation::PosFirst] {
            let w = h2_u(2, o).unwrap();
            assert_eq!(w.len(), 11);
            assert_eq!(h.evaluate(&w), HoughtonElement::swap_pairs([2]));
        }
        assert_eq!(h2_u(1, Orientation::NegFirst).unwrap(), vec![SIGMA]);
        assert!(h2_u(0, Orientation::PosFirst).is_err());
    }

    #[test]
    fn u_l_swaps_beads_l() {
        let h = make_h2();
        for l in 1..=6 {
            for o in [Orientation::NegFirst, Orientation::PosFirst] {
                let w = h2_u(l, o).unwrap();
                assert_eq!(w.len() as u32, 10 * l - 9);
                assert_eq!(h.evaluate(&w), HoughtonElement::swap_pairs([l as i64]));
            }
        }
    }

    #[test]
    fn h_spellings_agree() {
        let h = make_h2();
        let target = h2_h(4, 2).unwrap();
        for desc in [true, false] {
            for o in [Orientation::NegFirst, Orientation::PosFirst] {
                assert_eq!(h.evaluate(&h2_h_word(4, 2, desc, o).unwrap()), target);
            }
        }
        assert_eq!(h2_g(1).unwrap(), h.generator(SIGMA));
        assert!(h2_h(1, 2).is_err());
    }

    #[test]
    fn exceptions_round_trip() {
        let h = make_h2();
        let x = h.evaluate(&[S, SIGMA, S, S, SIGMA, S_INV]);
        let back = HoughtonElement::from_exceptions(&x.exceptions(), x.shift()).unwrap();
        assert_eq!(back, x);
        let swap = HoughtonElement::swap_pairs([1, 2]);
        assert_eq!(h.format(&swap), "H2{ -2:2, -1:1, 1:-1, 2:-2 ; shift=0 }");
        let bad: BTreeMap<i64, i64> = [(1, 2)].into_iter().collect();
        assert!(HoughtonElement::from_exceptions(&bad, 0).is_err());
    }

    #[test]
    fn moved_points_and_bound() {
        let h = make_h2();
        assert_eq!(h2_min_length_bound(&h.identity()), 0);
        let sigma = h.generator(SIGMA);
        assert_eq!(h2_moved_points(&sigma), [-1, 1].into_iter().collect());
        assert_eq!(h2_min_length_bound(&sigma), 1);
    }

    #[test]
    fn bfs_lengths_respect_moved_point_bound() {
        let h = make_h2();
        let table = bfs_metric(&h, 8, DEFAULT_BUDGET).unwrap();
        for (x, r) in table.iter() {
            assert!(h2_min_length_bound(x) <= r as u64, "{}", h.format(x));
            assert_eq!(h.decode(&h.encode(x)).as_ref(), Some(x));
        }
    }
}
