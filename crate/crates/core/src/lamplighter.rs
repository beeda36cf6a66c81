//! Lamplighter groups `A wr Z` for a finite lamp group `A`.
//!
//! An element is a finitely supported lamp configuration together with the
//! lamplighter's position. Right multiplication by a lamp generator `x`
//! multiplies the lamp under the lamplighter by `x`; `t` moves the
//! lamplighter one step to the right. So `a_i = t^i a t^-i` acts on lamp
//! `i`, and `d_m` is every lamp of `[-m, m]` lit with the lamplighter back at
//! the origin.
//!
//! The generating set is `A \ {e}` together with `t` and `t^-1`, every
//! generator of length one. Word length has the closed form implemented by
//! [`ll_length`], valid for every finite `A`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::group::{push_i64, read_i64, GeneratorSet, Group};

pub use crate::builtin::FiniteGroupSpec;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LampConfig {
    lamps: BTreeMap<i64, usize>,
    pos: i64,
}

impl LampConfig {
    pub fn lamps(&self) -> &BTreeMap<i64, usize> {
        &self.lamps
    }

    pub fn pos(&self) -> i64 {
        self.pos
    }

    pub fn lit_count(&self) -> usize {
        self.lamps.len()
    }

    /// Lamplighter configuration for `L_2`: the given lamps on.
    pub fn lit(indices: impl IntoIterator<Item = i64>, pos: i64) -> Self {
        LampConfig {
            lamps: indices.into_iter().map(|i| (i, 1)).collect(),
            pos,
        }
    }

    /// General configuration; identity states are rejected.
    pub fn with_states(spec: &FiniteGroupSpec, lamps: BTreeMap<i64, usize>, pos: i64) -> Result<Self> {
        for (&index, &state) in &lamps {
            if state == spec.identity() {
                return Err(Error::IdentityState { index });
            }
            if state >= spec.order() {
                return Err(Error::InvalidIndex(format!("lamp state {state} at index {index}")));
            }
        }
        Ok(LampConfig { lamps, pos })
    }

    pub fn shifted(&self, steps: i64) -> Self {
        LampConfig {
            lamps: self.lamps.clone(),
            pos: self.pos + steps,
        }
    }

    fn extremes(&self) -> (i64, i64) {
        let right = self.lamps.keys().next_back().map_or(0, |&i| i.max(0));
        let left = self.lamps.keys().next().map_or(0, |&i| (-i).max(0));
        (left, right)
    }
}

/// Closed-form word length.
///
/// With `N` lit lamps, `R = max(0, rightmost lit index)`,
/// `L = max(0, -leftmost lit index)` and position `m`, the length is
/// `N + min(2L + R + |m - R|, 2R + L + |m + L|)`: visit the left end first
/// or the right end first, then walk to `m`.
pub fn ll_length(cfg: &LampConfig) -> u64 {
    let (left, right) = cfg.extremes();
    let m = cfg.pos;
    let left_first = 2 * left + right + (m - right).abs();
    let right_first = 2 * right + left + (m + left).abs();
    cfg.lit_count() as u64 + left_first.min(right_first) as u64
}

#[derive(Clone, Debug)]
pub struct Wreath {
    name: String,
    base: FiniteGroupSpec,
    gens: GeneratorSet,
    /// lamp state carried by each state generator, in generator order
    gen_states: Vec<usize>,
}

const T: usize = usize::MAX;

impl Wreath {
    pub fn new(name: &str, base: FiniteGroupSpec) -> Self {
        let states: Vec<usize> = base.nontrivial().collect();
        let mut labels: Vec<String> = if base.order() == 2 {
            vec!["a".to_string()]
        } else {
            states.iter().map(|x| format!("s{x}")).collect()
        };
        let mut inverse: Vec<usize> = states
            .iter()
            .map(|&x| states.iter().position(|&y| y == base.inverse(x)).unwrap())
            .collect();
        let k = states.len();
        labels.push("t".into());
        labels.push("t^-1".into());
        inverse.push(k + 1);
        inverse.push(k);
        Wreath {
            name: name.to_string(),
            base,
            gens: GeneratorSet::new(labels, inverse).expect("wreath generators"),
            gen_states: states,
        }
    }

    pub fn base(&self) -> &FiniteGroupSpec {
        &self.base
    }

    pub fn t(&self) -> usize {
        self.gen_states.len()
    }

    pub fn t_inv(&self) -> usize {
        self.gen_states.len() + 1
    }

    /// Generator index multiplying a lamp by `state`.
    pub fn state_generator(&self, state: usize) -> Option<usize> {
        self.gen_states.iter().position(|&x| x == state)
    }

    fn gen_state(&self, index: usize) -> usize {
        if index < self.gen_states.len() {
            self.gen_states[index]
        } else {
            T
        }
    }

    fn mul_lamp(&self, lamps: &mut BTreeMap<i64, usize>, index: i64, state: usize) {
        let cur = lamps.get(&index).copied().unwrap_or(self.base.identity());
        let new = self.base.mul(cur, state);
        if new == self.base.identity() {
            lamps.remove(&index);
        } else {
            lamps.insert(index, new);
        }
    }

    pub fn t_power(&self, k: i64) -> LampConfig {
        LampConfig {
            lamps: BTreeMap::new(),
            pos: k,
        }
    }
}

pub fn make_l2() -> Wreath {
    Wreath::new("L2", FiniteGroupSpec::cyclic(2))
}

/// `Z_n wr Z`, identified as `W<n>`.
pub fn make_wreath_cyclic(n: usize) -> Wreath {
    assert!(n >= 2, "lamp group must be nontrivial");
    if n == 2 {
        return make_l2();
    }
    Wreath::new(&format!("W{n}"), FiniteGroupSpec::cyclic(n))
}

impl Group for Wreath {
    type Elem = LampConfig;

    fn id(&self) -> String {
        self.name.clone()
    }

    fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    fn generator(&self, index: usize) -> LampConfig {
        match self.gen_state(index) {
            T if index == self.t() => self.t_power(1),
            T => self.t_power(-1),
            state => LampConfig {
                lamps: [(0, state)].into_iter().collect(),
                pos: 0,
            },
        }
    }

    fn identity(&self) -> LampConfig {
        LampConfig::default()
    }

    fn compose(&self, x: &LampConfig, y: &LampConfig) -> LampConfig {
        let mut lamps = x.lamps.clone();
        for (&i, &state) in &y.lamps {
            self.mul_lamp(&mut lamps, i + x.pos, state);
        }
        LampConfig {
            lamps,
            pos: x.pos + y.pos,
        }
    }

    fn invert(&self, x: &LampConfig) -> LampConfig {
        LampConfig {
            lamps: x
                .lamps
                .iter()
                .map(|(&i, &state)| (i - x.pos, self.base.inverse(state)))
                .collect(),
            pos: -x.pos,
        }
    }

    fn mul_generator(&self, x: &LampConfig, index: usize) -> LampConfig {
        let mut y = x.clone();
        match self.gen_state(index) {
            T if index == self.t() => y.pos += 1,
            T => y.pos -= 1,
            state => self.mul_lamp(&mut y.lamps, x.pos, state),
        }
        y
    }

    fn encode(&self, x: &LampConfig) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 12 * x.lamps.len());
        push_i64(&mut out, x.pos);
        for (&i, &state) in &x.lamps {
            push_i64(&mut out, i);
            out.extend_from_slice(&(state as u32).to_be_bytes());
        }
        out
    }

    fn decode(&self, key: &[u8]) -> Option<LampConfig> {
        let (pos, mut rest) = read_i64(key)?;
        let mut lamps = BTreeMap::new();
        while !rest.is_empty() {
            let (i, tail) = read_i64(rest)?;
            if tail.len() < 4 {
                return None;
            }
            let state = u32::from_be_bytes(tail[..4].try_into().ok()?) as usize;
            if state == self.base.identity() || state >= self.base.order() {
                return None;
            }
            if lamps.insert(i, state).is_some() {
                return None;
            }
            rest = &tail[4..];
        }
        Some(LampConfig { lamps, pos })
    }

    fn format(&self, x: &LampConfig) -> String {
        let items: Vec<String> = if self.base.order() == 2 {
            x.lamps.keys().map(i64::to_string).collect()
        } else {
            x.lamps.iter().map(|(i, s)| format!("{i}:{s}")).collect()
        };
        if items.is_empty() {
            format!("{}{{ ; p={} }}", self.name, x.pos)
        } else {
            format!("{}{{ {} ; p={} }}", self.name, items.join(", "), x.pos)
        }
    }

    fn closed_length(&self, x: &LampConfig) -> Option<u64> {
        Some(ll_length(x))
    }
}

/// A geodesic word for `cfg`.
///
/// For position `m >= 0` the lamplighter sweeps to the left end, then to
/// the right end, then walks to `m`; for `m < 0` it sweeps right first.
/// Each lit lamp is set the first time the sweep reaches it.
pub fn ll_geodesic(group: &Wreath, cfg: &LampConfig) -> Vec<usize> {
    let (left, right) = cfg.extremes();
    let (t, t_inv) = (group.t(), group.t_inv());
    let mut word = Vec::with_capacity(ll_length(cfg) as usize);
    let set = |word: &mut Vec<usize>, p: i64| {
        if let Some(&state) = cfg.lamps.get(&p) {
            word.push(group.state_generator(state).expect("state is nontrivial"));
        }
    };
    set(&mut word, 0);
    let end = if cfg.pos >= 0 {
        for p in (-left..0).rev() {
            word.push(t_inv);
            set(&mut word, p);
        }
        for p in (-left + 1)..=right {
            word.push(t);
            if p > 0 {
                set(&mut word, p);
            }
        }
        right
    } else {
        for p in 1..=right {
            word.push(t);
            set(&mut word, p);
        }
        for p in (-left..right).rev() {
            word.push(t_inv);
            if p < 0 {
                set(&mut word, p);
            }
        }
        -left
    };
    let step = if cfg.pos >= end { t } else { t_inv };
    word.extend(std::iter::repeat_n(step, (cfg.pos - end).unsigned_abs() as usize));
    word
}

/// `d_m` in `L_2`: lamps `[-m, m]` on, lamplighter at the origin.
pub fn ll_make_dm(m: u32) -> Result<LampConfig> {
    if m == 0 {
        return Err(Error::InvalidIndex("d_m needs m >= 1".into()));
    }
    let m = m as i64;
    Ok(LampConfig::lit(-m..=m, 0))
}

/// `d_m` analogue in `A wr Z`: `states[i + m]` is the state of lamp `i`.
pub fn wr_make_dm(spec: &FiniteGroupSpec, m: u32, states: &[usize]) -> Result<LampConfig> {
    if m == 0 {
        return Err(Error::InvalidIndex("d_m needs m >= 1".into()));
    }
    if states.len() != 2 * m as usize + 1 {
        return Err(Error::InvalidIndex(format!(
            "expected {} lamp states, got {}",
            2 * m + 1,
            states.len()
        )));
    }
    let lamps = states
        .iter()
        .enumerate()
        .map(|(k, &s)| (k as i64 - m as i64, s))
        .collect();
    LampConfig::with_states(spec, lamps, 0)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeadEndEmbedding {
    pub m: u32,
    /// `u` with `geodesic(w) u` spelling `d_m`
    pub extension: Vec<usize>,
    /// whether that spelling is a geodesic
    pub geodesic: bool,
}

/// Smallest `M >= 1` such that `w` is a geodesic prefix of `d_M`, with the
/// completing word. When no `d_M` has `w` as a geodesic prefix, `M` is the
/// smallest index covering every lit lamp and the cursor, and the spelling
/// is not geodesic.
pub fn ll_embed_in_dead_end(group: &Wreath, w: &LampConfig) -> Result<DeadEndEmbedding> {
    let (left, right) = w.extremes();
    let bound = left.max(right).max(w.pos.abs()) as u32 + 2;
    let w_len = ll_length(w);
    for m in 1..=bound.max(1) {
        let dm = ll_make_dm(m)?;
        let rest = group.compose(&group.invert(w), &dm);
        if w_len + ll_length(&rest) == ll_length(&dm) {
            return Ok(DeadEndEmbedding {
                m,
                extension: ll_geodesic(group, &rest),
                geodesic: true,
            });
        }
    }
    let m = (bound - 2).max(1);
    let rest = group.compose(&group.invert(w), &ll_make_dm(m)?);
    Ok(DeadEndEmbedding {
        m,
        extension: ll_geodesic(group, &rest),
        geodesic: false,
    })
}
