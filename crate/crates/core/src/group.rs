//! Groups presented as explicit oracles over a symmetric generating set.

use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};

/// A symmetric generating set.
///
/// Each generator knows the index of its formal inverse. Involutions are
/// their own inverse and contribute a single entry, so for the lamplighter
/// group `{a, t, t^-1}` has three members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    labels: Vec<String>,
    inverse: Vec<usize>,
}

impl GeneratorSet {
    pub fn new(labels: Vec<String>, inverse: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidGroup("empty generating set".into()));
        }
        if labels.len() != inverse.len() {
            return Err(Error::InvalidGroup(
                "every generator needs an inverse index".into(),
            ));
        }
        for (i, &j) in inverse.iter().enumerate() {
            if j >= labels.len() || inverse[j] != i {
                return Err(Error::InvalidGroup(format!(
                    "inverse pairing is not an involution at generator {}",
                    labels[i]
                )));
            }
        }
        Ok(GeneratorSet { labels, inverse })
    }

    /// Builds `x1, x1^-1, x2, x2^-1, ...` from base names, with the listed
    /// names treated as involutions.
    pub fn paired(names: &[&str], involutions: &[&str]) -> Self {
        let mut labels = Vec::new();
        let mut inverse = Vec::new();
        for name in names {
            let i = labels.len();
            labels.push((*name).to_string());
            if involutions.contains(name) {
                inverse.push(i);
            } else {
                labels.push(format!("{name}^-1"));
                inverse.push(i + 1);
                inverse.push(i);
            }
        }
        GeneratorSet { labels, inverse }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn is_involution(&self, i: usize) -> bool {
        self.inverse[i] == i
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Inverse word: reversed, letterwise inverted.
    pub fn invert_word(&self, word: &[usize]) -> Vec<usize> {
        word.iter().rev().map(|&i| self.inverse[i]).collect()
    }

    pub fn render_word(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "e".into();
        }
        word.iter()
            .map(|&i| self.labels[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A finitely generated group given through its operations.
///
/// `encode` must be injective on group elements and is the canonical,
/// byte-comparable key used for ordering layers and for the on-disk cache.
pub trait Group: Sync {
    type Elem: Clone + Eq + Hash + Debug + Send + Sync;

    /// Short stable identifier, used in cache file names and headers.
    fn id(&self) -> String;
    fn generators(&self) -> &GeneratorSet;
    fn generator(&self, index: usize) -> Self::Elem;
    fn identity(&self) -> Self::Elem;
    fn compose(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn invert(&self, x: &Self::Elem) -> Self::Elem;
    fn encode(&self, x: &Self::Elem) -> Vec<u8>;
    fn decode(&self, key: &[u8]) -> Option<Self::Elem>;
    fn format(&self, x: &Self::Elem) -> String;

    /// Exact word length when a closed formula covers `x`.
    fn closed_length(&self, _x: &Self::Elem) -> Option<u64> {
        None
    }

    fn mul_generator(&self, x: &Self::Elem, index: usize) -> Self::Elem {
        self.compose(x, &self.generator(index))
    }

    fn evaluate(&self, word: &[usize]) -> Self::Elem {
        word.iter()
            .fold(self.identity(), |acc, &i| self.mul_generator(&acc, i))
    }

    /// `w^-1 g w`
    fn conjugate(&self, g: &Self::Elem, w: &Self::Elem) -> Self::Elem {
        self.compose(&self.compose(&self.invert(w), g), w)
    }

    fn is_identity(&self, x: &Self::Elem) -> bool {
        *x == self.identity()
    }

    /// Word distance reduces to length: `d(x, y) = |x^-1 y|`.
    fn difference(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        self.compose(&self.invert(x), y)
    }
}

/// Order-preserving big-endian encoding of a signed integer.
pub(crate) fn push_i64(out: &mut Vec<u8>, v: i64) {
    out.extend_from_slice(&((v as u64) ^ (1 << 63)).to_be_bytes());
}

pub(crate) fn read_i64(bytes: &[u8]) -> Option<(i64, &[u8])> {
    if bytes.len() < 8 {
        return None;
    }
    let (head, rest) = bytes.split_at(8);
    let raw = u64::from_be_bytes(head.try_into().ok()?);
    Some(((raw ^ (1 << 63)) as i64, rest))
}
