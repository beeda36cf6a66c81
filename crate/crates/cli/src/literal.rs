//! Element literals and group names.
//!
//! Every group accepts a generator word, either bare (`a t a t^-1`) or
//! behind the `w:` prefix, and products of factors joined by `*`. A
//! generator token may carry an integer power (`t^3`, `s^-2`). On top of
//! that each family has its own canonical literal and builders:
//!
//! | group      | literals                                              |
//! |------------|-------------------------------------------------------|
//! | `Zn`       | `(c1,...,cn)`                                         |
//! | `Fn`       | reduced words, `e`                                    |
//! | `S3`       | element names `e s t st ts sts`                       |
//! | `L2`, `Wn` | `L2{ -1, 0, 2 ; p=3 }`, `W3{ 0:1, 1:2 ; p=0 }`, `d(m)` |
//! | `H2`       | `H2{ 1:-1, -1:1 ; shift=0 }`, `g(k)`, `h(k,m)`, `u(l,pos)` |
//! | `Heis`     | `Heis(A,B,C)`                                         |
//!
//! The printed form of an element is always accepted back.

use std::collections::BTreeMap;
use std::str::FromStr;

use curvlab::builtin::{FiniteGroupTable, FreeAbelian, FreeGroup};
use curvlab::heisenberg::{Heisenberg, MalcevTriple};
use curvlab::houghton::{h2_g, h2_h, h2_u, HoughtonElement, Houghton, Orientation};
use curvlab::lamplighter::{ll_make_dm, wr_make_dm, LampConfig, Wreath};
use curvlab::Group;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot read {token:?} as {rule}: {detail}")]
pub struct ParseError {
    pub token: String,
    pub rule: &'static str,
    pub detail: String,
}

fn fail<T>(token: &str, rule: &'static str, detail: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        token: token.to_string(),
        rule,
        detail: detail.into(),
    })
}

const WORD: &str = "generator word";
const TUPLE: &str = "tuple (c1,...,cn)";
const LAMPS: &str = "lamp literal NAME{ i, j:s, ... ; p=k }";
const HOUGHTON: &str = "Houghton literal H2{ i:j, ... ; shift=k }";
const BUILDER: &str = "builder call";
const HEIS: &str = "Heisenberg literal Heis(A,B,C)";

/// Groups the command line can name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupChoice {
    Zn(usize),
    Free(usize),
    S3,
    Wreath(usize),
    H2,
    Heis,
}

impl FromStr for GroupChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let rank = |rest: &str, min: usize| match rest.parse::<usize>() {
            Ok(n) if n >= min => Ok(n),
            _ => Err(format!("group {s:?} needs an index >= {min}")),
        };
        match s {
            "S3" => Ok(GroupChoice::S3),
            "L2" => Ok(GroupChoice::Wreath(2)),
            "H2" => Ok(GroupChoice::H2),
            "Heis" => Ok(GroupChoice::Heis),
            _ if s.starts_with('Z') => rank(&s[1..], 1).map(GroupChoice::Zn),
            _ if s.starts_with('F') => rank(&s[1..], 1).map(GroupChoice::Free),
            _ if s.starts_with('W') => rank(&s[1..], 2).map(GroupChoice::Wreath),
            _ => Err(format!(
                "unknown group {s:?} (expected Zn, Fn, S3, L2, Wn, H2 or Heis)"
            )),
        }
    }
}

/// A group together with its literal grammar.
pub trait CliGroup: Group {
    /// The family-specific reading of `text`, or `None` to fall back to a
    /// generator word.
    fn literal(&self, text: &str) -> Option<Result<Self::Elem, ParseError>>;

    /// Horizon below which no default table is built. Nonzero exactly when
    /// the closed length formula does not cover the whole group.
    fn horizon_floor(&self) -> u32 {
        0
    }
}

pub fn parse_element<G: CliGroup>(group: &G, text: &str) -> Result<G::Elem, ParseError> {
    let text = text.trim();
    if let Some(word) = text.strip_prefix("w:") {
        return parse_word(group, word);
    }
    if text.is_empty() {
        return fail(text, WORD, "empty element");
    }
    let mut acc = group.identity();
    for factor in split_top(text, '*') {
        let x = parse_factor(group, factor.trim())?;
        acc = group.compose(&acc, &x);
    }
    Ok(acc)
}

fn parse_factor<G: CliGroup>(group: &G, text: &str) -> Result<G::Elem, ParseError> {
    if text.is_empty() {
        return fail(text, WORD, "empty factor around '*'");
    }
    if let Some(x) = group.literal(text) {
        return x;
    }
    if text == "e" && group.generators().index_of("e").is_none() {
        return Ok(group.identity());
    }
    parse_word(group, text)
}

/// Whitespace-separated generator tokens, each optionally raised to an
/// integer power.
pub fn parse_word<G: Group>(group: &G, text: &str) -> Result<G::Elem, ParseError> {
    let gens = group.generators();
    let mut word = Vec::new();
    for token in text.split_whitespace() {
        if let Some(i) = gens.index_of(token) {
            word.push(i);
            continue;
        }
        let Some((base, power)) = token.rsplit_once('^') else {
            return fail(token, WORD, format!("unknown generator (known: {})", gens.labels().join(" ")));
        };
        let Ok(power) = power.parse::<i64>() else {
            return fail(token, WORD, "power must be an integer");
        };
        let Some(i) = gens.index_of(base) else {
            return fail(token, WORD, format!("unknown generator (known: {})", gens.labels().join(" ")));
        };
        let letter = if power < 0 { gens.inverse(i) } else { i };
        word.extend(std::iter::repeat_n(letter, power.unsigned_abs() as usize));
    }
    Ok(group.evaluate(&word))
}

/// Splits at `sep` outside any bracket pair.
fn split_top(text: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            _ if c == sep && depth == 0 => {
                parts.push(&text[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    parts.push(&text[start..]);
    parts
}

/// Arguments of `name(a, b, ...)`, or `None` when `text` is not that call.
fn call<'a>(text: &'a str, name: &str) -> Option<Vec<&'a str>> {
    let inner = text.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')?;
    Some(inner.split(',').map(str::trim).collect())
}

fn int<T: FromStr>(token: &str, rule: &'static str) -> Result<T, ParseError> {
    let token = token.trim();
    token.parse().or_else(|_| fail(token, rule, "expected an integer"))
}

/// `NAME{ items ; key=value }` split into item strings and the value.
fn braces<'a>(
    text: &'a str,
    name: &str,
    key: &str,
    rule: &'static str,
) -> Option<Result<(Vec<&'a str>, i64), ParseError>> {
    let inner = text.strip_prefix(name)?.trim_start().strip_prefix('{')?;
    Some((|| {
        let Some(inner) = inner.strip_suffix('}') else {
            return fail(text, rule, "missing closing '}'");
        };
        let Some((items, tail)) = inner.split_once(';') else {
            return fail(text, rule, format!("missing '; {key}=...'"));
        };
        let Some(value) = tail.trim().strip_prefix(key).and_then(|v| v.trim_start().strip_prefix('=')) else {
            return fail(tail.trim(), rule, format!("expected {key}=<integer>"));
        };
        let value = int(value, rule)?;
        let items = items.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
        Ok((items, value))
    })())
}

impl CliGroup for FreeAbelian {
    fn literal(&self, text: &str) -> Option<Result<Vec<i64>, ParseError>> {
        let inner = text.strip_prefix('(')?;
        Some((|| {
            let Some(inner) = inner.strip_suffix(')') else {
                return fail(text, TUPLE, "missing closing ')'");
            };
            let coords = inner
                .split(',')
                .map(|c| int::<i64>(c, TUPLE))
                .collect::<Result<Vec<_>, _>>()?;
            if coords.len() != self.rank() {
                return fail(text, TUPLE, format!("expected {} coordinates, got {}", self.rank(), coords.len()));
            }
            Ok(coords)
        })())
    }
}

impl CliGroup for FreeGroup {
    fn literal(&self, _text: &str) -> Option<Result<Vec<u8>, ParseError>> {
        None
    }
}

impl CliGroup for FiniteGroupTable {
    fn literal(&self, text: &str) -> Option<Result<usize, ParseError>> {
        self.element_by_name(text).map(Ok)
    }

    fn horizon_floor(&self) -> u32 {
        self.spec().order() as u32
    }
}

impl CliGroup for Wreath {
    fn literal(&self, text: &str) -> Option<Result<LampConfig, ParseError>> {
        if let Some(args) = call(text, "d") {
            return Some((|| {
                let [m] = args[..] else {
                    return fail(text, BUILDER, "d takes one argument m");
                };
                let m: u32 = int(m, BUILDER)?;
                let made = if self.base().order() == 2 {
                    ll_make_dm(m)
                } else {
                    wr_make_dm(self.base(), m, &vec![1; 2 * m as usize + 1])
                };
                made.or_else(|e| fail(text, BUILDER, e.to_string()))
            })());
        }
        let parsed = braces(text, &self.id(), "p", LAMPS)?;
        Some((|| {
            let (items, pos) = parsed?;
            let mut lamps = BTreeMap::new();
            for item in items {
                let (index, state) = match item.split_once(':') {
                    Some((i, s)) => (int::<i64>(i, LAMPS)?, int::<usize>(s, LAMPS)?),
                    None => (int::<i64>(item, LAMPS)?, 1),
                };
                if lamps.insert(index, state).is_some() {
                    return fail(item, LAMPS, "lamp listed twice");
                }
            }
            LampConfig::with_states(self.base(), lamps, pos).or_else(|e| fail(text, LAMPS, e.to_string()))
        })())
    }
}

impl CliGroup for Houghton {
    fn literal(&self, text: &str) -> Option<Result<HoughtonElement, ParseError>> {
        let built = |r: curvlab::Result<HoughtonElement>| r.or_else(|e| fail(text, BUILDER, e.to_string()));
        if let Some(args) = call(text, "g") {
            return Some(match args[..] {
                [k] => int(k, BUILDER).and_then(|k| built(h2_g(k))),
                _ => fail(text, BUILDER, "g takes one argument k"),
            });
        }
        if let Some(args) = call(text, "h") {
            return Some(match args[..] {
                [k, m] => int(k, BUILDER).and_then(|k| int(m, BUILDER).and_then(|m| built(h2_h(k, m)))),
                _ => fail(text, BUILDER, "h takes two arguments k, m"),
            });
        }
        if let Some(args) = call(text, "u") {
            return Some((|| {
                let [l, o] = args[..] else {
                    return fail(text, BUILDER, "u takes two arguments l, pos|neg");
                };
                let o: Orientation = o.parse().or_else(|e: String| fail(o, BUILDER, e))?;
                let word = h2_u(int(l, BUILDER)?, o).or_else(|e| fail(text, BUILDER, e.to_string()))?;
                Ok(self.evaluate(&word))
            })());
        }
        let parsed = braces(text, "H2", "shift", HOUGHTON)?;
        Some((|| {
            let (items, shift) = parsed?;
            let mut map = BTreeMap::new();
            for item in items {
                let Some((from, to)) = item.split_once(':') else {
                    return fail(item, HOUGHTON, "expected from:to");
                };
                if map.insert(int(from, HOUGHTON)?, int(to, HOUGHTON)?).is_some() {
                    return fail(item, HOUGHTON, "bead listed twice");
                }
            }
            HoughtonElement::from_exceptions(&map, shift).or_else(|e| fail(text, HOUGHTON, e.to_string()))
        })())
    }

    fn horizon_floor(&self) -> u32 {
        13
    }
}

impl CliGroup for Heisenberg {
    fn literal(&self, text: &str) -> Option<Result<MalcevTriple, ParseError>> {
        let args = call(text, "Heis")?;
        Some(match args[..] {
            [a, b, c] => (|| Ok(MalcevTriple::new(int(a, HEIS)?, int(b, HEIS)?, int(c, HEIS)?)))(),
            _ => fail(text, HEIS, "expected three integers"),
        })
    }

    fn horizon_floor(&self) -> u32 {
        10
    }
}
