//! Calibration groups: free abelian groups, free groups and finite groups
//! given by a multiplication table.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::group::{push_i64, read_i64, GeneratorSet, Group};

/// `Z^n` with the standard generators `e1, e1^-1, ..., en, en^-1`.
#[derive(Clone, Debug)]
pub struct FreeAbelian {
    n: usize,
    gens: GeneratorSet,
}

pub fn make_zn(n: usize) -> FreeAbelian {
    assert!(n >= 1, "Z^n needs n >= 1");
    let names: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    FreeAbelian {
        n,
        gens: GeneratorSet::paired(&refs, &[]),
    }
}

impl FreeAbelian {
    pub fn rank(&self) -> usize {
        self.n
    }
}

impl Group for FreeAbelian {
    type Elem = Vec<i64>;

    fn id(&self) -> String {
        format!("Z{}", self.n)
    }

    fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    fn generator(&self, index: usize) -> Vec<i64> {
        let mut v = vec![0; self.n];
        v[index / 2] = if index.is_multiple_of(2) { 1 } else { -1 };
        v
    }

    fn identity(&self) -> Vec<i64> {
        vec![0; self.n]
    }

    fn compose(&self, x: &Vec<i64>, y: &Vec<i64>) -> Vec<i64> {
        x.iter().zip(y).map(|(a, b)| a + b).collect()
    }

    fn invert(&self, x: &Vec<i64>) -> Vec<i64> {
        x.iter().map(|a| -a).collect()
    }

    fn mul_generator(&self, x: &Vec<i64>, index: usize) -> Vec<i64> {
        let mut y = x.clone();
        y[index / 2] += if index.is_multiple_of(2) { 1 } else { -1 };
        y
    }

    fn encode(&self, x: &Vec<i64>) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 * self.n);
        for &c in x {
            push_i64(&mut out, c);
        }
        out
    }

    fn decode(&self, mut key: &[u8]) -> Option<Vec<i64>> {
        let mut v = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            let (c, rest) = read_i64(key)?;
            v.push(c);
            key = rest;
        }
        key.is_empty().then_some(v)
    }

    fn format(&self, x: &Vec<i64>) -> String {
        let parts: Vec<String> = x.iter().map(i64::to_string).collect();
        format!("({})", parts.join(","))
    }

    fn closed_length(&self, x: &Vec<i64>) -> Option<u64> {
        Some(x.iter().map(|c| c.unsigned_abs()).sum())
    }
}

/// Free group `F_n`; elements are freely reduced words over generator
/// indices (`2i` is the i-th letter, `2i + 1` its inverse).
#[derive(Clone, Debug)]
pub struct FreeGroup {
    n: usize,
    gens: GeneratorSet,
}

pub fn make_free(n: usize) -> FreeGroup {
    assert!((1..=100).contains(&n), "F_n supports 1 <= n <= 100");
    let names: Vec<String> = (0..n)
        .map(|i| {
            if n <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("x{}", i + 1)
            }
        })
        .collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    FreeGroup {
        n,
        gens: GeneratorSet::paired(&refs, &[]),
    }
}

impl FreeGroup {
    pub fn rank(&self) -> usize {
        self.n
    }

    /// Free reduction of an arbitrary word.
    pub fn reduce(&self, word: &[usize]) -> Vec<u8> {
        let mut out: Vec<u8> = Vec::with_capacity(word.len());
        for &i in word {
            let i = i as u8;
            if out.last() == Some(&(i ^ 1)) {
                out.pop();
            } else {
                out.push(i);
            }
        }
        out
    }
}

impl Group for FreeGroup {
    type Elem = Vec<u8>;

    fn id(&self) -> String {
        format!("F{}", self.n)
    }

    fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    fn generator(&self, index: usize) -> Vec<u8> {
        vec![index as u8]
    }

    fn identity(&self) -> Vec<u8> {
        Vec::new()
    }

    fn compose(&self, x: &Vec<u8>, y: &Vec<u8>) -> Vec<u8> {
        let mut out = x.clone();
        for &i in y {
            if out.last() == Some(&(i ^ 1)) {
                out.pop();
            } else {
                out.push(i);
            }
        }
        out
    }

    fn invert(&self, x: &Vec<u8>) -> Vec<u8> {
        x.iter().rev().map(|i| i ^ 1).collect()
    }

    fn encode(&self, x: &Vec<u8>) -> Vec<u8> {
        x.clone()
    }

    fn decode(&self, key: &[u8]) -> Option<Vec<u8>> {
        let valid = key.iter().all(|&i| (i as usize) < 2 * self.n)
            && key.windows(2).all(|w| w[0] != w[1] ^ 1);
        valid.then(|| key.to_vec())
    }

    fn format(&self, x: &Vec<u8>) -> String {
        let word: Vec<usize> = x.iter().map(|&i| i as usize).collect();
        self.gens.render_word(&word)
    }

    fn closed_length(&self, x: &Vec<u8>) -> Option<u64> {
        Some(x.len() as u64)
    }
}

/// `|g| + 2 - 2/n`, the generator-conjugate average of a nontrivial
/// cyclically reduced word in `F_n`.
pub fn free_gencon(n: usize, g: &[u8]) -> Result<BigRational> {
    let (Some(&first), Some(&last)) = (g.first(), g.last()) else {
        return Err(Error::EmptyWord);
    };
    if first ^ 1 == last {
        let letters: Vec<usize> = g.iter().map(|&i| i as usize).collect();
        return Err(Error::NotCyclicallyReduced(make_free(n).gens.render_word(&letters)));
    }
    let n = n as i64;
    Ok(BigRational::new(
        ((g.len() as i64 + 2) * n - 2).into(),
        n.into(),
    ))
}

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupSpec {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroupSpec {
    #[allow(clippy::needless_range_loop)]
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidGroup("table must be square and nonempty".into()));
        }
        for i in 0..n {
            let mut row_seen = vec![false; n];
            let mut col_seen = vec![false; n];
            for j in 0..n {
                let (r, c) = (table[i][j], table[j][i]);
                if r >= n || c >= n || row_seen[r] || col_seen[c] {
                    return Err(Error::InvalidGroup("table is not a Latin square".into()));
                }
                row_seen[r] = true;
                col_seen[c] = true;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup("table is not associative".into()));
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|x| (0..n).find(|&y| table[x][y] == identity).unwrap())
            .collect();
        Ok(FiniteGroupSpec {
            table,
            identity,
            inverse,
        })
    }

    /// The cyclic group `Z_n` on `0..n` under addition.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        FiniteGroupSpec::new(table).expect("cyclic table is valid")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x][y]
    }

    pub fn inverse(&self, x: usize) -> usize {
        self.inverse[x]
    }

    /// Non-identity elements in index order.
    pub fn nontrivial(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order()).filter(move |&x| x != self.identity)
    }
}

/// A finite group with a chosen generating set, as a [`Group`].
#[derive(Clone, Debug)]
pub struct FiniteGroupTable {
    name: String,
    spec: FiniteGroupSpec,
    element_names: Vec<String>,
    gen_elements: Vec<usize>,
    gens: GeneratorSet,
}

impl FiniteGroupTable {
    /// `generators` are element indices; the set is closed under inverses
    /// by the caller.
    pub fn new(
        name: &str,
        spec: FiniteGroupSpec,
        element_names: Vec<String>,
        generators: Vec<usize>,
    ) -> Result<Self> {
        if element_names.len() != spec.order() {
            return Err(Error::InvalidGroup("one name per element required".into()));
        }
        let labels: Vec<String> = generators.iter().map(|&g| element_names[g].clone()).collect();
        let inverse = generators
            .iter()
            .map(|&g| {
                generators
                    .iter()
                    .position(|&h| h == spec.inverse(g))
                    .ok_or_else(|| Error::InvalidGroup("generating set is not symmetric".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let gens = GeneratorSet::new(labels, inverse)?;
        let group = FiniteGroupTable {
            name: name.to_string(),
            spec,
            element_names,
            gen_elements: generators,
            gens,
        };
        // generators must reach every element
        let mut seen = vec![false; group.spec.order()];
        let mut stack = vec![group.spec.identity()];
        seen[group.spec.identity()] = true;
        while let Some(x) = stack.pop() {
            for &g in &group.gen_elements {
                let y = group.spec.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidGroup("generators do not generate".into()));
        }
        Ok(group)
    }

    pub fn spec(&self) -> &FiniteGroupSpec {
        &self.spec
    }

    pub fn element_by_name(&self, name: &str) -> Option<usize> {
        self.element_names.iter().position(|n| n == name)
    }

    pub fn element_names(&self) -> &[String] {
        &self.element_names
    }
}

/// `S_3 = <s, t | s^2 = t^2 = 1, sts = tst>` with both generators
/// involutions. Elements are indexed `e, s, t, st, ts, sts`.
pub fn make_s3() -> FiniteGroupTable {
    let table = vec![
        vec![0, 1, 2, 3, 4, 5],
        vec![1, 0, 3, 2, 5, 4],
        vec![2, 4, 0, 5, 1, 3],
        vec![3, 5, 1, 4, 0, 2],
        vec![4, 2, 5, 0, 3, 1],
        vec![5, 3, 4, 1, 2, 0],
    ];
    let names = ["e", "s", "t", "st", "ts", "sts"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let spec = FiniteGroupSpec::new(table).expect("S3 table");
    FiniteGroupTable::new("S3", spec, names, vec![1, 2]).expect("S3 generators")
}

impl Group for FiniteGroupTable {
    type Elem = usize;

    fn id(&self) -> String {
        self.name.clone()
    }

    fn generators(&self) -> &GeneratorSet {
        &self.gens
    }

    fn generator(&self, index: usize) -> usize {
        self.gen_elements[index]
    }

    fn identity(&self) -> usize {
        self.spec.identity()
    }

    fn compose(&self, x: &usize, y: &usize) -> usize {
        self.spec.mul(*x, *y)
    }

    fn invert(&self, x: &usize) -> usize {
        self.spec.inverse(*x)
    }

    fn encode(&self, x: &usize) -> Vec<u8> {
        (*x as u32).to_be_bytes().to_vec()
    }

    fn decode(&self, key: &[u8]) -> Option<usize> {
        let x = u32::from_be_bytes(key.try_into().ok()?) as usize;
        (x < self.spec.order()).then_some(x)
    }

    fn format(&self, x: &usize) -> String {
        self.element_names[*x].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{bfs_metric, DEFAULT_BUDGET};

    #[test]
    fn zn_length_is_l1() {
        let z2 = make_zn(2);
        assert_eq!(z2.closed_length(&vec![2, -3]), Some(5));
        assert_eq!(z2.format(&vec![2, -3]), "(2,-3)");
        assert_eq!(z2.decode(&z2.encode(&vec![2, -3])), Some(vec![2, -3]));
    }

    #[test]
    fn free_words_reduce() {
        let f2 = make_free(2);
        let w = f2.evaluate(&[0, 2, 1]);
        assert_eq!(f2.closed_length(&w), Some(3));
        assert_eq!(f2.format(&w), "a b a^-1");
        assert_eq!(f2.evaluate(&[0, 2, 3, 1]), f2.identity());
        assert_eq!(f2.decode(&[0, 1]), None);
    }

    #[test]
    fn s3_relators_hold() {
        let s3 = make_s3();
        let (s, t) = (0, 1);
        assert_eq!(s3.evaluate(&[s, s]), s3.identity());
        assert_eq!(s3.evaluate(&[t, t]), s3.identity());
        assert_eq!(s3.evaluate(&[s, t, s]), s3.evaluate(&[t, s, t]));
        let table = bfs_metric(&s3, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(table.layer_sizes(), vec![1, 2, 2, 1]);
        assert_eq!(table.lookup(&s3.evaluate(&[s, t, s])), Some(3));
    }

    #[test]
    fn finite_table_validation() {
        assert!(FiniteGroupSpec::new(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroupSpec::new(vec![vec![1, 0], vec![0, 1]]).is_ok());
        let z4 = FiniteGroupSpec::cyclic(4);
        assert_eq!(z4.inverse(1), 3);
        let names = (0..4).map(|i| i.to_string()).collect();
        // {2} alone does not generate Z_4
        assert!(FiniteGroupTable::new("Z4", z4.clone(), names, vec![2]).is_err());
        // {1} is not symmetric
        let names = (0..4).map(|i| i.to_string()).collect();
        assert!(FiniteGroupTable::new("Z4", z4, names, vec![1]).is_err());
    }

    #[test]
    fn free_gencon_values() {
        assert_eq!(free_gencon(2, &[0, 2]).unwrap(), BigRational::from_integer(3.into()));
        assert_eq!(
            free_gencon(3, &[0]).unwrap(),
            BigRational::new(7.into(), 3.into())
        );
        assert!(free_gencon(2, &[]).is_err());
        assert!(matches!(
            free_gencon(2, &[0, 2, 1]),
            Err(Error::NotCyclicallyReduced(_))
        ));
    }
}
