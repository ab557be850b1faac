use std::collections::HashSet;

use crate::error::{Error, Result};

/// Largest supported alphabet; tuples print as base-36 digit strings.
pub const MAX_ALPHABET: usize = 36;
/// Largest supported truth-table length `q^k`.
pub const MAX_TABLE_LEN: usize = 1 << 20;

const DIGITS: &[u8; 36] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// The tuple space `[q]^k`, indexed lexicographically with the first
/// coordinate most significant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TupleSpace {
    pub q: usize,
    pub k: usize,
}

impl TupleSpace {
    pub fn new(q: usize, k: usize) -> Self {
        TupleSpace { q, k }
    }

    pub fn len(&self) -> usize {
        self.q.pow(self.k as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn decode(&self, mut code: usize) -> Vec<u8> {
        let mut out = vec![0u8; self.k];
        for slot in out.iter_mut().rev() {
            *slot = (code % self.q) as u8;
            code /= self.q;
        }
        out
    }

    pub fn encode(&self, tuple: &[u8]) -> usize {
        tuple.iter().fold(0, |acc, &a| acc * self.q + a as usize)
    }

    /// Symbol at position `pos` (0-based) of the tuple with index `code`.
    pub fn symbol(&self, code: usize, pos: usize) -> usize {
        (code / self.q.pow((self.k - 1 - pos) as u32)) % self.q
    }

    pub fn digits(&self, code: usize) -> String {
        self.decode(code)
            .into_iter()
            .map(|a| DIGITS[a as usize] as char)
            .collect()
    }

    pub fn parse_digits(&self, s: &str) -> Option<usize> {
        if s.len() != self.k {
            return None;
        }
        let mut tuple = Vec::with_capacity(self.k);
        for c in s.bytes() {
            let d = DIGITS.iter().position(|&x| x == c.to_ascii_lowercase())?;
            if d >= self.q {
                return None;
            }
            tuple.push(d as u8);
        }
        Some(self.encode(&tuple))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Predicate {
    name: String,
    table: Vec<bool>,
}

impl Predicate {
    pub fn new(name: impl Into<String>, table: Vec<bool>) -> Self {
        Predicate {
            name: name.into(),
            table,
        }
    }

    pub fn from_fn(name: impl Into<String>, q: usize, k: usize, f: impl Fn(&[u8]) -> bool) -> Self {
        let space = TupleSpace::new(q, k);
        let table = (0..space.len()).map(|c| f(&space.decode(c))).collect();
        Predicate::new(name, table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    #[inline]
    pub fn eval(&self, code: usize) -> bool {
        self.table[code]
    }

    pub fn satisfying(&self) -> impl Iterator<Item = usize> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter_map(|(c, &v)| v.then_some(c))
    }

    pub fn support_size(&self) -> usize {
        self.table.iter().filter(|&&v| v).count()
    }
}

/// A finite family of predicates `[q]^k -> {0,1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateFamily {
    q: usize,
    k: usize,
    predicates: Vec<Predicate>,
}

impl PredicateFamily {
    pub fn new(q: usize, k: usize, predicates: Vec<Predicate>) -> Result<Self> {
        if q < 2 || q > MAX_ALPHABET {
            return Err(Error::InvalidFamily(format!(
                "alphabet size q={q} outside [2, {MAX_ALPHABET}]"
            )));
        }
        if k == 0 {
            return Err(Error::InvalidFamily("arity k must be at least 1".into()));
        }
        let len = (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if len > MAX_TABLE_LEN as u128 {
            return Err(Error::InvalidFamily(format!(
                "q^k = {len} exceeds the table limit {MAX_TABLE_LEN}"
            )));
        }
        if predicates.is_empty() {
            return Err(Error::InvalidFamily("family is empty".into()));
        }
        let mut seen = HashSet::new();
        for p in &predicates {
            if p.table.len() != len as usize {
                return Err(Error::InvalidFamily(format!(
                    "predicate {:?} has table length {}, expected q^k = {len}",
                    p.name,
                    p.table.len()
                )));
            }
            if !seen.insert(p.name.as_str()) {
                return Err(Error::InvalidFamily(format!(
                    "duplicate predicate name {:?}",
                    p.name
                )));
            }
        }
        Ok(PredicateFamily { q, k, predicates })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn space(&self) -> TupleSpace {
        TupleSpace::new(self.q, self.k)
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn predicate(&self, idx: usize) -> &Predicate {
        &self.predicates[idx]
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    /// The subfamily formed by `indices`, in the given order.
    pub fn subfamily(&self, indices: &[usize]) -> Result<PredicateFamily> {
        let preds = indices
            .iter()
            .map(|&i| {
                self.predicates.get(i).cloned().ok_or_else(|| {
                    Error::InvalidArgument(format!("predicate index {i} out of range"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PredicateFamily::new(self.q, self.k, preds)
    }
}

/// Commonly used families.
pub mod families {
    use super::*;

    /// `{f_Cut}` with `f_Cut(b1, b2) = [b1 != b2]`.
    pub fn cut() -> PredicateFamily {
        PredicateFamily::new(2, 2, vec![Predicate::from_fn("cut", 2, 2, |a| a[0] != a[1])])
            .expect("valid family")
    }

    /// `{f_DiCut}` with `f_DiCut(b1, b2) = [b1 = 1 and b2 = 0]`.
    pub fn dicut() -> PredicateFamily {
        PredicateFamily::new(
            2,
            2,
            vec![Predicate::from_fn("dicut", 2, 2, |a| a[0] == 1 && a[1] == 0)],
        )
        .expect("valid family")
    }

    pub fn constant_one(q: usize, k: usize) -> PredicateFamily {
        PredicateFamily::new(q, k, vec![Predicate::from_fn("one", q, k, |_| true)])
            .expect("valid family")
    }

    /// `x_1 + ... + x_k = 0 (mod q)`.
    pub fn linear_zero(q: usize, k: usize) -> PredicateFamily {
        PredicateFamily::new(
            q,
            k,
            vec![Predicate::from_fn("lin0", q, k, |a| {
                a.iter().map(|&x| x as usize).sum::<usize>() % q == 0
            })],
        )
        .expect("valid family")
    }

    /// k-ary AND over the Boolean alphabet.
    pub fn and(k: usize) -> PredicateFamily {
        PredicateFamily::new(
            2,
            k,
            vec![Predicate::from_fn(format!("and{k}"), 2, k, |a| a.iter().all(|&x| x == 1))],
        )
        .expect("valid family")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cut_table_is_lexicographic() {
        let f = families::cut();
        assert_eq!(f.predicate(0).table(), &[false, true, true, false]);
        let d = families::dicut();
        assert_eq!(d.predicate(0).table(), &[false, false, true, false]);
    }

    #[test]
    fn rejects_bad_families() {
        assert!(PredicateFamily::new(2, 2, vec![]).is_err());
        assert!(PredicateFamily::new(1, 2, vec![Predicate::new("a", vec![true])]).is_err());
        assert!(PredicateFamily::new(2, 2, vec![Predicate::new("a", vec![true; 3])]).is_err());
        let p = Predicate::new("a", vec![true; 4]);
        assert!(PredicateFamily::new(2, 2, vec![p.clone(), p]).is_err());
        assert!(PredicateFamily::new(2, 0, vec![Predicate::new("a", vec![true])]).is_err());
    }

    #[test]
    fn digits_strings() {
        let s = TupleSpace::new(3, 2);
        assert_eq!(s.digits(5), "12");
        assert_eq!(s.parse_digits("12"), Some(5));
        assert_eq!(s.parse_digits("13"), None);
        assert_eq!(s.parse_digits("1"), None);
        assert_eq!(s.symbol(5, 0), 1);
        assert_eq!(s.symbol(5, 1), 2);
    }

    proptest! {
        #[test]
        fn tuple_round_trip(q in 2usize..6, k in 1usize..5, seed in any::<u64>()) {
            let s = TupleSpace::new(q, k);
            let code = (seed as usize) % s.len();
            prop_assert_eq!(s.encode(&s.decode(code)), code);
            prop_assert_eq!(s.parse_digits(&s.digits(code)), Some(code));
        }

        #[test]
        fn table_round_trip(bits in proptest::collection::vec(any::<bool>(), 8)) {
            let p = Predicate::new("p", bits.clone());
            let rebuilt = Predicate::from_fn("p", 2, 3, |a| p.eval(TupleSpace::new(2, 3).encode(a)));
            prop_assert_eq!(rebuilt.table(), &bits[..]);
        }
    }
}
