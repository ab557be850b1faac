use std::collections::BTreeMap;
use std::sync::Arc;

use crate::csp::family::PredicateFamily;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Serialized form of a [`PairDistribution`]: predicate name, then tuple
/// digits, then mass.
pub type PairDistributionMap = BTreeMap<String, BTreeMap<String, Rational>>;

/// A probability distribution over `F x [q]^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairDistribution {
    family: Arc<PredicateFamily>,
    /// `(predicate index, tuple code) -> mass`, non-zero masses only.
    mass: BTreeMap<(usize, usize), Rational>,
}

impl PairDistribution {
    pub fn new(family: Arc<PredicateFamily>, masses: BTreeMap<(usize, usize), Rational>) -> Result<Self> {
        let t = family.space().len();
        let mut total = Rational::zero();
        for (&(f, a), p) in &masses {
            if f >= family.len() || a >= t {
                return Err(Error::InvalidArgument(format!("atom ({f}, {a}) out of range")));
            }
            if p.is_negative() {
                return Err(Error::InvalidArgument(format!("negative mass {p}")));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!("masses sum to {total}, not 1")));
        }
        let mass = masses.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        Ok(PairDistribution { family, mass })
    }

    pub fn point(family: Arc<PredicateFamily>, f: usize, a: usize) -> Result<Self> {
        PairDistribution::new(family, BTreeMap::from([((f, a), Rational::one())]))
    }

    /// Uniform over the given distinct atoms.
    pub fn uniform(family: Arc<PredicateFamily>, atoms: &[(usize, usize)]) -> Result<Self> {
        let p = Rational::new(1, atoms.len().max(1) as i64);
        let mut masses = BTreeMap::new();
        for &atom in atoms {
            if masses.insert(atom, p.clone()).is_some() {
                return Err(Error::InvalidArgument(format!("repeated atom {atom:?}")));
            }
        }
        PairDistribution::new(family, masses)
    }

    pub fn family(&self) -> &PredicateFamily {
        &self.family
    }

    pub fn family_arc(&self) -> &Arc<PredicateFamily> {
        &self.family
    }

    pub fn mass(&self, f: usize, a: usize) -> Rational {
        self.mass.get(&(f, a)).cloned().unwrap_or_else(Rational::zero)
    }

    /// Atoms with non-zero mass in `(predicate, tuple)` order.
    pub fn atoms(&self) -> impl Iterator<Item = (usize, usize, &Rational)> {
        self.mass.iter().map(|(&(f, a), p)| (f, a, p))
    }

    pub fn support_len(&self) -> usize {
        self.mass.len()
    }

    /// Probability that the predicate is `f`.
    pub fn predicate_mass(&self, f: usize) -> Rational {
        self.atoms().filter(|&(g, _, _)| g == f).map(|(_, _, p)| p).sum()
    }

    pub fn to_map(&self) -> PairDistributionMap {
        let space = self.family.space();
        let mut out = PairDistributionMap::new();
        for (f, a, p) in self.atoms() {
            out.entry(self.family.predicate(f).name().to_string())
                .or_default()
                .insert(space.digits(a), p.clone());
        }
        out
    }

    pub fn from_map(family: Arc<PredicateFamily>, map: &PairDistributionMap) -> Result<Self> {
        let space = family.space();
        let mut masses = BTreeMap::new();
        for (name, atoms) in map {
            let f = family
                .index_of(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown predicate {name:?}")))?;
            for (digits, p) in atoms {
                let a = space
                    .parse_digits(digits)
                    .ok_or_else(|| Error::InvalidArgument(format!("bad tuple {digits:?}")))?;
                masses.insert((f, a), p.clone());
            }
        }
        PairDistribution::new(family, masses)
    }
}

/// `mu(D)`: entry `(f, l, s)` is `Pr[predicate = f and a_l = s]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarginalVector {
    names: Vec<String>,
    k: usize,
    q: usize,
    entries: Vec<Rational>,
}

/// Serialized form of a [`MarginalVector`]: predicate name, then `[l][s]`.
pub type MarginalVectorMap = BTreeMap<String, Vec<Vec<Rational>>>;

impl MarginalVector {
    fn slot(&self, f: usize, pos: usize, sym: usize) -> usize {
        (f * self.k + pos) * self.q + sym
    }

    pub fn get(&self, f: usize, pos: usize, sym: usize) -> &Rational {
        &self.entries[self.slot(f, pos, sym)]
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.names.len(), self.k, self.q)
    }

    /// First `(predicate name, 1-based position, symbol)` where the two
    /// vectors differ.
    pub fn first_mismatch(&self, other: &MarginalVector) -> Option<(String, usize, usize)> {
        if self.dims() != other.dims() || self.names != other.names {
            return Some(("<shape>".to_string(), 0, 0));
        }
        for f in 0..self.names.len() {
            for pos in 0..self.k {
                for sym in 0..self.q {
                    if self.get(f, pos, sym) != other.get(f, pos, sym) {
                        return Some((self.names[f].clone(), pos + 1, sym));
                    }
                }
            }
        }
        None
    }

    pub fn to_map(&self) -> MarginalVectorMap {
        self.names
            .iter()
            .enumerate()
            .map(|(f, name)| {
                let rows = (0..self.k)
                    .map(|pos| (0..self.q).map(|s| self.get(f, pos, s).clone()).collect())
                    .collect();
                (name.clone(), rows)
            })
            .collect()
    }

    pub fn from_map(family: &PredicateFamily, map: &MarginalVectorMap) -> Result<Self> {
        let (k, q) = (family.k(), family.q());
        let names: Vec<String> = family.predicates().iter().map(|p| p.name().to_string()).collect();
        if map.len() != names.len() {
            return Err(Error::InvalidArgument(format!(
                "marginal vector has {} predicates, family has {}",
                map.len(),
                names.len()
            )));
        }
        let mut entries = Vec::with_capacity(names.len() * k * q);
        for name in &names {
            let rows = map
                .get(name)
                .ok_or_else(|| Error::InvalidArgument(format!("marginal vector lacks {name:?}")))?;
            if rows.len() != k || rows.iter().any(|r| r.len() != q) {
                return Err(Error::InvalidArgument(format!("marginal vector for {name:?} is not k x q")));
            }
            entries.extend(rows.iter().flatten().cloned());
        }
        Ok(MarginalVector { names, k, q, entries })
    }
}

pub fn marginal_vector(d: &PairDistribution) -> MarginalVector {
    let fam = d.family();
    let space = fam.space();
    let mut mv = MarginalVector {
        names: fam.predicates().iter().map(|p| p.name().to_string()).collect(),
        k: space.k,
        q: space.q,
        entries: vec![Rational::zero(); fam.len() * space.k * space.q],
    };
    for (f, a, p) in d.atoms() {
        for pos in 0..space.k {
            let slot = mv.slot(f, pos, space.symbol(a, pos));
            mv.entries[slot] += p;
        }
    }
    mv
}

/// `E_{(f,a) ~ D} f(a)`.
pub fn yes_value(d: &PairDistribution) -> Rational {
    let fam = d.family();
    d.atoms()
        .filter(|&(f, a, _)| fam.predicate(f).eval(a))
        .map(|(_, _, p)| p)
        .sum()
}

/// Rows `P_s`, each a distribution over `[q]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SymbolKernel {
    rows: Vec<Vec<Rational>>,
}

impl SymbolKernel {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let q = rows.len();
        for (s, row) in rows.iter().enumerate() {
            if row.len() != q {
                return Err(Error::InvalidArgument(format!("kernel row {s} has {} entries, expected {q}", row.len())));
            }
            if row.iter().any(Rational::is_negative) || !row.iter().sum::<Rational>().is_one() {
                return Err(Error::InvalidArgument(format!("kernel row {s} is not a distribution")));
            }
        }
        Ok(SymbolKernel { rows })
    }

    pub fn identity(q: usize) -> Self {
        SymbolKernel::deterministic(&(0..q).collect::<Vec<_>>())
    }

    pub fn uniform(q: usize) -> Self {
        SymbolKernel {
            rows: vec![vec![Rational::new(1, q as i64); q]; q],
        }
    }

    /// `P_s = delta_{map[s]}`.
    pub fn deterministic(map: &[usize]) -> Self {
        let q = map.len();
        SymbolKernel {
            rows: map
                .iter()
                .map(|&t| (0..q).map(|u| if u == t { Rational::one() } else { Rational::zero() }).collect())
                .collect(),
        }
    }

    pub fn q(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, s: usize) -> &[Rational] {
        &self.rows[s]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }
}

/// `E_{(f,a) ~ D} E_{b_l ~ P_{a_l}} f(b)`, coordinates drawn independently.
pub fn no_value(d: &PairDistribution, kernel: &SymbolKernel) -> Rational {
    let fam = d.family();
    let space = fam.space();
    assert_eq!(kernel.q(), space.q, "kernel alphabet differs from family alphabet");
    let sat: Vec<Vec<Vec<u8>>> = fam
        .predicates()
        .iter()
        .map(|p| p.satisfying().map(|b| space.decode(b)).collect())
        .collect();
    let mut total = Rational::zero();
    for (f, a, p) in d.atoms() {
        let a = space.decode(a);
        let mut inner = Rational::zero();
        'tuples: for b in &sat[f] {
            let mut prod = Rational::one();
            for (&al, &bl) in a.iter().zip(b) {
                let e = &kernel.rows[al as usize][bl as usize];
                if e.is_zero() {
                    continue 'tuples;
                }
                prod = prod * e;
            }
            inner += prod;
        }
        total += inner * p;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::family::families;
    use proptest::prelude::*;

    fn cut() -> Arc<PredicateFamily> {
        Arc::new(families::cut())
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn point_mass_marginals() {
        let d = PairDistribution::point(cut(), 0, 1).unwrap();
        let mv = marginal_vector(&d);
        assert_eq!(*mv.get(0, 0, 0), r(1, 1));
        assert_eq!(*mv.get(0, 1, 1), r(1, 1));
        assert!(mv.get(0, 0, 1).is_zero() && mv.get(0, 1, 0).is_zero());
    }

    #[test]
    fn cut_pair_values() {
        let d = PairDistribution::uniform(cut(), &[(0, 1), (0, 2)]).unwrap();
        let mv = marginal_vector(&d);
        for pos in 0..2 {
            for s in 0..2 {
                assert_eq!(*mv.get(0, pos, s), r(1, 2));
            }
        }
        assert_eq!(yes_value(&d), r(1, 1));
        let full = PairDistribution::uniform(cut(), &[(0, 0), (0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(marginal_vector(&full), mv);
        assert_eq!(yes_value(&full), r(1, 2));
        assert!(yes_value(&PairDistribution::point(cut(), 0, 0).unwrap()).is_zero());
    }

    #[test]
    fn rejects_invalid() {
        assert!(PairDistribution::new(cut(), BTreeMap::from([((0, 0), r(1, 2))])).is_err());
        assert!(PairDistribution::new(cut(), BTreeMap::from([((0, 9), r(1, 1))])).is_err());
        assert!(PairDistribution::new(cut(), BTreeMap::from([((0, 0), r(3, 2)), ((0, 1), r(-1, 2))])).is_err());
        assert!(SymbolKernel::new(vec![vec![r(1, 2), r(1, 3)], vec![r(1, 1), r(0, 1)]]).is_err());
        assert!(SymbolKernel::new(vec![vec![r(1, 1)], vec![r(1, 1)]]).is_err());
    }

    #[test]
    fn map_round_trips() {
        let d = PairDistribution::uniform(cut(), &[(0, 1), (0, 2)]).unwrap();
        let m = d.to_map();
        assert_eq!(m["cut"]["01"], r(1, 2));
        assert_eq!(PairDistribution::from_map(cut(), &m).unwrap(), d);
        let mv = marginal_vector(&d);
        assert_eq!(MarginalVector::from_map(&families::cut(), &mv.to_map()).unwrap(), mv);
    }

    #[test]
    fn mismatch_reports_first_entry() {
        let a = marginal_vector(&PairDistribution::point(cut(), 0, 1).unwrap());
        let b = marginal_vector(&PairDistribution::point(cut(), 0, 2).unwrap());
        assert_eq!(a.first_mismatch(&b), Some(("cut".to_string(), 1, 0)));
        assert_eq!(a.first_mismatch(&a), None);
    }

    fn pair_distribution(q: usize, k: usize, preds: usize) -> impl Strategy<Value = PairDistribution> {
        let t = q.pow(k as u32);
        prop::collection::vec(0u32..5, preds * t).prop_filter_map("non-zero", move |w| {
            let total: u32 = w.iter().sum();
            if total == 0 {
                return None;
            }
            let fam = Arc::new(
                PredicateFamily::new(
                    q,
                    k,
                    (0..preds)
                        .map(|i| {
                            crate::csp::family::Predicate::from_fn(format!("p{i}"), q, k, move |a| {
                                a.iter().map(|&x| x as usize).sum::<usize>() % (i + 2) == 0
                            })
                        })
                        .collect(),
                )
                .unwrap(),
            );
            let masses = w
                .iter()
                .enumerate()
                .map(|(j, &x)| ((j / t, j % t), Rational::new(x as i64, total as i64)))
                .collect();
            Some(PairDistribution::new(fam, masses).unwrap())
        })
    }

    fn kernel(q: usize) -> impl Strategy<Value = SymbolKernel> {
        prop::collection::vec(prop::collection::vec(1u32..6, q), q).prop_map(|rows| {
            SymbolKernel::new(
                rows.into_iter()
                    .map(|row| {
                        let s: u32 = row.iter().sum();
                        row.into_iter().map(|x| Rational::new(x as i64, s as i64)).collect()
                    })
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn identity_kernel_gives_yes_value(d in pair_distribution(3, 2, 2)) {
            prop_assert_eq!(no_value(&d, &SymbolKernel::identity(3)), yes_value(&d));
        }

        #[test]
        fn uniform_kernel_forgets_tuples(d in pair_distribution(2, 3, 2)) {
            let fam = d.family();
            let expected: Rational = (0..fam.len())
                .map(|f| {
                    let frac = Rational::new(fam.predicate(f).support_size() as i64, 8);
                    d.predicate_mass(f) * frac
                })
                .sum();
            prop_assert_eq!(no_value(&d, &SymbolKernel::uniform(2)), expected);
        }

        #[test]
        fn marginal_slices_sum_to_predicate_mass(d in pair_distribution(3, 2, 2)) {
            let mv = marginal_vector(&d);
            for f in 0..2 {
                for pos in 0..2 {
                    let s: Rational = (0..3).map(|sym| mv.get(f, pos, sym).clone()).sum();
                    prop_assert_eq!(s, d.predicate_mass(f));
                }
            }
        }

        #[test]
        fn no_value_is_a_probability(d in pair_distribution(2, 2, 1), p in kernel(2)) {
            let v = no_value(&d, &p);
            prop_assert!(!v.is_negative() && v <= Rational::one());
        }

        #[test]
        fn cut_closed_form(a in 0i64..=8, b in 0i64..=8) {
            // D uniform over {cut} x {0,1}^2 gives 2 pbar (1 - pbar).
            let d = PairDistribution::uniform(cut(), &[(0, 0), (0, 1), (0, 2), (0, 3)]).unwrap();
            let p0 = Rational::new(a, 8);
            let p1 = Rational::new(b, 8);
            let k = SymbolKernel::new(vec![
                vec![Rational::one() - &p0, p0.clone()],
                vec![Rational::one() - &p1, p1.clone()],
            ]).unwrap();
            let pbar = (p0 + p1) / Rational::from_integer(2);
            let expected = Rational::from_integer(2) * &pbar * (Rational::one() - &pbar);
            prop_assert_eq!(no_value(&d, &k), expected);
        }
    }
}
