use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::csp::family::PredicateFamily;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A constraint `(f, j)` with weight `w`. Variables are 0-based internally and
/// 1-based in files and labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub predicate: usize,
    pub vars: Vec<usize>,
    pub weight: u64,
}

impl Constraint {
    pub fn new(predicate: usize, vars: Vec<usize>, weight: u64) -> Self {
        Constraint {
            predicate,
            vars,
            weight,
        }
    }

    pub fn unit(predicate: usize, vars: Vec<usize>) -> Self {
        Constraint::new(predicate, vars, 1)
    }
}

/// A weighted instance of Max-CSP(F).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    family: Arc<PredicateFamily>,
    n: usize,
    constraints: Vec<Constraint>,
    total_weight: u64,
}

impl Instance {
    pub fn new(family: Arc<PredicateFamily>, n: usize, constraints: Vec<Constraint>) -> Result<Self> {
        let k = family.k();
        let mut total: u64 = 0;
        for (idx, c) in constraints.iter().enumerate() {
            let at = idx + 1;
            if c.predicate >= family.len() {
                return Err(Error::InvalidInstance(format!(
                    "constraint {at}: predicate index {} out of range",
                    c.predicate
                )));
            }
            if c.vars.len() != k {
                return Err(Error::InvalidInstance(format!(
                    "constraint {at}: expected {k} variables, got {}",
                    c.vars.len()
                )));
            }
            if let Some(&v) = c.vars.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidInstance(format!(
                    "constraint {at}: variable {} outside [1, {n}]",
                    v + 1
                )));
            }
            let distinct: HashSet<_> = c.vars.iter().collect();
            if distinct.len() != k {
                return Err(Error::InvalidInstance(format!(
                    "constraint {at}: repeated variable in {:?}",
                    c.vars.iter().map(|v| v + 1).collect::<Vec<_>>()
                )));
            }
            if c.weight == 0 {
                return Err(Error::InvalidInstance(format!("constraint {at}: zero weight")));
            }
            total = total
                .checked_add(c.weight)
                .ok_or_else(|| Error::InvalidInstance("total weight overflows u64".into()))?;
        }
        if total == 0 {
            return Err(Error::InvalidInstance("instance has no constraints".into()));
        }
        Ok(Instance {
            family,
            n,
            constraints,
            total_weight: total,
        })
    }

    pub fn family(&self) -> &PredicateFamily {
        &self.family
    }

    pub fn family_arc(&self) -> &Arc<PredicateFamily> {
        &self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    /// `w_C / W` for constraint `idx`.
    pub fn weight_fraction(&self, idx: usize) -> Rational {
        Rational::from(self.constraints[idx].weight) / Rational::from(self.total_weight)
    }

    /// Index of constraint `c`'s local tuple under `values`.
    #[inline]
    pub fn local_code(&self, c: &Constraint, values: &[u8]) -> usize {
        let q = self.family.q();
        c.vars.iter().fold(0, |acc, &v| acc * q + values[v] as usize)
    }

    /// Total weight of constraints satisfied by `values` (unchecked lengths).
    #[inline]
    pub fn satisfied_weight(&self, values: &[u8]) -> u64 {
        self.constraints
            .iter()
            .filter(|c| self.family.predicate(c.predicate).eval(self.local_code(c, values)))
            .map(|c| c.weight)
            .sum()
    }

    /// The same instance with variables renamed by `perm` (`i -> perm[i]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<Instance> {
        if perm.len() != self.n {
            return Err(Error::InvalidArgument("permutation length must equal n".into()));
        }
        let constraints = self
            .constraints
            .iter()
            .map(|c| Constraint::new(c.predicate, c.vars.iter().map(|&v| perm[v]).collect(), c.weight))
            .collect();
        Instance::new(self.family.clone(), self.n, constraints)
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} [", self.n)?;
        for (i, c) in self.constraints.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let vars: Vec<String> = c.vars.iter().map(|v| (v + 1).to_string()).collect();
            write!(f, "{}({})", self.family.predicate(c.predicate).name(), vars.join(","))?;
            if c.weight != 1 {
                write!(f, "*{}", c.weight)?;
            }
        }
        write!(f, "]")
    }
}

/// An assignment `b in [q]^n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Assignment(pub Vec<u8>);

impl Assignment {
    pub fn values(&self) -> &[u8] {
        &self.0
    }

    pub fn check(&self, inst: &Instance) -> Result<()> {
        if self.0.len() != inst.n() {
            return Err(Error::InvalidAssignment(format!(
                "length {} does not match n = {}",
                self.0.len(),
                inst.n()
            )));
        }
        let q = inst.family().q();
        if let Some(&v) = self.0.iter().find(|&&v| v as usize >= q) {
            return Err(Error::InvalidAssignment(format!("symbol {v} outside [0, {}]", q - 1)));
        }
        Ok(())
    }
}

/// Weighted fraction of constraints satisfied by `a`.
pub fn csp_value(inst: &Instance, a: &Assignment) -> Result<Rational> {
    a.check(inst)?;
    Ok(Rational::from(inst.satisfied_weight(&a.0)) / Rational::from(inst.total_weight()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::csp::builders::cycle;
    use crate::csp::family::families;

    #[test]
    fn single_edge_value() {
        let fam = Arc::new(families::cut());
        let inst = Instance::new(fam, 2, vec![Constraint::unit(0, vec![0, 1])]).unwrap();
        assert_eq!(csp_value(&inst, &Assignment(vec![0, 1])).unwrap(), Rational::one());
        assert_eq!(csp_value(&inst, &Assignment(vec![1, 1])).unwrap(), Rational::zero());
    }

    #[test]
    fn five_cycle_alternating() {
        let inst = cycle(5);
        let v = csp_value(&inst, &Assignment(vec![0, 1, 0, 1, 0])).unwrap();
        assert_eq!(v, Rational::new(4, 5));
    }

    #[test]
    fn all_weight_on_violated_constraint() {
        let fam = Arc::new(families::dicut());
        let inst = Instance::new(fam, 3, vec![Constraint::new(0, vec![0, 2], 7)]).unwrap();
        assert_eq!(csp_value(&inst, &Assignment(vec![0, 1, 1])).unwrap(), Rational::zero());
    }

    #[test]
    fn rejects_invalid_constraints() {
        let fam = Arc::new(families::cut());
        assert!(Instance::new(fam.clone(), 2, vec![Constraint::unit(0, vec![0, 0])]).is_err());
        assert!(Instance::new(fam.clone(), 2, vec![Constraint::unit(0, vec![0, 2])]).is_err());
        assert!(Instance::new(fam.clone(), 2, vec![Constraint::new(0, vec![0, 1], 0)]).is_err());
        assert!(Instance::new(fam.clone(), 2, vec![Constraint::unit(1, vec![0, 1])]).is_err());
        assert!(Instance::new(fam.clone(), 3, vec![Constraint::unit(0, vec![0, 1, 2])]).is_err());
        assert!(Instance::new(fam, 2, vec![]).is_err());
    }

    #[test]
    fn assignment_mismatch() {
        let inst = cycle(3);
        assert!(csp_value(&inst, &Assignment(vec![0, 1])).is_err());
        assert!(csp_value(&inst, &Assignment(vec![0, 1, 2])).is_err());
    }
}
