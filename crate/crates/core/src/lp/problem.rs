use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// `maximize c.x subject to A x = b, x >= 0`, stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    labels: Vec<String>,
    objective: Vec<Rational>,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
}

impl LpProblem {
    pub fn new(labels: Vec<String>, objective: Vec<Rational>) -> Result<Self> {
        if labels.len() != objective.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} objective coefficients",
                labels.len(),
                objective.len()
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::InvalidArgument(format!("duplicate variable label {dup:?}")));
        }
        Ok(LpProblem {
            labels,
            objective,
            rows: Vec::new(),
            rhs: Vec::new(),
        })
    }

    /// Unlabelled problem; variables are named `x0, x1, ...`.
    pub fn unlabelled(objective: Vec<Rational>) -> Self {
        let labels = (0..objective.len()).map(|j| format!("x{j}")).collect();
        LpProblem::new(labels, objective).expect("generated labels are unique")
    }

    pub fn add_row(&mut self, coeffs: Vec<Rational>, rhs: Rational) -> Result<()> {
        if coeffs.len() != self.num_vars() {
            return Err(Error::InvalidArgument(format!(
                "row has {} coefficients, problem has {} variables",
                coeffs.len(),
                self.num_vars()
            )));
        }
        self.rows.push(coeffs);
        self.rhs.push(rhs);
        Ok(())
    }

    /// Adds a row given as `(variable, coefficient)` terms; repeated variables
    /// accumulate.
    pub fn add_sparse_row(&mut self, terms: &[(usize, Rational)], rhs: Rational) -> Result<()> {
        let mut row = vec![Rational::zero(); self.num_vars()];
        for (j, a) in terms {
            let slot = row.get_mut(*j).ok_or_else(|| {
                Error::InvalidArgument(format!("variable index {j} out of range"))
            })?;
            *slot += a;
        }
        self.add_row(row, rhs)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        dot(&self.objective, x)
    }

    /// `A x - b`.
    pub fn residual(&self, x: &[Rational]) -> Vec<Rational> {
        self.rows
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| dot(row, x) - b)
            .collect()
    }

    /// Exact membership in `{A x = b, x >= 0}`.
    pub fn is_feasible_point(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars()
            && x.iter().all(|v| !v.is_negative())
            && self.residual(x).iter().all(Rational::is_zero)
    }

    /// `A^T y`.
    pub fn transpose_times(&self, y: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.num_vars()];
        for (row, yi) in self.rows.iter().zip(y) {
            if yi.is_zero() {
                continue;
            }
            for (o, a) in out.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o += a * yi;
                }
            }
        }
        out
    }

    pub fn with_objective(&self, objective: Vec<Rational>) -> Result<LpProblem> {
        if objective.len() != self.num_vars() {
            return Err(Error::InvalidArgument("objective length mismatch".into()));
        }
        Ok(LpProblem {
            objective,
            ..self.clone()
        })
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .map(|(x, y)| x * y)
        .sum()
}

fn write_linear(f: &mut fmt::Formatter<'_>, coeffs: &[Rational], labels: &[String]) -> fmt::Result {
    let mut first = true;
    for (a, label) in coeffs.iter().zip(labels) {
        if a.is_zero() {
            continue;
        }
        if first {
            write!(f, "{a} {label}")?;
            first = false;
        } else if a.is_negative() {
            write!(f, " - {} {label}", -a)?;
        } else {
            write!(f, " + {a} {label}")?;
        }
    }
    if first {
        write!(f, "0/1")?;
    }
    Ok(())
}

/// Human-readable dump: objective, one equality per line, then bounds.
impl fmt::Display for LpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "maximize: ")?;
        write_linear(f, &self.objective, &self.labels)?;
        writeln!(f)?;
        for (i, (row, b)) in self.rows.iter().zip(&self.rhs).enumerate() {
            write!(f, "c{}: ", i + 1)?;
            write_linear(f, row, &self.labels)?;
            writeln!(f, " = {b}")?;
        }
        writeln!(f, "bounds: all {} variables >= 0", self.num_vars())
    }
}
