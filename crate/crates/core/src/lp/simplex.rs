//! Two-phase tableau simplex over exact rationals with Bland's rule.
//!
//! The tableau keeps one artificial column per original row for the whole
//! run. Those columns hold `B^-1`, from which the dual solution (phase two)
//! and the Farkas multipliers (phase one) are read off. Artificials never
//! re-enter the basis once they leave.
//!
//! Every returned answer is re-checked against the original problem:
//! optimal solutions by primal feasibility, dual feasibility and equal
//! objective values; infeasibility by its Farkas certificate; unboundedness by
//! a feasible point and an improving ray.

use crate::error::{Error, Result};
use crate::lp::problem::{dot, LpProblem};
use crate::rational::Rational;

/// `y` with `A^T y >= 0` and `b.y < 0`, proving `{A x = b, x >= 0}` empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<Rational>,
}

impl FarkasCertificate {
    pub fn verify(&self, p: &LpProblem) -> bool {
        self.multipliers.len() == p.num_rows()
            && p.transpose_times(&self.multipliers)
                .iter()
                .all(|v| !v.is_negative())
            && dot(p.rhs(), &self.multipliers).is_negative()
    }
}

/// A feasible point together with `d >= 0`, `A d = 0`, `c.d > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnboundedCertificate {
    pub point: Vec<Rational>,
    pub ray: Vec<Rational>,
}

impl UnboundedCertificate {
    pub fn verify(&self, p: &LpProblem) -> bool {
        let ray_ok = self.ray.len() == p.num_vars()
            && self.ray.iter().all(|v| !v.is_negative())
            && p.rows().iter().all(|row| dot(row, &self.ray).is_zero())
            && p.objective_value(&self.ray).is_positive();
        ray_ok && p.is_feasible_point(&self.point)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Optimum {
    pub value: Rational,
    pub primal: Vec<Rational>,
    /// Dual solution: `A^T y >= c` and `b.y = value`.
    pub dual: Vec<Rational>,
}

impl Optimum {
    pub fn verify(&self, p: &LpProblem) -> bool {
        p.is_feasible_point(&self.primal)
            && p.objective_value(&self.primal) == self.value
            && self.dual.len() == p.num_rows()
            && p.transpose_times(&self.dual)
                .iter()
                .zip(p.objective())
                .all(|(aty, c)| aty >= c)
            && dot(p.rhs(), &self.dual) == self.value
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpSolution {
    Optimal(Optimum),
    Infeasible(FarkasCertificate),
    Unbounded(UnboundedCertificate),
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal(_) => LpStatus::Optimal,
            LpSolution::Infeasible(_) => LpStatus::Infeasible,
            LpSolution::Unbounded(_) => LpStatus::Unbounded,
        }
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpSolution::Optimal(o) => Some(&o.value),
            _ => None,
        }
    }

    pub fn primal(&self) -> Option<&[Rational]> {
        match self {
            LpSolution::Optimal(o) => Some(&o.primal),
            _ => None,
        }
    }

    pub fn into_optimum(self) -> Result<Optimum> {
        match self {
            LpSolution::Optimal(o) => Ok(o),
            LpSolution::Infeasible(_) => Err(Error::Infeasible),
            LpSolution::Unbounded(_) => Err(Error::Unbounded),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Vec<Rational>),
    Infeasible(FarkasCertificate),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub phase1_pivots: usize,
    pub cleanup_pivots: usize,
    pub phase2_pivots: usize,
    pub redundant_rows: usize,
    /// Basic original variables at termination, by row.
    pub final_basis: Vec<usize>,
}

impl SolveStats {
    pub fn total_pivots(&self) -> usize {
        self.phase1_pivots + self.cleanup_pivots + self.phase2_pivots
    }
}

struct Tableau {
    /// Number of original variables; columns `n..n+m` are artificial.
    n: usize,
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    reduced: Vec<Rational>,
    value: Rational,
    /// +1 or -1 per original row: rows with negative rhs were negated.
    signs: Vec<bool>,
}

impl Tableau {
    fn new(p: &LpProblem) -> Tableau {
        let n = p.num_vars();
        let m = p.num_rows();
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut signs = Vec::with_capacity(m);
        for (i, (row, b)) in p.rows().iter().zip(p.rhs()).enumerate() {
            let flip = b.is_negative();
            let mut t: Vec<Rational> = Vec::with_capacity(n + m);
            t.extend(row.iter().map(|a| if flip { -a } else { a.clone() }));
            t.extend((0..m).map(|j| if j == i { Rational::one() } else { Rational::zero() }));
            rows.push(t);
            rhs.push(if flip { -b } else { b.clone() });
            signs.push(flip);
        }
        // Phase one maximises -sum(artificials) from the all-artificial basis.
        let mut reduced = vec![Rational::zero(); n + m];
        for t in &rows {
            for (r, a) in reduced[..n].iter_mut().zip(&t[..n]) {
                if !a.is_zero() {
                    *r += a;
                }
            }
        }
        let value = -rhs.iter().sum::<Rational>();
        Tableau {
            n,
            rows,
            rhs,
            basis: (n..n + m).collect(),
            reduced,
            value,
            signs,
        }
    }

    fn pivot(&mut self, r: usize, e: usize) {
        let piv = self.rows[r][e].clone();
        if !piv.is_one() {
            let inv = piv.recip();
            for a in self.rows[r].iter_mut() {
                if !a.is_zero() {
                    *a *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let prow: Vec<(usize, Rational)> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.is_zero())
            .map(|(j, a)| (j, a.clone()))
            .collect();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][e].is_zero() {
                continue;
            }
            let f = self.rows[i][e].clone();
            let row = &mut self.rows[i];
            for (j, a) in &prow {
                row[*j] -= &f * a;
            }
            if !prhs.is_zero() {
                self.rhs[i] -= &f * &prhs;
            }
        }
        if !self.reduced[e].is_zero() {
            let f = self.reduced[e].clone();
            for (j, a) in &prow {
                self.reduced[*j] -= &f * a;
            }
            self.value += &f * &prhs;
        }
        self.basis[r] = e;
    }

    /// Bland: lowest-index original column with positive reduced cost.
    fn entering(&self) -> Option<usize> {
        (0..self.n).find(|&j| self.reduced[j].is_positive())
    }

    /// Minimum ratio, ties to the lowest basic variable index.
    fn leaving(&self, e: usize) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            if !row[e].is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / &row[e];
            let better = match &best {
                None => true,
                Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    fn run(&mut self) -> (usize, Option<usize>) {
        let mut pivots = 0;
        while let Some(e) = self.entering() {
            match self.leaving(e) {
                Some(r) => {
                    self.pivot(r, e);
                    pivots += 1;
                }
                None => return (pivots, Some(e)),
            }
        }
        (pivots, None)
    }

    /// `c_B^T B^-1` for costs `cost(basic column)`, mapped back through the
    /// row sign flips.
    fn dual(&self, m: usize, cost: impl Fn(usize) -> Rational) -> Vec<Rational> {
        let mut y = vec![Rational::zero(); m];
        for (row, &b) in self.rows.iter().zip(&self.basis) {
            let cb = cost(b);
            if cb.is_zero() {
                continue;
            }
            for (i, yi) in y.iter_mut().enumerate() {
                let a = &row[self.n + i];
                if !a.is_zero() {
                    *yi += &cb * a;
                }
            }
        }
        for (yi, &flip) in y.iter_mut().zip(&self.signs) {
            if flip {
                *yi = -&*yi;
            }
        }
        y
    }

    fn primal(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                x[b] = self.rhs[i].clone();
            }
        }
        x
    }

    fn set_objective(&mut self, c: &[Rational]) {
        let n = self.n;
        let cost = |j: usize| if j < n { c[j].clone() } else { Rational::zero() };
        let width = self.reduced.len();
        let mut reduced: Vec<Rational> = (0..width).map(cost).collect();
        let mut value = Rational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = cost(b);
            if cb.is_zero() {
                continue;
            }
            for (r, a) in reduced.iter_mut().zip(&self.rows[i]) {
                if !a.is_zero() {
                    *r -= &cb * a;
                }
            }
            value += &cb * &self.rhs[i];
        }
        self.reduced = reduced;
        self.value = value;
    }
}

enum PhaseOne {
    Feasible(Tableau, SolveStats),
    Infeasible(FarkasCertificate, SolveStats),
}

fn phase_one(p: &LpProblem) -> Result<PhaseOne> {
    let m = p.num_rows();
    let n = p.num_vars();
    let mut t = Tableau::new(p);
    let mut stats = SolveStats::default();
    let (pivots, _) = t.run();
    stats.phase1_pivots = pivots;

    if t.value.is_negative() {
        let cert = FarkasCertificate {
            multipliers: t.dual(m, |j| if j >= n { -Rational::one() } else { Rational::zero() }),
        };
        if !cert.verify(p) {
            return Err(Error::Internal("phase one produced an invalid Farkas certificate".into()));
        }
        return Ok(PhaseOne::Infeasible(cert, stats));
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are linear combinations of the others.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            match (0..n).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => {
                    t.pivot(r, j);
                    stats.cleanup_pivots += 1;
                }
                None => {
                    t.rows.remove(r);
                    t.rhs.remove(r);
                    t.basis.remove(r);
                    stats.redundant_rows += 1;
                    continue;
                }
            }
        }
        r += 1;
    }
    Ok(PhaseOne::Feasible(t, stats))
}

/// Phase one only: a feasible point or a Farkas certificate.
pub fn check_feasible(p: &LpProblem) -> Result<Feasibility> {
    match phase_one(p)? {
        PhaseOne::Infeasible(cert, _) => Ok(Feasibility::Infeasible(cert)),
        PhaseOne::Feasible(t, _) => {
            let x = t.primal();
            if !p.is_feasible_point(&x) {
                return Err(Error::Internal("phase one point is not feasible".into()));
            }
            Ok(Feasibility::Feasible(x))
        }
    }
}

pub fn solve(p: &LpProblem) -> Result<LpSolution> {
    solve_with_stats(p).map(|(s, _)| s)
}

pub fn solve_with_stats(p: &LpProblem) -> Result<(LpSolution, SolveStats)> {
    let m = p.num_rows();
    let n = p.num_vars();
    let (mut t, mut stats) = match phase_one(p)? {
        PhaseOne::Infeasible(cert, stats) => return Ok((LpSolution::Infeasible(cert), stats)),
        PhaseOne::Feasible(t, stats) => (t, stats),
    };
    let c = p.objective();
    t.set_objective(c);
    let (pivots, unbounded_col) = t.run();
    stats.phase2_pivots = pivots;
    stats.final_basis = t.basis.iter().copied().filter(|&b| b < n).collect();

    if let Some(e) = unbounded_col {
        let mut ray = vec![Rational::zero(); n];
        ray[e] = Rational::one();
        for (i, &b) in t.basis.iter().enumerate() {
            if b < n {
                ray[b] = -&t.rows[i][e];
            }
        }
        let cert = UnboundedCertificate {
            point: t.primal(),
            ray,
        };
        if !cert.verify(p) {
            return Err(Error::Internal("simplex produced an invalid unbounded ray".into()));
        }
        return Ok((LpSolution::Unbounded(cert), stats));
    }

    let opt = Optimum {
        value: t.value.clone(),
        primal: t.primal(),
        dual: t.dual(m, |j| if j < n { c[j].clone() } else { Rational::zero() }),
    };
    if !opt.verify(p) {
        return Err(Error::Internal("simplex optimum failed exact re-verification".into()));
    }
    Ok((LpSolution::Optimal(opt), stats))
}
