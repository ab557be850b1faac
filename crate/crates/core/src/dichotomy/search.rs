//! Lower bounds on `sup_P no_value(D, P)`.
//!
//! Candidates come from three sources: every deterministic kernel, a uniform
//! grid over kernel rows, and seeded multistart projected-gradient ascent in
//! floating point. Ascent results are snapped to the lattice with
//! denominator [`KERNEL_LATTICE`]. Every reported bound is an exact
//! evaluation of the reported kernel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dichotomy::distribution::{no_value, PairDistribution, SymbolKernel};
use crate::rational::Rational;

pub const KERNEL_LATTICE: i64 = 1024;
/// Default number of kernel evaluations.
pub const DEFAULT_NO_SEARCH_BUDGET: u64 = 4096;
const ASCENT_STEPS: usize = 200;
const MAX_STARTS: u64 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupSearch {
    pub bound: Rational,
    pub kernel: SymbolKernel,
    pub seed: u64,
    pub budget: u64,
    /// Kernel evaluations performed, exact and floating point.
    pub evaluated: u64,
}

struct FastEval {
    q: usize,
    /// `(mass, tuple, satisfying tuples of the predicate)`.
    atoms: Vec<(f64, Vec<u8>, usize)>,
    sat: Vec<Vec<Vec<u8>>>,
}

impl FastEval {
    fn new(d: &PairDistribution) -> Self {
        let fam = d.family();
        let space = fam.space();
        FastEval {
            q: space.q,
            atoms: d.atoms().map(|(f, a, p)| (p.to_f64(), space.decode(a), f)).collect(),
            sat: fam
                .predicates()
                .iter()
                .map(|p| p.satisfying().map(|b| space.decode(b)).collect())
                .collect(),
        }
    }

    fn value(&self, p: &[f64]) -> f64 {
        let q = self.q;
        let mut total = 0.0;
        for (w, a, f) in &self.atoms {
            let mut inner = 0.0;
            for b in &self.sat[*f] {
                inner += a
                    .iter()
                    .zip(b)
                    .map(|(&al, &bl)| p[al as usize * q + bl as usize])
                    .product::<f64>();
            }
            total += w * inner;
        }
        total
    }

    fn gradient(&self, p: &[f64]) -> Vec<f64> {
        let q = self.q;
        let mut g = vec![0.0; q * q];
        for (w, a, f) in &self.atoms {
            for b in &self.sat[*f] {
                let terms: Vec<(usize, f64)> = a
                    .iter()
                    .zip(b)
                    .map(|(&al, &bl)| {
                        let slot = al as usize * q + bl as usize;
                        (slot, p[slot])
                    })
                    .collect();
                for (l, &(slot, _)) in terms.iter().enumerate() {
                    let others: f64 = terms
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != l)
                        .map(|(_, t)| t.1)
                        .product();
                    g[slot] += w * others;
                }
            }
        }
        g
    }
}

/// Euclidean projection onto the probability simplex.
fn project_row(row: &mut [f64]) {
    let mut sorted: Vec<f64> = row.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cum += u;
        let t = (cum - 1.0) / (i as f64 + 1.0);
        if u - t > 0.0 {
            theta = t;
        }
    }
    for v in row.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Rounds a row to multiples of `1/den` summing to one: floors first, the
/// remainder goes to the largest fractional parts (lowest index on ties).
fn snap_row(row: &[f64], den: i64) -> Vec<Rational> {
    let scaled: Vec<f64> = row.iter().map(|&x| x.clamp(0.0, 1.0) * den as f64).collect();
    let mut ints: Vec<i64> = scaled.iter().map(|x| x.floor() as i64).collect();
    let mut rest = den - ints.iter().sum::<i64>();
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&i, &j| {
        let fi = scaled[i] - scaled[i].floor();
        let fj = scaled[j] - scaled[j].floor();
        fj.total_cmp(&fi).then(i.cmp(&j))
    });
    let mut idx = 0;
    while rest > 0 {
        ints[order[idx % order.len()]] += 1;
        rest -= 1;
        idx += 1;
    }
    while rest < 0 {
        let j = (0..ints.len()).rev().max_by_key(|&j| ints[j]).expect("non-empty row");
        ints[j] -= 1;
        rest += 1;
    }
    ints.into_iter().map(|v| Rational::new(v, den)).collect()
}

fn snap(p: &[f64], q: usize, den: i64) -> SymbolKernel {
    SymbolKernel::new(p.chunks(q).map(|row| snap_row(row, den)).collect()).expect("snapped rows are distributions")
}

fn to_f64(k: &SymbolKernel) -> Vec<f64> {
    k.rows().iter().flatten().map(Rational::to_f64).collect()
}

/// All compositions of `g` into `q` non-negative parts, lexicographically.
fn compositions(g: usize, q: usize) -> Vec<Vec<usize>> {
    fn rec(left: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 1 {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(left - v, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(g, q, &mut Vec::new(), &mut out);
    out
}

fn count_compositions(g: usize, q: usize) -> u128 {
    // C(g + q - 1, q - 1)
    (0..q as u128 - 1).fold(1u128, |acc, i| acc * (g as u128 + 1 + i) / (i + 1))
}

struct Best {
    bound: Rational,
    kernel: SymbolKernel,
}

impl Best {
    fn offer(&mut self, bound: Rational, kernel: SymbolKernel) {
        if bound > self.bound || (bound == self.bound && kernel < self.kernel) {
            self.bound = bound;
            self.kernel = kernel;
        }
    }
}

/// Best exact `no_value(d, P)` over the candidate kernels. `budget` bounds the
/// grid size and the number of ascent starts; deterministic given `seed`.
pub fn no_sup_search(d: &PairDistribution, budget: u64, seed: u64) -> SupSearch {
    let q = d.family().q();
    let fast = FastEval::new(d);
    let mut evaluated = 0u64;

    let identity = SymbolKernel::identity(q);
    let mut best = Best {
        bound: no_value(d, &identity),
        kernel: identity,
    };
    evaluated += 1;

    // Deterministic kernels, in lexicographic order of the symbol map.
    let det_count = (q as u128).pow(q as u32);
    if det_count <= budget.max(1) as u128 {
        let mut map = vec![0usize; q];
        loop {
            let k = SymbolKernel::deterministic(&map);
            best.offer(no_value(d, &k), k);
            evaluated += 1;
            let Some(i) = (0..q).rev().find(|&i| map[i] + 1 < q) else {
                break;
            };
            map[i] += 1;
            for v in &mut map[i + 1..] {
                *v = 0;
            }
        }
    }

    // Grid: every row ranges over multiples of 1/g.
    let grid_budget = (budget / 2) as u128;
    let mut g = 1usize;
    while count_compositions(g + 1, q).saturating_pow(q as u32) <= grid_budget {
        g += 1;
    }
    let mut start_point: Vec<f64> = to_f64(&best.kernel);
    if g >= 2 {
        let rows = compositions(g, q);
        let mut pick = vec![0usize; q];
        let mut grid_best: Option<(f64, Vec<usize>)> = None;
        loop {
            let p: Vec<f64> = pick
                .iter()
                .flat_map(|&r| rows[r].iter().map(|&v| v as f64 / g as f64))
                .collect();
            let v = fast.value(&p);
            evaluated += 1;
            if grid_best.as_ref().is_none_or(|(b, _)| v > *b) {
                grid_best = Some((v, pick.clone()));
            }
            let Some(i) = (0..q).rev().find(|&i| pick[i] + 1 < rows.len()) else {
                break;
            };
            pick[i] += 1;
            for v in &mut pick[i + 1..] {
                *v = 0;
            }
        }
        let (_, pick) = grid_best.expect("grid is non-empty");
        let kernel = SymbolKernel::new(
            pick.iter()
                .map(|&r| rows[r].iter().map(|&v| Rational::new(v as i64, g as i64)).collect())
                .collect(),
        )
        .expect("grid rows are distributions");
        start_point = to_f64(&kernel);
        best.offer(no_value(d, &kernel), kernel);
        evaluated += 1;
    }

    // Multistart ascent.
    let starts = (budget / (4 * ASCENT_STEPS as u64)).clamp(1, MAX_STARTS);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for s in 0..starts {
        let mut p = if s == 0 {
            start_point.clone()
        } else {
            let mut p: Vec<f64> = (0..q * q).map(|_| rng.gen_range(0.01..1.0)).collect();
            for row in p.chunks_mut(q) {
                let t: f64 = row.iter().sum();
                row.iter_mut().for_each(|v| *v /= t);
            }
            p
        };
        let mut v = fast.value(&p);
        let mut step = 0.25;
        for _ in 0..ASCENT_STEPS {
            let grad = fast.gradient(&p);
            let mut cand: Vec<f64> = p.iter().zip(&grad).map(|(x, gr)| x + step * gr).collect();
            cand.chunks_mut(q).for_each(project_row);
            let cv = fast.value(&cand);
            evaluated += 1;
            if cv > v {
                p = cand;
                v = cv;
            } else {
                step *= 0.5;
                if step < 1e-9 {
                    break;
                }
            }
        }
        let kernel = snap(&p, q, KERNEL_LATTICE);
        best.offer(no_value(d, &kernel), kernel);
        evaluated += 1;
    }

    SupSearch {
        bound: best.bound,
        kernel: best.kernel,
        seed,
        budget,
        evaluated,
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::csp::family::families;
    use crate::dichotomy::distribution::yes_value;

    #[test]
    fn cut_full_support_finds_half() {
        let fam = Arc::new(families::cut());
        let d = PairDistribution::uniform(fam, &[(0, 0), (0, 1), (0, 2), (0, 3)]).unwrap();
        for seed in 0..4 {
            let s = no_sup_search(&d, 4096, seed);
            assert_eq!(s.bound, Rational::new(1, 2));
            assert_eq!(no_value(&d, &s.kernel), s.bound);
        }
    }

    #[test]
    fn satisfying_point_mass_finds_one() {
        let fam = Arc::new(families::dicut());
        let d = PairDistribution::point(fam, 0, 2).unwrap();
        let s = no_sup_search(&d, 256, 0);
        assert_eq!(s.bound, Rational::one());
        assert!(s.bound >= yes_value(&d));
    }

    #[test]
    fn deterministic_given_seed() {
        let fam = Arc::new(families::and(3));
        let atoms: Vec<_> = (0..8).map(|a| (0, a)).collect();
        let d = PairDistribution::uniform(fam, &atoms).unwrap();
        assert_eq!(no_sup_search(&d, 2048, 7), no_sup_search(&d, 2048, 7));
        // Constant kernel onto 1 satisfies AND surely.
        assert_eq!(no_sup_search(&d, 2048, 7).bound, Rational::one());
    }

    #[test]
    fn snapping_keeps_rows_stochastic() {
        let row = snap_row(&[0.3333, 0.3333, 0.3334], 1024);
        assert_eq!(row.iter().sum::<Rational>(), Rational::one());
        let row = snap_row(&[1.2, -0.1, 0.0], 1024);
        assert_eq!(row, vec![Rational::one(), Rational::zero(), Rational::zero()]);
    }

    #[test]
    fn projection() {
        let mut r = [0.7, 0.7];
        project_row(&mut r);
        assert!((r[0] - 0.5).abs() < 1e-12 && (r[1] - 0.5).abs() < 1e-12);
        let mut r = [2.0, -1.0, 0.0];
        project_row(&mut r);
        assert_eq!(r, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn composition_counts() {
        for (g, q) in [(3, 2), (4, 3), (2, 4)] {
            assert_eq!(compositions(g, q).len() as u128, count_compositions(g, q));
        }
    }
}
