//! Markov chains, nonnegative matrices and the Perron eigenvalue.
//!
//! The Rényi rate of an irreducible aperiodic chain is
//! `log λ_max(R) / (1 - α)` where `R` is the entrywise α-power of the
//! transition matrix. `λ_max` is found by power iteration and certified by
//! the Collatz–Wielandt bracket.

use rayon::prelude::*;

use crate::entropy::{check_base, EntropyValue, FiniteDistribution, SUM_TOLERANCE};
use crate::error::{Error, Result};

pub const PERRON_TOLERANCE: f64 = 1e-12;
pub const PERRON_MAX_ITER: usize = 100_000;
pub const STATIONARY_TOLERANCE: f64 = 1e-13;
const STATIONARY_MAX_ITER: usize = 1_000_000;
const PARALLEL_ROWS: usize = 4096;

/// Square nonnegative matrix with sparse rows; only positive entries are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct NonnegMatrix {
    rows: Vec<Vec<(usize, f64)>>,
}

impl NonnegMatrix {
    pub fn from_sparse(rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::DimensionMismatch("matrix has dimension 0".into()));
        }
        let mut clean = Vec::with_capacity(k);
        for (i, row) in rows.into_iter().enumerate() {
            let mut r: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (j, v) in row {
                if j >= k {
                    return Err(Error::DimensionMismatch(format!(
                        "row {i} references column {j} of a {k}x{k} matrix"
                    )));
                }
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidDistribution(format!(
                        "entry ({i}, {j}) = {v} is not a finite nonnegative number"
                    )));
                }
                if v > 0.0 {
                    r.push((j, v));
                }
            }
            r.sort_by_key(|e| e.0);
            if r.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::DimensionMismatch(format!("row {i} repeats a column")));
            }
            clean.push(r);
        }
        Ok(Self { rows: clean })
    }

    pub fn from_dense(m: &[Vec<f64>]) -> Result<Self> {
        let k = m.len();
        for (i, row) in m.iter().enumerate() {
            if row.len() != k {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {k}",
                    row.len()
                )));
            }
        }
        Self::from_sparse(
            m.iter()
                .map(|row| row.iter().copied().enumerate().collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let k = self.dim();
        self.rows
            .iter()
            .map(|row| {
                let mut d = vec![0.0; k];
                for &(j, v) in row {
                    d[j] = v;
                }
                d
            })
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::OutOfRange {
                value: c,
                lo: 0.0,
                hi: f64::INFINITY,
            });
        }
        Ok(Self {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(j, v)| (j, v * c)).collect())
                .collect(),
        })
    }

    /// `y = R x`. Each row is reduced sequentially, so the result does not
    /// depend on whether rows are processed in parallel.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let dot = |row: &Vec<(usize, f64)>| row.iter().map(|&(j, v)| v * x[j]).sum::<f64>();
        if self.dim() >= PARALLEL_ROWS {
            self.rows.par_iter().map(dot).collect()
        } else {
            self.rows.iter().map(dot).collect()
        }
    }

    /// `y = x R` (row vector times matrix).
    pub fn left_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                y[j] += x[i] * v;
            }
        }
        y
    }

    fn reach(&self, adjacency: &[Vec<usize>]) -> usize {
        let k = self.dim();
        let mut seen = vec![false; k];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count
    }

    /// Strong connectivity of the support digraph.
    pub fn is_irreducible(&self) -> bool {
        let k = self.dim();
        if k == 1 {
            return !self.rows[0].is_empty();
        }
        let fwd: Vec<Vec<usize>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.0).collect())
            .collect();
        let mut bwd = vec![Vec::new(); k];
        for (i, r) in self.rows.iter().enumerate() {
            for &(j, _) in r {
                bwd[j].push(i);
            }
        }
        self.reach(&fwd) == k && self.reach(&bwd) == k
    }

    /// Period of an irreducible matrix: gcd of `level(u) + 1 - level(v)` over edges.
    pub fn period(&self) -> Result<usize> {
        if !self.is_irreducible() {
            return Err(Error::Reducible);
        }
        let k = self.dim();
        let mut level = vec![usize::MAX; k];
        level[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.rows[u] {
                if level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g = 0usize;
        for (u, row) in self.rows.iter().enumerate() {
            for &(v, _) in row {
                let d = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs() as usize;
                g = gcd(g, d);
            }
        }
        Ok(g.max(1))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone)]
pub struct MarkovChain {
    transition: NonnegMatrix,
    initial: FiniteDistribution,
    irreducible: bool,
    period: Option<usize>,
}

impl MarkovChain {
    /// Row-stochastic check within 1e-12 per row. Without an explicit initial
    /// law the stationary law is used for irreducible chains, uniform otherwise.
    pub fn new(transition: NonnegMatrix, initial: Option<Vec<f64>>) -> Result<Self> {
        let k = transition.dim();
        for (i, row) in transition.rows().iter().enumerate() {
            let mut vals: Vec<f64> = row.iter().map(|e| e.1).collect();
            vals.sort_by(f64::total_cmp);
            let s: f64 = vals.iter().sum();
            if (s - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::InvalidDistribution(format!(
                    "transition row {} sums to {s}",
                    i + 1
                )));
            }
        }
        let irreducible = transition.is_irreducible();
        let period = if irreducible {
            Some(transition.period()?)
        } else {
            None
        };
        let mut chain = Self {
            transition,
            initial: FiniteDistribution::uniform(k)?,
            irreducible,
            period,
        };
        chain.initial = match initial {
            Some(init) => {
                if init.len() != k {
                    return Err(Error::DimensionMismatch(format!(
                        "initial law has {} entries for {k} states",
                        init.len()
                    )));
                }
                FiniteDistribution::new(init)
                    .map_err(|e| Error::InvalidDistribution(format!("initial law: {e}")))?
            }
            None if irreducible => stationary_distribution(&chain)?,
            None => chain.initial.clone(),
        };
        Ok(chain)
    }

    pub fn from_dense(p: &[Vec<f64>], initial: Option<Vec<f64>>) -> Result<Self> {
        Self::new(NonnegMatrix::from_dense(p)?, initial)
    }

    /// Symmetric binary chain with the given crossover probability.
    pub fn binary_symmetric(crossover: f64) -> Result<Self> {
        let q = crossover;
        Self::from_dense(&[vec![1.0 - q, q], vec![q, 1.0 - q]], None)
    }

    pub fn states(&self) -> usize {
        self.transition.dim()
    }

    pub fn transition(&self) -> &NonnegMatrix {
        &self.transition
    }

    pub fn initial(&self) -> &FiniteDistribution {
        &self.initial
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn is_aperiodic(&self) -> bool {
        self.period == Some(1)
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.transition
            .row(i)
            .binary_search_by_key(&j, |e| e.0)
            .map(|pos| self.transition.row(i)[pos].1)
            .unwrap_or(0.0)
    }

    fn require_ergodic(&self) -> Result<()> {
        if !self.irreducible {
            return Err(Error::Reducible);
        }
        match self.period {
            Some(1) => Ok(()),
            Some(d) => Err(Error::Periodic(d)),
            None => Err(Error::Reducible),
        }
    }
}

/// Entrywise `p_ij^α`. For `α ≤ 0` every entry of `P` must be positive.
pub fn alpha_power_matrix(p: &NonnegMatrix, alpha: f64) -> Result<NonnegMatrix> {
    if !alpha.is_finite() {
        return Err(Error::NonAdmissibleAlpha {
            alpha,
            reason: "order must be finite".into(),
        });
    }
    if alpha <= 0.0 && p.rows().iter().any(|r| r.len() != p.dim()) {
        return Err(Error::NonAdmissibleAlpha {
            alpha,
            reason: "matrix has zero entries".into(),
        });
    }
    let rows = p
        .rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|&(j, v)| (j, if alpha == 1.0 { v } else { v.powf(alpha) }))
                .collect()
        })
        .collect();
    Ok(NonnegMatrix { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerronResult {
    pub eigenvalue: f64,
    pub eigenvector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub lower: f64,
    pub upper: f64,
}

impl PerronResult {
    /// `max_{i,j} v_i / v_j`.
    pub fn eigenvector_ratio(&self) -> f64 {
        let max = self.eigenvector.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.eigenvector.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// `(C_U / C_L)^{2|α|(order+1)}`, the a priori bound on the eigenvector spread.
pub fn eigenvector_ratio_bound(c_lower: f64, c_upper: f64, alpha: f64, order: usize) -> f64 {
    (c_upper / c_lower).powf(2.0 * alpha.abs() * (order as f64 + 1.0))
}

pub fn collatz_wielandt_bounds(r: &NonnegMatrix, x: &[f64]) -> Result<(f64, f64)> {
    if x.len() != r.dim() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} for a {}x{} matrix",
            x.len(),
            r.dim(),
            r.dim()
        )));
    }
    if x.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositiveVector);
    }
    Ok(bracket(&r.mul_vec(x), x))
}

fn bracket(rx: &[f64], x: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (a, b) in rx.iter().zip(x) {
        let q = a / b;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    (lo, hi)
}

fn normalize(v: &mut [f64]) {
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
}

/// Power iteration from the all-ones vector. Periodic matrices are iterated
/// as `R + sI`, which has the same eigenvector and a dominant eigenvalue of
/// strictly larger modulus than the rest of the spectrum; the bracket is
/// always computed on `R` itself.
pub fn perron_eigen(r: &NonnegMatrix) -> Result<PerronResult> {
    let period = r.period()?;
    let k = r.dim();
    let shift = if period > 1 {
        let total: f64 = r.rows().iter().flatten().map(|e| e.1).sum();
        total / k as f64
    } else {
        0.0
    };
    let mut x = vec![1.0 / k as f64; k];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for it in 1..=PERRON_MAX_ITER {
        let mut y = r.mul_vec(&x);
        (lo, hi) = bracket(&y, &x);
        let mid = 0.5 * (lo + hi);
        if hi - lo <= PERRON_TOLERANCE * mid {
            return Ok(PerronResult {
                eigenvalue: mid,
                eigenvector: x,
                iterations: it,
                residual: 0.5 * (hi - lo),
                lower: lo,
                upper: hi,
            });
        }
        if shift > 0.0 {
            y.iter_mut().zip(&x).for_each(|(a, b)| *a += shift * b);
        }
        normalize(&mut y);
        x = y;
    }
    Err(Error::NoConvergence {
        iterations: PERRON_MAX_ITER,
        lower: lo,
        upper: hi,
    })
}

/// Power iteration on the transpose until `‖πP − π‖_1 ≤ 1e-13`; periodic
/// chains use the lazy chain `(P + I)/2`, which has the same stationary law.
pub fn stationary_distribution(mc: &MarkovChain) -> Result<FiniteDistribution> {
    if !mc.irreducible {
        return Err(Error::Reducible);
    }
    let lazy = mc.period != Some(1);
    let p = &mc.transition;
    let k = p.dim();
    let mut pi = vec![1.0 / k as f64; k];
    for _ in 0..STATIONARY_MAX_ITER {
        let next = p.left_mul_vec(&pi);
        let resid: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
        if resid <= STATIONARY_TOLERANCE {
            let mut out = next;
            normalize(&mut out);
            return FiniteDistribution::new(out);
        }
        pi = if lazy {
            next.iter().zip(&pi).map(|(a, b)| 0.5 * (a + b)).collect()
        } else {
            next
        };
        normalize(&mut pi);
    }
    Err(Error::NoConvergence {
        iterations: STATIONARY_MAX_ITER,
        lower: f64::NAN,
        upper: f64::NAN,
    })
}

pub fn renyi_rate_markov(mc: &MarkovChain, alpha: f64, base: f64) -> Result<EntropyValue> {
    check_base(base)?;
    if alpha == 1.0 {
        return shannon_rate_markov(mc, base);
    }
    mc.require_ergodic()?;
    let r = alpha_power_matrix(&mc.transition, alpha)?;
    let perron = perron_eigen(&r)?;
    Ok(EntropyValue {
        value: perron.eigenvalue.ln() / (1.0 - alpha) / base.ln(),
        alpha,
        base,
    })
}

pub fn shannon_rate_markov(mc: &MarkovChain, base: f64) -> Result<EntropyValue> {
    check_base(base)?;
    mc.require_ergodic()?;
    let pi = stationary_distribution(mc)?;
    let mut nats = 0.0;
    for (i, row) in mc.transition.rows().iter().enumerate() {
        let h: f64 = row.iter().map(|&(_, v)| -v * v.ln()).sum();
        nats += pi.probs()[i] * h;
    }
    Ok(EntropyValue {
        value: nats / base.ln(),
        alpha: 1.0,
        base,
    })
}
