//! Markov approximations of a process and their Rényi rates.
//!
//! The order-m approximation keeps the source's `(m+1)`-dimensional
//! marginals. Recoded as a first-order chain on `A^m` blocks, its rate is a
//! Perron eigenvalue problem.

use serde::Serialize;

use crate::entropy::{check_base, EntropyValue};
use crate::error::{Error, Result};
use crate::fit::{fit_geometric, ConvergenceReport};
use crate::processes::{block_chain_with_initial, ProcessModel, Symbol, ENUMERATION_CAP};
use crate::spectral::{
    alpha_power_matrix, perron_eigen, renyi_rate_markov, MarkovChain, NonnegMatrix, PerronResult,
};

#[derive(Debug, Clone, PartialEq)]
pub struct MarkovApproximation {
    alphabet: usize,
    order: usize,
    table: Vec<Vec<f64>>,
    initial: Vec<f64>,
}

impl MarkovApproximation {
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `p^(m)(y | x_1^m)`, rows indexed lexicographically by history.
    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    /// `p(x_1^m)`.
    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Largest gap between the assembled `(m+1)`-joints and the source's.
    pub fn max_marginal_error(&self, p: &ProcessModel) -> Result<f64> {
        let joints = p.block_log_probs(self.order + 1, ENUMERATION_CAP)?;
        let a = self.alphabet;
        let mut worst: f64 = 0.0;
        for (idx, lp) in joints.iter().enumerate() {
            let assembled = self.initial[idx / a] * self.table[idx / a][idx % a];
            worst = worst.max((assembled - lp.exp()).abs());
        }
        Ok(worst)
    }
}

#[derive(Debug, Clone)]
pub struct BlockLiftedChain {
    alphabet: usize,
    order: usize,
    chain: MarkovChain,
}

impl BlockLiftedChain {
    pub fn chain(&self) -> &MarkovChain {
        &self.chain
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Structurally allowed successors of every state.
    pub fn successors_per_state(&self) -> usize {
        self.alphabet
    }

    /// Successor of block `u` after emitting `y`.
    pub fn successor(&self, u: usize, y: Symbol) -> usize {
        let keep = self.alphabet.pow(self.order as u32 - 1);
        (u % keep) * self.alphabet + y as usize
    }
}

fn check_cap(alphabet: usize, n: usize) -> Result<()> {
    let count = (alphabet as f64).powi(n as i32);
    if count > ENUMERATION_CAP as f64 {
        return Err(Error::EnumerationTooLarge {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

fn unindex(mut idx: usize, a: usize, len: usize) -> Vec<Symbol> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % a) as Symbol;
        idx /= a;
    }
    out
}

/// Order-`m` Markov approximation from exact joints.
pub fn markov_approximation(p: &ProcessModel, m: usize) -> Result<MarkovApproximation> {
    if m == 0 {
        return Err(Error::DimensionMismatch("approximation order must be at least 1".into()));
    }
    let a = p.alphabet();
    check_cap(a, m + 1)?;
    let hist = p.block_log_probs(m, ENUMERATION_CAP)?;
    let full = p.block_log_probs(m + 1, ENUMERATION_CAP)?;
    let mut table = Vec::with_capacity(hist.len());
    for (u, &lh) in hist.iter().enumerate() {
        if lh == f64::NEG_INFINITY {
            return Err(Error::ZeroHistoryProbability {
                history: unindex(u, a, m),
            });
        }
        let mut row: Vec<f64> = (0..a).map(|y| (full[u * a + y] - lh).exp()).collect();
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
        table.push(row);
    }
    let initial = hist.iter().map(|l| l.exp()).collect();
    Ok(MarkovApproximation {
        alphabet: a,
        order: m,
        table,
        initial,
    })
}

/// First-order chain on `A^m` blocks with the approximation's initial block law.
pub fn block_lift(a: &MarkovApproximation) -> Result<BlockLiftedChain> {
    let chain = block_chain_with_initial(a.alphabet, a.order, &a.table, Some(a.initial.clone()))?;
    Ok(BlockLiftedChain {
        alphabet: a.alphabet,
        order: a.order,
        chain,
    })
}

pub fn renyi_rate_approx(a: &MarkovApproximation, alpha: f64, base: f64) -> Result<EntropyValue> {
    renyi_rate_markov(block_lift(a)?.chain(), alpha, base)
}

/// Perron data of the α-powered block-lifted chain.
pub fn lift_perron(a: &MarkovApproximation, alpha: f64) -> Result<PerronResult> {
    let lift = block_lift(a)?;
    perron_eigen(&alpha_power_matrix(lift.chain().transition(), alpha)?)
}

/// `R̃^(m)`: the order-m α-powered matrix written on the `A^{m+1}` state space.
pub fn upscaled_matrix(a: &MarkovApproximation, alpha: f64) -> Result<NonnegMatrix> {
    let al = a.alphabet;
    let states = al.pow(a.order as u32 + 1);
    let keep = al.pow(a.order as u32);
    let rows = (0..states)
        .map(|u| {
            (0..al)
                .map(|y| ((u % keep) * al + y, a.table[u % keep][y].powf(alpha)))
                .collect()
        })
        .collect();
    NonnegMatrix::from_sparse(rows)
}

/// Rates of the approximations `m = 1..=m_max` with a geometric fit on
/// successive differences.
pub fn approx_rate_sequence(
    p: &ProcessModel,
    alpha: f64,
    m_max: usize,
    base: f64,
) -> Result<ConvergenceReport> {
    check_base(base)?;
    check_cap(p.alphabet(), m_max + 1)?;
    let mut estimates = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let a = markov_approximation(p, m)?;
        estimates.push((m, renyi_rate_approx(&a, alpha, base)?.value));
    }
    Ok(fit_geometric(&estimates))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaDiagnostic {
    pub max_abs_entry: f64,
    /// Structurally allowed entries per row; the minimum over rows.
    pub positive_entries_per_row: usize,
}

/// `Δ_m = R^(m+1) − R̃^(m)` on the `A^{m+1}` state space.
pub fn delta_matrix_diagnostic(p: &ProcessModel, m: usize, alpha: f64) -> Result<DeltaDiagnostic> {
    let al = p.alphabet();
    check_cap(al, m + 2)?;
    let lo = markov_approximation(p, m)?;
    let hi = markov_approximation(p, m + 1)?;
    let keep = al.pow(m as u32);
    let mut max_abs: f64 = 0.0;
    let mut per_row = usize::MAX;
    for (u, row) in hi.table.iter().enumerate() {
        let mut count = 0;
        for y in 0..al {
            let r1 = row[y].powf(alpha);
            let r0 = lo.table[u % keep][y].powf(alpha);
            if r1 > 0.0 || r0 > 0.0 {
                count += 1;
            }
            max_abs = max_abs.max((r1 - r0).abs());
        }
        per_row = per_row.min(count);
    }
    Ok(DeltaDiagnostic {
        max_abs_entry: max_abs,
        positive_entries_per_row: per_row,
    })
}
