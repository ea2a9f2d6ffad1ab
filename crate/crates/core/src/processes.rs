//! Finite-alphabet processes: iid, order-m Markov and hidden Markov.
//!
//! Every kind is driven through one interface: a [`PrefixState`] summarizes
//! the past, [`ProcessModel::next_distribution`] gives the conditional law of
//! the next symbol, and [`ProcessModel::advance`] consumes a symbol. Exhaustive
//! enumeration walks the prefix tree with this interface, so the cost of all
//! prefix lengths up to `n` is one pass over `A^n` leaves.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::entropy::{check_base, EntropyValue, FiniteDistribution, LogSumExp, SUM_TOLERANCE};
use crate::error::{Error, Result};
use crate::fit::{fit_polynomial, ConvergenceReport};
use crate::spectral::{MarkovChain, NonnegMatrix};

pub type Symbol = u8;

/// Default cap on the number of enumerated sequences.
pub const ENUMERATION_CAP: u64 = 1 << 24;

const SPLIT_LEAVES: u64 = 64;
const FORGETTING_FLOOR: f64 = 1e-13;

#[derive(Debug, Clone)]
pub enum ProcessKind {
    Iid {
        marginal: FiniteDistribution,
    },
    Markov {
        order: usize,
        /// `A^order` rows of length `A`, histories indexed lexicographically.
        table: Vec<Vec<f64>>,
        /// Law of the first `order` symbols, indexed lexicographically.
        initial: Vec<f64>,
    },
    Hidden {
        chain: MarkovChain,
        /// `|X|` rows of length `A`.
        emission: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone)]
pub struct ProcessModel {
    alphabet: usize,
    kind: ProcessKind,
    /// Markov kind: marginals of the initial block law on prefixes of length
    /// `0..=order`.
    block_prefix: Vec<Vec<f64>>,
}

/// Summary of a prefix sufficient to continue it.
#[derive(Debug, Clone, PartialEq)]
pub enum PrefixState {
    Iid,
    Markov { len: usize, context: usize },
    Hidden { predictive: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub cap: u64,
    pub parallel: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            cap: ENUMERATION_CAP,
            parallel: true,
        }
    }
}

fn check_row(row: &[f64], what: &str) -> Result<()> {
    if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{what} has a negative or non-finite entry"
        )));
    }
    let mut v = row.to_vec();
    v.sort_by(f64::total_cmp);
    let s: f64 = v.iter().sum();
    if (s - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidDistribution(format!("{what} sums to {s}")));
    }
    Ok(())
}

fn pow_usize(a: usize, n: usize) -> usize {
    a.checked_pow(n as u32).expect("alphabet power overflows usize")
}

impl ProcessModel {
    pub fn iid(marginal: FiniteDistribution) -> Result<Self> {
        if marginal.len() > 256 {
            return Err(Error::DimensionMismatch("alphabet larger than 256".into()));
        }
        Ok(Self {
            alphabet: marginal.len(),
            kind: ProcessKind::Iid { marginal },
            block_prefix: Vec::new(),
        })
    }

    /// Order-`order` Markov source. Without an initial block law the
    /// stationary law of the block chain is used (uniform if it is reducible).
    pub fn markov(
        alphabet: usize,
        order: usize,
        table: Vec<Vec<f64>>,
        initial: Option<Vec<f64>>,
    ) -> Result<Self> {
        if alphabet == 0 || alphabet > 256 {
            return Err(Error::DimensionMismatch(format!(
                "alphabet size {alphabet} not in 1..=256"
            )));
        }
        if order == 0 {
            return Err(Error::DimensionMismatch(
                "Markov order must be at least 1; use the iid kind".into(),
            ));
        }
        let states = pow_usize(alphabet, order);
        if table.len() != states {
            return Err(Error::DimensionMismatch(format!(
                "order-{order} table needs {states} rows, got {}",
                table.len()
            )));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != alphabet {
                return Err(Error::DimensionMismatch(format!(
                    "table row {} has {} entries, expected {alphabet}",
                    i + 1,
                    row.len()
                )));
            }
            check_row(row, &format!("table row {}", i + 1))?;
        }
        let initial = match initial {
            Some(init) => {
                if init.len() != states {
                    return Err(Error::DimensionMismatch(format!(
                        "initial block law needs {states} entries, got {}",
                        init.len()
                    )));
                }
                check_row(&init, "initial block law")?;
                init
            }
            None => {
                let lift = block_chain(alphabet, order, &table)?;
                lift.initial().probs().to_vec()
            }
        };
        let mut block_prefix = vec![initial.clone()];
        for _ in 0..order {
            let last = block_prefix.last().unwrap();
            let shorter: Vec<f64> = last
                .chunks(alphabet)
                .map(|c| c.iter().sum::<f64>())
                .collect();
            block_prefix.push(shorter);
        }
        block_prefix.reverse();
        Ok(Self {
            alphabet,
            kind: ProcessKind::Markov {
                order,
                table,
                initial,
            },
            block_prefix,
        })
    }

    pub fn hmm(chain: MarkovChain, emission: Vec<Vec<f64>>) -> Result<Self> {
        if emission.len() != chain.states() {
            return Err(Error::DimensionMismatch(format!(
                "emission has {} rows for {} hidden states",
                emission.len(),
                chain.states()
            )));
        }
        let alphabet = emission.first().map_or(0, |r| r.len());
        if alphabet == 0 || alphabet > 256 {
            return Err(Error::DimensionMismatch(format!(
                "alphabet size {alphabet} not in 1..=256"
            )));
        }
        for (i, row) in emission.iter().enumerate() {
            if row.len() != alphabet {
                return Err(Error::DimensionMismatch(format!(
                    "emission row {} has {} entries, expected {alphabet}",
                    i + 1,
                    row.len()
                )));
            }
            check_row(row, &format!("emission row {}", i + 1))?;
        }
        Ok(Self {
            alphabet,
            kind: ProcessKind::Hidden { chain, emission },
            block_prefix: Vec::new(),
        })
    }

    /// Order-1 symmetric binary Markov source.
    pub fn binary_markov(crossover: f64) -> Result<Self> {
        let q = crossover;
        Self::markov(2, 1, vec![vec![1.0 - q, q], vec![q, 1.0 - q]], None)
    }

    /// Symmetric binary hidden chain observed through a binary symmetric channel.
    pub fn binary_hmm(crossover: f64, flip: f64) -> Result<Self> {
        let chain = MarkovChain::binary_symmetric(crossover)?;
        Self::hmm(chain, vec![vec![1.0 - flip, flip], vec![flip, 1.0 - flip]])
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn kind(&self) -> &ProcessKind {
        &self.kind
    }

    /// Hidden chain irreducible and aperiodic, emissions strictly positive.
    /// Always true for the other kinds.
    pub fn satisfies_hmm_conditions(&self) -> bool {
        match &self.kind {
            ProcessKind::Hidden { chain, emission } => {
                chain.is_irreducible()
                    && chain.is_aperiodic()
                    && emission.iter().flatten().all(|&e| e > 0.0)
            }
            _ => true,
        }
    }

    pub fn start(&self) -> PrefixState {
        match &self.kind {
            ProcessKind::Iid { .. } => PrefixState::Iid,
            ProcessKind::Markov { .. } => PrefixState::Markov { len: 0, context: 0 },
            ProcessKind::Hidden { chain, .. } => PrefixState::Hidden {
                predictive: chain.initial().probs().to_vec(),
            },
        }
    }

    /// Conditional law of the next symbol given the summarized prefix.
    pub fn next_distribution(&self, state: &PrefixState) -> Vec<f64> {
        match (&self.kind, state) {
            (ProcessKind::Iid { marginal }, _) => marginal.probs().to_vec(),
            (ProcessKind::Markov { order, table, .. }, PrefixState::Markov { len, context }) => {
                if len < order {
                    let denom = self.block_prefix[*len][*context];
                    let next = &self.block_prefix[len + 1];
                    (0..self.alphabet)
                        .map(|y| {
                            if denom > 0.0 {
                                next[context * self.alphabet + y] / denom
                            } else {
                                0.0
                            }
                        })
                        .collect()
                } else {
                    table[*context].clone()
                }
            }
            (ProcessKind::Hidden { emission, .. }, PrefixState::Hidden { predictive }) => {
                (0..self.alphabet)
                    .map(|y| {
                        predictive
                            .iter()
                            .zip(emission)
                            .map(|(f, e)| f * e[y])
                            .sum()
                    })
                    .collect()
            }
            _ => unreachable!("prefix state does not belong to this process"),
        }
    }

    /// Extends the prefix by `symbol`, which must have positive conditional probability.
    pub fn advance(&self, state: &PrefixState, symbol: Symbol) -> PrefixState {
        let y = symbol as usize;
        match (&self.kind, state) {
            (ProcessKind::Iid { .. }, _) => PrefixState::Iid,
            (ProcessKind::Markov { order, .. }, PrefixState::Markov { len, context }) => {
                if len < order {
                    PrefixState::Markov {
                        len: len + 1,
                        context: context * self.alphabet + y,
                    }
                } else {
                    let keep = pow_usize(self.alphabet, order - 1);
                    PrefixState::Markov {
                        len: *len,
                        context: (context % keep) * self.alphabet + y,
                    }
                }
            }
            (ProcessKind::Hidden { chain, emission }, PrefixState::Hidden { predictive }) => {
                let mut post: Vec<f64> = predictive
                    .iter()
                    .zip(emission)
                    .map(|(f, e)| f * e[y])
                    .collect();
                let c: f64 = post.iter().sum();
                post.iter_mut().for_each(|g| *g /= c);
                PrefixState::Hidden {
                    predictive: chain.transition().left_mul_vec(&post),
                }
            }
            _ => unreachable!("prefix state does not belong to this process"),
        }
    }

    fn check_symbols(&self, y: &[Symbol]) -> Result<()> {
        for &s in y {
            if s as usize >= self.alphabet {
                return Err(Error::SymbolOutOfRange {
                    symbol: s as usize,
                    alphabet: self.alphabet,
                });
            }
        }
        Ok(())
    }

    /// Natural log of the joint probability, accumulated one conditional at a time.
    pub fn log_joint_probability(&self, y: &[Symbol]) -> Result<f64> {
        self.check_symbols(y)?;
        Ok(self.log_joint_with_state(y).0)
    }

    fn log_joint_with_state(&self, y: &[Symbol]) -> (f64, PrefixState) {
        let mut state = self.start();
        let mut logp = 0.0;
        for &s in y {
            let c = self.next_distribution(&state)[s as usize];
            if c <= 0.0 {
                return (f64::NEG_INFINITY, state);
            }
            logp += c.ln();
            state = self.advance(&state, s);
        }
        (logp, state)
    }

    pub fn joint_probability(&self, y: &[Symbol]) -> Result<f64> {
        Ok(self.log_joint_probability(y)?.exp())
    }

    /// `p(next | history)`.
    pub fn conditional_probability(&self, history: &[Symbol], next: Symbol) -> Result<f64> {
        self.check_symbols(history)?;
        self.check_symbols(&[next])?;
        let (logp, state) = self.log_joint_with_state(history);
        if logp == f64::NEG_INFINITY {
            return Err(Error::ZeroHistory);
        }
        Ok(self.next_distribution(&state)[next as usize])
    }

    fn check_cap(&self, n: usize, cap: u64) -> Result<()> {
        let count = (self.alphabet as f64).powi(n as i32);
        if count > cap as f64 {
            return Err(Error::EnumerationTooLarge { count, cap });
        }
        Ok(())
    }

    /// Depth-first walk of the prefix tree below `state`. The visitor sees the
    /// path, its log probability and the last conditional probability; nodes
    /// of zero probability are visited but not expanded.
    fn walk<F: FnMut(&[Symbol], f64, f64)>(
        &self,
        path: &mut Vec<Symbol>,
        state: &PrefixState,
        logp: f64,
        max_depth: usize,
        visit: &mut F,
    ) {
        let dist = self.next_distribution(state);
        for (y, &c) in dist.iter().enumerate() {
            path.push(y as Symbol);
            if c > 0.0 {
                let lp = logp + c.ln();
                visit(path, lp, c);
                if path.len() < max_depth {
                    let next = self.advance(state, y as Symbol);
                    self.walk(path, &next, lp, max_depth, visit);
                }
            } else {
                visit(path, f64::NEG_INFINITY, 0.0);
            }
            path.pop();
        }
    }

    /// Natural-log probabilities of all `A^n` blocks in lexicographic order
    /// (`-inf` for impossible blocks).
    pub fn block_log_probs(&self, n: usize, cap: u64) -> Result<Vec<f64>> {
        self.check_cap(n, cap)?;
        let a = self.alphabet;
        let mut out = vec![f64::NEG_INFINITY; pow_usize(a, n)];
        if n == 0 {
            out[0] = 0.0;
            return Ok(out);
        }
        let mut path = Vec::with_capacity(n);
        self.walk(&mut path, &self.start(), 0.0, n, &mut |p, lp, _| {
            if p.len() == n {
                out[lex_index(p, a)] = lp;
            }
        });
        Ok(out)
    }
}

pub(crate) fn lex_index(path: &[Symbol], a: usize) -> usize {
    path.iter().fold(0, |acc, &s| acc * a + s as usize)
}

/// Block chain of an order-m table: state `u` moves to `u[1..] ‖ y` with
/// probability `table[u][y]`.
pub(crate) fn block_chain(alphabet: usize, order: usize, table: &[Vec<f64>]) -> Result<MarkovChain> {
    block_chain_with_initial(alphabet, order, table, None)
}

pub(crate) fn block_chain_with_initial(
    alphabet: usize,
    order: usize,
    table: &[Vec<f64>],
    initial: Option<Vec<f64>>,
) -> Result<MarkovChain> {
    let keep = pow_usize(alphabet, order - 1);
    let rows = table
        .iter()
        .enumerate()
        .map(|(u, row)| {
            row.iter()
                .enumerate()
                .map(|(y, &p)| ((u % keep) * alphabet + y, p))
                .collect()
        })
        .collect();
    MarkovChain::new(NonnegMatrix::from_sparse(rows)?, initial)
}

/// Per-depth accumulator of `Σ p^α` (log domain) or `−Σ p ln p`.
#[derive(Debug, Clone, Copy)]
struct PowerSum {
    lse: LogSumExp,
    shannon: f64,
}

impl PowerSum {
    fn new() -> Self {
        Self {
            lse: LogSumExp::new(),
            shannon: 0.0,
        }
    }

    fn push(&mut self, alpha: f64, logp: f64) {
        if alpha == 1.0 {
            self.shannon -= logp.exp() * logp;
        } else {
            self.lse.push(alpha * logp);
        }
    }

    fn merge(&mut self, other: &PowerSum) {
        self.lse.merge(&other.lse);
        self.shannon += other.shannon;
    }

    /// Entropy in nats.
    fn entropy(&self, alpha: f64) -> f64 {
        if alpha == 1.0 {
            self.shannon
        } else {
            self.lse.value() / (1.0 - alpha)
        }
    }
}

/// Pairwise reduction in a fixed tree shape.
fn tree_reduce(mut items: Vec<PowerSum>) -> PowerSum {
    if items.is_empty() {
        return PowerSum::new();
    }
    while items.len() > 1 {
        items = items
            .chunks(2)
            .map(|c| {
                let mut a = c[0];
                if let Some(b) = c.get(1) {
                    a.merge(b);
                }
                a
            })
            .collect();
    }
    items[0]
}

/// `H_α(Y_1^n)` in nats for every `n = 1..=n_max`.
///
/// The prefix tree is split at the shallowest depth with at least 64 nodes.
/// Each subtree is accumulated independently and the per-depth partial sums
/// are merged in a fixed binary tree, so the result is bit-identical whether
/// subtrees run serially or on a thread pool.
pub fn prefix_entropies_nats(
    p: &ProcessModel,
    n_max: usize,
    alpha: f64,
    opts: EnumerationOptions,
) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::DimensionMismatch("prefix length must be at least 1".into()));
    }
    if !alpha.is_finite() {
        return Err(Error::NonAdmissibleAlpha {
            alpha,
            reason: "order must be finite".into(),
        });
    }
    p.check_cap(n_max, opts.cap)?;
    let a = p.alphabet as u64;
    let mut split = 1;
    while split < n_max && a.pow(split as u32) < SPLIT_LEAVES {
        split += 1;
    }

    let mut zero_seen = false;
    let mut top = vec![PowerSum::new(); split];
    let mut roots: Vec<(f64, PrefixState)> = Vec::new();
    {
        let mut path = Vec::new();
        let mut states: Vec<PrefixState> = vec![p.start()];
        walk_with_states(p, &mut path, &mut states, 0.0, split, &mut |path, lp, st| {
            if lp == f64::NEG_INFINITY {
                zero_seen = true;
                return;
            }
            top[path.len() - 1].push(alpha, lp);
            if path.len() == split && split < n_max {
                roots.push((lp, st.clone()));
            }
        });
    }

    let depth_below = n_max - split;
    let run = |(lp, st): &(f64, PrefixState)| -> (Vec<PowerSum>, bool) {
        let mut acc = vec![PowerSum::new(); depth_below];
        let mut zero = false;
        let mut path = Vec::new();
        p.walk(&mut path, st, *lp, depth_below, &mut |path, lp, _| {
            if lp == f64::NEG_INFINITY {
                zero = true;
            } else {
                acc[path.len() - 1].push(alpha, lp);
            }
        });
        (acc, zero)
    };
    let parts: Vec<(Vec<PowerSum>, bool)> = if opts.parallel {
        roots.par_iter().map(run).collect()
    } else {
        roots.iter().map(run).collect()
    };
    zero_seen |= parts.iter().any(|x| x.1);
    if alpha <= 0.0 && zero_seen {
        return Err(Error::NonAdmissibleAlpha {
            alpha,
            reason: "some sequence has zero probability".into(),
        });
    }

    let mut out: Vec<f64> = top.iter().map(|s| s.entropy(alpha)).collect();
    for d in 0..depth_below {
        let sums = parts.iter().map(|x| x.0[d]).collect();
        out.push(tree_reduce(sums).entropy(alpha));
    }
    Ok(out)
}

/// Like `walk` but hands the visitor the prefix state of each positive node.
fn walk_with_states<F: FnMut(&[Symbol], f64, &PrefixState)>(
    p: &ProcessModel,
    path: &mut Vec<Symbol>,
    states: &mut Vec<PrefixState>,
    logp: f64,
    max_depth: usize,
    visit: &mut F,
) {
    let state = states.last().unwrap().clone();
    let dist = p.next_distribution(&state);
    for (y, &c) in dist.iter().enumerate() {
        path.push(y as Symbol);
        if c > 0.0 {
            let lp = logp + c.ln();
            let next = p.advance(&state, y as Symbol);
            visit(path, lp, &next);
            if path.len() < max_depth {
                states.push(next);
                walk_with_states(p, path, states, lp, max_depth, visit);
                states.pop();
            }
        } else {
            visit(path, f64::NEG_INFINITY, &state);
        }
        path.pop();
    }
}

pub fn renyi_entropy_prefix_with(
    p: &ProcessModel,
    n: usize,
    alpha: f64,
    base: f64,
    opts: EnumerationOptions,
) -> Result<EntropyValue> {
    check_base(base)?;
    let nats = prefix_entropies_nats(p, n, alpha, opts)?;
    Ok(EntropyValue {
        value: nats[n - 1] / base.ln(),
        alpha,
        base,
    })
}

/// `H_α(Y_1^n)` by exhaustive enumeration of all `A^n` sequences.
pub fn renyi_entropy_prefix(p: &ProcessModel, n: usize, alpha: f64, base: f64) -> Result<EntropyValue> {
    renyi_entropy_prefix_with(p, n, alpha, base, EnumerationOptions::default())
}

/// Estimates `H_α(Y_1^n)/n` for `n = 1..=n_max` with a polynomial-rate fit.
pub fn renyi_rate_sequence(
    p: &ProcessModel,
    n_max: usize,
    alpha: f64,
    base: f64,
) -> Result<ConvergenceReport> {
    check_base(base)?;
    let nats = prefix_entropies_nats(p, n_max, alpha, EnumerationOptions::default())?;
    let estimates: Vec<(usize, f64)> = nats
        .iter()
        .enumerate()
        .map(|(i, h)| (i + 1, h / base.ln() / (i + 1) as f64))
        .collect();
    Ok(fit_polynomial(&estimates))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionConstants {
    pub c_lower: f64,
    pub c_upper: f64,
    /// Envelope constant: `c_forget · rho_forget^n ≥ forgetting[n]` for every
    /// fitted `n ≥ 1`. Both are 0 when the forgetting curve vanishes.
    pub c_forget: f64,
    pub rho_forget: f64,
    pub alpha: f64,
    pub horizon: usize,
    /// `forgetting[n]`: largest gap between α-powered conditionals whose
    /// histories share their most recent `n` symbols and predict the same symbol.
    pub forgetting: Vec<f64>,
}

impl ConditionConstants {
    /// Whether the estimates satisfy `ρ_F < (C_L/C_U)^{2α}`.
    pub fn exponential_regime(&self) -> bool {
        self.c_lower > 0.0 && self.rho_forget < (self.c_lower / self.c_upper).powf(2.0 * self.alpha)
    }
}

/// Empirical constants of uniform boundedness and exponential forgetting over
/// all histories of length below `horizon`.
pub fn estimate_constants(p: &ProcessModel, horizon: usize, alpha: f64) -> Result<ConditionConstants> {
    if horizon == 0 {
        return Err(Error::DimensionMismatch("horizon must be at least 1".into()));
    }
    p.check_cap(horizon, ENUMERATION_CAP)?;
    let a = p.alphabet;
    let mut c_lower = f64::INFINITY;
    let mut c_upper = f64::NEG_INFINITY;
    // ranges[l-1][suffix index] = (min, max) of p^α over nodes ending in that length-l suffix
    let mut ranges: Vec<Vec<(f64, f64)>> = (1..=horizon)
        .map(|l| vec![(f64::INFINITY, f64::NEG_INFINITY); pow_usize(a, l)])
        .collect();
    let mut path = Vec::with_capacity(horizon);
    p.walk(&mut path, &p.start(), 0.0, horizon, &mut |path, _, c| {
        c_lower = c_lower.min(c);
        c_upper = c_upper.max(c);
        if c == 0.0 {
            return;
        }
        let v = c.powf(alpha);
        let mut idx = 0usize;
        let mut scale = 1usize;
        for l in 1..=path.len() {
            idx += path[path.len() - l] as usize * scale;
            scale *= a;
            let r = &mut ranges[l - 1][idx];
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    });
    let forgetting: Vec<f64> = ranges
        .iter()
        .map(|level| {
            level
                .iter()
                .filter(|r| r.0 <= r.1)
                .map(|r| r.1 - r.0)
                .fold(0.0, f64::max)
        })
        .collect();

    let points: Vec<(f64, f64)> = forgetting
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &d)| d > FORGETTING_FLOOR)
        .map(|(n, &d)| (n as f64, d))
        .collect();
    let (c_forget, rho_forget) = match points.len() {
        0 => (0.0, 0.0),
        1 => (points[0].1, 0.0),
        _ => {
            let k = points.len() as f64;
            let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
            let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / k;
            let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
            let rho = (sxy / sxx).exp();
            let c = points
                .iter()
                .map(|p| p.1 / rho.powf(p.0))
                .fold(0.0, f64::max);
            (c, rho)
        }
    };
    Ok(ConditionConstants {
        c_lower,
        c_upper,
        c_forget,
        rho_forget,
        alpha,
        horizon,
        forgetting,
    })
}

/// Inverse-CDF sampling of `n` symbols from a seeded ChaCha stream.
pub fn sample_path(p: &ProcessModel, n: usize, seed: u64) -> Vec<Symbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = p.start();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let dist = p.next_distribution(&state);
        let u: f64 = rng.gen();
        let mut cum = 0.0;
        let mut pick = None;
        for (y, &c) in dist.iter().enumerate() {
            cum += c;
            if c > 0.0 {
                pick = Some(y);
                if u < cum {
                    break;
                }
            }
        }
        let y = pick.expect("conditional law has no positive atom") as Symbol;
        out.push(y);
        state = p.advance(&state, y);
    }
    out
}
