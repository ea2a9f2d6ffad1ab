//! The gadget sequence `G(m) = {L(m), R(m)}` whose final process is
//! stationary, ergodic, has Shannon rate above 1/2 and Rényi rate 0 for
//! every `α > 1`.
//!
//! Each level carries a [`LabelSummary`] of `R(m)` (always), the pooled label
//! distribution of `G(m)` (while it fits under `label_cap`), interval
//! supports (while they fit under `interval_cap`) and the column-measure
//! classes used for ε-independence (while they fit under `histogram_cap`).
//! All entropies are in bits.

mod independence;
mod params;
mod summary;

use std::f64::consts::LN_2;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::cutstack::{
    epsilon_independence, m_fold_ics, self_stack, Column, Gadget, LabelDistribution, LabelGadget,
    RationalInterval,
};
use crate::entropy::{binary_entropy_nats, renyi_entropy, FiniteDistribution};
use crate::error::{Error, Result};
use crate::rational::{format, int, one, to_f64, Rational};

pub use independence::{epsilon_lower_bound, fold_classes, reduced_epsilon, MeasureClass};
pub use params::{
    g1_entropy_bits, property_a_holds, property_a_values, renyi_upper_bound, search_faithful,
    tail_upper_bound, ConstructionParams, IndependencePolicy, Mode, DEFAULT_FOLD_CAP,
};
pub use summary::{BlockMap, LabelSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonMethod {
    Intervals,
    Binomial,
}

/// How `M_m` was picked and what ε it achieved against `ε_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldChoice {
    pub fold: u64,
    pub target: f64,
    pub epsilon: Option<f64>,
    pub method: Option<EpsilonMethod>,
    /// ε was evaluated and met the target.
    pub certified: bool,
    /// Lower bound on ε at the fold cap; above `target` it shows that no
    /// fold under the cap works.
    pub lower_bound_at_cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalLevel {
    pub left: Column,
    pub right: Gadget,
}

#[derive(Debug, Clone)]
pub struct ConstructionLevel {
    pub m: usize,
    pub height: BigUint,
    pub beta: Rational,
    pub alpha: Rational,
    pub intervals: Option<IntervalLevel>,
    /// Pooled label distribution of `G(m)`.
    pub labels: Option<LabelGadget>,
    /// `R(m)`.
    pub summary: LabelSummary,
    /// Column-measure classes of `R(m)`.
    pub classes: Option<Vec<MeasureClass>>,
    /// `H(G(m))` from the summary.
    pub entropy: f64,
    /// `H(G(1)) − Σ_{j=2}^{m} H_b(β_j)`.
    pub entropy_lower_bound: f64,
    /// The fold that produced this level from the previous one.
    pub fold: Option<FoldChoice>,
}

impl ConstructionLevel {
    pub fn left_measure(&self) -> &Rational {
        &self.beta
    }

    pub fn height_f64(&self) -> f64 {
        self.height.to_f64().unwrap_or(f64::INFINITY)
    }

    /// `Σ_C p_k(a|C) λ(C)` over `G(m)`.
    pub fn block_distribution(&self, k: usize) -> Result<BlockMap> {
        if k == 0 || k > self.summary.k_max() {
            return Err(Error::BlockTooLong { k, height: self.summary.k_max() });
        }
        Ok(self.summary.block_distribution(to_f64(&self.beta), k))
    }
}

fn ones(n: usize) -> Vec<u8> {
    vec![1; n]
}

fn binary_label(value: u64, bits: usize) -> Vec<u8> {
    (0..bits).rev().map(|b| ((value >> b) & 1) as u8).collect()
}

/// `G(1)`: `2^{2l_1/3}` columns of height `l_1` and width
/// `1/(l_1 2^{2l_1/3})`. `L(1)` is all ones; `R(1)` carries the binary
/// expansions of `0, 1, …` except that its last column is all ones too.
pub fn build_g1(params: &ConstructionParams) -> Result<ConstructionLevel> {
    let l1 = params.l1;
    if l1 == 0 || l1 % 3 != 0 {
        return Err(Error::OutOfRange { value: l1 as f64, lo: 3.0, hi: f64::INFINITY });
    }
    if params.k_max == 0 || params.k_max > l1 {
        return Err(Error::BlockTooLong { k: params.k_max, height: l1 });
    }
    let n_cols = params.g1_columns();
    let col_measure = Rational::new(BigInt::one(), BigInt::from(n_cols));
    let beta = params.beta(1);
    debug_assert_eq!(beta, col_measure);

    let r_label = |r: u64| if r + 2 == n_cols { ones(l1) } else { binary_label(r, l1) };

    let intervals = if n_cols <= params.interval_cap {
        let w = Rational::new(BigInt::one(), BigInt::from(n_cols) * BigInt::from(l1));
        let column = |c: u64, label: Vec<u8>| -> Result<Column> {
            let levels = (0..l1)
                .map(|i| RationalInterval::new(&w * int(c * l1 as u64 + i as u64), w.clone()))
                .collect::<Result<Vec<_>>>()?;
            Column::from_intervals(levels, label)
        };
        let left = column(0, ones(l1))?;
        let right = (0..n_cols - 1)
            .map(|r| column(r + 1, r_label(r)))
            .collect::<Result<Vec<_>>>()?;
        Some(IntervalLevel { left, right: Gadget::new(right)? })
    } else {
        None
    };

    let mut r_measures = LabelDistribution::new();
    for r in 0..n_cols - 1 {
        r_measures.insert(r_label(r), col_measure.clone());
    }
    let r_labels = LabelGadget::new(l1, r_measures)?;
    let summary = LabelSummary::from_labels(&r_labels, params.k_max);
    let labels = if n_cols <= params.label_cap {
        Some(r_labels.union(&LabelGadget::new(l1, [(ones(l1), beta.clone())].into())?)?)
    } else {
        None
    };
    let classes = Some(vec![MeasureClass::new(1.0 / n_cols as f64, (n_cols - 1) as f64)]);
    let entropy = summary.pooled_shannon_sum(to_f64(&beta)) / (l1 as f64 * LN_2);
    Ok(ConstructionLevel {
        m: 1,
        height: BigUint::from(l1),
        beta,
        alpha: params.alpha(1),
        intervals,
        labels,
        summary,
        classes,
        entropy,
        entropy_lower_bound: params.g1_entropy_bits(),
        fold: None,
    })
}

/// `(1 − m/l)·β_m ≥ α_m`, exactly.
pub fn condition_b(params: &ConstructionParams, m: usize, height: &BigUint) -> bool {
    let l = Rational::from_integer(BigInt::from(height.clone()));
    (one() - int(m as u64) / l) * params.beta(m) >= params.alpha(m)
}

/// The lower bound `(1 − m/l_m)β_m` on `μ(1^m)`; fails if it is below `α_m`.
pub fn all_ones_lower_bound(level: &ConstructionLevel) -> Result<Rational> {
    let l = Rational::from_integer(BigInt::from(level.height.clone()));
    let bound = (one() - int(level.m as u64) / l) * &level.beta;
    if bound < level.alpha {
        return Err(Error::PropertyViolated {
            property: "B".into(),
            detail: format!(
                "level {}: (1 - m/l_m)·β_m = {} < α_m = {}",
                level.m,
                format(&bound),
                format(&level.alpha)
            ),
        });
    }
    Ok(bound)
}

/// Property (B) beyond the built levels, using `l_m ≥ l_last·2^{m−last}`.
pub fn property_b_analytic(params: &ConstructionParams, last: &ConstructionLevel, m_max: usize) -> bool {
    (last.m + 1..=m_max).all(|m| {
        let h = &last.height << (m - last.m);
        condition_b(params, m, &h)
    })
}

struct Candidate {
    epsilon: Option<f64>,
    method: Option<EpsilonMethod>,
    intervals: Option<Gadget>,
}

struct Stage<'a> {
    params: &'a ConstructionParams,
    s_intervals: Option<&'a Gadget>,
    s_classes: Option<&'a [MeasureClass]>,
    lambda_s: f64,
}

impl Stage<'_> {
    fn evaluate(&self, fold: u64) -> Candidate {
        if let Some(s) = self.s_intervals {
            let count = (s.len() as f64).powf(fold as f64);
            if count <= self.params.interval_cap as f64 {
                let r = m_fold_ics(s, fold as usize);
                return Candidate {
                    epsilon: Some(epsilon_independence(&r, s)),
                    method: Some(EpsilonMethod::Intervals),
                    intervals: Some(r),
                };
            }
        }
        match self.s_classes {
            Some(c) => Candidate {
                epsilon: Some(reduced_epsilon(c, self.lambda_s, fold)),
                method: Some(EpsilonMethod::Binomial),
                intervals: None,
            },
            None => Candidate { epsilon: None, method: None, intervals: None },
        }
    }
}

/// Step 4: picks `M_m` by the configured policy.
fn choose_fold(
    stage: &Stage,
    level: &ConstructionLevel,
) -> Result<(FoldChoice, Option<Gadget>)> {
    let params = stage.params;
    let m = level.m;
    let target = params.epsilon(m);
    let next_b = |fold: u64| condition_b(params, m + 1, &(&level.height * fold));
    let lb_at_cap = stage
        .s_classes
        .map(|c| epsilon_lower_bound(c, stage.lambda_s, params.fold_cap));
    let finish = |fold: u64, cand: Candidate| {
        let certified = cand.epsilon.is_some_and(|e| e <= target);
        (
            FoldChoice {
                fold,
                target,
                epsilon: cand.epsilon,
                method: cand.method,
                certified,
                lower_bound_at_cap: lb_at_cap,
            },
            cand.intervals,
        )
    };
    if let IndependencePolicy::Fixed(fold) = params.policy {
        if fold == 0 {
            return Err(Error::OutOfRange { value: 0.0, lo: 1.0, hi: f64::INFINITY });
        }
        return Ok(finish(fold, stage.evaluate(fold)));
    }
    let feasible = !lb_at_cap.is_some_and(|lb| lb > target);
    if feasible {
        let mut fold = 2u64;
        while fold <= params.fold_cap {
            if next_b(fold) {
                let cand = stage.evaluate(fold);
                match cand.epsilon {
                    Some(e) if e <= target => return Ok(finish(fold, cand)),
                    None => break,
                    _ => {}
                }
            }
            fold *= 2;
        }
    }
    match params.policy {
        IndependencePolicy::Strict => Err(Error::SearchCapExceeded { level: m, cap: params.fold_cap }),
        _ => {
            let mut fold = 2u64;
            while !next_b(fold) {
                fold *= 2;
            }
            Ok(finish(fold, stage.evaluate(fold)))
        }
    }
}

/// Steps 3–5: splits `L(m)` into `L(m,1)` of measure `β_{m+1}` and `L(m,2)`,
/// folds `{L(m,2), R(m)}` `M_m` times into `R(m+1)` and self-stacks `L(m,1)`
/// into `L(m+1)`.
pub fn advance_level(level: &ConstructionLevel, params: &ConstructionParams) -> Result<ConstructionLevel> {
    let m = level.m;
    let beta_next = params.beta(m + 1);
    let delta = &level.beta - &beta_next;
    let lambda_s = one() - &beta_next;
    let delta_f = to_f64(&delta);
    let l = level.height_f64();

    let s_intervals = match &level.intervals {
        Some(iv) => {
            let parts = iv.left.cut(&[&beta_next / &level.beta, &delta / &level.beta]);
            let mut cols = iv.right.columns().to_vec();
            cols.push(parts[1].clone());
            Some((parts[0].clone(), Gadget::new(cols)?))
        }
        None => None,
    };
    let s_classes = level.classes.as_ref().map(|c| {
        let mut c = c.clone();
        c.push(MeasureClass::new(delta_f, 1.0));
        c
    });
    let lambda_f = to_f64(&lambda_s);
    let stage = Stage {
        params,
        s_intervals: s_intervals.as_ref().map(|s| &s.1),
        s_classes: s_classes.as_deref(),
        lambda_s: lambda_f,
    };
    let (choice, folded) = choose_fold(&stage, level)?;
    drop(stage);
    let fold = choice.fold;
    let height = &level.height * fold;

    let intervals = match (s_intervals, folded) {
        (Some((left1, _)), Some(right)) => Some(IntervalLevel { left: self_stack(&left1, fold as usize), right }),
        _ => None,
    };
    let labels = match &level.labels {
        Some(g) => {
            let h = g.height();
            let mut s = g.measures().clone();
            // L(m) and L(m,2) share the all-ones label; removing β_m and
            // adding δ leaves the pooled measure of S.
            let entry = s.get_mut(&ones(h)).expect("all-ones label present");
            *entry -= &beta_next;
            let s = LabelGadget::new(h, s)?;
            match LabelGadget::fractional(&ones(h), &beta_next, &s, fold as usize, params.label_cap) {
                Ok(g) => Some(g),
                Err(Error::EnumerationTooLarge { .. }) => None,
                Err(e) => return Err(e),
            }
        }
        None => None,
    };
    let summary = level.summary.add_ones_column(delta_f).m_fold(fold);
    let classes = s_classes.and_then(|c| fold_classes(&c, lambda_f, fold, params.histogram_cap));

    let beta_f = to_f64(&beta_next);
    let entropy = summary.pooled_shannon_sum(beta_f) / (l * fold as f64 * LN_2);
    let entropy_lower_bound = level.entropy_lower_bound - binary_entropy_nats(beta_f) / LN_2;

    if let Some(iv) = &intervals {
        let total = iv.left.measure() + iv.right.measure();
        if total != one() {
            return Err(Error::NonUnitMeasure(format(&total)));
        }
    }
    if let Some(g) = &labels {
        if g.measure() != one() {
            return Err(Error::NonUnitMeasure(format(&g.measure())));
        }
    }
    Ok(ConstructionLevel {
        m: m + 1,
        height,
        beta: beta_next,
        alpha: params.alpha(m + 1),
        intervals,
        labels,
        summary,
        classes,
        entropy,
        entropy_lower_bound,
        fold: Some(choice),
    })
}

/// `G(1), …, G(levels)`.
pub fn construct(params: &ConstructionParams, levels: usize) -> Result<Vec<ConstructionLevel>> {
    let mut out = vec![build_g1(params)?];
    while out.len() < levels {
        let next = advance_level(out.last().unwrap(), params)?;
        out.push(next);
    }
    Ok(out)
}

/// `H(G(1)) − Σ_{j=2}^{m} H_b(β_j)` for `m = 1..=m_max`; with faithful
/// parameters every entry must exceed 1/2.
pub fn entropy_lower_bound_sequence(params: &ConstructionParams, m_max: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(m_max);
    let mut v = params.g1_entropy_bits();
    for m in 1..=m_max {
        if m > 1 {
            v -= binary_entropy_nats(to_f64(&params.beta(m))) / LN_2;
        }
        out.push(v);
    }
    if params.is_faithful() {
        if let Some((m, b)) = out.iter().enumerate().find(|(_, b)| **b <= 0.5) {
            return Err(Error::PropertyViolated {
                property: "D".into(),
                detail: format!("entropy lower bound {b} at level {} is not above 1/2", m + 1),
            });
        }
    }
    Ok(out)
}

/// `b_m = (α/((1−α)m)) log₂ α_m` for `m = 1..=m_max`.
pub fn renyi_upper_bound_sequence(params: &ConstructionParams, alpha: f64, m_max: usize) -> Result<Vec<f64>> {
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::NonAdmissibleAlpha { alpha, reason: "the bound needs α > 1".into() });
    }
    Ok((1..=m_max as u64).map(|m| renyi_upper_bound(alpha, m, params.n)).collect())
}

/// `(1/((1−α)k)) log₂ Σ_a μ_k(a)^α` for `k = 1..=k_max`, with `μ_k` the
/// block law of `G(m)` as a finite-level stand-in for the final process.
pub fn empirical_prefix_renyi(level: &ConstructionLevel, alpha: f64, k_max: usize) -> Result<Vec<f64>> {
    (1..=k_max)
        .map(|k| {
            let dist = level.block_distribution(k)?;
            let d = FiniteDistribution::normalized(dist.values().copied().collect())?;
            Ok(renyi_entropy(&d, alpha, 2.0)?.value / k as f64)
        })
        .collect()
}

/// Total variation between two block laws.
pub fn total_variation(a: &BlockMap, b: &BlockMap) -> f64 {
    let mut keys: Vec<&Vec<u8>> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    0.5 * keys
        .into_iter()
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
}

pub const RENYI_HORIZON: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    #[serde(rename = "property_A")]
    pub property_a: bool,
    #[serde(rename = "property_B")]
    pub property_b: bool,
    #[serde(rename = "property_D_bound")]
    pub property_d_bound: f64,
    pub renyi_gap: f64,
    pub mode: Mode,
    pub faithful: bool,
    pub l1: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub levels: usize,
    #[serde(rename = "property_D_holds")]
    pub property_d_holds: bool,
    #[serde(rename = "property_A_values")]
    pub property_a_values: Vec<(u64, f64)>,
    pub renyi_upper_bounds_at_horizon: Vec<(f64, f64)>,
    pub renyi_horizon: u64,
    pub folds: Vec<FoldChoice>,
    pub epsilon_certified: bool,
    pub gadget_entropies: Vec<f64>,
}

pub fn verdict(params: &ConstructionParams, levels: &[ConstructionLevel], alphas: &[f64]) -> Verdict {
    let last = levels.last().expect("at least one level");
    let property_b = levels.iter().all(|l| all_ones_lower_bound(l).is_ok())
        && property_b_analytic(params, last, 50);
    let d_bound = params.property_d_bound();
    let bounds: Vec<(f64, f64)> = alphas
        .iter()
        .filter(|a| **a > 1.0)
        .map(|&a| (a, renyi_upper_bound(a, RENYI_HORIZON, params.n)))
        .collect();
    let worst = bounds.iter().map(|b| b.1).fold(0.0f64, f64::max);
    let folds: Vec<FoldChoice> = levels.iter().filter_map(|l| l.fold.clone()).collect();
    Verdict {
        property_a: property_a_holds(params.n),
        property_b,
        property_d_bound: d_bound,
        renyi_gap: d_bound - worst,
        mode: params.mode,
        faithful: params.is_faithful(),
        l1: params.l1,
        n: params.n,
        levels: levels.len(),
        property_d_holds: d_bound > 0.5,
        property_a_values: property_a_values(params.n),
        renyi_upper_bounds_at_horizon: bounds,
        renyi_horizon: RENYI_HORIZON,
        epsilon_certified: folds.iter().all(|f| f.certified),
        folds,
        gadget_entropies: levels.iter().map(|l| l.entropy).collect(),
    }
}

/// One CSV row per level: `m, l_m, β_m, α_m, entropy lower bound` and the
/// Rényi bound for each `α`.
pub fn level_rows(params: &ConstructionParams, levels: &[ConstructionLevel], alphas: &[f64]) -> Vec<Vec<String>> {
    levels
        .iter()
        .map(|l| {
            let mut row = vec![
                l.m.to_string(),
                l.height.to_string(),
                format!("{:e}", to_f64(&l.beta)),
                format!("{:e}", to_f64(&l.alpha)),
                format!("{}", l.entropy_lower_bound),
            ];
            for &a in alphas {
                row.push(format!("{}", renyi_upper_bound(a, l.m as u64, params.n)));
            }
            row
        })
        .collect()
}

pub fn level_header(alphas: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = ["m", "l_m", "beta_m", "alpha_m", "entropy_lower_bound"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for a in alphas {
        h.push(format!("renyi_upper_bound_alpha_{a}"));
    }
    h
}
