use std::f64::consts::LN_2;

use num_bigint::BigInt;
use serde::Serialize;

use crate::entropy::binary_entropy_nats;
use crate::error::{Error, Result};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Faithful,
    Toy,
}

/// How Step 4(c)'s fold factor `M_m = l_{m+1}/l_m` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IndependencePolicy {
    /// Smallest power of two meeting `ε_m`; fails past the cap.
    Strict,
    /// As `Strict` when a certified fold exists under the cap, otherwise
    /// `M = 2`, marked uncertified.
    BestEffort,
    /// Always this factor; ε is still reported.
    Fixed(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstructionParams {
    pub mode: Mode,
    pub l1: usize,
    pub n: u64,
    pub policy: IndependencePolicy,
    /// Largest fold factor tried by the doubling search.
    pub fold_cap: u64,
    /// Largest block length tracked for block distributions.
    pub k_max: usize,
    /// Largest label count for which a level is also kept exactly.
    pub label_cap: u64,
    /// Largest column count for which a level keeps interval supports.
    pub interval_cap: u64,
    /// Largest number of column-measure classes tracked for ε.
    pub histogram_cap: u64,
}

pub const DEFAULT_FOLD_CAP: u64 = 1 << 20;

impl ConstructionParams {
    pub fn toy() -> Self {
        Self {
            mode: Mode::Toy,
            l1: 6,
            n: 3,
            policy: IndependencePolicy::Fixed(2),
            fold_cap: DEFAULT_FOLD_CAP,
            k_max: 6,
            label_cap: 1 << 17,
            interval_cap: 4096,
            histogram_cap: 1 << 20,
        }
    }

    pub fn faithful() -> Result<Self> {
        let (l1, n) = search_faithful(30)?;
        Ok(Self {
            mode: Mode::Faithful,
            l1,
            n,
            policy: IndependencePolicy::BestEffort,
            fold_cap: DEFAULT_FOLD_CAP,
            k_max: 8,
            label_cap: 1 << 17,
            interval_cap: 4096,
            histogram_cap: 1 << 20,
        })
    }

    pub fn is_faithful(&self) -> bool {
        self.mode == Mode::Faithful
    }

    /// `1/(m+N)^2`.
    pub fn beta(&self, m: usize) -> Rational {
        let j = BigInt::from(m as u64 + self.n);
        Rational::new(BigInt::from(1), &j * &j)
    }

    /// `1/(m+N)^3`.
    pub fn alpha(&self, m: usize) -> Rational {
        let j = BigInt::from(m as u64 + self.n);
        Rational::new(BigInt::from(1), &j * &j * &j)
    }

    /// `ε_m = 2^{−m}`.
    pub fn epsilon(&self, m: usize) -> f64 {
        0.5f64.powi(m as i32)
    }

    /// `2^{2 l_1/3}`, the number of columns of `G(1)`.
    pub fn g1_columns(&self) -> u64 {
        1u64 << (2 * self.l1 / 3)
    }

    /// `H(G(1)) = 2/3 − 1/(l_1 2^{2l_1/3 − 1})` in bits.
    pub fn g1_entropy_bits(&self) -> f64 {
        g1_entropy_bits(self.l1)
    }

    /// `Σ_{m≥2} H_b(β_m)` from above, in bits.
    pub fn tail_upper_bound(&self) -> f64 {
        tail_upper_bound(self.n)
    }

    /// Lower bound on `H(μ)`: `H(G(1)) − Σ_{m≥2} H_b(β_m)`.
    pub fn property_d_bound(&self) -> f64 {
        self.g1_entropy_bits() - self.tail_upper_bound()
    }

    pub fn satisfies_entropy_constraint(&self) -> bool {
        self.property_d_bound() > 0.5
    }
}

pub fn g1_entropy_bits(l1: usize) -> f64 {
    let e = 2 * l1 / 3 - 1;
    2.0 / 3.0 - 1.0 / (l1 as f64 * 2f64.powi(e as i32))
}

/// `H_b(1/j²)` in bits.
fn hb_inverse_square(j: u64) -> f64 {
    let x = 1.0 / (j as f64 * j as f64);
    binary_entropy_nats(x) / LN_2
}

const TAIL_TERMS: u64 = 200_000;

/// `Σ_{j ≥ N+2} H_b(1/j²)` bounded above by an explicit partial sum plus
/// `∫_J^∞ (2 ln x + 1)/(x² ln 2) dx = (2 ln J + 3)/(J ln 2)`, which dominates
/// the remainder since `H_b(x) ≤ x ln(1/x) + x` and the integrand decreases.
pub fn tail_upper_bound(n: u64) -> f64 {
    let first = n + 2;
    let last = first + TAIL_TERMS;
    let partial: f64 = (first..=last).rev().map(hb_inverse_square).sum();
    let j = last as f64;
    partial + (2.0 * j.ln() + 3.0) / (j * LN_2)
}

/// Smallest `l_1 = 3t` with `N = 2^t − 1` meeting the entropy constraint.
pub fn search_faithful(max_t: u32) -> Result<(usize, u64)> {
    for t in 1..=max_t {
        let l1 = 3 * t as usize;
        let n = (1u64 << t) - 1;
        if g1_entropy_bits(l1) - tail_upper_bound(n) > 0.5 {
            return Ok((l1, n));
        }
    }
    Err(Error::NoFeasibleParams { max_l1: 3 * max_t as usize })
}

/// `b_m = (α/((1−α)m)) log₂ α_m = 3α log₂(m+N)/((α−1)m)`.
pub fn renyi_upper_bound(alpha: f64, m: u64, n: u64) -> f64 {
    let log_alpha_m = -3.0 * ((m + n) as f64).log2();
    alpha / ((1.0 - alpha) * m as f64) * log_alpha_m
}

/// `(1/m) log₂ α_m` at `m = 10, 100, …, 10^6`.
pub fn property_a_values(n: u64) -> Vec<(u64, f64)> {
    (1..=6)
        .map(|e| {
            let m = 10u64.pow(e);
            (m, -3.0 * ((m + n) as f64).log2() / m as f64)
        })
        .collect()
}

pub fn property_a_holds(n: u64) -> bool {
    let v = property_a_values(n);
    v.windows(2).all(|w| w[1].1.abs() < w[0].1.abs()) && v.last().unwrap().1.abs() < 1e-4
}
