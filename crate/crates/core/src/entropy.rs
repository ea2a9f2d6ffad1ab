//! Rényi and Shannon entropy of explicit finite distributions.
//!
//! All accumulation happens in natural logarithms; the requested base is
//! applied once at the end. Terms are sorted before summation so the result
//! does not depend on the order in which atoms are listed.

use serde::Serialize;

use crate::error::{Error, Result};

pub const SUM_TOLERANCE: f64 = 1e-12;

/// Default logarithm base (bits).
pub const BITS: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDistribution {
    probs: Vec<f64>,
}

impl FiniteDistribution {
    /// Validates nonnegativity and unit sum within [`SUM_TOLERANCE`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom {i} has probability {p}"
                )));
            }
        }
        let total = ordered_sum(&probs);
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        Ok(Self { probs })
    }

    /// Opt-in normalization of nonnegative weights.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let total = ordered_sum(&weights);
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        Ok(Self {
            probs: vec![1.0 / k as f64; k],
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn has_zero_atoms(&self) -> bool {
        self.probs.iter().any(|&p| p == 0.0)
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|&&p| p > 0.0).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyValue {
    pub value: f64,
    pub alpha: f64,
    pub base: f64,
}

pub(crate) fn check_base(base: f64) -> Result<()> {
    if base.is_finite() && base > 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidBase(base))
    }
}

fn ordered_sum(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// `ln Σ exp(x_i)`, order-independent. Returns `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| *x > f64::NEG_INFINITY).collect();
    if v.is_empty() {
        return f64::NEG_INFINITY;
    }
    v.sort_by(f64::total_cmp);
    let max = *v.last().unwrap();
    let s: f64 = v.iter().map(|x| (x - max).exp()).sum();
    max + s.ln()
}

/// Streaming log-sum-exp accumulator. Deterministic for a fixed push/merge order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }

    pub fn push(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += (x - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        }
    }

    pub fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        if self.max == f64::NEG_INFINITY {
            *self = *other;
            return;
        }
        if other.max <= self.max {
            self.scaled += other.scaled * (other.max - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - other.max).exp() + other.scaled;
            self.max = other.max;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

/// Rényi entropy of order `alpha` in the given base. `alpha = 1` is Shannon.
pub fn renyi_entropy(d: &FiniteDistribution, alpha: f64, base: f64) -> Result<EntropyValue> {
    check_base(base)?;
    if !alpha.is_finite() {
        return Err(Error::NonAdmissibleAlpha {
            alpha,
            reason: "order must be finite".into(),
        });
    }
    if alpha == 1.0 {
        return shannon_entropy(d, base);
    }
    if alpha <= 0.0 && d.has_zero_atoms() {
        return Err(Error::NonAdmissibleAlpha {
            alpha,
            reason: "zero atom raised to a nonpositive power".into(),
        });
    }
    let terms: Vec<f64> = d
        .probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| alpha * p.ln())
        .collect();
    let nats = log_sum_exp(&terms) / (1.0 - alpha);
    Ok(EntropyValue {
        value: nats / base.ln(),
        alpha,
        base,
    })
}

pub fn shannon_entropy(d: &FiniteDistribution, base: f64) -> Result<EntropyValue> {
    check_base(base)?;
    let mut terms: Vec<f64> = d
        .probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .collect();
    terms.sort_by(f64::total_cmp);
    let nats: f64 = terms.iter().sum();
    Ok(EntropyValue {
        value: nats / base.ln(),
        alpha: 1.0,
        base,
    })
}

/// `H_b(p) = -p log p - (1-p) log(1-p)`.
pub fn binary_entropy(p: f64, base: f64) -> Result<f64> {
    check_base(base)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange {
            value: p,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(binary_entropy_nats(p) / base.ln())
}

pub(crate) fn binary_entropy_nats(p: f64) -> f64 {
    xlnx_neg(p) + xlnx_neg(1.0 - p)
}

/// `-x ln x` with the convention `0 ln 0 = 0`.
pub(crate) fn xlnx_neg(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(p: &[f64]) -> FiniteDistribution {
        FiniteDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn uniform_all_orders() {
        let d = FiniteDistribution::uniform(5).unwrap();
        for a in [0.0, 0.5, 1.0, 2.0, 7.0] {
            let h = renyi_entropy(&d, a, BITS).unwrap().value;
            assert!((h - 5f64.log2()).abs() < 1e-12, "alpha {a}: {h}");
        }
    }

    #[test]
    fn collision_entropy_three_quarters() {
        let h = renyi_entropy(&dist(&[0.75, 0.25]), 2.0, BITS).unwrap().value;
        assert!((h - 0.678_071_905_112_637_7).abs() < 1e-13);
        assert_eq!(renyi_entropy(&dist(&[0.5, 0.5]), 2.0, BITS).unwrap().value, 1.0);
    }

    #[test]
    fn shannon_values() {
        assert_eq!(shannon_entropy(&dist(&[1.0]), BITS).unwrap().value, 0.0);
        assert_eq!(shannon_entropy(&dist(&[0.5, 0.5]), BITS).unwrap().value, 1.0);
        let h = shannon_entropy(&dist(&[0.75, 0.25]), BITS).unwrap().value;
        assert!((h - 0.811_278_124_459_132_9).abs() < 1e-13);
    }

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5, BITS).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0, BITS).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0, BITS).unwrap(), 0.0);
        let h = binary_entropy(1.0 / 16.0, BITS).unwrap();
        assert!((h - 0.337_290_066_617_013_9).abs() < 1e-13);
        let s = shannon_entropy(&dist(&[1.0 / 16.0, 15.0 / 16.0]), BITS).unwrap().value;
        assert!((h - s).abs() < 1e-15);
        assert!(matches!(binary_entropy(1.5, BITS), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn zero_atoms() {
        let d = dist(&[0.5, 0.5, 0.0]);
        assert!(d.has_zero_atoms());
        assert_eq!(renyi_entropy(&d, 2.0, BITS).unwrap().value, 1.0);
        assert!(matches!(
            renyi_entropy(&d, 0.0, BITS),
            Err(Error::NonAdmissibleAlpha { .. })
        ));
        assert!(matches!(
            renyi_entropy(&d, -1.0, BITS),
            Err(Error::NonAdmissibleAlpha { .. })
        ));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            FiniteDistribution::new(vec![0.5, 0.6]),
            Err(Error::InvalidDistribution(_))
        ));
        assert!(FiniteDistribution::new(vec![0.5, 0.5 + 1e-13]).is_ok());
        assert!(FiniteDistribution::new(vec![-0.1, 1.1]).is_err());
        assert!(matches!(
            renyi_entropy(&dist(&[1.0]), 2.0, 1.0),
            Err(Error::InvalidBase(_))
        ));
        let n = FiniteDistribution::normalized(vec![3.0, 1.0]).unwrap();
        assert_eq!(n.probs(), &[0.75, 0.25]);
    }

    #[test]
    fn accumulator_matches_batch() {
        let xs = [-3.0, -0.5, -10.0, -1.25, -0.75];
        let mut acc = LogSumExp::new();
        for x in xs {
            acc.push(x);
        }
        assert!((acc.value() - log_sum_exp(&xs)).abs() < 1e-14);
        let mut a = LogSumExp::new();
        let mut b = LogSumExp::new();
        xs[..2].iter().for_each(|&x| a.push(x));
        xs[2..].iter().for_each(|&x| b.push(x));
        a.merge(&b);
        assert!((a.value() - log_sum_exp(&xs)).abs() < 1e-14);
    }
}
