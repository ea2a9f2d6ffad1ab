use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::entropy::check_base;
use crate::error::{Error, Result};
use crate::processes::Symbol;
use crate::rational::{self, format, int, one, zero, Rational};

/// Label string → pooled measure.
pub type LabelDistribution = BTreeMap<Vec<Symbol>, Rational>;

/// A uniform-height gadget kept only as its label distribution. Every
/// quantity the construction needs (entropy, block laws, the result of
/// independent cutting and stacking) depends on columns only through this
/// map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGadget {
    height: usize,
    measures: LabelDistribution,
}

impl LabelGadget {
    pub fn new(height: usize, measures: LabelDistribution) -> Result<Self> {
        if height == 0 || measures.is_empty() {
            return Err(Error::InvalidGadget("empty label gadget".into()));
        }
        for (lab, m) in &measures {
            if lab.len() != height {
                return Err(Error::NonUniformHeight);
            }
            if !m.is_positive() {
                return Err(Error::InvalidGadget(format!(
                    "label measure {} is not positive",
                    format(m)
                )));
            }
        }
        Ok(Self { height, measures })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn measures(&self) -> &LabelDistribution {
        &self.measures
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.measures.values().fold(zero(), |a, m| a + m)
    }

    pub fn width(&self) -> Rational {
        self.measure() / int(self.height as u64)
    }

    pub fn measure_of(&self, label: &[Symbol]) -> Rational {
        self.measures.get(label).cloned().unwrap_or_else(zero)
    }

    /// `−Σ λ ln λ` in nats, without the `1/h` factor.
    pub fn shannon_sum_nats(&self) -> f64 {
        self.measures.values().map(rational::neg_xlnx).sum()
    }

    pub fn normalized_shannon_entropy(&self, base: f64) -> Result<f64> {
        check_base(base)?;
        let m = self.measure();
        if m != one() {
            return Err(Error::NonUnitMeasure(format(&m)));
        }
        Ok(self.shannon_sum_nats() / self.height as f64 / base.ln())
    }

    /// ICS by the Kronecker law: label `a‖b` receives width
    /// `w(a)·w(b)/w(S)` at height `h + h'`.
    pub fn ics(&self, other: &LabelGadget) -> Result<LabelGadget> {
        let w = self.width();
        if w != other.width() {
            return Err(Error::WidthMismatch(format!(
                "gadget widths {} and {} differ",
                format(&w),
                format(&other.width())
            )));
        }
        let h = self.height + other.height;
        let scale = int(h as u64)
            / (int(self.height as u64) * int(other.height as u64) * &w);
        let mut out = LabelDistribution::new();
        for (a, ma) in &self.measures {
            let ma = ma * &scale;
            for (b, mb) in &other.measures {
                let mut lab = a.clone();
                lab.extend_from_slice(b);
                out.insert(lab, &ma * mb);
            }
        }
        Ok(LabelGadget { height: h, measures: out })
    }

    /// `S^⟨m⟩`; refuses when the label count would exceed `cap`.
    pub fn m_fold(&self, m: usize, cap: u64) -> Result<LabelGadget> {
        assert!(m >= 1, "fold count must be positive");
        let count = (self.len() as f64).powi(m as i32);
        if count > cap as f64 {
            return Err(Error::EnumerationTooLarge { count, cap });
        }
        let total = self.measure();
        let probs: Vec<(&Vec<Symbol>, Rational)> =
            self.measures.iter().map(|(l, v)| (l, v / &total)).collect();
        let mut cur: Vec<(Vec<Symbol>, Rational)> = vec![(Vec::new(), total)];
        for _ in 0..m {
            let mut next = Vec::with_capacity(cur.len() * probs.len());
            for (lab, v) in &cur {
                for (a, p) in &probs {
                    let mut l = lab.clone();
                    l.extend_from_slice(a);
                    next.push((l, v * p));
                }
            }
            cur = next;
        }
        Ok(LabelGadget { height: self.height * m, measures: cur.into_iter().collect() })
    }

    /// `{⟨L⟩_m, R^⟨m⟩}` with `L` a single column of the same height as `R`.
    pub fn fractional(
        left_label: &[Symbol],
        left_measure: &Rational,
        right: &LabelGadget,
        m: usize,
        cap: u64,
    ) -> Result<LabelGadget> {
        if left_label.len() != right.height {
            return Err(Error::NonUniformHeight);
        }
        let mut out = right.m_fold(m, cap)?;
        let lab = left_label.repeat(m);
        *out.measures.entry(lab).or_insert_with(zero) += left_measure;
        Ok(out)
    }

    /// Union of two label gadgets of equal height (labels pool).
    pub fn union(&self, other: &LabelGadget) -> Result<LabelGadget> {
        if self.height != other.height {
            return Err(Error::NonUniformHeight);
        }
        let mut out = self.measures.clone();
        for (l, v) in &other.measures {
            *out.entry(l.clone()).or_insert_with(zero) += v;
        }
        Ok(LabelGadget { height: self.height, measures: out })
    }

    pub fn block_distribution(&self, k: usize) -> Result<LabelDistribution> {
        if k == 0 || k > self.height {
            return Err(Error::BlockTooLong { k, height: self.height });
        }
        let mut out = LabelDistribution::new();
        for (lab, m) in &self.measures {
            add_windows(&mut out, lab, m, k);
        }
        Ok(out)
    }

    /// `ν(a)` for the concatenated-block process: windows inside one block
    /// weighted by `λ(C)`, windows straddling a boundary by `λ(C)λ(D)`,
    /// averaged over the `h` phases. Measures are normalized by `λ(S)`.
    pub fn concatenated_block_probability(&self, a: &[Symbol]) -> Result<Rational> {
        let h = self.height;
        let k = a.len();
        if k == 0 || k > h {
            return Err(Error::BlockTooLong { k, height: h });
        }
        let total = self.measure();
        let mut inside = zero();
        for (lab, m) in &self.measures {
            let hits = lab.windows(k).filter(|w| *w == a).count();
            if hits > 0 {
                inside += m * int(hits as u64);
            }
        }
        let mut result = inside / &total;
        for j in 1..k {
            // Suffix of length j from one block, prefix of length k − j from
            // the next.
            let (head, tail) = a.split_at(j);
            let mut suf = zero();
            let mut pre = zero();
            for (lab, m) in &self.measures {
                if &lab[h - j..] == head {
                    suf += m;
                }
                if &lab[..k - j] == tail {
                    pre += m;
                }
            }
            if !suf.is_zero() && !pre.is_zero() {
                result += suf * pre / (&total * &total);
            }
        }
        Ok(result / int(h as u64))
    }
}

pub(crate) fn window_frequency(label: &[Symbol], a: &[Symbol]) -> Result<Rational> {
    let h = label.len();
    let k = a.len();
    if k == 0 || k > h {
        return Err(Error::BlockTooLong { k, height: h });
    }
    let hits = label.windows(k).filter(|w| *w == a).count();
    Ok(Rational::new((hits as i64).into(), ((h - k + 1) as i64).into()))
}

pub(crate) fn add_windows(out: &mut LabelDistribution, label: &[Symbol], measure: &Rational, k: usize) {
    let share = measure / int((label.len() - k + 1) as u64);
    for w in label.windows(k) {
        *out.entry(w.to_vec()).or_insert_with(zero) += &share;
    }
}
