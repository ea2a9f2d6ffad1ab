use std::collections::BTreeMap;

use crate::cutstack::LabelGadget;
use crate::entropy::xlnx_neg;
use crate::processes::Symbol;
use crate::rational::to_f64;

pub type BlockMap = BTreeMap<Vec<Symbol>, f64>;

/// Everything about a uniform-height label gadget that the construction
/// reads, tracked exactly in structure and in `f64` for values, so that it
/// survives fold factors whose label counts cannot be enumerated.
///
/// `windows[k-1][a] = Σ_C λ(C)·#{windows of ℓ(C) equal to a}`;
/// `prefixes[j-1][b]` and `suffixes[j-1][b]` are the measures of labels
/// starting or ending with `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelSummary {
    pub height: f64,
    pub measure: f64,
    /// `−Σ λ ln λ` over pooled labels, nats.
    pub shannon_sum: f64,
    /// Measure of the all-ones label.
    pub ones: f64,
    pub windows: Vec<BlockMap>,
    pub prefixes: Vec<BlockMap>,
    pub suffixes: Vec<BlockMap>,
}

fn ones(k: usize) -> Vec<Symbol> {
    vec![1; k]
}

impl LabelSummary {
    pub fn from_labels(g: &LabelGadget, k_max: usize) -> Self {
        let h = g.height();
        assert!(k_max <= h, "block length beyond column height");
        let mut windows = vec![BlockMap::new(); k_max];
        let mut prefixes = vec![BlockMap::new(); k_max.saturating_sub(1)];
        let mut suffixes = vec![BlockMap::new(); k_max.saturating_sub(1)];
        let mut measure = 0.0;
        let mut one = 0.0;
        for (lab, m) in g.measures() {
            let v = to_f64(m);
            measure += v;
            if lab.iter().all(|&s| s == 1) {
                one += v;
            }
            for k in 1..=k_max {
                for w in lab.windows(k) {
                    *windows[k - 1].entry(w.to_vec()).or_insert(0.0) += v;
                }
            }
            for j in 1..k_max {
                *prefixes[j - 1].entry(lab[..j].to_vec()).or_insert(0.0) += v;
                *suffixes[j - 1].entry(lab[h - j..].to_vec()).or_insert(0.0) += v;
            }
        }
        Self {
            height: h as f64,
            measure,
            shannon_sum: g.shannon_sum_nats(),
            ones: one,
            windows,
            prefixes,
            suffixes,
        }
    }

    pub fn k_max(&self) -> usize {
        self.windows.len()
    }

    /// Adds one all-ones column of measure `mass`.
    pub fn add_ones_column(&self, mass: f64) -> Self {
        let mut s = self.clone();
        s.shannon_sum += xlnx_neg(self.ones + mass) - xlnx_neg(self.ones);
        s.ones += mass;
        s.measure += mass;
        for k in 1..=s.k_max() {
            *s.windows[k - 1].entry(ones(k)).or_insert(0.0) += mass * (s.height - k as f64 + 1.0);
        }
        for j in 1..s.k_max() {
            *s.prefixes[j - 1].entry(ones(j)).or_insert(0.0) += mass;
            *s.suffixes[j - 1].entry(ones(j)).or_insert(0.0) += mass;
        }
        s
    }

    /// Summary of `S^⟨M⟩`: tuples of `M` labels drawn independently with
    /// weights `λ_a/λ`. Windows inside a block scale by `M`; windows across
    /// one of the `M − 1` boundaries pair a suffix with a prefix.
    pub fn m_fold(&self, m: u64) -> Self {
        let lam = self.measure;
        let mf = m as f64;
        let shannon_sum = xlnx_neg(lam) + mf * (self.shannon_sum - xlnx_neg(lam));
        let ones = if self.ones > 0.0 {
            (lam.ln() + mf * (self.ones.ln() - lam.ln())).exp()
        } else {
            0.0
        };
        let mut windows: Vec<BlockMap> = self
            .windows
            .iter()
            .map(|w| w.iter().map(|(a, v)| (a.clone(), v * mf)).collect())
            .collect();
        if m > 1 {
            for k in 2..=self.k_max() {
                for j in 1..k {
                    for (q, qv) in &self.suffixes[j - 1] {
                        for (p, pv) in &self.prefixes[k - j - 1] {
                            let mut a = q.clone();
                            a.extend_from_slice(p);
                            *windows[k - 1].entry(a).or_insert(0.0) += (mf - 1.0) * qv * pv / lam;
                        }
                    }
                }
            }
        }
        Self {
            height: self.height * mf,
            measure: lam,
            shannon_sum,
            ones,
            windows,
            prefixes: self.prefixes.clone(),
            suffixes: self.suffixes.clone(),
        }
    }

    /// `−Σ λ ln λ` after pooling an all-ones column of measure `beta`.
    pub fn pooled_shannon_sum(&self, beta: f64) -> f64 {
        self.shannon_sum - xlnx_neg(self.ones) + xlnx_neg(self.ones + beta)
    }

    /// Block law `Σ_C p_k(a|C) λ(C)` of this gadget joined with an all-ones
    /// column of measure `beta`.
    pub fn block_distribution(&self, beta: f64, k: usize) -> BlockMap {
        let denom = self.height - k as f64 + 1.0;
        let mut out: BlockMap = self.windows[k - 1].iter().map(|(a, v)| (a.clone(), v / denom)).collect();
        *out.entry(ones(k)).or_insert(0.0) += beta;
        out
    }
}
