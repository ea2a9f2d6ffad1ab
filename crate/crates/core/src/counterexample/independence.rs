//! ε-independence of `S` and `S^⟨M⟩` from column measures alone.
//!
//! A column `D` of `S^⟨M⟩` is a stack of `M` equal-width pieces; if `K` of
//! them come from column `C` then `λ(C ∩ D) = λ(D)·K/M`, and the tuple of
//! source columns is drawn with probabilities `λ(C)/λ_S`. Hence
//! `ε = λ_S Σ_C E|K_C/M − λ(C)|` with `K_C ~ Bin(M, λ(C)/λ_S)`.

use serde::Serialize;

/// Columns sharing one measure: `mass = count·measure`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureClass {
    pub ln_measure: f64,
    pub mass: f64,
}

impl MeasureClass {
    pub fn new(measure: f64, count: f64) -> Self {
        Self { ln_measure: measure.ln(), mass: measure * count }
    }
}

/// `(mass/x)·E|K/M − x|` for `K ~ Bin(M, p)`, `x = p·λ_S`, written as
/// `mass·[(1/λ_S − 1) + 2 Σ_{k < xM} (1 − k/(xM)) P(K = k)]`.
fn class_term(c: &MeasureClass, lambda_s: f64, m: u64) -> f64 {
    let ln_p = c.ln_measure - lambda_s.ln();
    let mf = m as f64;
    if ln_p >= 0.0 {
        let x = c.ln_measure.exp();
        return c.mass * (1.0 - x).abs() / x;
    }
    let p = ln_p.exp();
    let ln_q = (-p).ln_1p();
    let xm = (c.ln_measure + mf.ln()).exp();
    let mut lp = mf * ln_q;
    let mut acc = 0.0;
    let mut k = 0u64;
    // x > 0, so k = 0 always counts even when x·M underflows.
    while k <= m && (k == 0 || (k as f64) < xm) {
        let weight = if k == 0 { 1.0 } else { 1.0 - k as f64 / xm };
        acc += weight * lp.exp();
        lp += ((mf - k as f64) / (k as f64 + 1.0)).ln() + ln_p - ln_q;
        k += 1;
    }
    c.mass * ((1.0 / lambda_s - 1.0) + 2.0 * acc)
}

/// `ε(S, S^⟨M⟩)` from the column-measure classes of `S`.
pub fn reduced_epsilon(s: &[MeasureClass], lambda_s: f64, m: u64) -> f64 {
    let mut terms: Vec<f64> = s.iter().map(|c| class_term(c, lambda_s, m)).collect();
    terms.sort_by(f64::total_cmp);
    lambda_s * terms.iter().sum::<f64>()
}

/// `λ_S Σ_C λ(C)(1 − p_C)^M ≤ ε`, nonincreasing in `M`; above the target at
/// the cap it proves that no fold under the cap is ε-independent.
pub fn epsilon_lower_bound(s: &[MeasureClass], lambda_s: f64, m: u64) -> f64 {
    lambda_s
        * s.iter()
            .map(|c| {
                let p = (c.ln_measure - lambda_s.ln()).exp().min(1.0);
                c.mass * (m as f64 * (-p).ln_1p()).exp()
            })
            .sum::<f64>()
}

fn compositions_count(m: u64, c: usize) -> f64 {
    // C(m + c − 1, c − 1)
    let mut v = 1.0f64;
    for i in 1..c {
        v = v * (m as f64 + i as f64) / i as f64;
    }
    v
}

/// Column-measure classes of `S^⟨M⟩`, one per composition of `M` over the
/// classes of `S`, or `None` past `cap` classes.
pub fn fold_classes(s: &[MeasureClass], lambda_s: f64, m: u64, cap: u64) -> Option<Vec<MeasureClass>> {
    if compositions_count(m, s.len()) > cap as f64 {
        return None;
    }
    let ln_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=m).scan(0.0, |acc, k| {
            *acc += (k as f64).ln();
            Some(*acc)
        }))
        .collect();
    let ln_lam = lambda_s.ln();
    let ln_p: Vec<f64> = s.iter().map(|c| c.ln_measure - ln_lam).collect();
    let ln_share: Vec<f64> = s.iter().map(|c| c.mass.ln() - ln_lam).collect();
    let mut out = Vec::new();
    let mut stack: Vec<(usize, u64, f64, f64)> = vec![(0, m, 0.0, 0.0)];
    while let Some((i, left, lm, lw)) = stack.pop() {
        if i + 1 == s.len() {
            let k = left;
            let ln_measure = ln_lam + lm + k as f64 * ln_p[i];
            let ln_mass = ln_lam + ln_fact[m as usize] + lw + k as f64 * ln_share[i] - ln_fact[k as usize];
            out.push(MeasureClass { ln_measure, mass: ln_mass.exp() });
            continue;
        }
        for k in (0..=left).rev() {
            stack.push((
                i + 1,
                left - k,
                lm + k as f64 * ln_p[i],
                lw + k as f64 * ln_share[i] - ln_fact[k as usize],
            ));
        }
    }
    out.retain(|c| c.mass > 0.0);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutstack::{epsilon_independence, m_fold_ics, Column, Gadget, RationalInterval};
    use crate::rational::rat;

    fn gadget(widths: &[(i64, i64)], heights: &[usize], base: (i64, i64)) -> Gadget {
        let mut start = rat(base.0, base.1);
        let mut cols = Vec::new();
        for (w, &h) in widths.iter().zip(heights) {
            let w = rat(w.0, w.1);
            let mut levels = Vec::new();
            for _ in 0..h {
                levels.push(RationalInterval::new(start.clone(), w.clone()).unwrap());
                start += &w;
            }
            cols.push(Column::from_intervals(levels, vec![0; h]).unwrap());
        }
        Gadget::new(cols).unwrap()
    }

    fn classes(g: &Gadget) -> Vec<MeasureClass> {
        g.columns()
            .iter()
            .map(|c| MeasureClass::new(crate::rational::to_f64(&c.measure()), 1.0))
            .collect()
    }

    #[test]
    fn formula_matches_intervals() {
        let s = gadget(&[(1, 10), (1, 20), (1, 40)], &[2, 2, 2], (0, 1));
        let lam = crate::rational::to_f64(&s.measure());
        for m in 1..=3 {
            let exact = epsilon_independence(&s, &m_fold_ics(&s, m));
            let reduced = reduced_epsilon(&classes(&s), lam, m as u64);
            assert!((exact - reduced).abs() < 1e-12, "m={m}: {exact} vs {reduced}");
            assert!(epsilon_lower_bound(&classes(&s), lam, m as u64) <= reduced + 1e-15);
        }
    }

    #[test]
    fn unit_measure_gadget_approaches_independence() {
        let s = gadget(&[(1, 4), (1, 4)], &[2, 2], (0, 1));
        let mut prev = f64::INFINITY;
        for m in [1, 2, 4, 8] {
            let e = epsilon_independence(&s, &m_fold_ics(&s, m));
            let r = reduced_epsilon(&classes(&s), 1.0, m as u64);
            assert!((e - r).abs() < 1e-12);
            assert!(e < prev);
            prev = e;
        }
        assert!(reduced_epsilon(&classes(&s), 1.0, 1 << 16) < 0.01);
    }

    #[test]
    fn vanishing_columns_sit_near_two_lambda() {
        let lam = 0.75;
        let tiny = MeasureClass { ln_measure: -1.0e6, mass: lam };
        let e = reduced_epsilon(&[tiny], lam, 2);
        assert!((e - lam * lam * (1.0 / lam + 1.0)).abs() < 1e-12, "{e}");
        assert!(e >= epsilon_lower_bound(&[tiny], lam, 2));
    }

    #[test]
    fn fold_classes_preserve_mass_and_epsilon() {
        let s = gadget(&[(1, 10), (1, 20), (1, 40)], &[2, 2, 2], (0, 1));
        let lam = crate::rational::to_f64(&s.measure());
        let folded = m_fold_ics(&s, 2);
        let fc = fold_classes(&classes(&s), lam, 2, 100).unwrap();
        assert_eq!(fc.len(), 6);
        let total: f64 = fc.iter().map(|c| c.mass).sum();
        assert!((total - lam).abs() < 1e-15);
        let by_columns = reduced_epsilon(&classes(&folded), lam, 3);
        let by_classes = reduced_epsilon(&fc, lam, 3);
        assert!((by_columns - by_classes).abs() < 1e-12);
        assert!(fold_classes(&classes(&s), lam, 2000, 100).is_none());
    }
}
