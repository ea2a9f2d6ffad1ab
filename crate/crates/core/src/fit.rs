//! Convergence-rate fits for estimate sequences.
//!
//! Polynomial: `|v_n − L| ≈ C n^{−γ}` with `L` scanned.
//! Geometric: successive differences `|v_{m+1} − v_m| ≈ C ρ^m`.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitKind {
    Polynomial,
    Geometric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub estimates: Vec<(usize, f64)>,
    pub fitted_limit: f64,
    /// γ̂ for polynomial fits (`+∞` for a constant sequence), ρ̂ for geometric
    /// fits (`0` when the differences vanish).
    pub fitted_rate: f64,
    pub residual_rms: f64,
    pub fit_kind: FitKind,
}

impl ConvergenceReport {
    /// True when the sequence is constant (or, for geometric fits, has fewer
    /// than two nonzero differences) and no rate could be regressed.
    pub fn is_degenerate(&self) -> bool {
        match self.fit_kind {
            FitKind::Polynomial => self.fitted_rate.is_infinite(),
            FitKind::Geometric => self.fitted_rate == 0.0,
        }
    }

    /// Successive differences `v_{i+1} − v_i`.
    pub fn differences(&self) -> Vec<f64> {
        self.estimates.windows(2).map(|w| w[1].1 - w[0].1).collect()
    }

    /// Successive differences with those under the rounding floor set to 0.
    pub fn resolved_differences(&self) -> Vec<f64> {
        let values: Vec<f64> = self.estimates.iter().map(|e| e.1).collect();
        let floor = difference_floor(&values);
        self.differences()
            .into_iter()
            .map(|d| if d.abs() > floor { d } else { 0.0 })
            .collect()
    }
}

struct LineFit {
    slope: f64,
    rms: f64,
    /// Residual sum of squares over total sum of squares (1 − R²).
    unexplained: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - intercept - slope * x;
            r * r
        })
        .sum();
    let st: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    LineFit {
        slope,
        rms: (ss / n).sqrt(),
        unexplained: if st > 0.0 { ss / st } else { 0.0 },
    }
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |m, v| m.max(v.abs()))
}

/// Least squares of `ln|v_n − L|` on `ln n`, with `L` on the far side of the
/// sequence's extreme value chosen by a log-spaced scan refined by golden
/// section. The scan minimizes `1 − R²` rather than the raw residual, which
/// would otherwise drift to `|L| → ∞` where every log-gap flattens out.
pub fn fit_polynomial(estimates: &[(usize, f64)]) -> ConvergenceReport {
    let values: Vec<f64> = estimates.iter().map(|e| e.1).collect();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let last = *values.last().unwrap_or(&0.0);
    if estimates.len() < 3 || span <= 1e-12 * scale_of(&values) {
        return ConvergenceReport {
            estimates: estimates.to_vec(),
            fitted_limit: last,
            fitted_rate: f64::INFINITY,
            residual_rms: 0.0,
            fit_kind: FitKind::Polynomial,
        };
    }
    let decreasing = last <= values[0];
    let limit_at = |log_d: f64| {
        let d = log_d.exp();
        if decreasing {
            lo - d
        } else {
            hi + d
        }
    };
    let xs: Vec<f64> = estimates.iter().map(|e| (e.0 as f64).ln()).collect();
    let objective = |log_d: f64| {
        let l = limit_at(log_d);
        let ys: Vec<f64> = values.iter().map(|v| (v - l).abs().ln()).collect();
        least_squares(&xs, &ys).unexplained
    };

    let a = (span * 1e-6).ln();
    let b = (span * 1e3).ln();
    let grid = 180;
    let step = (b - a) / grid as f64;
    let mut best: usize = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..=grid {
        let v = objective(a + step * i as f64);
        if v < best_val {
            best_val = v;
            best = i;
        }
    }
    let mut left = a + step * (best.saturating_sub(1)) as f64;
    let mut right = a + step * (best + 1).min(grid) as f64;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = right - phi * (right - left);
    let mut d = left + phi * (right - left);
    let (mut fc, mut fd) = (objective(c), objective(d));
    for _ in 0..80 {
        if fc < fd {
            right = d;
            d = c;
            fd = fc;
            c = right - phi * (right - left);
            fc = objective(c);
        } else {
            left = c;
            c = d;
            fc = fd;
            d = left + phi * (right - left);
            fd = objective(d);
        }
    }
    let log_d = if fc.min(fd) <= best_val {
        if fc < fd {
            c
        } else {
            d
        }
    } else {
        a + step * best as f64
    };
    let l = limit_at(log_d);
    let ys: Vec<f64> = values.iter().map(|v| (v - l).abs().ln()).collect();
    let line = least_squares(&xs, &ys);
    ConvergenceReport {
        estimates: estimates.to_vec(),
        fitted_limit: l,
        fitted_rate: -line.slope,
        residual_rms: line.rms,
        fit_kind: FitKind::Polynomial,
    }
}

/// Log-linear regression of nonzero successive differences on their index.
fn difference_floor(values: &[f64]) -> f64 {
    1e-13 * scale_of(values)
}

pub fn fit_geometric(estimates: &[(usize, f64)]) -> ConvergenceReport {
    let values: Vec<f64> = estimates.iter().map(|e| e.1).collect();
    let threshold = difference_floor(&values);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for w in estimates.windows(2) {
        let d = (w[1].1 - w[0].1).abs();
        if d > threshold {
            xs.push(w[0].0 as f64);
            ys.push(d.ln());
        }
    }
    let last = *values.last().unwrap_or(&0.0);
    if xs.len() < 2 {
        return ConvergenceReport {
            estimates: estimates.to_vec(),
            fitted_limit: last,
            fitted_rate: 0.0,
            residual_rms: 0.0,
            fit_kind: FitKind::Geometric,
        };
    }
    let line = least_squares(&xs, &ys);
    let rho = line.slope.exp();
    let n = values.len();
    let limit = if rho < 1.0 && n >= 2 {
        last + (last - values[n - 2]) * rho / (1.0 - rho)
    } else {
        last
    };
    ConvergenceReport {
        estimates: estimates.to_vec(),
        fitted_limit: limit,
        fitted_rate: rho,
        residual_rms: line.rms,
        fit_kind: FitKind::Geometric,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_recovers_exponent() {
        let est: Vec<(usize, f64)> = (1..=20)
            .map(|n| (n, 0.7 + 0.4 * (n as f64).powf(-1.0)))
            .collect();
        let r = fit_polynomial(&est);
        assert!((r.fitted_rate - 1.0).abs() < 1e-3, "{r:?}");
        assert!((r.fitted_limit - 0.7).abs() < 1e-4);
        let est: Vec<(usize, f64)> = (1..=20)
            .map(|n| (n, 2.0 - 3.0 * (n as f64).powf(-0.5)))
            .collect();
        let r = fit_polynomial(&est);
        assert!((r.fitted_rate - 0.5).abs() < 1e-2, "{r:?}");
    }

    #[test]
    fn polynomial_constant_sequence() {
        let est: Vec<(usize, f64)> = (1..=8).map(|n| (n, 0.8)).collect();
        let r = fit_polynomial(&est);
        assert!(r.fitted_rate.is_infinite());
        assert_eq!(r.residual_rms, 0.0);
        assert!(r.is_degenerate());
    }

    #[test]
    fn geometric_recovers_ratio() {
        let est: Vec<(usize, f64)> = (1..=8)
            .map(|m| (m, 1.0 + 0.5 * 0.3f64.powi(m as i32)))
            .collect();
        let r = fit_geometric(&est);
        assert!((r.fitted_rate - 0.3).abs() < 1e-9, "{r:?}");
        assert!((r.fitted_limit - 1.0).abs() < 1e-9);
        assert!(r.residual_rms < 1e-9);
    }

    #[test]
    fn geometric_constant_sequence() {
        let est: Vec<(usize, f64)> = (1..=6).map(|m| (m, 0.5)).collect();
        let r = fit_geometric(&est);
        assert!(r.is_degenerate());
        assert_eq!(r.fitted_limit, 0.5);
        let noisy: Vec<(usize, f64)> = (1..=6).map(|m| (m, 1.4 + if m % 2 == 0 { 2e-16 } else { 0.0 })).collect();
        let r = fit_geometric(&noisy);
        assert!(r.is_degenerate());
        assert!(r.resolved_differences().iter().all(|d| *d == 0.0));
    }
}
