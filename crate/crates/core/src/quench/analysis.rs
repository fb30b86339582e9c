// Copyright 2026 Chiralring Contributors
// SPDX-License-Identifier: Apache-2.0

//! Half-life, oscillation frequency and power-law fits of current series.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// First downward crossing of I(0)/2, linearly interpolated.
///
/// Returns `None` when I(0) ≤ 0 or no crossing occurs.
pub fn half_life(series: &[(f64, f64)]) -> Option<f64> {
    let &(_, i0) = series.first()?;
    if !(i0 > 0.0) {
        return None;
    }
    let half = 0.5 * i0;
    series.windows(2).find_map(|w| {
        let ((t0, a), (t1, b)) = (w[0], w[1]);
        (a > half && b <= half).then(|| t0 + (a - half) / (a - b) * (t1 - t0))
    })
}

/// Largest I(t)/I(0) after the first half-life crossing, if any.
pub fn peak_after_half_life(series: &[(f64, f64)]) -> Option<f64> {
    let tau = half_life(series)?;
    let i0 = series[0].1;
    series
        .iter()
        .filter(|(t, _)| *t > tau)
        .map(|(_, i)| i / i0)
        .reduce(f64::max)
}

/// Time of the first local minimum, refined by a parabola through the
/// bracketing samples.
pub fn first_minimum(series: &[(f64, f64)]) -> Option<f64> {
    series.windows(3).find_map(|w| {
        let ((t0, a), (t1, b), (t2, c)) = (w[0], w[1], w[2]);
        if b < a && b <= c {
            let h = t1 - t0;
            let denom = a - 2.0 * b + c;
            let shift = if denom.abs() > 0.0 && (t2 - t1 - h).abs() < 1e-9 * h {
                0.5 * h * (a - c) / denom
            } else {
                0.0
            };
            Some(t1 + shift)
        } else {
            None
        }
    })
}

/// Angular frequency π / t_min for a series starting at a maximum.
pub fn oscillation_frequency(series: &[(f64, f64)]) -> Option<f64> {
    first_minimum(series).map(|t| std::f64::consts::PI / t)
}

/// τ = τ₀ (E_J/E_C)^α fitted on log-log axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub alpha: f64,
    pub tau0: f64,
    /// Covariance of (α, ln τ₀).
    pub covariance: [[f64; 2]; 2],
    pub alpha_stderr: f64,
    /// Delta-method standard error of τ₀.
    pub tau0_stderr: f64,
    /// ln τ − (ln τ₀ + α ln r) per point.
    pub residuals: Vec<f64>,
    pub points: Vec<(f64, f64)>,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if points
        .iter()
        .any(|&(r, t)| !(r > 0.0 && t > 0.0 && r.is_finite() && t.is_finite()))
    {
        return Err(Error::Fit("ratios and half-lives must be positive".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-12 * (1.0 + mx * mx) {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let alpha = sxy / sxx;
    let b = my - alpha * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (b + alpha * x))
        .collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let s2 = ssr / (n - 2.0);
    let var_a = s2 / sxx;
    let var_b = s2 * (1.0 / n + mx * mx / sxx);
    let cov_ab = -s2 * mx / sxx;
    let tau0 = b.exp();
    Ok(PowerLawFit {
        alpha,
        tau0,
        covariance: [[var_a, cov_ab], [cov_ab, var_b]],
        alpha_stderr: var_a.sqrt(),
        tau0_stderr: tau0 * var_b.sqrt(),
        residuals,
        points: points.to_vec(),
    })
}

/// Log-log slope through the first k points for k = 1..n (`None` for k < 2).
pub fn running_alpha(points: &[(f64, f64)]) -> Vec<Option<f64>> {
    (1..=points.len())
        .map(|k| {
            if k < 2 {
                return None;
            }
            let p = &points[..k];
            let n = k as f64;
            let mx = p.iter().map(|q| q.0.ln()).sum::<f64>() / n;
            let my = p.iter().map(|q| q.1.ln()).sum::<f64>() / n;
            let sxx: f64 = p.iter().map(|q| (q.0.ln() - mx).powi(2)).sum();
            let sxy: f64 = p.iter().map(|q| (q.0.ln() - mx) * (q.1.ln() - my)).sum();
            (sxx > 0.0).then(|| sxy / sxx)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sampled(f: impl Fn(f64) -> f64, dt: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n).map(|i| (i as f64 * dt, f(i as f64 * dt))).collect()
    }

    #[test]
    fn cosine_half_life() {
        let w = 2.5;
        let s = sampled(|t| (w * t).cos(), 1e-4, 20_000);
        let tau = half_life(&s).unwrap();
        assert!((tau - std::f64::consts::PI / (3.0 * w)).abs() < 1e-7);
        assert!(peak_after_half_life(&s).unwrap() <= 0.5);
        let decay = sampled(|t| (-t).exp(), 1e-2, 500);
        assert!(peak_after_half_life(&decay).unwrap() < 0.5);
        let f = oscillation_frequency(&s).unwrap();
        assert!((f - w).abs() < 1e-6);
    }

    #[test]
    fn exponential_half_life() {
        let s = sampled(|t| (-t / 2.0).exp(), 1e-3, 5000);
        assert!((half_life(&s).unwrap() - 2.0 * std::f64::consts::LN_2).abs() < 1e-6);
    }

    #[test]
    fn no_crossing() {
        let s = sampled(|t| 1.0 + t, 0.1, 50);
        assert_eq!(half_life(&s), None);
        let neg = sampled(|t| -1.0 - t, 0.1, 50);
        assert_eq!(half_life(&neg), None);
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0]
            .iter()
            .map(|&r: &f64| (r, 2.0 * r.sqrt()))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.alpha - 0.5).abs() < 1e-12);
        assert!((fit.tau0 - 2.0).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn fit_contracts() {
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_power_law(&[(5.0, 1.0), (5.0, 2.0), (5.0, 3.0)]).is_err());
        assert!(fit_power_law(&[(1.0, 1.0), (2.0, -2.0), (3.0, 3.0)]).is_err());
    }

    #[test]
    fn outlier_inflates_residual() {
        let mut pts: Vec<(f64, f64)> = (1..=5)
            .map(|i| (i as f64 * 10.0, (i as f64 * 10.0).powf(0.6)))
            .collect();
        let clean = fit_power_law(&pts).unwrap();
        pts[2].1 *= 3.0;
        let dirty = fit_power_law(&pts).unwrap();
        assert!(dirty.alpha.is_finite());
        let m = |f: &PowerLawFit| f.residuals.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
        assert!(m(&dirty) > 10.0 * m(&clean) + 0.1);
    }

    #[test]
    fn running_slopes() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&r: &f64| (r, r.powf(0.7)))
            .collect();
        let a = running_alpha(&pts);
        assert_eq!(a[0], None);
        assert!((a[2].unwrap() - 0.7).abs() < 1e-12);
    }
}
