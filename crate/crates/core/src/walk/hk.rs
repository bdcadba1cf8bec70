//! Heat-kernel decay fit.
//!
//! Exploratory diagnostic only. For each `gamma` on a grid in `(0, 1]` the
//! model `-log p_n = a + b ln n + c n^gamma` is fitted by least squares over a
//! window of `n`; the `gamma` with the smallest residual wins. Zero return
//! probabilities (odd `n` on bipartite graphs) are skipped.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::graph::Graph;

use super::return_probabilities;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HkFitConfig {
    /// Grid is `i / gamma_steps` for `i = 1..=gamma_steps`.
    pub gamma_steps: usize,
    /// The window starts at `max(2, n_max / window_divisor)`.
    pub window_divisor: usize,
    pub min_points: usize,
}

impl Default for HkFitConfig {
    fn default() -> Self {
        HkFitConfig {
            gamma_steps: 100,
            window_divisor: 3,
            min_points: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayRegime {
    StretchedExponential,
    /// Best `gamma` at the bottom of the grid or a non-positive `c`: the data
    /// look polynomial and carry no stretched-exponential regime.
    Polynomial,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HkFit {
    pub gamma: f64,
    pub c: f64,
    pub intercept: f64,
    pub log_coefficient: f64,
    pub residual: f64,
    pub regime: DecayRegime,
    /// `(a, b)` of the two-parameter fit `-log p_n = a + b ln n`.
    pub polynomial_fit: (f64, f64),
    pub points_used: usize,
}

/// Fit the return probabilities `p_1..p_{n_max}` of `v`.
pub fn hk_fit(g: &Graph, v: usize, n_max: usize, cfg: &HkFitConfig) -> Result<HkFit> {
    let p = return_probabilities(g, v, n_max)?;
    hk_fit_sequence(&p, cfg)
}

/// Fit a given sequence; `p[i]` is `p_{i+1}`.
pub fn hk_fit_sequence(p: &[f64], cfg: &HkFitConfig) -> Result<HkFit> {
    if cfg.gamma_steps == 0 || cfg.window_divisor == 0 {
        return Err(invalid("gamma_steps and window_divisor must be positive"));
    }
    let n_max = p.len();
    let lo = (n_max / cfg.window_divisor).max(2);
    let (ns, ys): (Vec<f64>, Vec<f64>) = (lo..=n_max)
        .filter(|&n| p[n - 1] > 0.0)
        .map(|n| (n as f64, -p[n - 1].ln()))
        .unzip();
    let need = cfg.min_points.max(4);
    if ns.len() < need {
        return Err(Error::InsufficientSamples { got: ns.len() as u64, need: need as u64 });
    }
    let ones = vec![1.0; ns.len()];
    let logs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();

    let mut best: Option<(f64, f64, Vec<f64>)> = None;
    for i in 1..=cfg.gamma_steps {
        let gamma = i as f64 / cfg.gamma_steps as f64;
        let powers: Vec<f64> = ns.iter().map(|n| n.powf(gamma)).collect();
        let (coef, rss) = least_squares(&[&ones, &logs, &powers], &ys);
        if best.as_ref().is_none_or(|b| rss < b.0) {
            best = Some((rss, gamma, coef));
        }
    }
    let (residual, gamma, coef) = best.expect("grid is non-empty");
    let (poly, _) = least_squares(&[&ones, &logs], &ys);
    let at_floor = gamma <= 1.0 / cfg.gamma_steps as f64;
    Ok(HkFit {
        gamma,
        c: coef[2],
        intercept: coef[0],
        log_coefficient: coef[1],
        residual,
        regime: if at_floor || coef[2] <= 0.0 {
            DecayRegime::Polynomial
        } else {
            DecayRegime::StretchedExponential
        },
        polynomial_fit: (poly[0], poly[1]),
        points_used: ns.len(),
    })
}

/// Least squares by modified Gram-Schmidt. Returns coefficients and the
/// residual sum of squares. Columns that are numerically dependent on earlier
/// ones get coefficient 0.
fn least_squares(columns: &[&[f64]], y: &[f64]) -> (Vec<f64>, f64) {
    let k = columns.len();
    let mut q: Vec<Vec<f64>> = columns.iter().map(|c| c.to_vec()).collect();
    let mut r = vec![vec![0.0; k]; k];
    for j in 0..k {
        let original = dot(&q[j], &q[j]).sqrt();
        for i in 0..j {
            let proj = dot(&q[i], &q[j]);
            r[i][j] = proj;
            let qi = q[i].clone();
            for (x, qi) in q[j].iter_mut().zip(&qi) {
                *x -= proj * qi;
            }
        }
        let norm = dot(&q[j], &q[j]).sqrt();
        if norm <= 1e-13 * original.max(f64::MIN_POSITIVE) {
            q[j].iter_mut().for_each(|x| *x = 0.0);
            r[j][j] = 0.0;
        } else {
            q[j].iter_mut().for_each(|x| *x /= norm);
            r[j][j] = norm;
        }
    }
    let mut resid = y.to_vec();
    let mut qty = vec![0.0; k];
    for j in 0..k {
        qty[j] = dot(&q[j], &resid);
        for (x, qj) in resid.iter_mut().zip(&q[j]) {
            *x -= qty[j] * qj;
        }
    }
    let mut coef = vec![0.0; k];
    for j in (0..k).rev() {
        if r[j][j] == 0.0 {
            continue;
        }
        let tail: f64 = (j + 1..k).map(|i| r[j][i] * coef[i]).sum();
        coef[j] = (qty[j] - tail) / r[j][j];
    }
    (coef, dot(&resid, &resid))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// CSV with header `n,p_n,log_p_n`; `log_p_n` is `-inf` when `p_n = 0`.
pub fn write_return_csv(p: &[f64]) -> String {
    let mut out = String::from("n,p_n,log_p_n\n");
    for (i, &x) in p.iter().enumerate() {
        writeln!(out, "{},{:e},{}", i + 1, x, fmt_log(x)).unwrap();
    }
    out
}

fn fmt_log(x: f64) -> String {
    if x > 0.0 {
        format!("{}", x.ln())
    } else {
        "-inf".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_sequence_is_recovered() {
        let p: Vec<f64> = (1..=30).map(|n| (-(n as f64)).exp()).collect();
        let fit = hk_fit_sequence(&p, &HkFitConfig::default()).unwrap();
        assert_eq!(fit.gamma, 1.0);
        assert!((fit.c - 1.0).abs() < 1e-9);
        assert!(fit.intercept.abs() < 1e-9 && fit.log_coefficient.abs() < 1e-9);
        assert_eq!(fit.regime, DecayRegime::StretchedExponential);
    }

    #[test]
    fn too_few_points() {
        let p = vec![0.5, 0.0, 0.25, 0.0, 0.1];
        assert!(matches!(
            hk_fit_sequence(&p, &HkFitConfig::default()),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let csv = write_return_csv(&[0.0, 0.5]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "n,p_n,log_p_n");
        assert_eq!(lines[1], "1,0e0,-inf");
        assert!(lines[2].starts_with("2,5e-1,-0.693"));
    }

    #[test]
    fn tree_decays_stretched_exponentially() {
        let g = Graph::tree_ball(3, 16).unwrap();
        let fit = hk_fit(&g, 0, 30, &HkFitConfig::default()).unwrap();
        assert!((0.8..=1.0).contains(&fit.gamma), "gamma = {}", fit.gamma);
        assert_eq!(fit.regime, DecayRegime::StretchedExponential);
    }

    #[test]
    fn cycle_is_flagged_polynomial() {
        let g = Graph::cycle(64).unwrap();
        let fit = hk_fit(&g, 0, 30, &HkFitConfig::default()).unwrap();
        assert_eq!(fit.regime, DecayRegime::Polynomial);
        assert!((fit.polynomial_fit.1 - 0.5).abs() < 0.05);
    }
}
