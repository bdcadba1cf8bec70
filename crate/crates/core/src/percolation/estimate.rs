use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateKind {
    /// Wilson score interval.
    Proportion,
    /// Student t interval.
    Mean,
    /// Computed exactly; the interval is degenerate.
    Exact,
}

/// A Monte Carlo estimate with a two-sided confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub kind: EstimateKind,
    pub n_samples: u64,
    /// Successes for proportions, sum of values for means.
    pub value_sum: f64,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
}

fn check_confidence(confidence: f64) -> Result<()> {
    if confidence > 0.0 && confidence < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("confidence {confidence} not in (0, 1)")))
    }
}

fn z_quantile(confidence: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + confidence / 2.0)
}

impl Estimate {
    pub fn proportion(successes: u64, n: u64, confidence: f64) -> Result<Self> {
        check_confidence(confidence)?;
        if n == 0 {
            return Err(Error::InsufficientSamples { got: 0, need: 1 });
        }
        if successes > n {
            return Err(invalid("more successes than samples"));
        }
        let nf = n as f64;
        let mean = successes as f64 / nf;
        let z = z_quantile(confidence);
        let z2 = z * z;
        let denom = 1.0 + z2 / nf;
        let centre = (mean + z2 / (2.0 * nf)) / denom;
        let half = z / denom * (mean * (1.0 - mean) / nf + z2 / (4.0 * nf * nf)).sqrt();
        Ok(Estimate {
            kind: EstimateKind::Proportion,
            n_samples: n,
            value_sum: successes as f64,
            mean,
            ci_low: (centre - half).clamp(0.0, mean),
            ci_high: (centre + half).clamp(mean, 1.0),
            confidence,
        })
    }

    pub fn mean(sum: f64, sum_sq: f64, n: u64, confidence: f64) -> Result<Self> {
        check_confidence(confidence)?;
        if n < 2 {
            return Err(Error::InsufficientSamples { got: n, need: 2 });
        }
        let nf = n as f64;
        let mean = sum / nf;
        let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        let t = StudentsT::new(0.0, 1.0, nf - 1.0)
            .map_err(|e| invalid(e.to_string()))?
            .inverse_cdf(0.5 + confidence / 2.0);
        let half = t * (var / nf).sqrt();
        Ok(Estimate {
            kind: EstimateKind::Mean,
            n_samples: n,
            value_sum: sum,
            mean,
            ci_low: mean - half,
            ci_high: mean + half,
            confidence,
        })
    }

    pub fn exact(value: f64) -> Self {
        Estimate {
            kind: EstimateKind::Exact,
            n_samples: 0,
            value_sum: value,
            mean: value,
            ci_low: value,
            ci_high: value,
            confidence: 1.0,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_low <= x && x <= self.ci_high
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }
}

/// Running sums for a mean estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanTally {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MeanTally {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &MeanTally) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn estimate(&self, confidence: f64) -> Result<Estimate> {
        Estimate::mean(self.sum, self.sum_sq, self.n, confidence)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_brackets_the_mean() {
        for (s, n) in [(0u64, 10u64), (10, 10), (3, 7), (500, 1000)] {
            let e = Estimate::proportion(s, n, 0.99).unwrap();
            assert!(e.ci_low <= e.mean && e.mean <= e.ci_high);
            assert!(e.ci_low >= 0.0 && e.ci_high <= 1.0);
        }
        let e = Estimate::proportion(0, 100, 0.95).unwrap();
        assert_eq!(e.ci_low, 0.0);
        assert!(e.ci_high > 0.0);
    }

    #[test]
    fn wilson_reference_value() {
        // 50 of 100 at 95%: centre 0.5, half-width 1.96/(1+0.0384) * sqrt(0.0025 + 0.000096)
        let e = Estimate::proportion(50, 100, 0.95).unwrap();
        let z = 1.959963984540054f64;
        let half = z / (1.0 + z * z / 100.0) * (0.0025 + z * z / 40000.0f64).sqrt();
        assert!((e.ci_high - 0.5 - half).abs() < 1e-12);
    }

    #[test]
    fn t_interval() {
        let mut t = MeanTally::default();
        for x in [1.0, 2.0, 3.0, 4.0] {
            t.push(x);
        }
        let e = t.estimate(0.95).unwrap();
        assert_eq!(e.mean, 2.5);
        // t_{0.975, 3} = 3.182446305284263, s = sqrt(5/3)
        let half = 3.182446305284263 * (5.0f64 / 3.0 / 4.0).sqrt();
        assert!((e.ci_high - 2.5 - half).abs() < 1e-9);
        assert!(Estimate::mean(1.0, 1.0, 1, 0.95).is_err());
    }
}
