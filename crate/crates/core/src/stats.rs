//! Small statistics helpers shared by the estimators and the test suites:
//! chi-square tests and binomial confidence intervals.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Two-sided 99% standard-normal quantile.
pub const Z_99: f64 = 2.5758293035489004;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

fn p_value(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    let dist = ChiSquared::new(df as f64).expect("df > 0");
    1.0 - dist.cdf(statistic)
}

/// Goodness-of-fit chi-square of observed counts against cell probabilities.
/// Cells with probability 0 must be empty.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquare> {
    if observed.len() != probs.len() {
        return Err(Error::InvalidParameter {
            name: "probs",
            reason: format!("{} cells vs {} probabilities", observed.len(), probs.len()),
        });
    }
    let total: u64 = observed.iter().sum();
    if total == 0 {
        return Err(Error::InvalidParameter {
            name: "observed",
            reason: "no observations".into(),
        });
    }
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&obs, &p) in observed.iter().zip(probs) {
        if p <= 0.0 {
            if obs > 0 {
                return Err(Error::InvalidParameter {
                    name: "observed",
                    reason: "observation in a zero-probability cell".into(),
                });
            }
            continue;
        }
        let expected = p * total as f64;
        let diff = obs as f64 - expected;
        statistic += diff * diff / expected;
        cells += 1;
    }
    let df = cells.saturating_sub(1);
    Ok(ChiSquare {
        statistic,
        df,
        p_value: p_value(statistic, df),
    })
}

/// Two-sample chi-square test of homogeneity over matching cells.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<ChiSquare> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: format!("{} cells vs {}", a.len(), b.len()),
        });
    }
    let total_a: u64 = a.iter().sum();
    let total_b: u64 = b.iter().sum();
    if total_a == 0 || total_b == 0 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "both samples need observations".into(),
        });
    }
    let grand = (total_a + total_b) as f64;
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for (&ca, &cb) in a.iter().zip(b) {
        let pooled = ca + cb;
        if pooled == 0 {
            continue;
        }
        let expect_a = pooled as f64 * total_a as f64 / grand;
        let expect_b = pooled as f64 * total_b as f64 / grand;
        let da = ca as f64 - expect_a;
        let db = cb as f64 - expect_b;
        statistic += da * da / expect_a + db * db / expect_b;
        cells += 1;
    }
    let df = cells.saturating_sub(1);
    Ok(ChiSquare {
        statistic,
        df,
        p_value: p_value(statistic, df),
    })
}
