//! Descriptive statistics for offset samples.
//!
//! Quantiles interpolate linearly between order statistics at position
//! `(n − 1)·q`, so the median of an even-length sample is the midpoint of
//! the two central values. The standard deviation is the population one.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
    pub q1: f64,
    pub q3: f64,
}

impl Summary {
    pub fn iqr(&self) -> f64 {
        self.q3 - self.q1
    }

    pub fn whisker_low(&self) -> f64 {
        self.q1 - 1.5 * self.iqr()
    }

    pub fn whisker_high(&self) -> f64 {
        self.q3 + 1.5 * self.iqr()
    }
}

/// Linear-interpolation quantile of an ascending, non-empty sample.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = (sorted.len() - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// `None` for an empty sample.
pub fn describe(samples: &[f64]) -> Option<Summary> {
    if samples.is_empty() {
        return None;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let var = sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Some(Summary {
        mean,
        median: quantile_sorted(&sorted, 0.5),
        std: var.sqrt(),
        q1: quantile_sorted(&sorted, 0.25),
        q3: quantile_sorted(&sorted, 0.75),
    })
}
