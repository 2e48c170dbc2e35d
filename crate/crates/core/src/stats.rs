//! Small estimators used by the reports.

use serde::{Deserialize, Serialize};

/// z for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// A proportion with its Wilson score interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl Proportion {
    /// Wilson 95% interval; zero trials give the uninformative `[0, 1]`.
    pub fn wilson(successes: u64, trials: u64) -> Self {
        assert!(successes <= trials);
        if trials == 0 {
            return Proportion { successes, trials, estimate: 0.0, lower: 0.0, upper: 1.0 };
        }
        let n = trials as f64;
        let p = successes as f64 / n;
        let z2 = Z95 * Z95;
        let denom = 1.0 + z2 / n;
        let centre = (p + z2 / (2.0 * n)) / denom;
        let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
        Proportion {
            successes,
            trials,
            estimate: p,
            lower: if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
            upper: if successes == trials { 1.0 } else { (centre + half).min(1.0) },
        }
    }
}

/// Mean and sample standard deviation (`n - 1` denominator).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
