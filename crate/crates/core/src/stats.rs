//! Small sample statistics shared by the Monte-Carlo estimators.

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub draws: usize,
}

impl McEstimate {
    /// Mean and standard error of `samples` (unbiased sample variance).
    pub fn from_samples(samples: &[f64]) -> Self {
        let m = samples.len();
        if m == 0 {
            return McEstimate {
                mean: f64::NAN,
                stderr: f64::NAN,
                draws: 0,
            };
        }
        let mean = samples.iter().sum::<f64>() / m as f64;
        let stderr = if m > 1 {
            let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            (var / m as f64).sqrt()
        } else {
            f64::NAN
        };
        McEstimate { mean, stderr, draws: m }
    }

    /// `|mean - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        (self.mean - target).abs() / self.stderr
    }
}
