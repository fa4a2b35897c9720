use crate::codec::enumerate;
use crate::decode::Special;
use crate::{LPParams, LpError};

/// Decimal-accuracy samples over the positive dynamic range: for each pair
/// of adjacent positive values, the log10 of their geometric midpoint and
/// the decimal digits of relative accuracy at that point.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyProfile {
    /// (log10 magnitude, decimal digits); magnitudes strictly increasing.
    pub points: Vec<(f64, f64)>,
}

impl AccuracyProfile {
    /// Peak accuracy location, as log10 magnitude.
    pub fn peak_log10_magnitude(&self) -> f64 {
        self.points
            .iter()
            .cloned()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .map(|(m, _)| m)
            .unwrap_or(0.0)
    }

    /// Population variance of the digit samples; smaller means flatter
    /// (less tapered) accuracy.
    pub fn digits_variance(&self) -> f64 {
        let n = self.points.len() as f64;
        if n == 0.0 {
            return 0.0;
        }
        let mean = self.points.iter().map(|p| p.1).sum::<f64>() / n;
        self.points.iter().map(|p| (p.1 - mean).powi(2)).sum::<f64>() / n
    }
}

/// Tapered-accuracy profile of a format. Between adjacent positive values
/// v and w the worst relative step is w/v, worth
/// `-log10(log10(w/v))` decimal digits; the sample is placed at the
/// geometric midpoint.
pub fn accuracy_profile(params: &LPParams) -> Result<AccuracyProfile, LpError> {
    let entries = enumerate(params)?;
    let positives: Vec<f64> = entries
        .iter()
        .filter(|e| e.special == Special::Normal && e.value > 0.0)
        .map(|e| e.log2_magnitude.unwrap())
        .collect();
    let log2_of_10 = 10f64.log2();
    let mut points = Vec::with_capacity(positives.len().saturating_sub(1));
    for pair in positives.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let mid_log10 = (lo + hi) / 2.0 / log2_of_10;
        // log10(v_{i+1}/v_i) = (hi - lo) / log2(10)
        let digits = -((hi - lo) / log2_of_10).log10();
        points.push((mid_log10, digits));
    }
    Ok(AccuracyProfile { points })
}
