use crate::candidate::Fitness;
use crate::config::{CompressionCount, FitnessKind, SearchConfig};
use crate::stats::{contrastive_loss, pooled_representation};
use crate::SearchError;
use lp_core::LPParams;
use lp_infer::{forward, forward_quantized, CalibrationSet, Model, Tensor};

/// Compression term: sum over layers of element count times bit width.
/// `counts` is per-layer (activation elements per sample by default,
/// weight elements otherwise).
pub fn compression_loss(counts: &[usize], delta: &[LPParams]) -> f64 {
    counts
        .iter()
        .zip(delta)
        .map(|(&c, p)| c as f64 * f64::from(p.n))
        .sum()
}

/// Precomputed full-precision state shared by every candidate evaluation:
/// FP pooled representations, FP outputs, and the per-layer element counts
/// feeding the compression term.
pub struct FitnessContext<'a> {
    model: &'a Model,
    calib: &'a CalibrationSet,
    cfg: SearchConfig,
    fp_pooled: Vec<Vec<f64>>,
    fp_output: Tensor,
    counts: Vec<usize>,
}

impl<'a> FitnessContext<'a> {
    pub fn new(
        model: &'a Model,
        calib: &'a CalibrationSet,
        cfg: &SearchConfig,
    ) -> Result<Self, SearchError> {
        if calib.is_empty() {
            return Err(SearchError::EmptyCalibration);
        }
        let (fp_output, taps) = forward(model, &calib.inputs, true, cfg.tap_point)?;
        let taps = taps.expect("tap requested");
        let fp_pooled = pooled_representation(&taps)?;
        let counts = match cfg.compression {
            CompressionCount::Activations => {
                taps.iter().map(|t| t.row_len()).collect()
            }
            CompressionCount::Weights => model.weight_counts(),
        };
        Ok(Self {
            model,
            calib,
            cfg: cfg.clone(),
            fp_pooled,
            fp_output,
            counts,
        })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Per-layer element counts for compression reporting.
    pub fn compression_of(&self, delta: &[LPParams]) -> f64 {
        compression_loss(&self.counts, delta)
    }

    /// Evaluates one candidate: quantized forward over the calibration
    /// set, divergence per the configured fitness kind, compression
    /// penalty, and the combined total. Pure: identical inputs produce
    /// identical results, so concurrent evaluation is safe.
    pub fn evaluate(&self, delta: &[LPParams]) -> Result<Fitness, SearchError> {
        let want_taps = self.cfg.fitness == FitnessKind::Lpq;
        let (q_output, q_taps) =
            forward_quantized(self.model, delta, &self.calib.inputs, want_taps, self.cfg.tap_point)?;

        let divergence = match self.cfg.fitness {
            FitnessKind::Lpq => {
                let q_pooled = pooled_representation(&q_taps.expect("taps requested"))?;
                contrastive_loss(&q_pooled, &self.fp_pooled, self.cfg.tau)?
            }
            FitnessKind::GlobalContrastive => {
                let q_rows: Vec<Vec<f64>> = rows_of(&q_output);
                let fp_rows: Vec<Vec<f64>> = rows_of(&self.fp_output);
                contrastive_loss(&q_rows, &fp_rows, self.cfg.tau)?
            }
            FitnessKind::Mse => {
                let n = q_output.len() as f64;
                q_output
                    .data()
                    .iter()
                    .zip(self.fp_output.data())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    / n
            }
            FitnessKind::Kl => kl_divergence(&self.fp_output, &q_output),
        };

        let compression = self.compression_of(delta);
        Ok(Fitness {
            total: divergence * compression.powf(self.cfg.lambda),
            divergence,
            compression,
        })
    }
}

fn rows_of(t: &Tensor) -> Vec<Vec<f64>> {
    (0..t.batch()).map(|b| t.row(b).to_vec()).collect()
}

/// Mean row-wise KL(fp || q) over output distributions. Rows that are not
/// already distributions (e.g. raw logits) are softmaxed first.
fn kl_divergence(fp: &Tensor, q: &Tensor) -> f64 {
    let batch = fp.batch();
    let mut acc = 0.0;
    for b in 0..batch {
        let p_row = as_distribution(fp.row(b));
        let q_row = as_distribution(q.row(b));
        let mut kl = 0.0;
        for (&p, &qv) in p_row.iter().zip(&q_row) {
            if p > 0.0 {
                kl += p * (p / qv.max(1e-12)).ln();
            }
        }
        acc += kl;
    }
    acc / batch as f64
}

fn as_distribution(row: &[f64]) -> Vec<f64> {
    let sum: f64 = row.iter().sum();
    let nonneg = row.iter().all(|&v| v >= 0.0);
    if nonneg && (sum - 1.0).abs() < 1e-6 {
        return row.to_vec();
    }
    let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = row.iter().map(|&v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use lp_infer::zoo;

    #[test]
    fn compression_formula() {
        let delta4 = [LPParams::new(4, 1, 3, 0.0)];
        assert_eq!(compression_loss(&[10], &delta4), 40.0);
        let delta8 = [LPParams::new(8, 1, 3, 0.0)];
        assert_eq!(compression_loss(&[10], &delta8), 80.0);

        // doubling every n doubles the loss
        let d1 = vec![LPParams::new(4, 1, 3, 0.0), LPParams::new(3, 0, 2, 0.0)];
        let d2 = vec![LPParams::new(8, 1, 3, 0.0), LPParams::new(6, 0, 2, 0.0)];
        let counts = [7, 11];
        assert_eq!(
            2.0 * compression_loss(&counts, &d1),
            compression_loss(&counts, &d2)
        );
    }

    #[test]
    fn reference_model_pinned_compression() {
        // mlp3 taps: 24, 16, 4 activations per sample; all-8-bit delta
        let model = zoo::reference_mlp(7);
        let task = zoo::blobs_task(7, zoo::DEFAULT_TASK.clone());
        let calib = task.calibration(8);
        let cfg = SearchConfig::default();
        let ctx = FitnessContext::new(&model, &calib, &cfg).unwrap();
        assert_eq!(ctx.counts(), &[24, 16, 4]);
        let delta = vec![LPParams::new(8, 1, 3, 0.0); 3];
        assert_eq!(ctx.compression_of(&delta), (24.0 + 16.0 + 4.0) * 8.0);
    }

    #[test]
    fn fitness_combination_rules() {
        // lambda = 0 -> total = divergence; divergence 0 -> total 0
        assert_eq!(0.5 * 1000f64.powf(0.4), {
            let f = Fitness {
                total: 0.5 * 1000f64.powf(0.4),
                divergence: 0.5,
                compression: 1000.0,
            };
            f.total
        });
        let direct: f64 = 0.5 * 1000f64.powf(0.4);
        assert!((direct - 7.924465962305567).abs() < 1e-9);
    }

    #[test]
    fn evaluate_is_pure() {
        let model = zoo::reference_mlp(3);
        let task = zoo::blobs_task(3, zoo::DEFAULT_TASK.clone());
        let calib = task.calibration(16);
        let cfg = SearchConfig::default();
        let ctx = FitnessContext::new(&model, &calib, &cfg).unwrap();
        let delta = vec![LPParams::new(6, 1, 3, 0.1); 3];
        let a = ctx.evaluate(&delta).unwrap();
        let b = ctx.evaluate(&delta).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn all_fitness_kinds_run() {
        let model = zoo::reference_mlp(3);
        let task = zoo::blobs_task(3, zoo::DEFAULT_TASK.clone());
        let calib = task.calibration(8);
        for kind in [
            FitnessKind::Lpq,
            FitnessKind::Mse,
            FitnessKind::Kl,
            FitnessKind::GlobalContrastive,
        ] {
            let cfg = SearchConfig {
                fitness: kind,
                ..SearchConfig::default()
            };
            let ctx = FitnessContext::new(&model, &calib, &cfg).unwrap();
            let f = ctx
                .evaluate(&vec![LPParams::new(8, 1, 3, 0.0); 3])
                .unwrap();
            assert!(f.total.is_finite(), "{kind:?}");
            assert!(f.divergence >= 0.0, "{kind:?}: {}", f.divergence);
        }
    }
}
