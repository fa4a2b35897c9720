use crate::SearchError;
use lp_infer::Tensor;

/// Excess kurtosis (Kurtosis-3) with population moments: m4/m2^2 - 3.
/// Zero-variance inputs map to 0 by convention.
pub fn kurtosis3(v: &[f64]) -> Result<f64, SearchError> {
    if v.len() < 2 {
        return Err(SearchError::KurtosisInput(v.len()));
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for &x in v {
        let d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return Ok(0.0);
    }
    Ok(m4 / (m2 * m2) - 3.0)
}

/// Pools per-layer intermediate tensors into one vector per calibration
/// sample: each layer tensor is viewed as batch rows (remaining dims
/// flattened), kurtosis3 summarizes each row, and layers concatenate in
/// order. Output: `batch` vectors of length `layers`.
pub fn pooled_representation(taps: &[Tensor]) -> Result<Vec<Vec<f64>>, SearchError> {
    if taps.is_empty() {
        return Err(SearchError::EmptyRepresentation);
    }
    let batch = taps[0].batch();
    let mut pooled = vec![Vec::with_capacity(taps.len()); batch];
    for t in taps {
        if t.batch() != batch {
            return Err(SearchError::PooledShape);
        }
        for b in 0..batch {
            pooled[b].push(kurtosis3(t.row(b))?);
        }
    }
    Ok(pooled)
}

fn l2_normalized(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / norm).collect()
}

/// Global-local contrastive divergence between per-sample pooled vectors
/// of the quantized and full-precision models:
///
/// ```text
/// mean_p  ln(1 + e^{-<q_p, fp_p>/tau} * sum_{p' != p} e^{<q_p, fp_p'>/tau})
/// ```
///
/// Inner products are taken on l2-normalized vectors. A single sample has
/// no negatives and scores exactly 0.
pub fn contrastive_loss(
    quantized: &[Vec<f64>],
    full_precision: &[Vec<f64>],
    tau: f64,
) -> Result<f64, SearchError> {
    if tau <= 0.0 || !tau.is_finite() {
        return Err(SearchError::TauNonPositive(tau));
    }
    if quantized.len() != full_precision.len() || quantized.is_empty() {
        return Err(SearchError::PooledShape);
    }
    let samples = quantized.len();
    if samples == 1 {
        return Ok(0.0);
    }
    let q: Vec<Vec<f64>> = quantized.iter().map(|v| l2_normalized(v)).collect();
    let fp: Vec<Vec<f64>> = full_precision.iter().map(|v| l2_normalized(v)).collect();
    let dim = q[0].len();
    if q.iter().chain(fp.iter()).any(|v| v.len() != dim) {
        return Err(SearchError::PooledShape);
    }

    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let mut acc = 0.0;
    for p in 0..samples {
        let pos = dot(&q[p], &fp[p]) / tau;
        // stable log-sum-exp over the negatives
        let mut max_neg = f64::NEG_INFINITY;
        let mut negs = Vec::with_capacity(samples - 1);
        for p2 in 0..samples {
            if p2 == p {
                continue;
            }
            let s = dot(&q[p], &fp[p2]) / tau;
            max_neg = max_neg.max(s);
            negs.push(s);
        }
        let sum_exp: f64 = negs.iter().map(|s| (s - max_neg).exp()).sum();
        // ln(1 + e^{-pos} * sum e^{neg}) = ln(1 + e^{max_neg - pos + ln(sum_exp)})
        let a = max_neg - pos + sum_exp.ln();
        acc += if a > 30.0 { a } else { a.exp().ln_1p() };
    }
    Ok(acc / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_kurtosis_is_minus_two() {
        let v: Vec<f64> = (0..64).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert_eq!(kurtosis3(&v).unwrap(), -2.0);
    }

    #[test]
    fn constant_rows_map_to_zero() {
        assert_eq!(kurtosis3(&[3.5; 10]).unwrap(), 0.0);
    }

    #[test]
    fn short_input_is_an_error() {
        assert!(matches!(kurtosis3(&[1.0]), Err(SearchError::KurtosisInput(1))));
    }

    #[test]
    fn large_normal_sample_is_near_zero() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let v: Vec<f64> = (0..200_000)
            .map(|_| {
                // Box-Muller from two uniforms
                let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
                let u2: f64 = rng.gen_range(0.0..1.0);
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let k = kurtosis3(&v).unwrap();
        assert!(k.abs() <= 0.1, "kurtosis {k}");
    }

    #[test]
    fn pooling_shapes() {
        let one = vec![Tensor::new(vec![1, 4], vec![1.0, -1.0, 1.0, -1.0])];
        let p = pooled_representation(&one).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].len(), 1);
        assert_eq!(p[0][0], -2.0);

        let three = vec![
            Tensor::new(vec![2, 4], vec![0.0; 8]),
            Tensor::new(vec![2, 3], vec![0.0; 6]),
            Tensor::new(vec![2, 2], vec![0.0; 4]),
        ];
        let p = pooled_representation(&three).unwrap();
        assert_eq!((p.len(), p[0].len()), (2, 3));
    }

    #[test]
    fn pooling_is_permutation_invariant_within_rows() {
        let a = Tensor::new(vec![1, 4], vec![0.5, 2.0, -1.0, 0.25]);
        let b = Tensor::new(vec![1, 4], vec![2.0, 0.25, 0.5, -1.0]);
        let pa = pooled_representation(&[a]).unwrap();
        let pb = pooled_representation(&[b]).unwrap();
        assert_eq!(pa, pb);
    }

    #[test]
    fn single_sample_has_zero_loss() {
        let v = vec![vec![0.3, 0.4]];
        assert_eq!(contrastive_loss(&v, &v, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn log_two_case() {
        // pos inner product 0, one negative inner product 0 -> ln 2
        let q = vec![vec![1.0, 0.0], vec![1.0, 0.0]];
        let fp = vec![vec![0.0, 1.0], vec![0.0, 1.0]];
        // sample 0: pos = <q0, fp0> = 0, neg = <q0, fp1> = 0 -> ln(1 + 1)
        let loss = contrastive_loss(&q, &fp, 1.0).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn orthonormal_closed_form() {
        // identical models with orthonormal per-sample vectors:
        // every sample scores ln(1 + e^{-1/tau} * (S-1) * e^{0})
        for s in [2usize, 5, 9] {
            let mut vs = Vec::new();
            for i in 0..s {
                let mut v = vec![0.0; s];
                v[i] = 1.0;
                vs.push(v);
            }
            let loss = contrastive_loss(&vs, &vs, 1.0).unwrap();
            let expect = (1.0 + (-1.0f64).exp() * (s as f64 - 1.0)).ln();
            assert!((loss - expect).abs() < 1e-12, "S={s}: {loss} vs {expect}");
        }
    }

    #[test]
    fn tau_must_be_positive() {
        let v = vec![vec![1.0], vec![0.5]];
        assert!(contrastive_loss(&v, &v, 0.0).is_err());
        assert!(contrastive_loss(&v, &v, -1.0).is_err());
    }
}
