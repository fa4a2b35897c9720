use crate::tensor::Tensor;
use lp_core::{Codec, LPParams};

/// Replaces every element with its nearest LP value (decode of encode) and
/// reports the root-mean-squared quantization error.
pub fn fake_quantize(t: &Tensor, params: &LPParams) -> (Tensor, f64) {
    let codec = Codec::new(*params).expect("fake_quantize needs a decodable format");
    fake_quantize_with(t, &codec)
}

/// `fake_quantize` against a prebuilt codec (hot path).
pub fn fake_quantize_with(t: &Tensor, codec: &Codec) -> (Tensor, f64) {
    let mut out = Vec::with_capacity(t.len());
    let mut sq = 0.0f64;
    for &x in t.data() {
        let xhat = codec.decode(codec.encode(x)).unwrap().value();
        sq += (x - xhat) * (x - xhat);
        out.push(xhat);
    }
    let rmse = if t.is_empty() {
        0.0
    } else {
        (sq / t.len() as f64).sqrt()
    };
    (Tensor::new(t.shape().to_vec(), out), rmse)
}

/// Derived activation format plus whether any bound had to be clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActivationParams {
    pub params: LPParams,
    pub clamped: bool,
}

/// Activation format derived from a layer's weight format: width and
/// exponent double (capped at 8 and 5), the regime is retained, and the
/// scale factor chains as sf_act[l] = sf_act[l-1] + sf_w[l] with the
/// first layer seeded at prev_sf = 0.
pub fn activation_params(w: &LPParams, prev_sf: f64) -> ActivationParams {
    let n = (w.n * 2).min(8);
    let mut clamped = false;

    let mut es = (w.es * 2).min(5);
    let es_cap = n.saturating_sub(3);
    if es > es_cap {
        es = es_cap;
        clamped = true;
    }

    let mut rs = w.rs;
    if rs > n - 1 {
        rs = n - 1;
        clamped = true;
    }
    if rs < 2 {
        rs = 2;
        clamped = true;
    }

    ActivationParams {
        params: LPParams::new(n, es, rs, prev_sf + w.sf),
        clamped,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use lp_core::enumerate;

    #[test]
    fn representable_values_pass_through() {
        let params = LPParams::new(8, 1, 3, 0.0);
        let vals: Vec<f64> = enumerate(&params)
            .unwrap()
            .iter()
            .filter(|e| e.special == lp_core::Special::Normal)
            .map(|e| e.value as f64)
            .take(16)
            .collect();
        let t = Tensor::new(vec![vals.len()], vals.clone());
        let (q, rmse) = fake_quantize(&t, &params);
        assert_eq!(q.data(), t.data());
        assert_eq!(rmse, 0.0);
    }

    #[test]
    fn saturation_error_in_closed_form() {
        let params = LPParams::new(8, 1, 3, 0.0);
        let codec = Codec::new(params).unwrap();
        let maxpos = codec.max_positive();
        let c = (maxpos * 4.0) as f64;
        let t = Tensor::new(vec![10], vec![c; 10]);
        let (q, rmse) = fake_quantize(&t, &params);
        for &v in q.data() {
            assert_eq!(v, maxpos as f64);
        }
        // every element saturates identically, so rmse = |c - maxpos|
        let expect = (f64::from(c) - maxpos).abs();
        assert!((rmse - expect).abs() < 1e-9);
    }

    #[test]
    fn matched_sf_beats_shifted_sf_on_lognormal() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let data: Vec<f64> = (0..512)
            .map(|_| {
                let u: f64 = rng.gen_range(-2.0..2.0);
                (u * std::f64::consts::LN_2).exp() as f64 * 0.05
            })
            .collect();
        let t = Tensor::new(vec![512], data.clone());
        let mean_log2 = data
            .iter()
            .map(|&x| f64::from(x).abs().log2())
            .sum::<f64>()
            / 512.0;
        let good = LPParams::new(8, 1, 3, -mean_log2);
        let bad = LPParams::new(8, 1, 3, -mean_log2 + 8.0);
        let (_, rmse_good) = fake_quantize(&t, &good);
        let (_, rmse_bad) = fake_quantize(&t, &bad);
        assert!(rmse_good < rmse_bad, "{rmse_good} !< {rmse_bad}");
    }

    #[test]
    fn idempotent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let data: Vec<f64> = (0..256).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let t = Tensor::new(vec![256], data);
        let params = LPParams::new(6, 1, 4, 0.75);
        let (once, _) = fake_quantize(&t, &params);
        let (twice, rmse2) = fake_quantize(&once, &params);
        assert_eq!(once.data(), twice.data());
        assert_eq!(rmse2, 0.0);
    }

    #[test]
    fn activation_doubling_rules() {
        let a = activation_params(&LPParams::new(4, 1, 3, 0.5), 0.0);
        assert_eq!((a.params.n, a.params.es, a.params.rs), (8, 2, 3));
        assert_eq!(a.params.sf, 0.5);
        assert!(!a.clamped);

        let b = activation_params(&LPParams::new(8, 3, 5, -1.0), 2.0);
        assert_eq!((b.params.n, b.params.es), (8, 5));
        assert_eq!(b.params.sf, 1.0);

        // degenerate width: doubling n=2 gives 4, es cap forces a clamp
        let c = activation_params(&LPParams::new(2, 2, 1, 0.0), 0.0);
        assert_eq!(c.params.n, 4);
        assert_eq!(c.params.es, 1);
        assert_eq!(c.params.rs, 2);
        assert!(c.clamped);
    }

    #[test]
    fn nested_grid_monotone_precision() {
        // same <es, rs, sf>: the 4-bit value set is a subset of the 8-bit
        // one, so 8-bit rmse can never exceed 4-bit rmse
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for trial in 0..8 {
            let data: Vec<f64> = (0..128).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let t = Tensor::new(vec![128], data);
            let p8 = LPParams::new(8, 1, 3, 0.5);
            let p4 = LPParams::new(4, 1, 3, 0.5);
            let (_, r8) = fake_quantize(&t, &p8);
            let (_, r4) = fake_quantize(&t, &p4);
            assert!(r8 <= r4 + 1e-12, "trial {trial}: {r8} > {r4}");
        }
    }
}
