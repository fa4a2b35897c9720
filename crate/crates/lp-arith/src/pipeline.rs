use crate::accumulate::{align_accumulate, PartialSum};
use crate::converter::ConverterTable;
use crate::operand::unified_decode;
use crate::product::mul;
use crate::{ArithError, Mode, Path};
use lp_core::{LPBitPattern, LPParams};

/// Golden-model dot product: compensated f64 multiply-accumulate of the
/// decoded real values. Independent of the datapath stages it checks.
pub fn dot_reference(weights: &[f64], activations: &[f64]) -> f64 {
    assert_eq!(weights.len(), activations.len());
    // Neumaier-compensated summation.
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (&w, &a) in weights.iter().zip(activations) {
        let term = w * a;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Full datapath dot product over encoded operands, in sequence order:
/// decode -> mul -> align/accumulate. This is the reference the systolic
/// simulator must match bit-exactly.
pub fn pipeline_dot(
    weights: &[LPBitPattern],
    activations: &[LPBitPattern],
    w_params: &LPParams,
    a_params: &LPParams,
    mode: Mode,
    table: &ConverterTable,
    acc_frac_bits: u32,
) -> Result<PartialSum, ArithError> {
    if weights.len() != activations.len() {
        return Err(ArithError::LengthMismatch {
            lhs: weights.len(),
            rhs: activations.len(),
        });
    }
    let mut acc = PartialSum::zero(acc_frac_bits);
    for (&wb, &ab) in weights.iter().zip(activations) {
        let w = unified_decode(wb, w_params, Path::Weight, mode)?;
        let a = unified_decode(ab, a_params, Path::Activation, mode)?;
        acc = align_accumulate(&acc, &mul(&w, &a), table);
    }
    Ok(acc)
}

/// Analytic error budget for a pipeline dot of `len` terms with total
/// absolute mass `abs_sum`: per-term converter error 2^-(F+1) plus
/// alignment truncation 2^-(W-1).
pub fn dot_error_budget(len: usize, abs_sum: f64, f_bits: u32, acc_frac_bits: u32) -> f64 {
    let per_term = 2f64.powi(-(f_bits as i32 + 1)) + 2f64.powi(-(acc_frac_bits as i32 - 1));
    len as f64 * per_term * abs_sum.max(f64::MIN_POSITIVE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_ACC_FRAC_BITS;
    use lp_core::{decode, LPBitPattern};
    use rand::{Rng, SeedableRng};

    #[test]
    fn trivial_dots() {
        assert_eq!(dot_reference(&[1.0], &[1.0]), 1.0);
        assert_eq!(dot_reference(&[], &[]), 0.0);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let p = LPParams::new(8, 1, 3, 0.0);
        let t = ConverterTable::default();
        let r = pipeline_dot(
            &[LPBitPattern::zero(8)],
            &[],
            &p,
            &p,
            Mode::C,
            &t,
            DEFAULT_ACC_FRAC_BITS,
        );
        assert!(matches!(r, Err(ArithError::LengthMismatch { .. })));
    }

    #[test]
    fn pipeline_matches_reference_within_budget() {
        let w_params = LPParams::new(8, 1, 3, 0.25);
        let a_params = LPParams::new(8, 2, 4, -1.5);
        let table = ConverterTable::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &len in &[1usize, 2, 16, 64, 512] {
            let wb: Vec<LPBitPattern> = (0..len)
                .map(|_| {
                    let mut b = rng.gen_range(0..=255u8);
                    if b == 0x80 {
                        b = 0;
                    }
                    LPBitPattern::new(b, 8)
                })
                .collect();
            let ab: Vec<LPBitPattern> = (0..len)
                .map(|_| {
                    let mut b = rng.gen_range(0..=255u8);
                    if b == 0x80 {
                        b = 0;
                    }
                    LPBitPattern::new(b, 8)
                })
                .collect();
            let wv: Vec<f64> = wb.iter().map(|&b| decode(b, &w_params).unwrap().value()).collect();
            let av: Vec<f64> = ab.iter().map(|&b| decode(b, &a_params).unwrap().value()).collect();
            let exact = dot_reference(&wv, &av);
            let abs_sum: f64 = wv.iter().zip(&av).map(|(w, a)| (w * a).abs()).sum();
            let got = pipeline_dot(
                &wb,
                &ab,
                &w_params,
                &a_params,
                Mode::C,
                &table,
                DEFAULT_ACC_FRAC_BITS,
            )
            .unwrap()
            .value();
            let budget = dot_error_budget(len, abs_sum, 8, DEFAULT_ACC_FRAC_BITS);
            assert!(
                (got - exact).abs() <= budget,
                "len {len}: err {} > budget {budget}",
                (got - exact).abs()
            );
        }
    }

    #[test]
    fn zero_heavy_vectors_are_exactly_annihilated() {
        let p = LPParams::new(8, 1, 3, 0.0);
        let t = ConverterTable::default();
        let zeros = vec![LPBitPattern::zero(8); 16];
        let ones = vec![LPBitPattern::new(0b0100_0000, 8); 16];
        let acc = pipeline_dot(&zeros, &ones, &p, &p, Mode::C, &t, DEFAULT_ACC_FRAC_BITS).unwrap();
        assert!(acc.is_zero());
        assert_eq!(acc.sticky_losses, 0);
    }
}
