use crate::operand::{UnifiedOperand, ULFX_FRAC_BITS};

/// MUL-stage output: an exact log-domain product of two operands.
///
/// No rounding happens here; the fields are plain sums. The 16-bit ulfx
/// splits into an 8-bit integer exponent and an 8-bit log-domain fraction
/// (lnf) for the accumulation stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductTerm {
    pub sign: bool,
    pub regime_scaled: i32,
    pub ulfx_q: i32,
    pub zero: bool,
}

impl ProductTerm {
    pub const ZERO: ProductTerm = ProductTerm {
        sign: false,
        regime_scaled: 0,
        ulfx_q: 0,
        zero: true,
    };

    /// Integer part of ulfx (floor split, so lnf stays non-negative).
    pub fn exponent(&self) -> i32 {
        self.ulfx_q >> ULFX_FRAC_BITS
    }

    /// Log-domain fraction in units of 2^-8, in [0, 256).
    pub fn lnf_q(&self) -> u16 {
        (self.ulfx_q & ((1 << ULFX_FRAC_BITS) - 1)) as u16
    }

    pub fn log2_magnitude(&self) -> f64 {
        debug_assert!(!self.zero);
        f64::from(self.regime_scaled) + f64::from(self.ulfx_q) / 256.0
    }

    pub fn value(&self) -> f64 {
        if self.zero {
            return 0.0;
        }
        let m = self.log2_magnitude().exp2();
        if self.sign {
            -m
        } else {
            m
        }
    }

    /// Declared MUL-stage output widths: 16-bit signed regime, 16-bit ulfx
    /// read as an 8.8 fixed point.
    pub fn fits_declared_widths(&self) -> bool {
        if self.zero {
            return true;
        }
        let r16 = self.regime_scaled >= i32::from(i16::MIN) && self.regime_scaled <= i32::from(i16::MAX);
        let u16_ok = self.ulfx_q >= i32::from(i16::MIN) && self.ulfx_q <= i32::from(i16::MAX);
        r16 && u16_ok
    }
}

/// Log-domain multiply: sign XOR plus exact regime and ulfx additions.
/// A zero operand annihilates the product.
pub fn mul(w: &UnifiedOperand, a: &UnifiedOperand) -> ProductTerm {
    if w.zero || a.zero {
        return ProductTerm::ZERO;
    }
    ProductTerm {
        sign: w.sign != a.sign,
        regime_scaled: w.regime_scaled + a.regime_scaled,
        ulfx_q: w.ulfx_q + a.ulfx_q,
        zero: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{unified_decode, Mode, Path};
    use lp_core::{LPBitPattern, LPParams};

    const P813: LPParams = LPParams::new(8, 1, 3, 0.0);

    fn operand(bits: u8) -> UnifiedOperand {
        unified_decode(LPBitPattern::new(bits, 8), &P813, Path::Weight, Mode::C).unwrap()
    }

    #[test]
    fn unit_times_unit() {
        let one = operand(0b0100_0000);
        let p = mul(&one, &one);
        assert_eq!(p.value(), 1.0);
        assert_eq!((p.exponent(), p.lnf_q()), (0, 0));
    }

    #[test]
    fn exact_exponent_addition() {
        // 2^3.375 * 2^-1.25 = 2^2.125
        let w = operand(0b0110_1011);
        let a = operand(0b0010_1100);
        assert_eq!(a.log2_magnitude(), -1.25);
        let p = mul(&w, &a);
        assert_eq!(p.log2_magnitude(), 2.125);
        assert_eq!(p.exponent(), 2);
        assert_eq!(p.lnf_q(), 32); // 0.125 * 256
    }

    #[test]
    fn negative_ulfx_splits_with_nonnegative_lnf() {
        let params = LPParams::new(8, 1, 3, 0.25);
        let one =
            unified_decode(LPBitPattern::new(0b0100_0000, 8), &params, Path::Weight, Mode::C)
                .unwrap();
        let p = mul(&one, &one);
        // ulfx = -0.5 -> exponent -1, lnf 0.5
        assert_eq!(p.exponent(), -1);
        assert_eq!(p.lnf_q(), 128);
    }

    #[test]
    fn zero_annihilates() {
        let z = UnifiedOperand::ZERO;
        let w = operand(0b0110_1011);
        assert!(mul(&z, &w).zero);
        assert_eq!(mul(&w, &z).value(), 0.0);
    }
}
