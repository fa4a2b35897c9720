use crate::converter::ConverterTable;
use crate::product::ProductTerm;
use lp_core::{Codec, LPBitPattern, LPParams};

/// Default accumulator fraction width. Covers worst-case alignment for
/// 8-bit operands over reductions up to a few thousand terms.
pub const DEFAULT_ACC_FRAC_BITS: u32 = 24;

/// A linear-domain partial sum: `mant / 2^frac_bits * 2^(regime + exponent)`
/// with the mantissa kept in two's complement and normalized so that
/// `|mant|` is in `[2^frac_bits, 2^(frac_bits+1))`, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartialSum {
    pub regime: i32,
    pub exponent: i32,
    /// Signed linear fraction including the leading integer bit.
    pub mant: i64,
    /// Fraction width of `mant`.
    pub frac_bits: u32,
    /// Count of addends absorbed whole because their scale was more than
    /// frac_bits + 1 below the running sum.
    pub sticky_losses: u32,
}

impl PartialSum {
    pub fn zero(frac_bits: u32) -> Self {
        Self {
            regime: 0,
            exponent: 0,
            mant: 0,
            frac_bits,
            sticky_losses: 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0
    }

    pub fn sign(&self) -> bool {
        self.mant < 0
    }

    /// Combined power-of-two scale.
    pub fn scale(&self) -> i32 {
        self.regime + self.exponent
    }

    pub fn value(&self) -> f64 {
        if self.mant == 0 {
            return 0.0;
        }
        self.mant as f64 * (f64::from(self.scale()) - self.frac_bits as f64).exp2()
    }

    /// log2 of the magnitude and the sign, without going through a single
    /// f64 (keeps requantize exact for large scales).
    fn log2_parts(&self, table: &ConverterTable) -> (bool, f64) {
        debug_assert!(!self.is_zero());
        let f = table.f_bits();
        let mag = self.mant.unsigned_abs();
        let frac = mag - (1u64 << self.frac_bits);
        let lf = (frac >> (self.frac_bits - f)) as u16;
        let lnf = table.linear_to_log(lf);
        let log2 = f64::from(self.scale()) + f64::from(lnf) / (1u32 << f) as f64;
        (self.mant < 0, log2)
    }
}

/// Accumulation stage: converts the product's log fraction to linear,
/// aligns the smaller-scale operand with a truncating right shift, adds
/// the two's-complement fractions, and renormalizes.
///
/// When the scale gap exceeds frac_bits + 1 the smaller operand is
/// absorbed whole and counted in `sticky_losses`. Shifted-out bits are
/// truncated, not rounded, matching a plain alignment shifter.
pub fn align_accumulate(
    psum: &PartialSum,
    p: &ProductTerm,
    table: &ConverterTable,
) -> PartialSum {
    let w = psum.frac_bits;
    if p.zero {
        return *psum;
    }

    let f = table.f_bits();
    let lf = table.log_to_linear(p.lnf_q());
    let mant_mag = (i64::from(lf) + (1i64 << f)) << (w - f);
    let term_mant = if p.sign { -mant_mag } else { mant_mag };
    let term_regime = p.regime_scaled;
    let term_exponent = p.exponent();

    if psum.is_zero() {
        // (1 + lf) is already normalized.
        return PartialSum {
            regime: term_regime,
            exponent: term_exponent,
            mant: term_mant,
            frac_bits: w,
            sticky_losses: psum.sticky_losses,
        };
    }

    let s_p = psum.scale();
    let s_t = term_regime + term_exponent;
    let (regime, mut exponent, big, small, diff) = if s_p >= s_t {
        (psum.regime, psum.exponent, psum.mant, term_mant, (s_p - s_t) as u32)
    } else {
        (term_regime, term_exponent, term_mant, psum.mant, (s_t - s_p) as u32)
    };

    let mut sticky = psum.sticky_losses;
    let aligned = if diff > w + 1 {
        if small != 0 {
            sticky += 1;
        }
        0
    } else {
        small >> diff
    };

    let mut mant = big + aligned;
    if mant == 0 {
        let mut z = PartialSum::zero(w);
        z.sticky_losses = sticky;
        return z;
    }
    while mant.unsigned_abs() >= (1u64 << (w + 1)) {
        mant >>= 1;
        exponent += 1;
    }
    while mant.unsigned_abs() < (1u64 << w) {
        mant <<= 1;
        exponent -= 1;
    }

    PartialSum {
        regime,
        exponent,
        mant,
        frac_bits: w,
        sticky_losses: sticky,
    }
}

/// PPU re-encode: linear fraction back to the log domain, then nearest-LP
/// encode of the reconstructed magnitude. Zero partial sums give the Zero
/// pattern; out-of-range magnitudes saturate via the encoder.
pub fn requantize(psum: &PartialSum, out_params: &LPParams, table: &ConverterTable) -> LPBitPattern {
    let codec = Codec::new(*out_params).expect("requantize output format must be decodable");
    requantize_with(psum, &codec, table)
}

/// `requantize` against a prebuilt codec (hot path for tiles).
pub fn requantize_with(
    psum: &PartialSum,
    codec: &Codec,
    table: &ConverterTable,
) -> LPBitPattern {
    if psum.is_zero() {
        return LPBitPattern::zero(codec.params().n);
    }
    let (negative, log2) = psum.log2_parts(table);
    codec.encode_from_log2(negative, log2)
}
