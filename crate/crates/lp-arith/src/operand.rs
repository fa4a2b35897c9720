use crate::{ArithError, Mode, Path};
use lp_core::{decode, LPBitPattern, LPParams, Special};

/// Fraction bits of the internal ulfx fixed point. All ulfx values are
/// carried as integer multiples of 2^-8 regardless of mode; the per-mode
/// declared widths are asserted separately (`fits_weight_widths`).
pub const ULFX_FRAC_BITS: u32 = 8;

/// Decoded operand in the unified datapath format.
///
/// Represents `(-1)^sign * 2^(regime_scaled + ulfx)` with
/// `ulfx = ulfx_q / 2^8`. The scale factor is already applied: its rounded
/// integer part is folded into the regime and its fractional part, snapped
/// to the path's ulfx grid, into the ulfx. Decode is therefore exact
/// whenever sf lies on that grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnifiedOperand {
    /// True for negative values.
    pub sign: bool,
    /// 2^es * k - round(sf), in whole binary-exponent units.
    pub regime_scaled: i32,
    /// e + f' - frac(sf), in units of 2^-8.
    pub ulfx_q: i32,
    /// Exact-zero flag; all other fields are zero when set.
    pub zero: bool,
}

impl UnifiedOperand {
    pub const ZERO: UnifiedOperand = UnifiedOperand {
        sign: false,
        regime_scaled: 0,
        ulfx_q: 0,
        zero: true,
    };

    /// log2 of the magnitude. Exact: both terms are small dyadics.
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

    /// Whether the operand fits the declared per-weight widths of `mode`:
    /// a signed regime of 16/w bits and an ulfx fixed point with half the
    /// field for the integer part and half for the fraction.
    pub fn fits_weight_widths(&self, mode: Mode) -> bool {
        if self.zero {
            return true;
        }
        let field = mode.unified_field_bits();
        let regime_ok =
            self.regime_scaled >= -(1 << (field - 1)) && self.regime_scaled < (1 << (field - 1));
        // ulfx as I.F with I = F = field/2: range ±2^(I-1), grid 2^-F.
        let f = mode.weight_frac_bits();
        let i = field - f;
        let lim = 1i32 << (i - 1 + ULFX_FRAC_BITS);
        let grid = 1i32 << (ULFX_FRAC_BITS - f);
        let ulfx_ok = self.ulfx_q >= -lim && self.ulfx_q < lim && self.ulfx_q % grid == 0;
        regime_ok && ulfx_ok
    }
}

/// Boundary decoder: expands an LP pattern into the unified operand format.
///
/// Functionally models the unified two's complementer, leading-zero
/// counter and shifters: the fields equal the `lp-core` field layout mapped
/// to fixed point. Weight-path widths must match the packing mode
/// (A/B/C for 2/4/8-bit); activations are 4- or 8-bit and use internally
/// widened, lossless fields.
pub fn unified_decode(
    bits: LPBitPattern,
    params: &LPParams,
    path: Path,
    mode: Mode,
) -> Result<UnifiedOperand, ArithError> {
    match path {
        Path::Weight => {
            if params.n != mode.weight_bits() {
                return Err(ArithError::ModeMismatch {
                    n: params.n,
                    mode,
                    expected: mode.weight_bits(),
                });
            }
        }
        Path::Activation => {
            if params.n != 4 && params.n != 8 {
                return Err(ArithError::ActivationWidth { n: params.n });
            }
        }
    }

    let d = decode(bits, params)?;
    match d.special {
        Special::Zero => return Ok(UnifiedOperand::ZERO),
        Special::NaR => return Err(ArithError::NarOperand),
        Special::Normal => {}
    }

    // Split sf: integer part into the regime, fractional part onto the
    // path's ulfx grid. Activations always use the full 2^-8 grid.
    let grid_bits = match path {
        Path::Weight => mode.weight_frac_bits(),
        Path::Activation => ULFX_FRAC_BITS,
    };
    let sf_int = params.sf.round();
    let sf_frac_q = ((params.sf - sf_int) * f64::from(1u32 << grid_bits)).round() as i32
        * (1 << (ULFX_FRAC_BITS - grid_bits));

    let regime_scaled = i32::from(d.k) * (1i32 << params.es) - sf_int as i32;
    let frac_q = if d.frac_bits == 0 {
        0
    } else {
        i32::from(d.frac) << (ULFX_FRAC_BITS - u32::from(d.frac_bits))
    };
    let ulfx_q = (i32::from(d.e) << ULFX_FRAC_BITS) + frac_q - sf_frac_q;

    Ok(UnifiedOperand {
        sign: d.sign < 0,
        regime_scaled,
        ulfx_q,
        zero: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const P813: LPParams = LPParams::new(8, 1, 3, 0.0);

    #[test]
    fn decodes_worked_example() {
        // regime 2, ulfx 1.375 = 0x160 at 8.8
        let u = unified_decode(LPBitPattern::new(0b0110_1011, 8), &P813, Path::Weight, Mode::C)
            .unwrap();
        assert!(!u.sign);
        assert_eq!(u.regime_scaled, 2);
        assert_eq!(u.ulfx_q, 0x160);
        assert_eq!(u.log2_magnitude(), 3.375);
    }

    #[test]
    fn decodes_unit_value() {
        let u = unified_decode(LPBitPattern::new(0b0100_0000, 8), &P813, Path::Weight, Mode::C)
            .unwrap();
        assert_eq!((u.regime_scaled, u.ulfx_q), (0, 0));
        assert_eq!(u.value(), 1.0);
    }

    #[test]
    fn negative_pattern_flips_sign_only() {
        for raw in 1..128u8 {
            let p = LPBitPattern::new(raw, 8);
            let pos = unified_decode(p, &P813, Path::Weight, Mode::C).unwrap();
            let neg = unified_decode(p.negate(), &P813, Path::Weight, Mode::C).unwrap();
            assert_eq!(neg.regime_scaled, pos.regime_scaled);
            assert_eq!(neg.ulfx_q, pos.ulfx_q);
            assert_eq!(neg.sign, !pos.sign);
        }
    }

    #[test]
    fn sf_splits_between_regime_and_ulfx() {
        let params = LPParams::new(8, 1, 3, 4.25);
        let u = unified_decode(LPBitPattern::new(0b0100_0000, 8), &params, Path::Weight, Mode::C)
            .unwrap();
        // round(4.25) = 4 into the regime, +0.25 folded into ulfx
        assert_eq!(u.regime_scaled, -4);
        assert_eq!(u.ulfx_q, -64);
        assert_eq!(u.log2_magnitude(), -4.25);
    }

    #[test]
    fn zero_and_nar_and_mode_checks() {
        let z = unified_decode(LPBitPattern::zero(8), &P813, Path::Weight, Mode::C).unwrap();
        assert!(z.zero);
        assert_eq!(z.value(), 0.0);
        assert!(matches!(
            unified_decode(LPBitPattern::nar(8), &P813, Path::Weight, Mode::C),
            Err(ArithError::NarOperand)
        ));
        assert!(unified_decode(LPBitPattern::zero(8), &P813, Path::Weight, Mode::B).is_err());
    }

    #[test]
    fn mode_c_weights_fit_declared_widths() {
        let u = unified_decode(LPBitPattern::new(0b0110_1011, 8), &P813, Path::Weight, Mode::C)
            .unwrap();
        assert!(u.fits_weight_widths(Mode::C));
    }
}
