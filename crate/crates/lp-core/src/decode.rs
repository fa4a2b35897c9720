use crate::{LPBitPattern, LPParams, LpError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Special {
    Normal,
    Zero,
    NaR,
}

/// Raw bit-field split of a pattern: where the regime stops and which bits
/// feed the exponent and fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldLayout {
    pub sign_bit: u8,
    /// Regime run length m, capped at rs.
    pub run_len: u8,
    /// Decoded regime value: -m for a run of 0s, m-1 for a run of 1s.
    pub k: i8,
    /// Bits consumed by the regime field (run plus terminator, or exactly
    /// rs when the cap is hit).
    pub regime_width: u8,
    /// How many exponent bits are physically present (<= es).
    pub exp_bits_used: u8,
    /// Exponent value with missing low bits zero-filled (MSB-first).
    pub exp_value: u8,
    /// How many fraction bits are physically present.
    pub frac_bits_used: u8,
    /// Fraction bits as an unsigned integer; f' = frac_value / 2^frac_bits_used.
    pub frac_value: u8,
}

/// Splits a non-reserved pattern into sign/regime/exponent/fraction fields.
///
/// The regime is a run of identical bits after the sign, ended by a
/// complement bit or by hitting the rs-bit cap; the cap case consumes
/// exactly rs bits with no terminator. Remaining bits feed the exponent
/// (up to es bits, most-significant-first) and then the fraction. Fields
/// whose bits the regime consumed read as zero.
pub fn field_layout(bits: LPBitPattern, params: &LPParams) -> Result<FieldLayout, LpError> {
    bits.check_width(params)?;
    params
        .mechanically_decodable()
        .map_err(LpError::BadFormat)?;
    if bits.is_zero() || bits.is_nar() {
        return Err(LpError::ReservedPattern(bits.to_string()));
    }

    let n = params.n;
    let word = bits.bits();
    let sign_bit = bits.sign_bit();

    // Bits after the sign, left-aligned within `n-1` positions.
    let body_len = n - 1;
    let bit_at = |i: u8| -> u8 { (word >> (body_len - 1 - i)) & 1 };

    let first = bit_at(0);
    let mut run = 1u8;
    while run < params.rs && bit_at(run) == first {
        run += 1;
    }
    let (regime_width, k) = if run == params.rs {
        // Cap hit: no terminator bit.
        let k = if first == 1 { run as i8 - 1 } else { -(run as i8) };
        (run, k)
    } else {
        let k = if first == 1 { run as i8 - 1 } else { -(run as i8) };
        (run + 1, k)
    };

    let mut pos = regime_width;
    let exp_bits_used = params.es.min(body_len - pos);
    let mut exp_value = 0u8;
    for i in 0..exp_bits_used {
        exp_value |= bit_at(pos + i) << (params.es - 1 - i);
    }
    pos += exp_bits_used;

    let frac_bits_used = body_len - pos;
    let mut frac_value = 0u8;
    for i in 0..frac_bits_used {
        frac_value |= bit_at(pos + i) << (frac_bits_used - 1 - i);
    }

    Ok(FieldLayout {
        sign_bit,
        run_len: run,
        k,
        regime_width,
        exp_bits_used,
        exp_value,
        frac_bits_used,
        frac_value,
    })
}

/// A decoded LP value. For Normal values the magnitude's fields are stored
/// (negative patterns decode via two's complement) and
///
/// ```text
/// value = sign * 2^(2^es * k - sf + ulfx),   ulfx = e + frac/2^frac_bits
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodedValue {
    pub special: Special,
    /// +1 or -1.
    pub sign: i8,
    pub k: i8,
    pub e: u8,
    pub frac: u8,
    pub frac_bits: u8,
    es: u8,
    sf: f64,
}

impl DecodedValue {
    pub(crate) const ZERO: DecodedValue = DecodedValue {
        special: Special::Zero,
        sign: 1,
        k: 0,
        e: 0,
        frac: 0,
        frac_bits: 0,
        es: 0,
        sf: 0.0,
    };

    pub(crate) const NAR: DecodedValue = DecodedValue {
        special: Special::NaR,
        sign: 1,
        k: 0,
        e: 0,
        frac: 0,
        frac_bits: 0,
        es: 0,
        sf: 0.0,
    };

    /// Log-domain fraction f' = frac / 2^frac_bits, in [0, 1).
    pub fn fprime(&self) -> f64 {
        if self.frac_bits == 0 {
            0.0
        } else {
            f64::from(self.frac) / f64::from(1u16 << self.frac_bits)
        }
    }

    /// Unified logarithmic fraction and exponent, e + f'.
    pub fn ulfx(&self) -> f64 {
        f64::from(self.e) + self.fprime()
    }

    /// log2 of the magnitude: 2^es * k - sf + ulfx. Exact whenever sf is
    /// exactly representable at the result's scale (the fields themselves
    /// are small dyadic rationals).
    pub fn log2_magnitude(&self) -> f64 {
        debug_assert_eq!(self.special, Special::Normal);
        f64::from(i16::from(self.k) * (1i16 << self.es)) - self.sf + self.ulfx()
    }

    /// The decoded real value; 0.0 for Zero, NaN for NaR.
    pub fn value(&self) -> f64 {
        match self.special {
            Special::Zero => 0.0,
            Special::NaR => f64::NAN,
            Special::Normal => f64::from(self.sign) * self.log2_magnitude().exp2(),
        }
    }
}

/// Decodes a pattern under the given format. All-zeros is Zero, 1·0^(n-1)
/// is NaR, and negative patterns decode as the negation of their two's
/// complement.
pub fn decode(bits: LPBitPattern, params: &LPParams) -> Result<DecodedValue, LpError> {
    bits.check_width(params)?;
    if bits.is_zero() {
        return Ok(DecodedValue::ZERO);
    }
    if bits.is_nar() {
        return Ok(DecodedValue::NAR);
    }
    let (magnitude_bits, sign) = if bits.sign_bit() == 1 {
        (bits.negate(), -1)
    } else {
        (bits, 1)
    };
    let fl = field_layout(magnitude_bits, params)?;
    Ok(DecodedValue {
        special: Special::Normal,
        sign,
        k: fl.k,
        e: fl.exp_value,
        frac: fl.frac_value,
        frac_bits: fl.frac_bits_used,
        es: params.es,
        sf: params.sf,
    })
}
