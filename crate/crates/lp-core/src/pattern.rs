use crate::{LPParams, LpError};
use std::fmt;

/// An n-bit encoded LP value. Bits above `n` are always zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LPBitPattern {
    bits: u8,
    n: u8,
}

impl LPBitPattern {
    pub fn new(bits: u8, n: u8) -> Self {
        debug_assert!((2..=8).contains(&n));
        let mask = if n == 8 { 0xFF } else { (1u8 << n) - 1 };
        Self { bits: bits & mask, n }
    }

    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn width(&self) -> u8 {
        self.n
    }

    pub fn zero(n: u8) -> Self {
        Self::new(0, n)
    }

    /// Not-a-Real: 1 followed by all zeros.
    pub fn nar(n: u8) -> Self {
        Self::new(1 << (n - 1), n)
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn is_nar(&self) -> bool {
        self.bits == 1 << (self.n - 1)
    }

    pub fn sign_bit(&self) -> u8 {
        (self.bits >> (self.n - 1)) & 1
    }

    /// Two's complement within the n-bit word.
    pub fn negate(&self) -> Self {
        Self::new(self.bits.wrapping_neg(), self.n)
    }

    /// The pattern reinterpreted as an n-bit two's-complement integer.
    /// Decode is strictly increasing in this ordering (Zero maps to 0).
    pub fn as_signed(&self) -> i16 {
        let v = i16::from(self.bits);
        if self.sign_bit() == 1 {
            v - (1i16 << self.n)
        } else {
            v
        }
    }

    pub(crate) fn check_width(&self, params: &LPParams) -> Result<(), LpError> {
        if self.n == params.n {
            Ok(())
        } else {
            Err(LpError::WidthMismatch {
                pattern_n: self.n,
                params_n: params.n,
            })
        }
    }
}

impl fmt::Display for LPBitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.bits, width = self.n as usize)
    }
}
