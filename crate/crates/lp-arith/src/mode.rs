use crate::ArithError;

/// PE packing mode: how many weights share one 8-bit container.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Four 2-bit weights per PE.
    A,
    /// Two 4-bit weights per PE.
    B,
    /// One 8-bit weight per PE.
    C,
}

impl Mode {
    pub fn for_weight_bits(n: u8) -> Result<Mode, ArithError> {
        match n {
            2 => Ok(Mode::A),
            4 => Ok(Mode::B),
            8 => Ok(Mode::C),
            _ => Err(ArithError::ModeMismatch {
                n,
                mode: Mode::C,
                expected: 0,
            }),
        }
    }

    /// Weights per PE: 4 / 2 / 1.
    pub fn weights_per_pe(&self) -> usize {
        match self {
            Mode::A => 4,
            Mode::B => 2,
            Mode::C => 1,
        }
    }

    pub fn weight_bits(&self) -> u8 {
        match self {
            Mode::A => 2,
            Mode::B => 4,
            Mode::C => 8,
        }
    }

    /// Per-weight field width in the unified format: 16 bits split across
    /// the packed weights.
    pub fn unified_field_bits(&self) -> u32 {
        16 / self.weights_per_pe() as u32
    }

    /// Fraction bits of the per-weight ulfx fixed point (half the field).
    pub fn weight_frac_bits(&self) -> u32 {
        self.unified_field_bits() / 2
    }
}

/// Which boundary decoder a value passes through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Path {
    Weight,
    Activation,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packing_times_width_is_eight() {
        for mode in [Mode::A, Mode::B, Mode::C] {
            assert_eq!(mode.weights_per_pe() * mode.weight_bits() as usize, 8);
        }
        assert_eq!(Mode::B.weight_frac_bits(), 4);
    }

    #[test]
    fn mode_selection() {
        assert_eq!(Mode::for_weight_bits(2).unwrap(), Mode::A);
        assert_eq!(Mode::for_weight_bits(8).unwrap(), Mode::C);
        assert!(Mode::for_weight_bits(3).is_err());
    }
}
