use serde::{Deserialize, Serialize};
use std::fmt;

/// The four LP bit-field parameters of one layer's format.
///
/// `sf` is continuous metadata carried alongside the bit fields; it is never
/// stored in a pattern. Decoders subtract it from the scaled regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LPParams {
    /// Total width in bits, 2..=8.
    pub n: u8,
    /// Exponent field size in bits.
    pub es: u8,
    /// Maximum regime field width in bits.
    pub rs: u8,
    /// Scale-factor bias, in binary-exponent units.
    pub sf: f64,
}

impl LPParams {
    pub const fn new(n: u8, es: u8, rs: u8, sf: f64) -> Self {
        Self { n, es, rs, sf }
    }

    /// True when the format passes every search-space bound.
    pub fn is_valid(&self) -> bool {
        validate(self).is_empty()
    }

    /// Same bit fields with a different scale factor.
    pub fn with_sf(&self, sf: f64) -> Self {
        Self { sf, ..*self }
    }

    /// Loosest constraints under which the bit-level codec still works:
    /// the regime needs at least one bit and must fit after the sign.
    /// `validate` is stricter; n=2 formats fail it but remain decodable.
    pub(crate) fn mechanically_decodable(&self) -> Result<(), String> {
        if !(2..=8).contains(&self.n) {
            return Err(format!("n = {} outside [2, 8]", self.n));
        }
        if self.rs < 1 || self.rs > self.n - 1 {
            return Err(format!("rs = {} outside [1, n-1]", self.rs));
        }
        if !self.sf.is_finite() {
            return Err("sf is not finite".to_string());
        }
        Ok(())
    }
}

impl fmt::Display for LPParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{},{},{}>", self.n, self.es, self.rs, self.sf)
    }
}

/// One violated format bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NOutOfRange { n: u8 },
    EsTooLarge { es: u8, max: i16 },
    RsTooSmall { rs: u8 },
    RsTooLarge { rs: u8, max: i16 },
    SfNotFinite,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NOutOfRange { n } => write!(f, "n = {n} outside [2, 8]"),
            Violation::EsTooLarge { es, max } => {
                write!(f, "es = {es} exceeds n-3 = {max}")
            }
            Violation::RsTooSmall { rs } => write!(f, "rs = {rs} below minimum 2"),
            Violation::RsTooLarge { rs, max } => {
                write!(f, "rs = {rs} exceeds n-1 = {max}")
            }
            Violation::SfNotFinite => write!(f, "sf is not finite"),
        }
    }
}

/// Checks every format bound and returns all violations. Total: never
/// panics, reports rather than repairs.
///
/// Note the n=2 corner: `rs >= 2` and `rs <= n-1` cannot both hold, so
/// every n=2 format reports at least one regime violation. The bit-level
/// codec still accepts such formats mechanically (see `Codec`).
pub fn validate(params: &LPParams) -> Vec<Violation> {
    let mut out = Vec::new();
    if !(2..=8).contains(&params.n) {
        out.push(Violation::NOutOfRange { n: params.n });
    }
    let n = i16::from(params.n);
    if i16::from(params.es) > n - 3 {
        out.push(Violation::EsTooLarge {
            es: params.es,
            max: n - 3,
        });
    }
    if params.rs < 2 {
        out.push(Violation::RsTooSmall { rs: params.rs });
    }
    if i16::from(params.rs) > n - 1 {
        out.push(Violation::RsTooLarge {
            rs: params.rs,
            max: n - 1,
        });
    }
    if !params.sf.is_finite() {
        out.push(Violation::SfNotFinite);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_in_bounds_format() {
        assert!(validate(&LPParams::new(8, 1, 3, 0.0)).is_empty());
    }

    #[test]
    fn rejects_oversized_es() {
        let v = validate(&LPParams::new(8, 6, 3, 0.0));
        assert_eq!(v, vec![Violation::EsTooLarge { es: 6, max: 5 }]);
    }

    #[test]
    fn rejects_undersized_rs() {
        let v = validate(&LPParams::new(4, 0, 1, 0.0));
        assert_eq!(v, vec![Violation::RsTooSmall { rs: 1 }]);
    }

    #[test]
    fn n2_always_reports_regime_conflict() {
        for rs in 1..=1u8 {
            let v = validate(&LPParams::new(2, 0, rs, 0.0));
            assert!(!v.is_empty());
        }
        // rs = 2 trips the other bound instead
        assert!(validate(&LPParams::new(2, 0, 2, 0.0))
            .contains(&Violation::RsTooLarge { rs: 2, max: 1 }));
    }

    #[test]
    fn non_finite_sf_reported() {
        let v = validate(&LPParams::new(8, 1, 3, f64::NAN));
        assert!(v.contains(&Violation::SfNotFinite));
    }
}
