use crate::decode::{decode, DecodedValue, Special};
use crate::{LPBitPattern, LPParams, LpError};

/// One row of an exhaustive format enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnumEntry {
    pub pattern: LPBitPattern,
    pub special: Special,
    /// Decoded real value; 0.0 for Zero, NaN for NaR.
    pub value: f64,
    /// log2 |value| for Normal entries.
    pub log2_magnitude: Option<f64>,
}

/// Reusable encoder/decoder for one format. Construction precomputes the
/// sorted log2 magnitudes of all positive patterns, so `encode` is a binary
/// search. Positive patterns are the consecutive integers 1..2^(n-1)-1 and
/// decode in strictly increasing order, which the selfcheck suite asserts
/// exhaustively.
#[derive(Debug, Clone)]
pub struct Codec {
    params: LPParams,
    /// log2 magnitude of pattern i+1, without the sf bias applied.
    base_log2: Vec<f64>,
}

impl Codec {
    /// Accepts any mechanically decodable format (see `validate` for the
    /// stricter search-space bounds).
    pub fn new(params: LPParams) -> Result<Self, LpError> {
        params
            .mechanically_decodable()
            .map_err(LpError::BadFormat)?;
        let unbiased = params.with_sf(0.0);
        let count = (1usize << (params.n - 1)) - 1;
        let mut base_log2 = Vec::with_capacity(count);
        for raw in 1..=count {
            let p = LPBitPattern::new(raw as u8, params.n);
            let d = decode(p, &unbiased).expect("positive pattern decodes");
            base_log2.push(d.log2_magnitude());
        }
        Ok(Self { params, base_log2 })
    }

    pub fn params(&self) -> &LPParams {
        &self.params
    }

    /// Smallest positive magnitude of the format.
    pub fn min_positive(&self) -> f64 {
        (self.base_log2[0] - self.params.sf).exp2()
    }

    /// Largest finite magnitude of the format.
    pub fn max_positive(&self) -> f64 {
        (*self.base_log2.last().unwrap() - self.params.sf).exp2()
    }

    pub fn decode(&self, bits: LPBitPattern) -> Result<DecodedValue, LpError> {
        decode(bits, &self.params)
    }

    /// Rounds a real to the nearest LP value in the log2 domain, breaking
    /// ties toward the pattern with an even last bit. Magnitudes above the
    /// maximum saturate; magnitudes below half the minimum flush to Zero;
    /// non-finite inputs map to NaR. Negative values are the two's
    /// complement of their magnitude's encoding.
    pub fn encode(&self, x: f64) -> LPBitPattern {
        if !x.is_finite() {
            return LPBitPattern::nar(self.params.n);
        }
        if x == 0.0 {
            return LPBitPattern::zero(self.params.n);
        }
        self.encode_from_log2(x < 0.0, x.abs().log2())
    }

    /// `encode` for a value given directly as sign and log2 magnitude,
    /// skipping the exp2/log2 round trip (datapath re-encode path).
    pub fn encode_from_log2(&self, negative: bool, log2_magnitude: f64) -> LPBitPattern {
        let n = self.params.n;
        // Work against the sf-free table: target' = log2|x| + sf.
        let target = log2_magnitude + self.params.sf;
        let table = &self.base_log2;
        let min = table[0];
        let max = *table.last().unwrap();
        let magnitude_raw: u8 = if target < min - 1.0 {
            // Below half the minimum positive magnitude.
            return LPBitPattern::zero(n);
        } else if target >= max {
            table.len() as u8
        } else if target <= min {
            1
        } else {
            let hi = table.partition_point(|&e| e <= target);
            // table[hi-1] <= target < table[hi]
            let lo = hi - 1;
            let d_lo = target - table[lo];
            let d_hi = table[hi] - target;
            if d_lo < d_hi {
                lo as u8 + 1
            } else if d_hi < d_lo {
                hi as u8 + 1
            } else {
                // Exact midpoint: adjacent raw patterns differ in the last
                // bit, so exactly one of them is even.
                if (lo as u8 + 1) & 1 == 0 {
                    lo as u8 + 1
                } else {
                    hi as u8 + 1
                }
            }
        };
        let pattern = LPBitPattern::new(magnitude_raw, n);
        if negative {
            pattern.negate()
        } else {
            pattern
        }
    }
}

/// Nearest-value quantization: `decode(encode(x))` under one format.
pub fn encode(x: f64, params: &LPParams) -> Result<LPBitPattern, LpError> {
    Ok(Codec::new(*params)?.encode(x))
}

/// All 2^n patterns with decoded values, ordered by the pattern read as an
/// n-bit two's-complement integer (which is value order for LP).
pub fn enumerate(params: &LPParams) -> Result<Vec<EnumEntry>, LpError> {
    params
        .mechanically_decodable()
        .map_err(LpError::BadFormat)?;
    let n = params.n;
    let total = 1i16 << n;
    let half = 1i16 << (n - 1);
    let mut out = Vec::with_capacity(total as usize);
    for signed in -half..half {
        let raw = (signed & (total - 1)) as u8;
        let pattern = LPBitPattern::new(raw, n);
        let d = decode(pattern, params)?;
        out.push(EnumEntry {
            pattern,
            special: d.special,
            value: d.value(),
            log2_magnitude: match d.special {
                Special::Normal => Some(d.log2_magnitude()),
                _ => None,
            },
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P813: LPParams = LPParams::new(8, 1, 3, 0.0);

    #[test]
    fn encode_exact_and_reserved() {
        let c = Codec::new(P813).unwrap();
        assert_eq!(c.encode(1.0).bits(), 0b0100_0000);
        assert_eq!(c.encode(0.0).bits(), 0);
        assert!(c.encode(f64::NAN).is_nar());
        assert!(c.encode(f64::INFINITY).is_nar());
    }

    #[test]
    fn encode_matches_brute_force_nearest() {
        // Oracle: scan every pattern for the nearest log2 magnitude.
        let c = Codec::new(P813).unwrap();
        let entries = enumerate(&P813).unwrap();
        for &x in &[10.3747, 0.3, 1e-2, 250.0, -7.7, -0.011] {
            let got = c.encode(x);
            let target = x.abs().log2();
            let best = entries
                .iter()
                .filter(|e| e.special == Special::Normal && e.value > 0.0)
                .min_by(|a, b| {
                    let da = (a.log2_magnitude.unwrap() - target).abs();
                    let db = (b.log2_magnitude.unwrap() - target).abs();
                    da.partial_cmp(&db).unwrap()
                })
                .unwrap();
            let want = if x < 0.0 {
                best.pattern.negate()
            } else {
                best.pattern
            };
            assert_eq!(got, want, "x = {x}");
        }
        // the worked decode example round-trips through encode
        assert_eq!(c.encode(10.3747).bits(), 0b0110_1011);
    }

    #[test]
    fn encode_saturates_and_flushes() {
        let c = Codec::new(P813).unwrap();
        let maxpos = c.max_positive();
        let minpos = c.min_positive();
        assert_eq!(c.encode(maxpos * 64.0).bits(), 0b0111_1111);
        assert_eq!(c.encode(-maxpos * 64.0), c.encode(maxpos * 64.0).negate());
        assert!(c.encode(minpos * 0.49).is_zero());
        // exactly half the minimum is not below it: rounds up to minpos
        assert_eq!(c.encode(minpos * 0.5).bits(), 1);
    }

    #[test]
    fn enumerate_3_0_2_is_symmetric() {
        let params = LPParams::new(3, 0, 2, 0.0);
        let entries = enumerate(&params).unwrap();
        assert_eq!(entries.len(), 8);
        let mut normals: Vec<f64> = entries
            .iter()
            .filter(|e| e.special == Special::Normal)
            .map(|e| e.value)
            .collect();
        normals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(normals, vec![-2.0, -1.0, -0.5, 0.5, 1.0, 2.0]);
    }

    #[test]
    fn enumerate_4_0_3_positive_values() {
        // Frozen from the field rules: k in [-2, 2], one log-fraction bit
        // where the regime leaves room.
        let params = LPParams::new(4, 0, 3, 0.0);
        let entries = enumerate(&params).unwrap();
        assert_eq!(entries.len(), 16);
        let pos: Vec<f64> = entries
            .iter()
            .filter(|e| e.special == Special::Normal && e.value > 0.0)
            .map(|e| e.log2_magnitude.unwrap())
            .collect();
        assert_eq!(pos, vec![-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0]);
    }

    #[test]
    fn enumerate_count_is_power_of_two() {
        for (n, es, rs) in [(3u8, 0u8, 2u8), (5, 1, 3), (8, 2, 5)] {
            let params = LPParams::new(n, es, rs, 0.25);
            assert_eq!(enumerate(&params).unwrap().len(), 1 << n);
        }
    }

    #[test]
    fn n2_codec_is_mechanical() {
        // n=2 fails validate but still decodes: {0, ±2^-sf, NaR}.
        let params = LPParams::new(2, 0, 1, 1.0);
        assert!(!params.is_valid());
        let entries = enumerate(&params).unwrap();
        let normals: Vec<f64> = entries
            .iter()
            .filter(|e| e.special == Special::Normal)
            .map(|e| e.value)
            .collect();
        assert_eq!(normals, vec![-0.5, 0.5]);
    }
}
