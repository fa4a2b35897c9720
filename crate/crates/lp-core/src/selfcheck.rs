//! Exhaustive invariant suite for the codec, runnable at runtime (the CLI
//! selftest) and from the acceptance tests.
//!
//! The Eq.-style oracle here recomputes each decoded magnitude in exact
//! dyadic-rational arithmetic from the raw field layout, independently of
//! the f64 path used by `DecodedValue`.

use crate::codec::{enumerate, Codec};
use crate::decode::{decode, field_layout, Special};
use crate::posit::standard_posit_decode;
use crate::{LPBitPattern, LPParams};

/// Outcome of one named invariant sweep.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: u64,
    pub failure: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// The full format grid the exhaustive criteria run over: n in 3..=8, the
/// whole es x rs rectangle, and a small set of integer and fractional
/// scale factors.
pub fn codec_grid() -> Vec<LPParams> {
    let mut grid = Vec::new();
    for n in 3..=8u8 {
        for es in 0..=(n - 3) {
            for rs in 2..=(n - 1) {
                for &sf in &[0.0, 1.5, -1.5, 4.25, -4.25] {
                    grid.push(LPParams::new(n, es, rs, sf));
                }
            }
        }
    }
    grid
}

/// Runs every codec invariant over `codec_grid()`.
pub fn run_all() -> Vec<CheckReport> {
    let grid = codec_grid();
    vec![
        check_round_trip(&grid),
        check_monotonicity(&grid),
        check_negation_symmetry(&grid),
        check_eq1_oracle(&grid),
        check_enumeration_symmetry(&grid),
        check_sf_shift(&grid),
        check_posit_agreement(),
    ]
}

fn sweep<F>(name: &'static str, grid: &[LPParams], mut body: F) -> CheckReport
where
    F: FnMut(&LPParams) -> Result<u64, String>,
{
    let mut cases = 0;
    for params in grid {
        match body(params) {
            Ok(c) => cases += c,
            Err(detail) => {
                return CheckReport {
                    name,
                    cases,
                    failure: Some(format!("{params}: {detail}")),
                }
            }
        }
    }
    CheckReport {
        name,
        cases,
        failure: None,
    }
}

/// encode(decode(b)) == b for every non-reserved pattern.
pub fn check_round_trip(grid: &[LPParams]) -> CheckReport {
    sweep("codec-roundtrip", grid, |params| {
        let codec = Codec::new(*params).map_err(|e| e.to_string())?;
        let mut cases = 0;
        for raw in 0..(1u16 << params.n) {
            let p = LPBitPattern::new(raw as u8, params.n);
            if p.is_zero() || p.is_nar() {
                continue;
            }
            let v = codec.decode(p).map_err(|e| e.to_string())?.value();
            let back = codec.encode(v);
            if back != p {
                return Err(format!("pattern {p} -> {v} -> {back}"));
            }
            cases += 1;
        }
        Ok(cases)
    })
}

/// decode is strictly increasing over non-NaR patterns ordered as n-bit
/// two's-complement integers, with Zero at 0.
pub fn check_monotonicity(grid: &[LPParams]) -> CheckReport {
    sweep("codec-monotonic", grid, |params| {
        let entries = enumerate(params).map_err(|e| e.to_string())?;
        let mut prev: Option<(LPBitPattern, f64)> = None;
        let mut cases = 0;
        for e in &entries {
            if e.special == Special::NaR {
                continue;
            }
            if let Some((pp, pv)) = prev {
                if !(pv < e.value) {
                    return Err(format!("{pp} -> {} not increasing ({pv} vs {})", e.pattern, e.value));
                }
                cases += 1;
            }
            prev = Some((e.pattern, e.value));
        }
        Ok(cases)
    })
}

/// decode(-b) == -decode(b) for all non-reserved patterns.
pub fn check_negation_symmetry(grid: &[LPParams]) -> CheckReport {
    sweep("codec-negation", grid, |params| {
        let mut cases = 0;
        for raw in 0..(1u16 << params.n) {
            let p = LPBitPattern::new(raw as u8, params.n);
            if p.is_zero() || p.is_nar() {
                continue;
            }
            let v = decode(p, params).map_err(|e| e.to_string())?.value();
            let nv = decode(p.negate(), params).map_err(|e| e.to_string())?.value();
            if nv != -v {
                return Err(format!("pattern {p}: -({v}) != {nv}"));
            }
            cases += 1;
        }
        Ok(cases)
    })
}

/// Every normal value set splits into exact ± pairs.
pub fn check_enumeration_symmetry(grid: &[LPParams]) -> CheckReport {
    sweep("enumerate-symmetry", grid, |params| {
        let entries = enumerate(params).map_err(|e| e.to_string())?;
        if entries.len() != 1usize << params.n {
            return Err(format!("expected {} entries, got {}", 1usize << params.n, entries.len()));
        }
        let mut pos: Vec<f64> = Vec::new();
        let mut neg: Vec<f64> = Vec::new();
        for e in &entries {
            if e.special == Special::Normal {
                if e.value > 0.0 {
                    pos.push(e.value);
                } else {
                    neg.push(-e.value);
                }
            }
        }
        pos.sort_by(|a, b| a.partial_cmp(b).unwrap());
        neg.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if pos != neg {
            return Err("positive and negative magnitudes differ".to_string());
        }
        Ok(entries.len() as u64)
    })
}

/// decode's f64 log2 magnitude equals the exact dyadic-rational evaluation
/// of 2^es*k - sf + e + f/2^fb from the raw field layout.
pub fn check_eq1_oracle(grid: &[LPParams]) -> CheckReport {
    sweep("eq1-oracle", grid, |params| {
        let mut cases = 0;
        for raw in 1..(1u16 << (params.n - 1)) {
            let p = LPBitPattern::new(raw as u8, params.n);
            let fl = field_layout(p, params).map_err(|e| e.to_string())?;
            let exact = Dyadic::from_int(i128::from(fl.k) * (1i128 << params.es))
                .add(&Dyadic::from_int(i128::from(fl.exp_value)))
                .add(&Dyadic::new(i128::from(fl.frac_value), u32::from(fl.frac_bits_used)))
                .sub(&Dyadic::from_f64(params.sf));
            let got = decode(p, params).map_err(|e| e.to_string())?.log2_magnitude();
            let want = exact.to_f64_exact().ok_or_else(|| {
                format!("oracle value for {p} not exactly representable")
            })?;
            if got != want {
                return Err(format!("pattern {p}: decode log2 {got} != oracle {want}"));
            }
            cases += 1;
        }
        Ok(cases)
    })
}

/// decode(b, sf) == decode(b, 0) * 2^-sf, compared exactly in the log2
/// domain.
pub fn check_sf_shift(grid: &[LPParams]) -> CheckReport {
    sweep("sf-shift", grid, |params| {
        let unbiased = params.with_sf(0.0);
        let mut cases = 0;
        for raw in 1..(1u16 << (params.n - 1)) {
            let p = LPBitPattern::new(raw as u8, params.n);
            let with = decode(p, params).map_err(|e| e.to_string())?.log2_magnitude();
            let without = decode(p, &unbiased).map_err(|e| e.to_string())?.log2_magnitude();
            if with != without - params.sf {
                return Err(format!("pattern {p}: {with} != {without} - sf"));
            }
            cases += 1;
        }
        Ok(cases)
    })
}

/// For formats whose patterns never carry fraction bits (es = n-3,
/// rs = n-1, sf = 0), LP decode agrees exactly with the standard-posit
/// oracle: the log and linear fraction coincide when f' = 0.
pub fn check_posit_agreement() -> CheckReport {
    let mut cases = 0;
    for n in 3..=8u8 {
        let es = n - 3;
        let params = LPParams::new(n, es, n - 1, 0.0);
        for raw in 0..(1u16 << n) {
            let p = LPBitPattern::new(raw as u8, n);
            let lp = match decode(p, &params) {
                Ok(d) => d.value(),
                Err(e) => {
                    return CheckReport {
                        name: "posit-agreement",
                        cases,
                        failure: Some(format!("{params}: {e}")),
                    }
                }
            };
            let posit = standard_posit_decode(raw as u8, n, es);
            let agree = if lp.is_nan() { posit.is_nan() } else { lp == posit };
            if !agree {
                return CheckReport {
                    name: "posit-agreement",
                    cases,
                    failure: Some(format!("{params} pattern {p}: lp {lp} != posit {posit}")),
                };
            }
            cases += 1;
        }
    }
    CheckReport {
        name: "posit-agreement",
        cases,
        failure: None,
    }
}

/// Exact dyadic rational num / 2^shift on i128. Only suitable for the small
/// magnitudes that appear in format fields and test scale factors; overflow
/// panics, which a check turns into a failure.
#[derive(Debug, Clone, Copy)]
struct Dyadic {
    num: i128,
    shift: u32,
}

impl Dyadic {
    fn new(num: i128, shift: u32) -> Self {
        Self { num, shift }
    }

    fn from_int(v: i128) -> Self {
        Self { num: v, shift: 0 }
    }

    /// Exact: every finite f64 is m * 2^e.
    fn from_f64(x: f64) -> Self {
        assert!(x.is_finite());
        if x == 0.0 {
            return Self::new(0, 0);
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1i128 } else { 1 };
        let biased = ((bits >> 52) & 0x7FF) as i32;
        let frac = (bits & ((1u64 << 52) - 1)) as i128;
        let (m, e) = if biased == 0 {
            (frac, -1074i32)
        } else {
            (frac | (1i128 << 52), biased - 1075)
        };
        let mut d = if e >= 0 {
            Self::new(sign * (m << e), 0)
        } else {
            Self::new(sign * m, (-e) as u32)
        };
        d.reduce();
        d
    }

    fn reduce(&mut self) {
        while self.shift > 0 && self.num % 2 == 0 {
            self.num /= 2;
            self.shift -= 1;
        }
    }

    fn add(&self, other: &Self) -> Self {
        let shift = self.shift.max(other.shift);
        let a = self.num << (shift - self.shift);
        let b = other.num << (shift - other.shift);
        let mut d = Self::new(a + b, shift);
        d.reduce();
        d
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&Self::new(-other.num, other.shift))
    }

    /// Converts without rounding, or None when the value needs more than
    /// 53 bits of significand.
    fn to_f64_exact(&self) -> Option<f64> {
        if self.num == 0 {
            return Some(0.0);
        }
        if self.num.unsigned_abs() >= (1u128 << 53) {
            return None;
        }
        let v = self.num as f64 / (self.shift as f64).exp2();
        Some(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_suite_passes() {
        for report in run_all() {
            assert!(
                report.passed(),
                "{} failed after {} cases: {:?}",
                report.name,
                report.cases,
                report.failure
            );
            assert!(report.cases > 0, "{} ran no cases", report.name);
        }
    }

    #[test]
    fn dyadic_arithmetic_is_exact() {
        let a = Dyadic::from_f64(4.25);
        assert_eq!((a.num, a.shift), (17, 2));
        let b = Dyadic::new(3, 3); // 0.375
        assert_eq!(a.add(&b).to_f64_exact(), Some(4.625));
        assert_eq!(a.sub(&b).to_f64_exact(), Some(3.875));
    }
}
