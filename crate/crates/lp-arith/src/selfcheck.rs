//! Exhaustive datapath invariant sweeps, runnable at runtime (CLI
//! selftest) and from the acceptance suite.

use crate::accumulate::{align_accumulate, PartialSum};
use crate::converter::ConverterTable;
use crate::operand::unified_decode;
use crate::product::mul;
use crate::{Mode, Path, DEFAULT_ACC_FRAC_BITS};
use lp_core::{decode, LPBitPattern, LPParams};

pub use lp_core::selfcheck::CheckReport;

/// Formats the exhaustive 8-bit sweeps run over. Scale factors sit on the
/// 2^-8 ulfx grid so the decode stage is exact.
pub fn sweep_params() -> Vec<(LPParams, LPParams)> {
    vec![
        (LPParams::new(8, 1, 3, 0.0), LPParams::new(8, 1, 3, 0.0)),
        (LPParams::new(8, 0, 7, 1.5), LPParams::new(8, 0, 7, -1.5)),
        (LPParams::new(8, 5, 7, -4.25), LPParams::new(8, 5, 7, 4.25)),
        (LPParams::new(8, 2, 5, 0.25), LPParams::new(8, 3, 4, -0.375)),
    ]
}

/// Runs every datapath invariant.
pub fn run_all() -> Vec<CheckReport> {
    run_all_with_table(&ConverterTable::default())
}

/// Same, against a caller-supplied converter table (test hook: a corrupted
/// table must make the converter checks fail).
pub fn run_all_with_table(table: &ConverterTable) -> Vec<CheckReport> {
    vec![
        check_converter_bounds(table),
        check_converter_round_trip(table),
        check_mul_exactness(),
        check_no_overflow(),
        check_zero_annihilation(table),
    ]
}

/// Every forward entry within half an output ulp of exact 2^x, every
/// inverse entry within half an ulp of exact log2(1+x).
pub fn check_converter_bounds(table: &ConverterTable) -> CheckReport {
    let f = table.f_bits();
    let scale = (1u32 << f) as f64;
    let tol = 2f64.powi(-(f as i32 + 1));
    let mut cases = 0;
    for i in 0..table.entries() as u16 {
        let lf = f64::from(table.log_to_linear(i)) / scale;
        let exact = (f64::from(i) / scale).exp2();
        let err = ((1.0 + lf) - exact).abs();
        if err > tol {
            return CheckReport {
                name: "converter-bounds",
                cases,
                failure: Some(format!("forward[{i}] err {err} > {tol}")),
            };
        }
        let lnf = f64::from(table.linear_to_log(i)) / scale;
        let exact_inv = (1.0 + f64::from(i) / scale).log2();
        let inv_err = (lnf - exact_inv).abs();
        if inv_err > tol {
            return CheckReport {
                name: "converter-bounds",
                cases,
                failure: Some(format!("inverse[{i}] err {inv_err} > {tol}")),
            };
        }
        cases += 2;
    }
    CheckReport {
        name: "converter-bounds",
        cases,
        failure: None,
    }
}

/// linear_to_log(log_to_linear(x)) == x wherever the forward map is
/// injective; collisions are reported in the case count only.
pub fn check_converter_round_trip(table: &ConverterTable) -> CheckReport {
    let mut cases = 0;
    for i in table.injective_points() {
        if table.linear_to_log(table.log_to_linear(i)) != i {
            return CheckReport {
                name: "converter-roundtrip",
                cases,
                failure: Some(format!("injective lnf {i} failed round trip")),
            };
        }
        cases += 1;
    }
    CheckReport {
        name: "converter-roundtrip",
        cases,
        failure: None,
    }
}

fn for_all_pairs<F>(name: &'static str, mut body: F) -> CheckReport
where
    F: FnMut(&LPParams, &LPParams, LPBitPattern, LPBitPattern) -> Result<(), String>,
{
    let mut cases = 0;
    for (wp, ap) in sweep_params() {
        for wraw in 0..=255u8 {
            let wb = LPBitPattern::new(wraw, 8);
            if wb.is_nar() {
                continue;
            }
            for araw in 0..=255u8 {
                let ab = LPBitPattern::new(araw, 8);
                if ab.is_nar() {
                    continue;
                }
                if let Err(detail) = body(&wp, &ap, wb, ab) {
                    return CheckReport {
                        name,
                        cases,
                        failure: Some(format!("{wp} x {ap}, w={wb}, a={ab}: {detail}")),
                    };
                }
                cases += 1;
            }
        }
    }
    CheckReport {
        name,
        cases,
        failure: None,
    }
}

/// The MUL stage is exact: the product term's log2 magnitude equals the
/// sum of the operand log2 magnitudes, for every 8-bit operand pair.
pub fn check_mul_exactness() -> CheckReport {
    for_all_pairs("mul-exactness", |wp, ap, wb, ab| {
        let w = unified_decode(wb, wp, Path::Weight, Mode::C).map_err(|e| e.to_string())?;
        let a = unified_decode(ab, ap, Path::Activation, Mode::C).map_err(|e| e.to_string())?;
        let p = mul(&w, &a);
        if w.zero || a.zero {
            if !p.zero {
                return Err("zero operand produced non-zero product".into());
            }
            return Ok(());
        }
        let expect = decode(wb, wp).unwrap().log2_magnitude() + decode(ab, ap).unwrap().log2_magnitude();
        if p.log2_magnitude() != expect {
            return Err(format!("log2 {} != {}", p.log2_magnitude(), expect));
        }
        let sign_expect = (decode(wb, wp).unwrap().sign < 0) != (decode(ab, ap).unwrap().sign < 0);
        if p.sign != sign_expect {
            return Err("sign mismatch".into());
        }
        Ok(())
    })
}

/// No field exceeds its declared width across the exhaustive sweep:
/// operands fit the unified widths, products fit 16-bit regime and 8.8
/// ulfx.
pub fn check_no_overflow() -> CheckReport {
    for_all_pairs("mul-no-overflow", |wp, ap, wb, ab| {
        let w = unified_decode(wb, wp, Path::Weight, Mode::C).map_err(|e| e.to_string())?;
        let a = unified_decode(ab, ap, Path::Activation, Mode::C).map_err(|e| e.to_string())?;
        if !w.fits_weight_widths(Mode::C) {
            return Err("weight operand exceeds declared widths".into());
        }
        let p = mul(&w, &a);
        if !p.fits_declared_widths() {
            return Err("product exceeds declared 16-bit widths".into());
        }
        Ok(())
    })
}

/// A zero operand contributes exactly nothing to accumulation.
pub fn check_zero_annihilation(table: &ConverterTable) -> CheckReport {
    let params = LPParams::new(8, 1, 3, 0.0);
    let mut cases = 0;
    for raw in 0..=255u8 {
        let b = LPBitPattern::new(raw, 8);
        if b.is_nar() {
            continue;
        }
        let x = unified_decode(b, &params, Path::Weight, Mode::C).unwrap();
        let z = crate::UnifiedOperand::ZERO;
        for p in [mul(&x, &z), mul(&z, &x)] {
            let mut acc = PartialSum::zero(DEFAULT_ACC_FRAC_BITS);
            acc = align_accumulate(&acc, &p, table);
            if !acc.is_zero() || acc.sticky_losses != 0 {
                return CheckReport {
                    name: "zero-annihilation",
                    cases,
                    failure: Some(format!("pattern {b} leaked into the accumulator")),
                };
            }
            cases += 1;
        }
    }
    CheckReport {
        name: "zero-annihilation",
        cases,
        failure: None,
    }
}
