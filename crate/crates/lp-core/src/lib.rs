//! Logarithmic-posit (LP) number format.
//!
//! An LP format is described by four parameters `⟨n, es, rs, sf⟩`: total
//! width, exponent field size, maximum regime width, and a continuous
//! scale-factor bias. Encoded values live in the log domain: the stored
//! fraction is the fractional part of `log2(magnitude)`, so a whole value
//! is a signed power of two,
//!
//! ```text
//! x = (-1)^sign * 2^(2^es * k - sf + ulfx),   ulfx = e + f'
//! ```
//!
//! with `k` the run-length-decoded regime value and `f'` the stored
//! log-domain fraction. This crate owns the bit-level codec: field layout,
//! decode, round-to-nearest encode, exhaustive enumeration, accuracy
//! profiles, and a standard-posit reference decoder used as an oracle.

mod codec;
mod decode;
mod params;
mod pattern;
mod posit;
mod profile;

pub mod selfcheck;

pub use codec::{encode, enumerate, Codec, EnumEntry};
pub use decode::{decode, field_layout, DecodedValue, FieldLayout, Special};
pub use params::{validate, LPParams, Violation};
pub use pattern::LPBitPattern;
pub use posit::standard_posit_decode;
pub use profile::{accuracy_profile, AccuracyProfile};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("pattern width {pattern_n} does not match format width {params_n}")]
    WidthMismatch { pattern_n: u8, params_n: u8 },
    #[error("format is not mechanically decodable: {0}")]
    BadFormat(String),
    #[error("operation undefined for reserved pattern {0}")]
    ReservedPattern(String),
}
