//! Functional model of the LP accelerator datapath.
//!
//! The pipeline mirrors the hardware stages: boundary decoders expand
//! packed LP patterns into a unified sign/regime/ulfx record, the MUL
//! stage multiplies by adding regimes and ulfx values in the log domain,
//! a table-based converter moves the fraction into the linear domain,
//! and partial sums accumulate with floating-point-style alignment before
//! being re-encoded to LP at the array boundary.
//!
//! Everything here is a pure value transformation. Internal fields are
//! carried at lossless widths; the hardware's declared per-mode widths are
//! enforced by explicit checks (`fits_*`) which the exhaustive selfcheck
//! sweeps assert.

mod accumulate;
mod converter;
mod mode;
mod operand;
mod pipeline;
mod product;

pub mod selfcheck;

pub use accumulate::{align_accumulate, requantize, PartialSum, DEFAULT_ACC_FRAC_BITS};
pub use converter::ConverterTable;
pub use mode::{Mode, Path};
pub use operand::{unified_decode, UnifiedOperand, ULFX_FRAC_BITS};
pub use pipeline::{dot_error_budget, dot_reference, pipeline_dot};
pub use product::{mul, ProductTerm};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArithError {
    #[error(transparent)]
    Core(#[from] lp_core::LpError),
    #[error("weight width {n} does not match {mode:?} (expects {expected})")]
    ModeMismatch { n: u8, mode: Mode, expected: u8 },
    #[error("activation width {n} unsupported; datapath activations are 4- or 8-bit")]
    ActivationWidth { n: u8 },
    #[error("NaR operand has no datapath representation")]
    NarOperand,
    #[error("operand sequences differ in length: {lhs} vs {rhs}")]
    LengthMismatch { lhs: usize, rhs: usize },
}
