//! Cycle-level functional simulator of the 8x8 weight-stationary LP
//! systolic array: multi-weight packing (MODE-A/B/C), boundary
//! decoders/encoders, double-buffered weight preload, a post-processing
//! unit, and fused-PE baseline comparators.
//!
//! Values are bit-exact against the `lp-arith` pipeline: every MAC runs
//! the same unified-decode / log-multiply / align-accumulate stages, in
//! the same reduction order the array imposes.

mod baseline;
mod config;
mod gemm;
mod model;
mod pack;
mod ppu;
mod report;

pub use baseline::{baseline_report, BaselineArch};
pub use config::ArrayConfig;
pub use gemm::{closed_form_cycles, simulate_gemm, GemmOutput};
pub use model::{simulate_model, ModelReport};
pub use pack::{pack_weights, unpack_container};
pub use ppu::{ppu, PpuOp};
pub use report::{SimReport, TileStats};

pub use lp_arith::Mode;

use thiserror::Error;

/// Packing mode for a weight width: 2 -> A, 4 -> B, 8 -> C.
pub fn select_mode(n_w: u8) -> Result<Mode, SimError> {
    Mode::for_weight_bits(n_w).map_err(|_| SimError::UnsupportedWeightWidth(n_w))
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error("weight width {0} is not packable (must be 2, 4, or 8)")]
    UnsupportedWeightWidth(u8),
    #[error("activation width {0} unsupported (must be 4 or 8)")]
    UnsupportedActivationWidth(u8),
    #[error("empty GEMM dimension (m, k, n must all be positive)")]
    EmptyGemm,
    #[error("{buffer} buffer too small: need {need} bytes, have {have}")]
    BufferTooSmall {
        buffer: &'static str,
        need: usize,
        have: usize,
    },
    #[error("layer {layer}: width {n} incompatible with the hardware mode set")]
    DeltaWidth { layer: usize, n: u8 },
    #[error(transparent)]
    Arith(#[from] lp_arith::ArithError),
    #[error(transparent)]
    Core(#[from] lp_core::LpError),
    #[error(transparent)]
    Infer(#[from] lp_infer::InferError),
}
