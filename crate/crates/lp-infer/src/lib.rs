//! Minimal feed-forward inference with per-layer intermediate-representation
//! taps and LP fake-quantization. Drives the quantization search at desk
//! scale: dense and conv2d layers plus relu/softmax/flatten, deterministic
//! forward passes, and a small synthetic model zoo.

mod forward;
mod io;
mod layer;
mod quantize;
mod tensor;
pub mod zoo;

pub use forward::{forward, forward_quantized, TapPoint};
pub use io::{load_model, read_tensor, save_model, write_tensor};
pub use layer::{LayerSpec, Model};
pub use quantize::{activation_params, fake_quantize, ActivationParams};
pub use tensor::{im2col, CalibrationSet, Tensor};

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InferError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("missing tensor file {0}")]
    MissingTensor(PathBuf),
    #[error("malformed manifest {path}: {source}")]
    MalformedManifest {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("tensor file {path} holds {got} elements, shape {shape:?} needs {want}")]
    TensorSize {
        path: PathBuf,
        got: usize,
        want: usize,
        shape: Vec<usize>,
    },
    #[error("shape mismatch at {context}: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        context: String,
        expected: Vec<usize>,
        got: Vec<usize>,
    },
    #[error("quantization vector has {got} entries, model has {want} quantizable layers")]
    DeltaLength { got: usize, want: usize },
    #[error("invalid quantization entry for layer {layer}: {detail}")]
    DeltaEntry { layer: usize, detail: String },
    #[error(transparent)]
    Core(#[from] lp_core::LpError),
}
