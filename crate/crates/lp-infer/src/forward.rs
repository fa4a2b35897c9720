use crate::layer::{LayerSpec, Model};
use crate::quantize::{activation_params, fake_quantize_with};
use crate::tensor::{im2col, Tensor};
use crate::InferError;
use lp_core::{Codec, LPParams};

/// Where the per-layer tap (and activation quantization) sits relative to
/// the nonlinearity that follows a weighted layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TapPoint {
    /// After any relu/softmax run that immediately follows the weighted
    /// layer (default: activations are observed post-nonlinearity).
    PostActivation,
    /// Directly at the weighted layer's output.
    PreActivation,
}

/// For each weighted layer, the layer-vector index at which its output is
/// observed/quantized.
fn tap_indices(model: &Model, point: TapPoint) -> Vec<usize> {
    model
        .quantizable_indices()
        .into_iter()
        .map(|li| match point {
            TapPoint::PreActivation => li,
            TapPoint::PostActivation => {
                let mut end = li;
                while end + 1 < model.layers.len()
                    && matches!(model.layers[end + 1], LayerSpec::Relu | LayerSpec::Softmax)
                {
                    end += 1;
                }
                end
            }
        })
        .collect()
}

fn dense_forward(input: &Tensor, weight: &Tensor, bias: &Tensor) -> Tensor {
    let (b, in_f) = (input.shape()[0], input.shape()[1]);
    let out_f = weight.shape()[0];
    let mut out = vec![0.0f64; b * out_f];
    for bi in 0..b {
        let row = input.row(bi);
        for o in 0..out_f {
            let wrow = &weight.data()[o * in_f..(o + 1) * in_f];
            let mut acc = bias.data()[o];
            for i in 0..in_f {
                acc += row[i] * wrow[i];
            }
            out[bi * out_f + o] = acc;
        }
    }
    Tensor::new(vec![b, out_f], out)
}

fn conv2d_forward(
    input: &Tensor,
    weight: &Tensor,
    bias: &Tensor,
    stride: usize,
    padding: usize,
) -> Tensor {
    let (b, _ic, h, w) = (
        input.shape()[0],
        input.shape()[1],
        input.shape()[2],
        input.shape()[3],
    );
    let (oc, ic, kh, kw) = (
        weight.shape()[0],
        weight.shape()[1],
        weight.shape()[2],
        weight.shape()[3],
    );
    let oh = (h + 2 * padding - kh) / stride + 1;
    let ow = (w + 2 * padding - kw) / stride + 1;
    // lower to a GEMM over im2col rows; same math as the direct loops
    let cols = im2col(input, kh, kw, stride, padding);
    let k = ic * kh * kw;
    let mut out = vec![0.0f64; b * oc * oh * ow];
    for bi in 0..b {
        for pos in 0..oh * ow {
            let crow = cols.row(bi * oh * ow + pos);
            for o in 0..oc {
                let wrow = &weight.data()[o * k..(o + 1) * k];
                let mut acc = bias.data()[o];
                for i in 0..k {
                    acc += crow[i] * wrow[i];
                }
                out[((bi * oc) + o) * oh * ow + pos] = acc;
            }
        }
    }
    Tensor::new(vec![b, oc, oh, ow], out)
}

fn relu(t: &Tensor) -> Tensor {
    let data = t.data().iter().map(|&x| x.max(0.0)).collect();
    Tensor::new(t.shape().to_vec(), data)
}

fn softmax_last_dim(t: &Tensor) -> Tensor {
    let width = *t.shape().last().unwrap();
    let mut data = t.data().to_vec();
    for row in data.chunks_mut(width) {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0f64;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    Tensor::new(t.shape().to_vec(), data)
}

fn apply(layer: &LayerSpec, input: &Tensor) -> Result<Tensor, InferError> {
    // shape check up front so arithmetic can index freely
    let out_shape = layer.output_shape(input.shape())?;
    let out = match layer {
        LayerSpec::Dense { weight, bias } => dense_forward(input, weight, bias),
        LayerSpec::Conv2d {
            weight,
            bias,
            stride,
            padding,
        } => conv2d_forward(input, weight, bias, *stride, *padding),
        LayerSpec::Relu => relu(input),
        LayerSpec::Softmax => softmax_last_dim(input),
        LayerSpec::Flatten => input.reshaped(out_shape.clone())?,
    };
    debug_assert_eq!(out.shape(), &out_shape[..]);
    Ok(out)
}

/// Full-precision forward pass. With `tap` set, returns the output of each
/// quantizable layer (observed at `tap_point`) in layer order.
pub fn forward(
    model: &Model,
    batch: &Tensor,
    tap: bool,
    tap_point: TapPoint,
) -> Result<(Tensor, Option<Vec<Tensor>>), InferError> {
    let taps_at = tap_indices(model, tap_point);
    let mut taps = if tap { Some(Vec::new()) } else { None };
    let mut current = batch.clone();
    for (i, layer) in model.layers.iter().enumerate() {
        current = apply(layer, &current)?;
        if let Some(taps) = taps.as_mut() {
            if taps_at.contains(&i) {
                taps.push(current.clone());
            }
        }
    }
    Ok((current, taps))
}

/// Forward pass of the fake-quantized model: weights quantized per the
/// per-layer format vector, activations quantized at each tap point with
/// the derived activation format (scale factors chained across layers).
pub fn forward_quantized(
    model: &Model,
    delta: &[LPParams],
    batch: &Tensor,
    tap: bool,
    tap_point: TapPoint,
) -> Result<(Tensor, Option<Vec<Tensor>>), InferError> {
    let n = model.quantizable_count();
    if delta.len() != n {
        return Err(InferError::DeltaLength {
            got: delta.len(),
            want: n,
        });
    }
    for (l, p) in delta.iter().enumerate() {
        if let Err(e) = Codec::new(*p) {
            return Err(InferError::DeltaEntry {
                layer: l,
                detail: e.to_string(),
            });
        }
    }

    let taps_at = tap_indices(model, tap_point);
    let mut taps = if tap { Some(Vec::new()) } else { None };
    let mut current = batch.clone();
    let mut qi = 0usize; // quantizable-layer cursor
    let mut prev_act_sf = 0.0f64;
    let mut pending_act: Option<Codec> = None;

    for (i, layer) in model.layers.iter().enumerate() {
        let quantized_layer;
        let layer = if layer.is_weighted() {
            let params = delta[qi];
            let act = activation_params(&params, prev_act_sf);
            prev_act_sf = act.params.sf;
            pending_act = Some(Codec::new(act.params).expect("derived activation format"));
            let codec = Codec::new(params).unwrap();
            quantized_layer = match layer {
                LayerSpec::Dense { weight, bias } => LayerSpec::Dense {
                    weight: fake_quantize_with(weight, &codec).0,
                    bias: bias.clone(),
                },
                LayerSpec::Conv2d {
                    weight,
                    bias,
                    stride,
                    padding,
                } => LayerSpec::Conv2d {
                    weight: fake_quantize_with(weight, &codec).0,
                    bias: bias.clone(),
                    stride: *stride,
                    padding: *padding,
                },
                _ => unreachable!(),
            };
            qi += 1;
            &quantized_layer
        } else {
            layer
        };

        current = apply(layer, &current)?;

        if taps_at.contains(&i) {
            let act_codec = pending_act
                .take()
                .expect("tap point always follows a weighted layer");
            current = fake_quantize_with(&current, &act_codec).0;
            if let Some(taps) = taps.as_mut() {
                taps.push(current.clone());
            }
        }
    }
    Ok((current, taps))
}
