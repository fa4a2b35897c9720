use crate::tensor::Tensor;
use crate::InferError;

/// One stage of a model. Dense and conv2d carry weights and count toward
/// the quantizable-layer index space; the rest are shape/pointwise ops.
#[derive(Debug, Clone)]
pub enum LayerSpec {
    /// weight [out, in], bias [out]
    Dense { weight: Tensor, bias: Tensor },
    /// weight [oc, ic, kh, kw], bias [oc]
    Conv2d {
        weight: Tensor,
        bias: Tensor,
        stride: usize,
        padding: usize,
    },
    Relu,
    Softmax,
    Flatten,
}

impl LayerSpec {
    pub fn is_weighted(&self) -> bool {
        matches!(self, LayerSpec::Dense { .. } | LayerSpec::Conv2d { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::Conv2d { .. } => "conv2d",
            LayerSpec::Relu => "relu",
            LayerSpec::Softmax => "softmax",
            LayerSpec::Flatten => "flatten",
        }
    }

    /// Output shape for a given input shape (batch dim first).
    pub fn output_shape(&self, input: &[usize]) -> Result<Vec<usize>, InferError> {
        let mismatch = |expected: Vec<usize>| InferError::ShapeMismatch {
            context: self.kind_name().to_string(),
            expected,
            got: input.to_vec(),
        };
        match self {
            LayerSpec::Dense { weight, .. } => {
                let (out_f, in_f) = (weight.shape()[0], weight.shape()[1]);
                if input.len() != 2 || input[1] != in_f {
                    return Err(mismatch(vec![input.first().copied().unwrap_or(0), in_f]));
                }
                Ok(vec![input[0], out_f])
            }
            LayerSpec::Conv2d {
                weight,
                stride,
                padding,
                ..
            } => {
                let (oc, ic, kh, kw) = (
                    weight.shape()[0],
                    weight.shape()[1],
                    weight.shape()[2],
                    weight.shape()[3],
                );
                if input.len() != 4 || input[1] != ic {
                    return Err(mismatch(vec![input.first().copied().unwrap_or(0), ic, 0, 0]));
                }
                let (h, w) = (input[2], input[3]);
                if h + 2 * padding < kh || w + 2 * padding < kw {
                    return Err(mismatch(vec![input[0], ic, kh, kw]));
                }
                let oh = (h + 2 * padding - kh) / stride + 1;
                let ow = (w + 2 * padding - kw) / stride + 1;
                Ok(vec![input[0], oc, oh, ow])
            }
            LayerSpec::Relu | LayerSpec::Softmax => Ok(input.to_vec()),
            LayerSpec::Flatten => Ok(vec![input[0], input[1..].iter().product()]),
        }
    }
}

/// An ordered layer chain. `N` (the quantizable-layer count) is the number
/// of weighted layers; quantization vectors index them in order.
#[derive(Debug, Clone)]
pub struct Model {
    pub name: String,
    /// Per-sample input shape, without the batch dimension.
    pub input_shape: Vec<usize>,
    pub layers: Vec<LayerSpec>,
}

impl Model {
    /// Number of quantizable (weighted) layers.
    pub fn quantizable_count(&self) -> usize {
        self.layers.iter().filter(|l| l.is_weighted()).count()
    }

    /// Layer-vector indices of the weighted layers, in order.
    pub fn quantizable_indices(&self) -> Vec<usize> {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, l)| l.is_weighted())
            .map(|(i, _)| i)
            .collect()
    }

    /// Walks the chain once to confirm dimension compatibility; returns the
    /// per-layer output shapes for a given batch size.
    pub fn chain_shapes(&self, batch: usize) -> Result<Vec<Vec<usize>>, InferError> {
        let mut shape: Vec<usize> = std::iter::once(batch)
            .chain(self.input_shape.iter().copied())
            .collect();
        let mut out = Vec::with_capacity(self.layers.len());
        for layer in &self.layers {
            shape = layer.output_shape(&shape)?;
            out.push(shape.clone());
        }
        Ok(out)
    }

    /// Total weight elements per quantizable layer (bias excluded).
    pub fn weight_counts(&self) -> Vec<usize> {
        self.layers
            .iter()
            .filter_map(|l| match l {
                LayerSpec::Dense { weight, .. } | LayerSpec::Conv2d { weight, .. } => {
                    Some(weight.len())
                }
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(out_f: usize, in_f: usize) -> LayerSpec {
        LayerSpec::Dense {
            weight: Tensor::zeros(vec![out_f, in_f]),
            bias: Tensor::zeros(vec![out_f]),
        }
    }

    #[test]
    fn chain_shapes_and_counts() {
        let m = Model {
            name: "t".into(),
            input_shape: vec![4],
            layers: vec![dense(8, 4), LayerSpec::Relu, dense(2, 8), LayerSpec::Softmax],
        };
        assert_eq!(m.quantizable_count(), 2);
        assert_eq!(m.quantizable_indices(), vec![0, 2]);
        let shapes = m.chain_shapes(3).unwrap();
        assert_eq!(shapes, vec![vec![3, 8], vec![3, 8], vec![3, 2], vec![3, 2]]);
    }

    #[test]
    fn incompatible_chain_is_rejected() {
        let m = Model {
            name: "bad".into(),
            input_shape: vec![4],
            layers: vec![dense(8, 5)],
        };
        assert!(m.chain_shapes(1).is_err());
    }

    #[test]
    fn conv_shape_math() {
        let conv = LayerSpec::Conv2d {
            weight: Tensor::zeros(vec![4, 1, 3, 3]),
            bias: Tensor::zeros(vec![4]),
            stride: 2,
            padding: 1,
        };
        assert_eq!(conv.output_shape(&[2, 1, 8, 8]).unwrap(), vec![2, 4, 4, 4]);
    }
}
