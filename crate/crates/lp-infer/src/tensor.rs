use crate::InferError;

/// Row-major f64 tensor. Tensor *files* are binary32; values widen on load.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Self {
        assert_eq!(
            shape.iter().product::<usize>(),
            data.len(),
            "shape {shape:?} vs {} elements",
            data.len()
        );
        Self { shape, data }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Leading dimension, i.e. the batch size for batched tensors.
    pub fn batch(&self) -> usize {
        self.shape.first().copied().unwrap_or(0)
    }

    /// Elements per leading-dimension row.
    pub fn row_len(&self) -> usize {
        self.shape[1..].iter().product()
    }

    pub fn row(&self, b: usize) -> &[f64] {
        let w = self.row_len();
        &self.data[b * w..(b + 1) * w]
    }

    /// Same data viewed under a new shape.
    pub fn reshaped(&self, shape: Vec<usize>) -> Result<Tensor, InferError> {
        if shape.iter().product::<usize>() != self.data.len() {
            return Err(InferError::ShapeMismatch {
                context: "reshape".into(),
                expected: shape,
                got: self.shape.clone(),
            });
        }
        Ok(Tensor {
            shape,
            data: self.data.clone(),
        })
    }

    /// Every element snapped to the nearest binary32 value. Fixture
    /// constructors use this so models and data match their on-disk
    /// representation exactly.
    pub fn narrowed_to_f32(&self) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f64::from(v as f32)).collect(),
        }
    }

    /// A sub-batch [start, end) along the leading dimension.
    pub fn slice_batch(&self, start: usize, end: usize) -> Tensor {
        let w = self.row_len();
        let mut shape = self.shape.clone();
        shape[0] = end - start;
        Tensor::new(shape, self.data[start * w..end * w].to_vec())
    }
}

/// Unlabelled inputs used to evaluate quantization fitness.
#[derive(Debug, Clone)]
pub struct CalibrationSet {
    pub inputs: Tensor,
}

impl CalibrationSet {
    pub fn new(inputs: Tensor) -> Self {
        assert!(inputs.batch() > 0, "calibration set must be nonempty");
        Self { inputs }
    }

    pub fn len(&self) -> usize {
        self.inputs.batch()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Unrolls a [B, C, H, W] input into GEMM rows: output is
/// [B*OH*OW, C*KH*KW] with zero padding, so conv becomes
/// `im2col(x) * W^T`.
pub fn im2col(input: &Tensor, kh: usize, kw: usize, stride: usize, padding: usize) -> Tensor {
    let (b, c, h, w) = (
        input.shape()[0],
        input.shape()[1],
        input.shape()[2],
        input.shape()[3],
    );
    let oh = (h + 2 * padding - kh) / stride + 1;
    let ow = (w + 2 * padding - kw) / stride + 1;
    let cols = c * kh * kw;
    let mut out = vec![0.0f64; b * oh * ow * cols];
    let mut row = 0usize;
    for bi in 0..b {
        for oy in 0..oh {
            for ox in 0..ow {
                let base = row * cols;
                for ci in 0..c {
                    for ky in 0..kh {
                        for kx in 0..kw {
                            let iy = (oy * stride + ky) as isize - padding as isize;
                            let ix = (ox * stride + kx) as isize - padding as isize;
                            let v = if iy >= 0 && iy < h as isize && ix >= 0 && ix < w as isize {
                                input.data()
                                    [((bi * c + ci) * h + iy as usize) * w + ix as usize]
                            } else {
                                0.0
                            };
                            out[base + (ci * kh + ky) * kw + kx] = v;
                        }
                    }
                }
                row += 1;
            }
        }
    }
    Tensor::new(vec![b * oh * ow, cols], out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_reshape() {
        let t = Tensor::new(vec![2, 3], vec![1., 2., 3., 4., 5., 6.]);
        assert_eq!(t.row(1), &[4., 5., 6.]);
        let r = t.reshaped(vec![3, 2]).unwrap();
        assert_eq!(r.shape(), &[3, 2]);
        assert!(t.reshaped(vec![4, 2]).is_err());
    }

    #[test]
    fn im2col_identity_kernel_no_padding() {
        // 1x1 kernel just flattens spatial positions
        let t = Tensor::new(vec![1, 1, 2, 2], vec![1., 2., 3., 4.]);
        let m = im2col(&t, 1, 1, 1, 0);
        assert_eq!(m.shape(), &[4, 1]);
        assert_eq!(m.data(), &[1., 2., 3., 4.]);
    }

    #[test]
    fn im2col_padding_zero_fills() {
        let t = Tensor::new(vec![1, 1, 1, 1], vec![5.]);
        let m = im2col(&t, 3, 3, 1, 1);
        assert_eq!(m.shape(), &[1, 9]);
        let mut want = vec![0.0f64; 9];
        want[4] = 5.0;
        assert_eq!(m.data(), &want[..]);
    }
}
