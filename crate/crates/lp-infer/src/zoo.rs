//! Desk-scale model zoo: a synthetic Gaussian-blob classification task, a
//! trained 3-layer MLP on it, and a small random-weight CNN. Everything is
//! seeded and deterministic; the MLP trainer below exists purely to build
//! realistic fixtures (the engine itself does no training).

use crate::forward::{forward, forward_quantized, TapPoint};
use crate::layer::{LayerSpec, Model};
use crate::tensor::{CalibrationSet, Tensor};
use lp_core::LPParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct TaskSpec {
    pub classes: usize,
    pub dim: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    /// Distance of class centers from the origin.
    pub separation: f64,
    /// Per-coordinate noise std around the center.
    pub spread: f64,
}

pub const DEFAULT_TASK: TaskSpec = TaskSpec {
    classes: 4,
    dim: 16,
    train_per_class: 64,
    test_per_class: 64,
    separation: 3.0,
    spread: 0.7,
};

#[derive(Debug, Clone)]
pub struct SyntheticTask {
    pub train: Tensor,
    pub train_labels: Vec<usize>,
    pub test: Tensor,
    pub test_labels: Vec<usize>,
    pub spec: TaskSpec,
}

impl SyntheticTask {
    /// Unlabelled calibration inputs: the first `count` training rows.
    pub fn calibration(&self, count: usize) -> CalibrationSet {
        let count = count.min(self.train.batch());
        CalibrationSet::new(self.train.slice_batch(0, count))
    }
}

/// Gaussian blobs around `classes` random directions, interleaved so any
/// prefix is class-balanced.
pub fn blobs_task(seed: u64, spec: TaskSpec) -> SyntheticTask {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x626c_6f62);
    let mut centers = vec![0.0f64; spec.classes * spec.dim];
    for c in centers.iter_mut() {
        *c = rng.sample(StandardNormal);
    }
    for class in 0..spec.classes {
        let row = &mut centers[class * spec.dim..(class + 1) * spec.dim];
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in row.iter_mut() {
            *v *= spec.separation / norm;
        }
    }

    let mut sample_split = |per_class: usize| {
        let total = per_class * spec.classes;
        let mut xs = Vec::with_capacity(total * spec.dim);
        let mut ys = Vec::with_capacity(total);
        for i in 0..total {
            let class = i % spec.classes;
            for d in 0..spec.dim {
                let noise: f64 = rng.sample(StandardNormal);
                xs.push((centers[class * spec.dim + d] + spec.spread * noise) as f64);
            }
            ys.push(class);
        }
        (Tensor::new(vec![total, spec.dim], xs).narrowed_to_f32(), ys)
    };

    let (train, train_labels) = sample_split(spec.train_per_class);
    let (test, test_labels) = sample_split(spec.test_per_class);
    SyntheticTask {
        train,
        train_labels,
        test,
        test_labels,
        spec,
    }
}

/// Fraction of samples whose argmax logit matches the label.
pub fn accuracy(model: &Model, inputs: &Tensor, labels: &[usize]) -> f64 {
    let (logits, _) = forward(model, inputs, false, TapPoint::PostActivation).unwrap();
    count_hits(&logits, labels)
}

/// Accuracy of the fake-quantized model.
pub fn quantized_accuracy(model: &Model, delta: &[LPParams], inputs: &Tensor, labels: &[usize]) -> f64 {
    let (logits, _) =
        forward_quantized(model, delta, inputs, false, TapPoint::PostActivation).unwrap();
    count_hits(&logits, labels)
}

fn count_hits(logits: &Tensor, labels: &[usize]) -> f64 {
    let mut hits = 0usize;
    for (b, &label) in labels.iter().enumerate() {
        let row = logits.row(b);
        let pred = row
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        if pred == label {
            hits += 1;
        }
    }
    hits as f64 / labels.len() as f64
}

/// The reference 3-layer MLP: 16 -> 24 -> 16 -> 4 with relu/relu/softmax,
/// trained to convergence on the default blobs task. Deterministic per
/// seed; trains in well under a second.
pub fn reference_mlp(seed: u64) -> Model {
    let task = blobs_task(seed, DEFAULT_TASK.clone());
    train_mlp(&task, &[24, 16], 300, 0.5, seed)
}

/// Plain-SGD trainer for dense/relu stacks (fixture construction only).
fn train_mlp(task: &SyntheticTask, hidden: &[usize], epochs: usize, lr: f64, seed: u64) -> Model {
    let in_dim = task.spec.dim;
    let out_dim = task.spec.classes;
    let mut dims = vec![in_dim];
    dims.extend_from_slice(hidden);
    dims.push(out_dim);
    let n_layers = dims.len() - 1;

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d6c_70);
    let mut weights: Vec<Vec<f64>> = Vec::new();
    let mut biases: Vec<Vec<f64>> = Vec::new();
    for l in 0..n_layers {
        let (fan_in, fan_out) = (dims[l], dims[l + 1]);
        let std = (2.0 / fan_in as f64).sqrt();
        weights.push(
            (0..fan_in * fan_out)
                .map(|_| (rng.sample::<f64, _>(StandardNormal) * std) as f64)
                .collect(),
        );
        biases.push(vec![0.0; fan_out]);
    }

    let batch = task.train.batch();
    let x = task.train.data();
    for _ in 0..epochs {
        // full-batch gradients
        let mut gw: Vec<Vec<f64>> = weights.iter().map(|w| vec![0.0; w.len()]).collect();
        let mut gb: Vec<Vec<f64>> = biases.iter().map(|b| vec![0.0; b.len()]).collect();
        for s in 0..batch {
            let mut acts: Vec<Vec<f64>> = vec![x[s * in_dim..(s + 1) * in_dim].to_vec()];
            for l in 0..n_layers {
                let (fi, fo) = (dims[l], dims[l + 1]);
                let mut h = vec![0.0f64; fo];
                for o in 0..fo {
                    let mut acc = biases[l][o];
                    for i in 0..fi {
                        acc += acts[l][i] * weights[l][o * fi + i];
                    }
                    h[o] = if l + 1 < n_layers { acc.max(0.0) } else { acc };
                }
                acts.push(h);
            }
            // softmax + cross-entropy gradient at the logits
            let logits = acts.last().unwrap();
            let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = logits.iter().map(|&v| (v - max).exp()).collect();
            let sum: f64 = exps.iter().sum();
            let mut delta: Vec<f64> = exps.iter().map(|&e| e / sum).collect();
            delta[task.train_labels[s]] -= 1.0;

            for l in (0..n_layers).rev() {
                let (fi, fo) = (dims[l], dims[l + 1]);
                for o in 0..fo {
                    gb[l][o] += delta[o];
                    for i in 0..fi {
                        gw[l][o * fi + i] += delta[o] * acts[l][i];
                    }
                }
                if l > 0 {
                    let mut prev = vec![0.0f64; fi];
                    for i in 0..fi {
                        if acts[l][i] > 0.0 {
                            let mut acc = 0.0;
                            for o in 0..fo {
                                acc += delta[o] * weights[l][o * fi + i];
                            }
                            prev[i] = acc;
                        }
                    }
                    delta = prev;
                }
            }
        }
        let scale = lr / batch as f64;
        for l in 0..n_layers {
            for (w, g) in weights[l].iter_mut().zip(&gw[l]) {
                *w -= scale * g;
            }
            for (b, g) in biases[l].iter_mut().zip(&gb[l]) {
                *b -= scale * g;
            }
        }
    }

    let mut layers = Vec::new();
    for l in 0..n_layers {
        layers.push(LayerSpec::Dense {
            weight: Tensor::new(vec![dims[l + 1], dims[l]], weights[l].clone()).narrowed_to_f32(),
            bias: Tensor::new(vec![dims[l + 1]], biases[l].clone()).narrowed_to_f32(),
        });
        if l + 1 < n_layers {
            layers.push(LayerSpec::Relu);
        } else {
            layers.push(LayerSpec::Softmax);
        }
    }
    Model {
        name: "mlp3".into(),
        input_shape: vec![in_dim],
        layers,
    }
}

/// A small random-weight CNN (2 conv + 1 dense) over 1x8x8 inputs, for
/// datapath and simulator exercises.
pub fn small_cnn(seed: u64) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636e_6e);
    let mut tensor = |shape: Vec<usize>, fan_in: usize| {
        let std = (2.0 / fan_in as f64).sqrt();
        let len = shape.iter().product();
        Tensor::new(
            shape,
            (0..len)
                .map(|_| (rng.sample::<f64, _>(StandardNormal) * std) as f64)
                .collect(),
        )
        .narrowed_to_f32()
    };
    let conv1_w = tensor(vec![4, 1, 3, 3], 9);
    let conv2_w = tensor(vec![8, 4, 3, 3], 36);
    let dense_w = tensor(vec![4, 8 * 4 * 4], 128);
    Model {
        name: "cnn-small".into(),
        input_shape: vec![1, 8, 8],
        layers: vec![
            LayerSpec::Conv2d {
                weight: conv1_w,
                bias: Tensor::zeros(vec![4]),
                stride: 1,
                padding: 1,
            },
            LayerSpec::Relu,
            LayerSpec::Conv2d {
                weight: conv2_w,
                bias: Tensor::zeros(vec![8]),
                stride: 2,
                padding: 1,
            },
            LayerSpec::Relu,
            LayerSpec::Flatten,
            LayerSpec::Dense {
                weight: dense_w,
                bias: Tensor::zeros(vec![4]),
            },
            LayerSpec::Softmax,
        ],
    }
}

/// Seeded standard-normal batch with the given per-sample shape.
pub fn random_batch(sample_shape: &[usize], count: usize, seed: u64) -> Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6261_7463);
    let mut shape = vec![count];
    shape.extend_from_slice(sample_shape);
    let len = shape.iter().product();
    Tensor::new(
        shape,
        (0..len)
            .map(|_| rng.sample::<f64, _>(StandardNormal) as f64)
            .collect(),
    )
    .narrowed_to_f32()
}
