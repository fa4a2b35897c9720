use crate::layer::{LayerSpec, Model};
use crate::tensor::Tensor;
use crate::InferError;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

/// On-disk model description. Layers are listed in order; tensor files are
/// raw little-endian IEEE-754 binary32, row-major, no header — shapes come
/// from the dims here.
#[derive(Debug, Serialize, Deserialize)]
struct ModelManifest {
    name: String,
    input_shape: Vec<usize>,
    layers: Vec<LayerManifest>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum LayerManifest {
    Dense {
        in_features: usize,
        out_features: usize,
        weight: String,
        bias: String,
    },
    Conv2d {
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        stride: usize,
        padding: usize,
        weight: String,
        bias: String,
    },
    Relu,
    Softmax,
    Flatten,
}

/// Reads a raw little-endian f32 tensor file into the given shape.
pub fn read_tensor(path: &Path, shape: Vec<usize>) -> Result<Tensor, InferError> {
    let bytes = fs::read(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            InferError::MissingTensor(path.to_path_buf())
        } else {
            InferError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    })?;
    let want: usize = shape.iter().product();
    if bytes.len() != want * 4 {
        return Err(InferError::TensorSize {
            path: path.to_path_buf(),
            got: bytes.len() / 4,
            want,
            shape,
        });
    }
    let data = bytes
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
        .collect();
    Ok(Tensor::new(shape, data))
}

/// Writes a tensor as raw little-endian binary32 (values narrow to f32).
pub fn write_tensor(path: &Path, t: &Tensor) -> Result<(), InferError> {
    let mut bytes = Vec::with_capacity(t.len() * 4);
    for &v in t.data() {
        bytes.extend_from_slice(&(v as f32).to_le_bytes());
    }
    fs::write(path, bytes).map_err(|source| InferError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads a model manifest and resolves every referenced tensor file
/// (relative paths resolve against the manifest's directory).
pub fn load_model(manifest_path: &Path) -> Result<Model, InferError> {
    let text = fs::read_to_string(manifest_path).map_err(|source| InferError::Io {
        path: manifest_path.to_path_buf(),
        source,
    })?;
    let manifest: ModelManifest =
        serde_json::from_str(&text).map_err(|source| InferError::MalformedManifest {
            path: manifest_path.to_path_buf(),
            source,
        })?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));

    let mut layers = Vec::with_capacity(manifest.layers.len());
    for lm in &manifest.layers {
        layers.push(match lm {
            LayerManifest::Dense {
                in_features,
                out_features,
                weight,
                bias,
            } => LayerSpec::Dense {
                weight: read_tensor(&dir.join(weight), vec![*out_features, *in_features])?,
                bias: read_tensor(&dir.join(bias), vec![*out_features])?,
            },
            LayerManifest::Conv2d {
                in_channels,
                out_channels,
                kernel,
                stride,
                padding,
                weight,
                bias,
            } => LayerSpec::Conv2d {
                weight: read_tensor(
                    &dir.join(weight),
                    vec![*out_channels, *in_channels, *kernel, *kernel],
                )?,
                bias: read_tensor(&dir.join(bias), vec![*out_channels])?,
                stride: *stride,
                padding: *padding,
            },
            LayerManifest::Relu => LayerSpec::Relu,
            LayerManifest::Softmax => LayerSpec::Softmax,
            LayerManifest::Flatten => LayerSpec::Flatten,
        });
    }

    let model = Model {
        name: manifest.name,
        input_shape: manifest.input_shape,
        layers,
    };
    // fail fast on incompatible dims
    model.chain_shapes(1)?;
    Ok(model)
}

/// Writes a model as manifest + tensor files into `dir`; returns the
/// manifest path.
pub fn save_model(model: &Model, dir: &Path) -> Result<PathBuf, InferError> {
    fs::create_dir_all(dir).map_err(|source| InferError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut layers = Vec::new();
    for (i, layer) in model.layers.iter().enumerate() {
        layers.push(match layer {
            LayerSpec::Dense { weight, bias } => {
                let wname = format!("l{i}_w.bin");
                let bname = format!("l{i}_b.bin");
                write_tensor(&dir.join(&wname), weight)?;
                write_tensor(&dir.join(&bname), bias)?;
                LayerManifest::Dense {
                    in_features: weight.shape()[1],
                    out_features: weight.shape()[0],
                    weight: wname,
                    bias: bname,
                }
            }
            LayerSpec::Conv2d {
                weight,
                bias,
                stride,
                padding,
            } => {
                let wname = format!("l{i}_w.bin");
                let bname = format!("l{i}_b.bin");
                write_tensor(&dir.join(&wname), weight)?;
                write_tensor(&dir.join(&bname), bias)?;
                LayerManifest::Conv2d {
                    in_channels: weight.shape()[1],
                    out_channels: weight.shape()[0],
                    kernel: weight.shape()[2],
                    stride: *stride,
                    padding: *padding,
                    weight: wname,
                    bias: bname,
                }
            }
            LayerSpec::Relu => LayerManifest::Relu,
            LayerSpec::Softmax => LayerManifest::Softmax,
            LayerSpec::Flatten => LayerManifest::Flatten,
        });
    }
    let manifest = ModelManifest {
        name: model.name.clone(),
        input_shape: model.input_shape.clone(),
        layers,
    };
    let path = dir.join("model.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, text).map_err(|source| InferError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn tensor_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let t = Tensor::new(
            vec![2, 3],
            vec![1.5, -0.25, 3e-8, f64::from(f32::MIN_POSITIVE), 0.0, -7.0],
        )
        .narrowed_to_f32();
        let p = dir.path().join("t.bin");
        write_tensor(&p, &t).unwrap();
        let back = read_tensor(&p, vec![2, 3]).unwrap();
        for (a, b) in t.data().iter().zip(back.data()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // and the byte stream itself is stable
        write_tensor(&dir.path().join("t2.bin"), &back).unwrap();
        assert_eq!(
            fs::read(&p).unwrap(),
            fs::read(dir.path().join("t2.bin")).unwrap()
        );
    }

    #[test]
    fn model_round_trip_preserves_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let model = zoo::reference_mlp(7);
        let manifest = save_model(&model, dir.path()).unwrap();
        let back = load_model(&manifest).unwrap();
        assert_eq!(back.quantizable_count(), model.quantizable_count());
        let x = zoo::blobs_task(7, zoo::DEFAULT_TASK.clone()).calibration(4);
        let (y0, _) = crate::forward(&model, &x.inputs, false, crate::TapPoint::PostActivation)
            .unwrap();
        let (y1, _) =
            crate::forward(&back, &x.inputs, false, crate::TapPoint::PostActivation).unwrap();
        assert_eq!(y0.data(), y1.data());
    }

    #[test]
    fn missing_tensor_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("model.json");
        fs::write(
            &manifest,
            r#"{"name":"x","input_shape":[2],
               "layers":[{"kind":"dense","in_features":2,"out_features":2,
                          "weight":"nope.bin","bias":"nope2.bin"}]}"#,
        )
        .unwrap();
        let err = load_model(&manifest).unwrap_err();
        assert!(matches!(err, InferError::MissingTensor(_)), "{err}");
    }

    #[test]
    fn malformed_manifest_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = dir.path().join("model.json");
        fs::write(&manifest, "{not json").unwrap();
        let err = load_model(&manifest).unwrap_err();
        assert!(matches!(err, InferError::MalformedManifest { .. }));
    }

    #[test]
    fn reference_fixture_loads_to_three_quantizable_layers() {
        let dir = tempfile::tempdir().unwrap();
        let manifest = save_model(&zoo::reference_mlp(7), dir.path()).unwrap();
        let model = load_model(&manifest).unwrap();
        assert_eq!(model.quantizable_count(), 3);
    }
}
