//! Model bundles: a directory holding `manifest.txt`, `w_enc.rdt` and `w_dec.rdt`.

use std::path::Path;

use dealias_core::autoencoder::{Activation, AutoencoderModel};

use crate::error::{Error, Result};
use crate::fsutil::{create_dir, read_text, write_atomic};
use crate::tensor::{read_tensor, write_tensor, Tensor};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST: &str = "manifest.txt";
pub const ENCODER: &str = "w_enc.rdt";
pub const DECODER: &str = "w_dec.rdt";

pub fn parse_activation(s: &str) -> Option<Activation> {
    match s {
        "tanh" => Some(Activation::Tanh),
        "sigmoid" => Some(Activation::Sigmoid),
        _ => None,
    }
}

pub fn save_model(model: &AutoencoderModel, dir: &Path) -> Result<()> {
    create_dir(dir)?;
    write_tensor(&dir.join(ENCODER), &Tensor::from_matrix(model.w_enc()))?;
    write_tensor(&dir.join(DECODER), &Tensor::from_matrix(model.w_dec()))?;
    let manifest = format!(
        "format_version={FORMAT_VERSION}\nactivation={}\nd={}\nhidden={}\n",
        model.activation().name(),
        model.input_dim(),
        model.hidden()
    );
    write_atomic(&dir.join(MANIFEST), manifest.as_bytes())
}

/// Loads a bundle. The manifest's activation is authoritative; tensor
/// shapes must agree with its `d` and `hidden`.
pub fn load_model(dir: &Path) -> Result<AutoencoderModel> {
    let manifest_path = dir.join(MANIFEST);
    let text =
        read_text(&manifest_path).map_err(|e| Error::format(&manifest_path, e.to_string()))?;
    let (mut version, mut activation, mut d, mut hidden) = (None, None, None, None);
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::format(&manifest_path, format!("line {}: {msg}", n + 1));
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| bad(format!("expected key=value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        let int = || {
            value
                .parse::<usize>()
                .map_err(|_| bad(format!("bad integer {value:?} for {key}")))
        };
        match key {
            "format_version" => version = Some(int()?),
            "activation" => {
                activation = Some(
                    parse_activation(value)
                        .ok_or_else(|| bad(format!("unknown activation {value:?}")))?,
                )
            }
            "d" => d = Some(int()?),
            "hidden" => hidden = Some(int()?),
            other => return Err(bad(format!("unknown key {other:?}"))),
        }
    }
    let missing = |k: &str| Error::format(&manifest_path, format!("missing key {k}"));
    let version = version.ok_or_else(|| missing("format_version"))?;
    if version != FORMAT_VERSION as usize {
        return Err(Error::format(
            &manifest_path,
            format!("unsupported format_version {version}"),
        ));
    }
    let activation = activation.ok_or_else(|| missing("activation"))?;
    let d = d.ok_or_else(|| missing("d"))?;
    let hidden = hidden.ok_or_else(|| missing("hidden"))?;

    let load = |name: &str, rows: usize, cols: usize| -> Result<dealias_core::Matrix> {
        let path = dir.join(name);
        let t = read_tensor(&path).map_err(|e| match e {
            Error::Io { source, .. } => {
                Error::format(&path, format!("cannot read tensor: {source}"))
            }
            other => other,
        })?;
        if t.dims() != [rows, cols] {
            return Err(Error::format(
                &path,
                format!(
                    "dims {:?} disagree with manifest ({rows}, {cols})",
                    t.dims()
                ),
            ));
        }
        t.into_matrix()
    };
    let w_enc = load(ENCODER, hidden, d + 1)?;
    let w_dec = load(DECODER, d, hidden)?;
    AutoencoderModel::new(w_enc, w_dec, activation).map_err(|e| Error::format(dir, e.to_string()))
}
