//! Flat `key=value` run configuration.
//!
//! Every training, degradation and solver parameter has a key. Unknown keys
//! are rejected. [`RunConfig::canonical`] prints every key in a fixed order;
//! parsing that listing back yields an identical config.

use std::fmt;
use std::path::PathBuf;

use dealias_core::autoencoder::{Activation, BregmanUpdate, CodeUpdate, L2Config, TrainConfig};
use dealias_core::pipeline::{DegradationSpec, Modality};
use dealias_core::transforms::{MaskKind, SparsifyingTransform};

use crate::error::{Error, Result};
use crate::model_io::parse_activation;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModalityKind {
    Mri,
    Ct,
    Impulse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskChoice {
    Random,
    VariableDensity,
    Radial,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsTransform {
    Haar,
    Dct,
}

/// How the l2 baseline's epoch count is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum L2Budget {
    /// Exactly `l2_epochs`.
    Epochs,
    /// As many epochs as cost the same arithmetic as the rodeo run.
    Flops,
    /// Train until the rodeo wall-clock time is used up (not reproducible).
    Time,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub modality: ModalityKind,
    pub mask: MaskChoice,
    pub mask_fraction: f64,
    pub mask_decay: f64,
    pub radial_lines: usize,
    pub periodic_stride: usize,
    pub ct_spacing_deg: f64,
    pub impulse_fraction: f64,
    pub degrade_seed: u64,
    pub patch_size: usize,
    pub overlap: bool,
    pub hidden: usize,
    pub lambda: f64,
    pub mu: f64,
    pub max_iter: usize,
    pub rel_tol: f64,
    pub ridge_eps: f64,
    pub activation: Activation,
    pub atanh_clamp_eps: f64,
    pub bregman_update: BregmanUpdate,
    pub p4: CodeUpdate,
    pub encoder_guard: bool,
    pub train_seed: u64,
    pub l2_learning_rate: f64,
    pub l2_budget: L2Budget,
    pub l2_epochs: usize,
    pub cs_transform: CsTransform,
    pub haar_levels: usize,
    pub cs_lambda: f64,
    pub cs_max_iter: usize,
    pub timing_repeats: usize,
}

pub const KEYS: &[&str] = &[
    "corpus",
    "modality",
    "mask",
    "mask_fraction",
    "mask_decay",
    "radial_lines",
    "periodic_stride",
    "ct_spacing_deg",
    "impulse_fraction",
    "degrade_seed",
    "patch_size",
    "overlap",
    "hidden",
    "lambda",
    "mu",
    "max_iter",
    "rel_tol",
    "ridge_eps",
    "activation",
    "atanh_clamp_eps",
    "bregman_update",
    "p4",
    "encoder_guard",
    "train_seed",
    "l2_learning_rate",
    "l2_budget",
    "l2_epochs",
    "cs_transform",
    "haar_levels",
    "cs_lambda",
    "cs_max_iter",
    "timing_repeats",
];

impl Default for RunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        let l2 = L2Config::default();
        Self {
            corpus: None,
            modality: ModalityKind::Mri,
            mask: MaskChoice::Random,
            mask_fraction: 0.5,
            mask_decay: 2.0,
            radial_lines: 32,
            periodic_stride: 2,
            ct_spacing_deg: 6.0,
            impulse_fraction: 0.15,
            degrade_seed: 0,
            patch_size: dealias_core::pipeline::PATCH_SIZE,
            overlap: false,
            hidden: t.hidden,
            lambda: t.lambda,
            mu: t.mu,
            max_iter: t.max_iter,
            rel_tol: t.rel_tol,
            ridge_eps: t.ridge_eps,
            activation: t.activation,
            atanh_clamp_eps: t.atanh_clamp_eps,
            bregman_update: t.bregman_update,
            p4: t.p4,
            encoder_guard: t.encoder_guard,
            train_seed: t.seed,
            l2_learning_rate: l2.learning_rate,
            l2_budget: L2Budget::Flops,
            l2_epochs: l2.epochs,
            cs_transform: CsTransform::Haar,
            haar_levels: 4,
            cs_lambda: 1e-3,
            cs_max_iter: 200,
            timing_repeats: 5,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::usage(format!("invalid value {value:?} for key `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(Error::usage(format!(
            "key `{key}` expects true or false, got {value:?}"
        ))),
    }
}

fn choice<T: Copy>(key: &str, value: &str, options: &[(&str, T)]) -> Result<T> {
    options
        .iter()
        .find(|(n, _)| *n == value)
        .map(|(_, v)| *v)
        .ok_or_else(|| {
            let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
            Error::usage(format!(
                "key `{key}` expects one of {names:?}, got {value:?}"
            ))
        })
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key.trim() {
            "corpus" => {
                self.corpus = if v.is_empty() {
                    None
                } else {
                    Some(PathBuf::from(v))
                }
            }
            "modality" => {
                self.modality = choice(
                    key,
                    v,
                    &[
                        ("mri", ModalityKind::Mri),
                        ("ct", ModalityKind::Ct),
                        ("impulse", ModalityKind::Impulse),
                    ],
                )?
            }
            "mask" => {
                self.mask = choice(
                    key,
                    v,
                    &[
                        ("random", MaskChoice::Random),
                        ("variable-density", MaskChoice::VariableDensity),
                        ("radial", MaskChoice::Radial),
                        ("periodic", MaskChoice::Periodic),
                    ],
                )?
            }
            "mask_fraction" => self.mask_fraction = parse_num(key, v)?,
            "mask_decay" => self.mask_decay = parse_num(key, v)?,
            "radial_lines" => self.radial_lines = parse_num(key, v)?,
            "periodic_stride" => self.periodic_stride = parse_num(key, v)?,
            "ct_spacing_deg" => self.ct_spacing_deg = parse_num(key, v)?,
            "impulse_fraction" => self.impulse_fraction = parse_num(key, v)?,
            "degrade_seed" => self.degrade_seed = parse_num(key, v)?,
            "patch_size" => self.patch_size = parse_num(key, v)?,
            "overlap" => self.overlap = parse_bool(key, v)?,
            "hidden" => self.hidden = parse_num(key, v)?,
            "lambda" => self.lambda = parse_num(key, v)?,
            "mu" => self.mu = parse_num(key, v)?,
            "max_iter" => self.max_iter = parse_num(key, v)?,
            "rel_tol" => self.rel_tol = parse_num(key, v)?,
            "ridge_eps" => self.ridge_eps = parse_num(key, v)?,
            "activation" => {
                self.activation = parse_activation(v).ok_or_else(|| {
                    Error::usage(format!(
                        "key `activation` expects tanh or sigmoid, got {v:?}"
                    ))
                })?
            }
            "atanh_clamp_eps" => self.atanh_clamp_eps = parse_num(key, v)?,
            "bregman_update" => {
                self.bregman_update = choice(
                    key,
                    v,
                    &[
                        ("paper-literal", BregmanUpdate::PaperLiteral),
                        ("additive", BregmanUpdate::Additive),
                    ],
                )?
            }
            "p4" => {
                self.p4 = choice(
                    key,
                    v,
                    &[
                        ("coupled", CodeUpdate::Coupled),
                        ("paper-literal", CodeUpdate::PaperLiteral),
                    ],
                )?
            }
            "encoder_guard" => self.encoder_guard = parse_bool(key, v)?,
            "train_seed" => self.train_seed = parse_num(key, v)?,
            "l2_learning_rate" => self.l2_learning_rate = parse_num(key, v)?,
            "l2_budget" => {
                self.l2_budget = choice(
                    key,
                    v,
                    &[
                        ("epochs", L2Budget::Epochs),
                        ("flops", L2Budget::Flops),
                        ("time", L2Budget::Time),
                    ],
                )?
            }
            "l2_epochs" => self.l2_epochs = parse_num(key, v)?,
            "cs_transform" => {
                self.cs_transform = choice(
                    key,
                    v,
                    &[("haar", CsTransform::Haar), ("dct", CsTransform::Dct)],
                )?
            }
            "haar_levels" => self.haar_levels = parse_num(key, v)?,
            "cs_lambda" => self.cs_lambda = parse_num(key, v)?,
            "cs_max_iter" => self.cs_max_iter = parse_num(key, v)?,
            "timing_repeats" => self.timing_repeats = parse_num(key, v)?,
            other => return Err(Error::usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::usage(format!(
                    "config line {}: expected key=value, got {line:?}",
                    n + 1
                ))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Applies one `key=value` override.
    pub fn apply_override(&mut self, pair: &str) -> Result<()> {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| Error::usage(format!("override must be key=value, got {pair:?}")))?;
        self.set(key, value)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.apply_text(text)?;
        Ok(config)
    }

    /// Recovers the config from the `# key=value` header of a report CSV.
    pub fn from_report_header(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for line in text.lines().map_while(|l| l.strip_prefix("# ")) {
            config.apply_override(line)?;
        }
        Ok(config)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let s = match key {
            "corpus" => self
                .corpus
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            "modality" => match self.modality {
                ModalityKind::Mri => "mri",
                ModalityKind::Ct => "ct",
                ModalityKind::Impulse => "impulse",
            }
            .into(),
            "mask" => match self.mask {
                MaskChoice::Random => "random",
                MaskChoice::VariableDensity => "variable-density",
                MaskChoice::Radial => "radial",
                MaskChoice::Periodic => "periodic",
            }
            .into(),
            "mask_fraction" => self.mask_fraction.to_string(),
            "mask_decay" => self.mask_decay.to_string(),
            "radial_lines" => self.radial_lines.to_string(),
            "periodic_stride" => self.periodic_stride.to_string(),
            "ct_spacing_deg" => self.ct_spacing_deg.to_string(),
            "impulse_fraction" => self.impulse_fraction.to_string(),
            "degrade_seed" => self.degrade_seed.to_string(),
            "patch_size" => self.patch_size.to_string(),
            "overlap" => self.overlap.to_string(),
            "hidden" => self.hidden.to_string(),
            "lambda" => self.lambda.to_string(),
            "mu" => self.mu.to_string(),
            "max_iter" => self.max_iter.to_string(),
            "rel_tol" => self.rel_tol.to_string(),
            "ridge_eps" => self.ridge_eps.to_string(),
            "activation" => self.activation.name().into(),
            "atanh_clamp_eps" => self.atanh_clamp_eps.to_string(),
            "bregman_update" => match self.bregman_update {
                BregmanUpdate::PaperLiteral => "paper-literal",
                BregmanUpdate::Additive => "additive",
            }
            .into(),
            "p4" => match self.p4 {
                CodeUpdate::Coupled => "coupled",
                CodeUpdate::PaperLiteral => "paper-literal",
            }
            .into(),
            "encoder_guard" => self.encoder_guard.to_string(),
            "train_seed" => self.train_seed.to_string(),
            "l2_learning_rate" => self.l2_learning_rate.to_string(),
            "l2_budget" => match self.l2_budget {
                L2Budget::Epochs => "epochs",
                L2Budget::Flops => "flops",
                L2Budget::Time => "time",
            }
            .into(),
            "l2_epochs" => self.l2_epochs.to_string(),
            "cs_transform" => match self.cs_transform {
                CsTransform::Haar => "haar",
                CsTransform::Dct => "dct",
            }
            .into(),
            "haar_levels" => self.haar_levels.to_string(),
            "cs_lambda" => self.cs_lambda.to_string(),
            "cs_max_iter" => self.cs_max_iter.to_string(),
            "timing_repeats" => self.timing_repeats.to_string(),
            _ => return None,
        };
        Some(s)
    }

    /// Every key in [`KEYS`] order, one `key=value` per line.
    pub fn canonical(&self) -> String {
        KEYS.iter()
            .map(|k| {
                format!(
                    "{k}={}\n",
                    self.get(k).expect("every listed key is readable")
                )
            })
            .collect()
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            hidden: self.hidden,
            lambda: self.lambda,
            mu: self.mu,
            max_iter: self.max_iter,
            rel_tol: self.rel_tol,
            ridge_eps: self.ridge_eps,
            activation: self.activation,
            atanh_clamp_eps: self.atanh_clamp_eps,
            bregman_update: self.bregman_update,
            p4: self.p4,
            seed: self.train_seed,
            encoder_guard: self.encoder_guard,
        }
    }

    pub fn l2_config(&self, epochs: usize) -> L2Config {
        L2Config {
            hidden: self.hidden,
            activation: self.activation,
            seed: self.train_seed,
            learning_rate: self.l2_learning_rate,
            epochs,
        }
    }

    pub fn mask_kind(&self) -> MaskKind {
        match self.mask {
            MaskChoice::Random => MaskKind::Random {
                fraction: self.mask_fraction,
            },
            MaskChoice::VariableDensity => MaskKind::VariableDensity {
                fraction: self.mask_fraction,
                decay: self.mask_decay,
            },
            MaskChoice::Radial => MaskKind::Radial {
                lines: self.radial_lines,
            },
            MaskChoice::Periodic => MaskKind::Periodic {
                stride: self.periodic_stride,
            },
        }
    }

    pub fn degradation(&self) -> Result<DegradationSpec> {
        let modality = match self.modality {
            ModalityKind::Mri => Modality::Mri {
                mask: self.mask_kind(),
            },
            ModalityKind::Ct => Modality::Ct {
                spacing_deg: self.ct_spacing_deg,
            },
            ModalityKind::Impulse => Modality::Impulse {
                fraction: self.impulse_fraction,
            },
        };
        DegradationSpec::new(modality, self.degrade_seed).map_err(|e| Error::usage(e.to_string()))
    }

    pub fn sparsifier(&self) -> SparsifyingTransform {
        match self.cs_transform {
            CsTransform::Haar => SparsifyingTransform::Haar {
                levels: self.haar_levels,
            },
            CsTransform::Dct => SparsifyingTransform::Dct,
        }
    }

    /// Rejects values the numerical core would refuse later.
    pub fn validate(&self) -> Result<()> {
        self.degradation()?;
        self.train_config()
            .validate()
            .map_err(|e| Error::usage(e.to_string()))?;
        let checks = [
            (self.patch_size >= 4, "patch_size must be at least 4"),
            (
                self.l2_learning_rate >= 0.0 && self.l2_learning_rate.is_finite(),
                "l2_learning_rate must be finite and nonnegative",
            ),
            (
                self.cs_lambda >= 0.0 && self.cs_lambda.is_finite(),
                "cs_lambda must be finite and nonnegative",
            ),
            (
                self.timing_repeats >= 1,
                "timing_repeats must be at least 1",
            ),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, msg)) => Err(Error::usage(*msg)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical())
    }
}
