//! Benchmark harness: train on the train split, evaluate four methods on the test split.
//!
//! Output files, all prefixed by the canonical config as `# key=value` lines:
//!
//! * `<method>.csv`: `image,nmse,psnr,ssim`, one row per test image, then `mean` and `std` rows.
//! * `summary.csv`: `method,nmse_mean,nmse_std,psnr_mean,psnr_std,ssim_mean,ssim_std`.
//! * `timing.csv`: `method,train_seconds,seconds_per_image,ratio_to_rodeo`.
//!
//! Everything except `timing.csv` is a deterministic function of the config.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use dealias_core::autoencoder::{
    train_l2_baseline_with, train_robust, AutoencoderModel, CodeUpdate,
};
use dealias_core::cs::{cs_reconstruct_ct, cs_reconstruct_image};
use dealias_core::metrics::{MetricReport, MetricRow};
use dealias_core::pipeline::{
    build_training_set_from_pairs, degrade, degrade_with_mask, DegradationSpec, Modality,
};
use dealias_core::transforms::{
    angles_with_spacing, fbp_reconstruct, fft2, radon_forward, zero_fill_invert, Direction,
    SamplingMask,
};
use dealias_core::ImageGrid;

use crate::config::{L2Budget, RunConfig};
use crate::corpus::{CorpusEntry, CorpusManifest, Split};
use crate::error::{Error, Result, ResultExt};
use crate::fsutil::{create_dir, write_atomic};
use crate::model_io::save_model;
use crate::timing::{median, time_median, timed_reconstruct};

pub const RODEO: &str = "rodeo";
pub const L2_BASELINE: &str = "l2-baseline";
pub const ISTA_CS: &str = "ista-cs";

#[derive(Debug, Clone, PartialEq)]
pub struct MethodTiming {
    pub method: String,
    pub train_seconds: f64,
    pub seconds_per_image: f64,
}

#[derive(Debug, Clone)]
pub struct BenchResult {
    pub config: RunConfig,
    /// Order: rodeo, l2-baseline, ista-cs, raw inversion.
    pub reports: Vec<MetricReport>,
    pub timings: Vec<MethodTiming>,
    pub rodeo_iterations: usize,
    pub l2_epochs: usize,
    pub rodeo: AutoencoderModel,
    pub l2: AutoencoderModel,
}

impl BenchResult {
    pub fn report(&self, method: &str) -> Option<&MetricReport> {
        self.reports.iter().find(|r| r.method == method)
    }

    pub fn timing(&self, method: &str) -> Option<&MethodTiming> {
        self.timings.iter().find(|t| t.method == method)
    }

    /// Per-image ISTA time over per-image rodeo time.
    pub fn ista_over_rodeo(&self) -> f64 {
        let t = |m| self.timing(m).map_or(f64::NAN, |t| t.seconds_per_image);
        t(ISTA_CS) / t(RODEO)
    }
}

/// Name of the crude-inversion method for a modality.
pub fn raw_method(modality: &Modality) -> &'static str {
    match modality {
        Modality::Mri { .. } => "zero-fill",
        Modality::Ct { .. } => "fbp",
        Modality::Impulse { .. } => "corrupted",
    }
}

/// Dominant matrix-product arithmetic of `iterations` Split Bregman cycles,
/// including the one-off input Gram factorization.
pub fn rodeo_flops(d: usize, hidden: usize, n: usize, iterations: usize, p4: CodeUpdate) -> f64 {
    let (d1, h, n, d) = ((d + 1) as f64, hidden as f64, n as f64, d as f64);
    let setup = 2.0 * d1 * d1 * n + d1 * d1 * d1 / 3.0;
    // P2 right-hand side and re-encode, P3 Gram and cross product, two decodes
    let mut cycle = 4.0 * h * d1 * n + 2.0 * h * h * n + 6.0 * d * h * n + 2.0 * h * d1 * d1;
    if p4 == CodeUpdate::Coupled {
        cycle += 2.0 * h * h * d + 2.0 * d * h * n + h * h * h / 3.0 + 2.0 * h * h * n;
    }
    setup + iterations as f64 * cycle
}

/// Arithmetic of one full-batch forward and backward pass of the l2 baseline.
pub fn l2_epoch_flops(d: usize, hidden: usize, n: usize) -> f64 {
    let (d1, h, n, d) = ((d + 1) as f64, hidden as f64, n as f64, d as f64);
    4.0 * h * d1 * n + 6.0 * d * h * n
}

struct Sample {
    name: String,
    clean: ImageGrid,
    degraded: ImageGrid,
}

struct Acquisition<'a> {
    spec: DegradationSpec,
    masks: HashMap<(usize, usize), SamplingMask>,
    config: &'a RunConfig,
}

impl Acquisition<'_> {
    fn mask(&mut self, dims: (usize, usize)) -> Result<&SamplingMask> {
        if !self.masks.contains_key(&dims) {
            let mask = self.spec.mri_mask(dims.0, dims.1)?;
            self.masks.insert(dims, mask);
        }
        Ok(&self.masks[&dims])
    }

    fn degrade(&mut self, entry: &CorpusEntry, clean: &ImageGrid) -> Result<ImageGrid> {
        if let Some(cached) = entry.load_degraded()? {
            if cached.dims() != clean.dims() {
                return Err(Error::usage(format!(
                    "degraded cache for {} has dims {:?}, image has {:?}",
                    entry.image,
                    cached.dims(),
                    clean.dims()
                )));
            }
            return Ok(cached);
        }
        match self.spec.modality {
            Modality::Mri { .. } => {
                degrade_with_mask(clean, self.mask(clean.dims())?).map_err(Into::into)
            }
            _ => degrade(clean, &self.spec, entry.index).map_err(Into::into),
        }
    }

    /// Crude inversion from the clean image's measurements, timed.
    fn raw(&mut self, sample: &Sample, repeats: usize) -> Result<(ImageGrid, f64)> {
        match self.spec.modality {
            Modality::Mri { .. } => {
                let k = fft2(&sample.clean.to_complex(), Direction::Forward)?;
                let mask = self.mask(sample.clean.dims())?.clone();
                time_median(repeats, || Ok(zero_fill_invert(&k, &mask)?))
            }
            Modality::Ct { spacing_deg } => {
                let projections = radon_forward(&sample.clean, &angles_with_spacing(spacing_deg)?)?;
                let size = sample.clean.height();
                time_median(repeats, || Ok(fbp_reconstruct(&projections, size)?))
            }
            Modality::Impulse { .. } => Ok((sample.degraded.clone(), 0.0)),
        }
    }

    /// ISTA with the sparsifier; impulse data is treated as a fully sampled acquisition.
    fn ista(&mut self, sample: &Sample, repeats: usize) -> Result<(ImageGrid, f64)> {
        let (transform, lambda, iters) = (
            self.config.sparsifier(),
            self.config.cs_lambda,
            self.config.cs_max_iter,
        );
        match self.spec.modality {
            Modality::Mri { .. } => {
                let k = fft2(&sample.clean.to_complex(), Direction::Forward)?;
                let mask = self.mask(sample.clean.dims())?.clone();
                time_median(repeats, || {
                    Ok(cs_reconstruct_image(&k, &mask, transform, lambda, iters)?)
                })
            }
            Modality::Ct { spacing_deg } => {
                let projections = radon_forward(&sample.clean, &angles_with_spacing(spacing_deg)?)?;
                let size = sample.clean.height();
                time_median(repeats, || {
                    Ok(cs_reconstruct_ct(
                        &projections,
                        size,
                        transform,
                        lambda,
                        iters,
                    )?)
                })
            }
            Modality::Impulse { .. } => {
                let (h, w) = sample.degraded.dims();
                let k = fft2(&sample.degraded.to_complex(), Direction::Forward)?;
                let full = SamplingMask::full(h, w);
                time_median(repeats, || {
                    Ok(cs_reconstruct_image(&k, &full, transform, lambda, iters)?)
                })
            }
        }
    }
}

fn load_split(
    manifest: &CorpusManifest,
    split: Split,
    acq: &mut Acquisition,
) -> Result<Vec<Sample>> {
    manifest
        .split(split)
        .map(|entry| {
            let clean = entry.load_clean()?;
            let degraded = acq
                .degrade(entry, &clean)
                .context(|| format!("degrading {}", entry.image))?;
            Ok(Sample {
                name: entry.image.to_string(),
                clean,
                degraded,
            })
        })
        .collect()
}

pub fn run_benchmark(config: &RunConfig) -> Result<BenchResult> {
    config.validate()?;
    let corpus = config
        .corpus
        .as_ref()
        .ok_or_else(|| Error::usage("config key `corpus` is required for the benchmark"))?;
    let manifest = CorpusManifest::load(corpus)?;
    let mut acq = Acquisition {
        spec: config.degradation()?,
        masks: HashMap::new(),
        config,
    };
    let train = load_split(&manifest, Split::Train, &mut acq)?;
    let test = load_split(&manifest, Split::Test, &mut acq)?;

    let pairs: Vec<(&ImageGrid, &ImageGrid)> =
        train.iter().map(|s| (&s.clean, &s.degraded)).collect();
    let set = build_training_set_from_pairs(&pairs, config.patch_size, config.overlap)
        .context(|| "building training set".into())?;

    let start = Instant::now();
    let (rodeo, state) = train_robust(&set, &config.train_config()).context(|| RODEO.into())?;
    let rodeo_train = start.elapsed().as_secs_f64();
    let rodeo_iterations = state.objective_history().len();

    let d = set.input_dim();
    let budget_epochs = match config.l2_budget {
        L2Budget::Epochs | L2Budget::Time => config.l2_epochs,
        L2Budget::Flops => {
            let ratio = rodeo_flops(d, config.hidden, set.len(), rodeo_iterations, config.p4)
                / l2_epoch_flops(d, config.hidden, set.len());
            (ratio.ceil() as usize).max(1)
        }
    };
    let time_budget = config.l2_budget == L2Budget::Time;
    let l2_config = config.l2_config(if time_budget {
        usize::MAX
    } else {
        budget_epochs
    });
    let start = Instant::now();
    let mut l2_epochs = 0;
    let l2 = train_l2_baseline_with(&set, &l2_config, |epoch, _| {
        l2_epochs = epoch + 1;
        !time_budget || start.elapsed().as_secs_f64() < rodeo_train
    })
    .context(|| L2_BASELINE.into())?;
    let l2_train = start.elapsed().as_secs_f64();

    let raw_name = raw_method(&acq.spec.modality);
    let mut reports: Vec<MetricReport> = [RODEO, L2_BASELINE, ISTA_CS, raw_name]
        .iter()
        .map(|m| MetricReport::new(*m))
        .collect();
    let mut seconds: Vec<Vec<f64>> = vec![Vec::new(); 4];
    let repeats = config.timing_repeats;
    for sample in &test {
        let (r, rt) = timed_reconstruct(&rodeo, &sample.degraded, config.overlap, repeats)
            .context(|| format!("{RODEO} on {}", sample.name))?;
        let (l, lt) = timed_reconstruct(&l2, &sample.degraded, config.overlap, repeats)
            .context(|| format!("{L2_BASELINE} on {}", sample.name))?;
        let (c, ct) = acq
            .ista(sample, repeats)
            .context(|| format!("{ISTA_CS} on {}", sample.name))?;
        let (z, zt) = acq
            .raw(sample, repeats)
            .context(|| format!("{raw_name} on {}", sample.name))?;
        let outputs = [
            (r, rt.seconds_per_image),
            (l, lt.seconds_per_image),
            (c, ct),
            (z, zt),
        ];
        for (i, (image, secs)) in outputs.into_iter().enumerate() {
            let row = MetricRow::evaluate(sample.name.clone(), &image, &sample.clean, secs)
                .context(|| format!("{} metrics on {}", reports[i].method, sample.name))?;
            reports[i].push(row);
            seconds[i].push(secs);
        }
    }
    let timings = reports
        .iter()
        .zip(seconds.iter_mut())
        .zip([rodeo_train, l2_train, 0.0, 0.0])
        .map(|((r, s), train_seconds)| MethodTiming {
            method: r.method.clone(),
            train_seconds,
            seconds_per_image: median(s),
        })
        .collect();
    Ok(BenchResult {
        config: config.clone(),
        reports,
        timings,
        rodeo_iterations,
        l2_epochs,
        rodeo,
        l2,
    })
}

fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.9}")
    }
}

fn header(config: &RunConfig) -> String {
    config
        .canonical()
        .lines()
        .map(|l| format!("# {l}\n"))
        .collect()
}

pub fn method_csv(config: &RunConfig, report: &MetricReport) -> String {
    let mut out = header(config);
    out.push_str("image,nmse,psnr,ssim\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.name,
            num(r.nmse),
            num(r.psnr),
            num(r.ssim)
        ));
    }
    let a = report.aggregates();
    out.push_str(&format!(
        "mean,{},{},{}\n",
        num(a.nmse.mean),
        num(a.psnr.mean),
        num(a.ssim.mean)
    ));
    out.push_str(&format!(
        "std,{},{},{}\n",
        num(a.nmse.std),
        num(a.psnr.std),
        num(a.ssim.std)
    ));
    out
}

pub fn summary_csv(result: &BenchResult) -> String {
    let mut out = header(&result.config);
    out.push_str("method,nmse_mean,nmse_std,psnr_mean,psnr_std,ssim_mean,ssim_std\n");
    for report in &result.reports {
        let a = report.aggregates();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            report.method,
            num(a.nmse.mean),
            num(a.nmse.std),
            num(a.psnr.mean),
            num(a.psnr.std),
            num(a.ssim.mean),
            num(a.ssim.std)
        ));
    }
    out
}

pub fn timing_csv(result: &BenchResult) -> String {
    let mut out = header(&result.config);
    out.push_str("method,train_seconds,seconds_per_image,ratio_to_rodeo\n");
    let base = result
        .timing(RODEO)
        .map_or(f64::NAN, |t| t.seconds_per_image);
    for t in &result.timings {
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.method,
            num(t.train_seconds),
            num(t.seconds_per_image),
            num(t.seconds_per_image / base)
        ));
    }
    out
}

/// Writes every CSV plus both model bundles; returns the CSV paths.
pub fn write_bench(result: &BenchResult, out_dir: &Path) -> Result<Vec<PathBuf>> {
    create_dir(out_dir)?;
    let mut files = Vec::new();
    let mut emit = |name: String, text: String| -> Result<()> {
        let path = out_dir.join(name);
        write_atomic(&path, text.as_bytes())?;
        files.push(path);
        Ok(())
    };
    for report in &result.reports {
        emit(
            format!("{}.csv", report.method),
            method_csv(&result.config, report),
        )?;
    }
    emit("summary.csv".into(), summary_csv(result))?;
    emit("timing.csv".into(), timing_csv(result))?;
    save_model(&result.rodeo, &out_dir.join("rodeo-model"))?;
    save_model(&result.l2, &out_dir.join("l2-model"))?;
    Ok(files)
}
