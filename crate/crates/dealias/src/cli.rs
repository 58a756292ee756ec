//! `dealias` command line. Exit codes: 0 success, 1 usage, 2 data or format, 3 numeric failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dealias_core::autoencoder::{train_l2_baseline, train_robust};
use dealias_core::cs::{cs_reconstruct_ct, cs_reconstruct_image};
use dealias_core::metrics::{nmse, psnr, ssim};
use dealias_core::phantom::{generate_phantom, random_phantom, PhantomKind};
use dealias_core::pipeline::{build_training_set_from_pairs, degrade, degrade_with_mask, Modality};
use dealias_core::transforms::{
    angles_with_spacing, fft2, radon_forward, Direction, SparsifyingTransform,
};
use dealias_core::{ImageGrid, SeededRng};

use crate::bench::{run_benchmark, write_bench};
use crate::config::RunConfig;
use crate::corpus::{CorpusManifest, Split};
use crate::error::{Error, Result, ResultExt};
use crate::fsutil::read_text;
use crate::image_io::{
    load_image, load_kspace, load_mask, load_sinogram, save_image, save_kspace, save_mask,
    save_sinogram,
};
use crate::model_io::{load_model, save_model};
use crate::pgm::{write_pgm_range, BitDepth};
use crate::timing::timed_reconstruct;

#[derive(Debug, Parser)]
#[command(
    name = "dealias",
    version,
    about = "Learned de-aliasing of undersampled MRI and sparse-view CT"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render a phantom image.
    Phantom {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, default_value_t = 128)]
        size: usize,
        /// Seed for `random` phantoms.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate an acquisition and write its crude inversion.
    Degrade {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Per-image index decorrelating impulse positions.
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long)]
        mask_out: Option<PathBuf>,
        #[arg(long)]
        kspace_out: Option<PathBuf>,
        #[arg(long)]
        sinogram_out: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Train a model on the train split of the configured corpus.
    Train {
        #[arg(long, value_enum, default_value_t = MethodArg::Rodeo)]
        method: MethodArg,
        /// Model bundle directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Run a trained model over a degraded image.
    Reconstruct {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Half-stride patches averaged at seams.
        #[arg(long)]
        overlap: bool,
    },
    /// ISTA reconstruction from k-space plus mask, or from a sinogram.
    CsRecon {
        #[arg(long, requires = "mask", conflicts_with = "sinogram")]
        kspace: Option<PathBuf>,
        #[arg(long)]
        mask: Option<PathBuf>,
        #[arg(long, requires = "size")]
        sinogram: Option<PathBuf>,
        /// Image edge length for sinogram input.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, value_enum, default_value_t = TransformArg::Haar)]
        transform: TransformArg,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, default_value_t = 1e-3)]
        lambda: f64,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print NMSE, PSNR and SSIM of `--a` against reference `--b`.
    Metrics {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        peak: f64,
    },
    /// Export |a − b| × gain, clamped to [0, 1], as an 8-bit PGM.
    Diff {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        gain: f64,
    },
    /// Train, evaluate every method on the test split and write CSV reports.
    Bench {
        #[arg(long)]
        out_dir: PathBuf,
        /// Take the config from the header of an earlier report CSV.
        #[arg(long, conflicts_with = "config")]
        from_report: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
}

#[derive(Debug, Args)]
struct ConfigArgs {
    /// key=value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key; repeatable, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    SheppLogan,
    Disks,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Rodeo,
    L2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TransformArg {
    Haar,
    Dct,
}

impl ConfigArgs {
    fn resolve(&self, base: Option<RunConfig>) -> Result<RunConfig> {
        let mut config = base.unwrap_or_default();
        if let Some(path) = &self.config {
            config
                .apply_text(&read_text(path)?)
                .context(|| path.display().to_string())?;
        }
        for pair in &self.overrides {
            config.apply_override(pair)?;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn out_err(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Phantom {
            kind,
            size,
            seed,
            out,
        } => {
            let image = match kind {
                KindArg::SheppLogan => generate_phantom(PhantomKind::SheppLogan, size)?,
                KindArg::Disks => generate_phantom(PhantomKind::Disks, size)?,
                KindArg::Random => random_phantom(size, &mut SeededRng::new(seed))?,
            };
            save_image(&out, &image)
        }
        Command::Degrade {
            input,
            out,
            index,
            mask_out,
            kspace_out,
            sinogram_out,
            config,
        } => {
            let config = config.resolve(None)?;
            let spec = config.degradation()?;
            let image = load_image(&input)?;
            let degraded = match spec.modality {
                Modality::Mri { .. } => {
                    let mask = spec.mri_mask(image.height(), image.width())?;
                    if let Some(p) = &mask_out {
                        save_mask(p, &mask)?;
                    }
                    if let Some(p) = &kspace_out {
                        save_kspace(
                            p,
                            &mask.apply(&fft2(&image.to_complex(), Direction::Forward)?)?,
                        )?;
                    }
                    degrade_with_mask(&image, &mask)?
                }
                Modality::Ct { spacing_deg } => {
                    if let Some(p) = &sinogram_out {
                        save_sinogram(
                            p,
                            &radon_forward(&image, &angles_with_spacing(spacing_deg)?)?,
                        )?;
                    }
                    degrade(&image, &spec, index)?
                }
                Modality::Impulse { .. } => degrade(&image, &spec, index)?,
            };
            let unused = match spec.modality {
                Modality::Mri { .. } => sinogram_out.is_some(),
                Modality::Ct { .. } => mask_out.is_some() || kspace_out.is_some(),
                Modality::Impulse { .. } => {
                    mask_out.is_some() || kspace_out.is_some() || sinogram_out.is_some()
                }
            };
            if unused {
                return Err(Error::usage(format!(
                    "requested an acquisition output that {} degradation does not produce",
                    spec.modality.name()
                )));
            }
            save_image(&out, &degraded)
        }
        Command::Train {
            method,
            out,
            config,
        } => {
            let config = config.resolve(None)?;
            let corpus = config
                .corpus
                .clone()
                .ok_or_else(|| Error::usage("config key `corpus` is required for training"))?;
            let manifest = CorpusManifest::load(&corpus)?;
            let spec = config.degradation()?;
            let mut pairs = Vec::new();
            for entry in manifest.split(Split::Train) {
                let clean = entry.load_clean()?;
                let degraded = match entry.load_degraded()? {
                    Some(d) => d,
                    None => degrade(&clean, &spec, entry.index)
                        .context(|| format!("degrading {}", entry.image))?,
                };
                pairs.push((clean, degraded));
            }
            let refs: Vec<(&ImageGrid, &ImageGrid)> = pairs.iter().map(|(c, d)| (c, d)).collect();
            let set = build_training_set_from_pairs(&refs, config.patch_size, config.overlap)?;
            let model = match method {
                MethodArg::Rodeo => {
                    let (model, state) = train_robust(&set, &config.train_config())?;
                    writeln!(stdout, "iterations={}", state.objective_history().len())
                        .map_err(out_err)?;
                    model
                }
                MethodArg::L2 => train_l2_baseline(&set, &config.l2_config(config.l2_epochs))?,
            };
            save_model(&model, &out)
        }
        Command::Reconstruct {
            model,
            input,
            out,
            overlap,
        } => {
            let model = load_model(&model)?;
            let degraded = load_image(&input)?;
            let (image, timing) = timed_reconstruct(&model, &degraded, overlap, 1)?;
            save_image(&out, &image)?;
            writeln!(
                stdout,
                "patches={} seconds_per_image={:.6} seconds_per_patch={:.6}",
                timing.patches, timing.seconds_per_image, timing.seconds_per_patch
            )
            .map_err(out_err)
        }
        Command::CsRecon {
            kspace,
            mask,
            sinogram,
            size,
            transform,
            levels,
            lambda,
            iters,
            out,
        } => {
            let transform = match transform {
                TransformArg::Haar => SparsifyingTransform::Haar { levels },
                TransformArg::Dct => SparsifyingTransform::Dct,
            };
            let image = match (kspace, mask, sinogram, size) {
                (Some(k), Some(m), None, _) => cs_reconstruct_image(
                    &load_kspace(&k)?,
                    &load_mask(&m)?,
                    transform,
                    lambda,
                    iters,
                )?,
                (None, _, Some(s), Some(n)) => {
                    cs_reconstruct_ct(&load_sinogram(&s)?, n, transform, lambda, iters)?
                }
                _ => {
                    return Err(Error::usage(
                        "give either --kspace with --mask, or --sinogram with --size",
                    ))
                }
            };
            save_image(&out, &image)
        }
        Command::Metrics { a, b, peak } => {
            let (est, reference) = load_pair(&a, &b)?;
            writeln!(
                stdout,
                "nmse={:.9} psnr={:.6} ssim={:.9}",
                nmse(&est, &reference)?,
                psnr(&est, &reference, peak)?,
                ssim(&est, &reference)?
            )
            .map_err(out_err)
        }
        Command::Diff { a, b, out, gain } => {
            let (est, reference) = load_pair(&a, &b)?;
            let diff = ImageGrid::new(
                est.height(),
                est.width(),
                est.data()
                    .iter()
                    .zip(reference.data())
                    .map(|(x, y)| ((x - y).abs() * gain).clamp(0.0, 1.0))
                    .collect(),
            )?;
            write_pgm_range(&out, &diff, BitDepth::Eight, 0.0, 1.0)
        }
        Command::Bench {
            out_dir,
            from_report,
            config,
        } => {
            let base = match &from_report {
                Some(p) => Some(
                    RunConfig::from_report_header(&read_text(p)?)
                        .context(|| p.display().to_string())?,
                ),
                None => None,
            };
            let config = config.resolve(base)?;
            let result = run_benchmark(&config)?;
            write_bench(&result, &out_dir)?;
            for report in &result.reports {
                let a = report.aggregates();
                writeln!(
                    stdout,
                    "{:<12} nmse {:.4} ± {:.4}  psnr {:.2} dB  ssim {:.4}",
                    report.method, a.nmse.mean, a.nmse.std, a.psnr.mean, a.ssim.mean
                )
                .map_err(out_err)?;
            }
            writeln!(
                stdout,
                "ista/rodeo per-image time ratio {:.1}",
                result.ista_over_rodeo()
            )
            .map_err(out_err)
        }
    }
}

fn load_pair(a: &Path, b: &Path) -> Result<(ImageGrid, ImageGrid)> {
    let (x, y) = (load_image(a)?, load_image(b)?);
    if x.dims() != y.dims() {
        return Err(Error::format(
            a,
            format!(
                "dims {:?} differ from {} dims {:?}",
                x.dims(),
                b.display(),
                y.dims()
            ),
        ));
    }
    Ok((x, y))
}
