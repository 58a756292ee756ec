//! Corpus manifests.
//!
//! One entry per line: `<split> <image> [<degraded>]` where split is
//! `train` or `test`. `#` starts a comment. Image sources are file paths
//! (relative to the manifest) or generated phantoms:
//! `gen:shepp-logan:<size>`, `gen:disks:<size>`,
//! `gen:random:<size>:<seed>:<index>`.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use dealias_core::phantom::{generate_phantom, random_phantom, PhantomKind};
use dealias_core::{ImageGrid, SeededRng};

use crate::error::{Error, Result, ResultExt};
use crate::fsutil::read_text;
use crate::image_io::load_image;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Source {
    File(PathBuf),
    Phantom { kind: PhantomKind, size: usize },
    Random { size: usize, seed: u64, index: u64 },
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::File(p) => write!(f, "{}", p.display()),
            Source::Phantom { kind, size } => {
                let name = match kind {
                    PhantomKind::SheppLogan => "shepp-logan",
                    PhantomKind::Disks => "disks",
                };
                write!(f, "gen:{name}:{size}")
            }
            Source::Random { size, seed, index } => write!(f, "gen:random:{size}:{seed}:{index}"),
        }
    }
}

impl Source {
    fn parse(token: &str, base: &Path) -> std::result::Result<Self, String> {
        let Some(spec) = token.strip_prefix("gen:") else {
            return Ok(Source::File(base.join(token)));
        };
        let parts: Vec<&str> = spec.split(':').collect();
        let int = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| format!("bad number {s:?} in {token:?}"))
        };
        match parts[..] {
            ["random", size, seed, index] => Ok(Source::Random {
                size: int(size)? as usize,
                seed: int(seed)?,
                index: int(index)?,
            }),
            [kind, size] => Ok(Source::Phantom {
                kind: kind
                    .parse()
                    .map_err(|e: dealias_core::Error| e.to_string())?,
                size: int(size)? as usize,
            }),
            _ => Err(format!("unrecognised generator {token:?}")),
        }
    }

    pub fn load(&self) -> Result<ImageGrid> {
        match self {
            Source::File(p) => load_image(p),
            Source::Phantom { kind, size } => Ok(generate_phantom(*kind, *size)?),
            Source::Random { size, seed, index } => {
                Ok(random_phantom(*size, &mut SeededRng::split(*seed, *index))?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub split: Split,
    pub image: Source,
    pub degraded: Option<PathBuf>,
    /// Position in the manifest; seeds per-image degradation randomness.
    pub index: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusManifest {
    pub entries: Vec<CorpusEntry>,
}

impl CorpusManifest {
    pub fn parse(text: &str, base: &Path, origin: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |m: String| Error::format(origin, format!("line {}: {m}", n + 1));
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let (split, image, degraded) = match tokens[..] {
                [s, i] => (s, i, None),
                [s, i, d] => (s, i, Some(base.join(d))),
                _ => {
                    return Err(bad(format!(
                        "expected `<split> <image> [<degraded>]`, got {line:?}"
                    )))
                }
            };
            let split = match split {
                "train" => Split::Train,
                "test" => Split::Test,
                other => return Err(bad(format!("split must be train or test, got {other:?}"))),
            };
            entries.push(CorpusEntry {
                split,
                image: Source::parse(image, base).map_err(bad)?,
                degraded,
                index: entries.len() as u64,
            });
        }
        let manifest = Self { entries };
        manifest.validate(origin)?;
        Ok(manifest)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&read_text(path)?, base, path)
    }

    fn validate(&self, origin: &Path) -> Result<()> {
        let train: HashSet<&Source> = self.split(Split::Train).map(|e| &e.image).collect();
        let test: Vec<&CorpusEntry> = self.split(Split::Test).collect();
        if train.is_empty() || test.is_empty() {
            return Err(Error::format(
                origin,
                "manifest needs at least one train and one test entry",
            ));
        }
        if let Some(e) = test.iter().find(|e| train.contains(&e.image)) {
            return Err(Error::format(
                origin,
                format!("{} appears in both train and test splits", e.image),
            ));
        }
        Ok(())
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &CorpusEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }
}

impl CorpusEntry {
    pub fn load_clean(&self) -> Result<ImageGrid> {
        self.image
            .load()
            .context(|| format!("loading {}", self.image))
    }

    pub fn load_degraded(&self) -> Result<Option<ImageGrid>> {
        match &self.degraded {
            Some(p) => load_image(p)
                .context(|| format!("loading degraded cache for {}", self.image))
                .map(Some),
            None => Ok(None),
        }
    }
}
