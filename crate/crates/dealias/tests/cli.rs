use std::path::Path;
use std::process::{Command, Output};

use dealias::image_io::{load_image, save_image};
use dealias::tensor::read_tensor;
use dealias_core::ImageGrid;

fn dealias(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dealias"))
        .args(args)
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn phantom_writes_a_readable_tensor() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.rdt");
    let o = dealias(&[
        "phantom",
        "--kind",
        "shepp-logan",
        "--size",
        "128",
        "--out",
        p(&out),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(read_tensor(&out).unwrap().dims(), &[128, 128]);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = dealias(&["phantom", "--bogus"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(dealias(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(dealias(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_config_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("x.rdt");
    save_image(&img, &ImageGrid::filled(32, 32, 0.5)).unwrap();
    let out = dir.path().join("y.rdt");
    let o = dealias(&[
        "degrade",
        "--input",
        p(&img),
        "--out",
        p(&out),
        "--set",
        "colour=blue",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn metrics_on_mismatched_dims_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y) = (dir.path().join("x.rdt"), dir.path().join("y.rdt"));
    save_image(&x, &ImageGrid::filled(16, 16, 0.5)).unwrap();
    save_image(&y, &ImageGrid::filled(16, 17, 0.5)).unwrap();
    let o = dealias(&["metrics", "--a", p(&x), "--b", p(&y)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("y.rdt"));
    let missing = dealias(&[
        "metrics",
        "--a",
        p(&x),
        "--b",
        p(&dir.path().join("nope.rdt")),
    ]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn metrics_prints_all_three() {
    let dir = tempfile::tempdir().unwrap();
    let x = dir.path().join("x.rdt");
    dealias(&["phantom", "--kind", "disks", "--size", "32", "--out", p(&x)]);
    let o = dealias(&["metrics", "--a", p(&x), "--b", p(&x)]);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(
        text.contains("nmse=0.000000000") && text.contains("psnr=inf") && text.contains("ssim=1.0"),
        "{text}"
    );
}

#[test]
fn diff_magnifies_and_clamps() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, out) = (
        dir.path().join("a.rdt"),
        dir.path().join("b.rdt"),
        dir.path().join("d.pgm"),
    );
    save_image(&a, &ImageGrid::new(1, 3, vec![0.5, 0.55, 1.0]).unwrap()).unwrap();
    save_image(&b, &ImageGrid::new(1, 3, vec![0.5, 0.5, 0.0]).unwrap()).unwrap();
    assert_eq!(
        dealias(&["diff", "--a", p(&a), "--b", p(&b), "--out", p(&out)])
            .status
            .code(),
        Some(0)
    );
    assert!(std::fs::read(&out).unwrap().ends_with(&[0, 128, 255]));
}

#[test]
fn mri_degrade_then_cs_recon() {
    let dir = tempfile::tempdir().unwrap();
    let f = |n: &str| dir.path().join(n);
    dealias(&[
        "phantom",
        "--kind",
        "shepp-logan",
        "--size",
        "64",
        "--out",
        p(&f("x.rdt")),
    ]);
    let o = dealias(&[
        "degrade",
        "--input",
        p(&f("x.rdt")),
        "--out",
        p(&f("zf.rdt")),
        "--mask-out",
        p(&f("m.rdt")),
        "--kspace-out",
        p(&f("k.rdt")),
        "--set",
        "modality=mri",
        "--set",
        "mask_fraction=0.5",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = dealias(&[
        "cs-recon",
        "--kspace",
        p(&f("k.rdt")),
        "--mask",
        p(&f("m.rdt")),
        "--iters",
        "100",
        "--out",
        p(&f("cs.rdt")),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let clean = load_image(&f("x.rdt")).unwrap();
    let zf = dealias_core::metrics::nmse(&load_image(&f("zf.rdt")).unwrap(), &clean).unwrap();
    let cs = dealias_core::metrics::nmse(&load_image(&f("cs.rdt")).unwrap(), &clean).unwrap();
    assert!(cs < zf, "cs {cs} zero-fill {zf}");
}

#[test]
fn ct_degrade_then_cs_recon() {
    let dir = tempfile::tempdir().unwrap();
    let f = |n: &str| dir.path().join(n);
    dealias(&[
        "phantom",
        "--kind",
        "shepp-logan",
        "--size",
        "32",
        "--out",
        p(&f("x.rdt")),
    ]);
    let o = dealias(&[
        "degrade",
        "--input",
        p(&f("x.rdt")),
        "--out",
        p(&f("fbp.rdt")),
        "--sinogram-out",
        p(&f("s.rdt")),
        "--set",
        "modality=ct",
        "--set",
        "ct_spacing_deg=10",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(f("s.rdt.angles").exists());
    let o = dealias(&[
        "cs-recon",
        "--sinogram",
        p(&f("s.rdt")),
        "--size",
        "32",
        "--iters",
        "20",
        "--out",
        p(&f("cs.rdt")),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = dealias(&[
        "degrade",
        "--input",
        p(&f("x.rdt")),
        "--out",
        p(&f("y.rdt")),
        "--mask-out",
        p(&f("m.rdt")),
        "--set",
        "modality=ct",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

fn write_corpus(dir: &Path, train: usize, test: usize, size: usize) -> std::path::PathBuf {
    let mut text = String::from("# generated\n");
    for i in 0..train + test {
        let split = if i < train { "train" } else { "test" };
        text.push_str(&format!("{split} gen:random:{size}:0:{i}\n"));
    }
    let path = dir.join("corpus.txt");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn train_and_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 3, 1, 32);
    let model = dir.path().join("model");
    let corpus_set = format!("corpus={}", p(&corpus));
    let o = dealias(&[
        "train",
        "--out",
        p(&model),
        "--set",
        &corpus_set,
        "--set",
        "patch_size=16",
        "--set",
        "hidden=8",
        "--set",
        "max_iter=3",
        "--set",
        "modality=impulse",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(String::from_utf8_lossy(&o.stdout).contains("iterations=3"));
    let x = dir.path().join("x.rdt");
    dealias(&["phantom", "--kind", "disks", "--size", "40", "--out", p(&x)]);
    let y = dir.path().join("y.pgm");
    let o = dealias(&[
        "reconstruct",
        "--model",
        p(&model),
        "--input",
        p(&x),
        "--out",
        p(&y),
        "--overlap",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(String::from_utf8_lossy(&o.stdout).contains("patches=16"));
    assert_eq!(load_image(&y).unwrap().dims(), (40, 40));
}

#[test]
fn diverging_training_is_a_numeric_failure() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 2, 1, 32);
    let corpus_set = format!("corpus={}", p(&corpus));
    let o = dealias(&[
        "train",
        "--method",
        "l2",
        "--out",
        p(&dir.path().join("m")),
        "--set",
        &corpus_set,
        "--set",
        "patch_size=16",
        "--set",
        "hidden=4",
        "--set",
        "l2_learning_rate=1e6",
        "--set",
        "l2_epochs=50",
    ]);
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn bench_reruns_from_its_own_header() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write_corpus(dir.path(), 3, 2, 32);
    let corpus_set = format!("corpus={}", p(&corpus));
    let (first, second) = (dir.path().join("run1"), dir.path().join("run2"));
    let o = dealias(&[
        "bench",
        "--out-dir",
        p(&first),
        "--set",
        &corpus_set,
        "--set",
        "patch_size=16",
        "--set",
        "hidden=8",
        "--set",
        "max_iter=4",
        "--set",
        "cs_max_iter=10",
        "--set",
        "timing_repeats=1",
        "--set",
        "haar_levels=2",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = dealias(&[
        "bench",
        "--out-dir",
        p(&second),
        "--from-report",
        p(&first.join("summary.csv")),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    for name in [
        "rodeo.csv",
        "l2-baseline.csv",
        "ista-cs.csv",
        "zero-fill.csv",
        "summary.csv",
    ] {
        assert_eq!(
            std::fs::read(first.join(name)).unwrap(),
            std::fs::read(second.join(name)).unwrap(),
            "{name}"
        );
    }
    let timing = std::fs::read_to_string(first.join("timing.csv")).unwrap();
    assert!(timing.contains("method,train_seconds,seconds_per_image,ratio_to_rodeo"));
    assert!(first.join("rodeo-model").join("manifest.txt").exists());
}
