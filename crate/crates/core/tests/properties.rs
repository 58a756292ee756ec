use dealias_core::autoencoder::{
    bregman, soft_threshold, solve_ridge_least_squares, split_bregman_step_traced, Activation,
    AutoencoderModel, Side, SplitBregmanState, TrainConfig, TrainingSet,
};
use dealias_core::cs::{ista_solve, lasso_objective, omp_solve, LinearOperator};
use dealias_core::linalg::{matmul, Matrix, Op};
use dealias_core::metrics::{nmse, psnr, ssim};
use dealias_core::pipeline::{
    degrade, extract_patches, reassemble_patches, DegradationSpec, Modality,
};
use dealias_core::transforms::{fft2, sparsify, Direction, SparsifyingTransform};
use dealias_core::{ImageGrid, SeededRng};
use proptest::prelude::*;

fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
    let mut rng = SeededRng::new(seed);
    Matrix::from_fn(rows, cols, |_, _| rng.normal())
}

fn random_image(h: usize, w: usize, seed: u64) -> ImageGrid {
    let mut rng = SeededRng::new(seed);
    ImageGrid::from_fn(h, w, |_, _| rng.uniform())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn p1_soft_threshold_is_exact_minimizer(v in -3.0f64..3.0, lambda in 0.1f64..10.0, probe in -3.0f64..3.0) {
        let p = soft_threshold(&[v], 1.0 / (2.0 * lambda)).unwrap()[0];
        let f = |x: f64| x.abs() + lambda * (x - v) * (x - v);
        prop_assert!(f(p) <= f(probe) + 1e-12);
    }

    #[test]
    fn ridge_solution_beats_perturbations(m in 2usize..7, n in 2usize..7, k in 1usize..4, seed in 0u64..1000) {
        let a = random_matrix(m, n, seed);
        let b = random_matrix(m, k, seed + 1);
        let eps = 1e-6;
        let x = solve_ridge_least_squares(&a, &b, eps, Side::Left).unwrap();
        let obj = |x: &Matrix| matmul(&a, Op::N, x, Op::N).sub(&b).frobenius_sq() + eps * x.frobenius_sq();
        let best = obj(&x);
        let mut rng = SeededRng::new(seed + 2);
        for _ in 0..100 {
            let p = x.map(|v| v + 1e-3 * rng.normal());
            prop_assert!(obj(&p) >= best - 1e-12);
        }
    }

    #[test]
    fn split_bregman_blocks_are_monotone(seed in 0u64..200, d in 3usize..8, hidden in 2usize..6) {
        let mut rng = SeededRng::new(seed);
        let clean = Matrix::from_fn(d, 10, |_, _| rng.uniform());
        let noisy = clean.map(|v| if rng.bernoulli(0.2) { 1.0 } else { v });
        let set = TrainingSet::from_pairs(&noisy, &clean).unwrap();
        let config = TrainConfig { hidden, seed, ..TrainConfig::default() };
        let mut model = AutoencoderModel::init(d, hidden, Activation::Tanh, seed).unwrap();
        let mut state = SplitBregmanState::init(&model, &set, &config).unwrap();
        for _ in 0..4 {
            let trace = split_bregman_step_traced(&mut model, &set, &mut state, &config).unwrap();
            for w in trace.sequence().windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0), "{:?}", trace);
            }
        }
        prop_assert!(state.objective_history().iter().all(|v| v.is_finite()));
        let fresh = bregman::relaxed_objective(&model, &set, &state).unwrap();
        prop_assert!(fresh.is_finite());
    }

    #[test]
    fn extract_reassemble_identity(h in 20usize..90, w in 20usize..90, overlap in any::<bool>(), seed in 0u64..100) {
        let img = random_image(h, w, seed);
        let stride = if overlap { 8 } else { 16 };
        let back = reassemble_patches(&extract_patches(&img, 16, stride).unwrap()).unwrap();
        prop_assert_eq!(back.dims(), img.dims());
        for (a, b) in back.data().iter().zip(img.data()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn impulse_degradation_is_deterministic_and_counted(fraction in 0.0f64..=1.0, seed in 0u64..100, index in 0u64..5) {
        let img = ImageGrid::filled(24, 24, 0.5);
        let spec = DegradationSpec::new(Modality::Impulse { fraction }, seed).unwrap();
        let a = degrade(&img, &spec, index).unwrap();
        prop_assert_eq!(&a, &degrade(&img, &spec, index).unwrap());
        let changed = a.data().iter().filter(|&&v| v != 0.5).count();
        prop_assert_eq!(changed, (fraction * 576.0).round() as usize);
    }

    #[test]
    fn nmse_is_scale_covariant(seed in 0u64..500, c in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0]) {
        let e = random_image(12, 12, seed);
        let r = random_image(12, 12, seed + 1);
        let base = nmse(&e, &r).unwrap();
        let scaled = nmse(&e.map(|v| c * v), &r.map(|v| c * v)).unwrap();
        prop_assert!((base - scaled).abs() < 1e-12);
    }

    #[test]
    fn ssim_is_symmetric_and_bounded(seed in 0u64..300) {
        let a = random_image(16, 16, seed);
        let b = random_image(16, 16, seed + 7);
        let ab = ssim(&a, &b).unwrap();
        prop_assert!((ab - ssim(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&ab));
    }

    #[test]
    fn lower_nmse_means_higher_psnr(seed in 0u64..300, s1 in 0.01f64..0.5, s2 in 0.01f64..0.5) {
        prop_assume!((s1 - s2).abs() > 1e-6);
        let r = random_image(8, 8, seed);
        let noise = random_image(8, 8, seed + 3).map(|v| v - 0.5);
        let est = |s: f64| ImageGrid::from_fn(8, 8, |i, j| r.get(i, j) + s * noise.get(i, j));
        let (e1, e2) = (est(s1), est(s2));
        let (n1, n2) = (nmse(&e1, &r).unwrap(), nmse(&e2, &r).unwrap());
        let (p1, p2) = (psnr(&e1, &r, 1.0).unwrap(), psnr(&e2, &r, 1.0).unwrap());
        prop_assert_eq!(n1 < n2, p1 > p2);
    }

    #[test]
    fn fft_and_sparsifiers_preserve_energy(seed in 0u64..100, log_h in 3u32..6, log_w in 3u32..6) {
        let (h, w) = (1usize << log_h, 1usize << log_w);
        let img = random_image(h, w, seed);
        let energy: f64 = img.data().iter().map(|v| v * v).sum();
        let k = fft2(&img.to_complex(), Direction::Forward).unwrap();
        let k_energy: f64 = k.data().iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((energy - k_energy).abs() < 1e-10 * energy);
        let back = fft2(&k, Direction::Inverse).unwrap().real_part();
        for (a, b) in back.data().iter().zip(img.data()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        for t in [SparsifyingTransform::Haar { levels: 3 }, SparsifyingTransform::Dct] {
            let c = sparsify(&img, t, Direction::Forward).unwrap();
            let c_energy: f64 = c.data().iter().map(|v| v * v).sum();
            prop_assert!((energy - c_energy).abs() < 1e-10 * energy);
            let back = sparsify(&c, t, Direction::Inverse).unwrap();
            for (a, b) in back.data().iter().zip(img.data()) {
                prop_assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ista_objective_never_increases(seed in 0u64..200, lambda in 0.0f64..1.0) {
        let a = random_matrix(12, 20, seed);
        let mut rng = SeededRng::new(seed + 5);
        let y: Vec<f64> = (0..12).map(|_| rng.normal()).collect();
        let op = LinearOperator::Explicit(a);
        let report = ista_solve(&op, &y, lambda, 60, 0.0).unwrap();
        let mut prev = lasso_objective(&op, &y, &[0.0; 20], lambda).unwrap();
        for &v in &report.objective_history {
            prop_assert!(v <= prev + 1e-10);
            prev = v;
        }
    }

    #[test]
    fn omp_support_grows_by_one(seed in 0u64..200, k in 1usize..8) {
        let a = random_matrix(16, 24, seed);
        let mut rng = SeededRng::new(seed + 9);
        let y: Vec<f64> = (0..16).map(|_| rng.normal()).collect();
        let report = omp_solve(&a, &y, k).unwrap();
        prop_assert_eq!(report.support.len(), k);
        let mut sorted = report.support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), k);
        for w in report.objective_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-9);
        }
        for (i, v) in report.solution.iter().enumerate() {
            if !report.support.contains(&i) {
                prop_assert_eq!(*v, 0.0);
            }
        }
    }
}
