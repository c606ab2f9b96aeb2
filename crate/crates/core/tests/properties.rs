use harmean::asymptotics::{op_error_limit, spike_prediction, MeanKind, SpectralLaw, TTransform};
use harmean::estimators::{arithmetic_mean, harmonic_mean, EstimatorKind, ShrinkageIntensity, ShrinkageTarget};
use harmean::harness::ExperimentConfig;
use harmean::linalg::{eigvalsh, SpdMatrix};
use harmean::metrics::{frobenius_sq_per_p, leading_overlap_sq, operator_norm_error};
use harmean::rng::rng_from_seed;
use harmean::sampling::{haar_orthogonal, CovarianceSpec};
use harmean::selftest::random_pd;
use harmean::{c64, Field};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn am_dominates_hm(seed in any::<u64>(), p in 1usize..8, k in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let ws: Vec<SpdMatrix<c64>> = (0..k).map(|_| random_pd(p, &mut rng)).collect();
        let a = arithmetic_mean(&ws).unwrap();
        let h = harmonic_mean(&ws).unwrap();
        let d = eigvalsh((a.as_mat() - h.as_mat()).as_ref()).unwrap();
        prop_assert!(d[0] >= -1e-9 * d[p - 1].abs().max(1.0));
    }

    #[test]
    fn operator_norm_below_frobenius(seed in any::<u64>(), p in 1usize..10) {
        let mut rng = rng_from_seed(seed);
        let est: SpdMatrix<f64> = random_pd(p, &mut rng);
        let sigma: SpdMatrix<f64> = random_pd(p, &mut rng);
        let op = operator_norm_error(&est, &sigma).unwrap();
        let fro = frobenius_sq_per_p(&est, &sigma).unwrap();
        prop_assert!(op <= (p as f64 * fro).sqrt() * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn metrics_rotation_invariant(seed in any::<u64>(), p in 2usize..8) {
        let mut rng = rng_from_seed(seed);
        let est: SpdMatrix<f64> = random_pd(p, &mut rng);
        let sigma: SpdMatrix<f64> = random_pd(p, &mut rng);
        let mut v: Vec<f64> = (0..p).map(|i| 1.0 + i as f64).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let u = haar_orthogonal(p, &mut rng);
        let rot = |m: &SpdMatrix<f64>| SpdMatrix::new(&u * m.as_mat() * u.transpose()).unwrap();
        let uv: Vec<f64> = (0..p).map(|i| (0..p).map(|j| u[(i, j)] * v[j]).sum()).collect();
        let (e2, s2) = (rot(&est), rot(&sigma));
        prop_assert!((operator_norm_error(&est, &sigma).unwrap() - operator_norm_error(&e2, &s2).unwrap()).abs() < 1e-10);
        prop_assert!((frobenius_sq_per_p(&est, &sigma).unwrap() - frobenius_sq_per_p(&e2, &s2).unwrap()).abs() < 1e-10);
        prop_assert!((leading_overlap_sq(&est, &v).unwrap() - leading_overlap_sq(&e2, &uv).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn overlap_is_phase_invariant(seed in any::<u64>(), p in 2usize..7, phase in 0.0f64..std::f64::consts::TAU) {
        let mut rng = rng_from_seed(seed);
        let est: SpdMatrix<c64> = random_pd(p, &mut rng);
        let v: Vec<c64> = (0..p).map(|i| c64::new(1.0, i as f64) / ((0..p).map(|k| 1.0 + (k * k) as f64).sum::<f64>()).sqrt()).collect();
        let rotated: Vec<c64> = v.iter().map(|x| x * c64::from_polar(1.0, phase)).collect();
        let a = leading_overlap_sq(&est, &v).unwrap();
        prop_assert!((a - leading_overlap_sq(&est, &rotated).unwrap()).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn harmonic_beats_arithmetic_limit(gamma in 0.001f64..0.499) {
        prop_assert!(op_error_limit(gamma, MeanKind::Harmonic, 2).unwrap()
            < op_error_limit(gamma, MeanKind::Arithmetic, 1).unwrap());
        let h = SpectralLaw::harmonic(gamma, 2).unwrap();
        let a = SpectralLaw::arithmetic(gamma).unwrap();
        prop_assert!(h.upper < a.upper);
    }

    #[test]
    fn t_round_trip(gamma in 0.01f64..0.49, frac in 0.001f64..0.999) {
        let t = TTransform::new(gamma).unwrap();
        let w = frac * t.t_at_edge();
        prop_assert!((t.t(t.t_inverse(w).unwrap()).unwrap() - w).abs() < 1e-10);
    }

    #[test]
    fn spike_overlaps_in_unit_interval(gamma in 0.01f64..0.49, theta in 0.01f64..20.0) {
        for kind in [MeanKind::Arithmetic, MeanKind::Harmonic] {
            let s = spike_prediction(theta, gamma, kind).unwrap();
            prop_assert!((0.0..=1.0).contains(&s.overlap_sq_limit));
            prop_assert_eq!(s.overlap_sq_limit == 0.0, theta <= s.threshold);
            let edge = SpectralLaw::new(gamma, kind, 2).unwrap().upper;
            prop_assert!(s.lambda1_limit >= edge - 1e-12);
        }
    }

    #[test]
    fn config_round_trip(
        p in 1usize..50,
        extra in 0usize..50,
        n_splits in 1usize..5,
        complex in any::<bool>(),
        model in 0u8..3,
        param in 1.0f64..10.0,
        lambda in 0.0f64..=1.0,
        seed in any::<u64>(),
        trials in 1usize..30,
    ) {
        let covariance = match model {
            0 => CovarianceSpec::Identity { p },
            1 => CovarianceSpec::Spiked { p, theta: param, direction: harmean::SpikeDirection::Canonical },
            _ => CovarianceSpec::HaarDiagonal { p, b: param },
        };
        let mut estimators = vec![
            EstimatorKind::Arithmetic,
            EstimatorKind::Harmonic,
            EstimatorKind::LinearShrinkage { intensity: ShrinkageIntensity::Fixed(lambda), target: ShrinkageTarget::ScaledIdentity },
        ];
        if !complex && n_splits == 2 {
            estimators.push(EstimatorKind::RegularizedRbHarmonic { c: param, d: lambda, target: ShrinkageTarget::Identity });
        }
        let config = ExperimentConfig {
            experiment_id: format!("prop_{seed}"),
            p,
            n: p + extra,
            n_splits,
            field: if complex { Field::Complex } else { Field::Real },
            covariance,
            estimators,
            trials,
            base_seed: seed,
            output_path: Some("out/x.csv".into()),
        };
        let text = config.to_string();
        prop_assert_eq!(text.parse::<ExperimentConfig>().unwrap(), config);
    }
}
