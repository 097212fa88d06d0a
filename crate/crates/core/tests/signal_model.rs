use ncdoa::signal_model::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn noiseless_mag(geom: &ArrayGeometry, scene: &TargetScene, phase: &PhaseErrorModel, seed: u64) -> Vec<f64> {
    let snap = simulate_snapshot(geom, scene, &NoiseModel::noiseless(), phase, seed).unwrap();
    magnitude_squared(&snap).into_values()
}

fn scene_strategy(max_targets: usize) -> impl Strategy<Value = TargetScene> {
    (
        1.0f64..200.0,
        prop::collection::vec((0.0f64..=180.0, 0.05f64..1.0), 0..max_targets),
    )
        .prop_map(|(ref_amp, rest)| {
            let mut pairs = vec![(0.0, ref_amp)];
            pairs.extend(rest.into_iter().map(|(a, frac)| (a, frac * ref_amp)));
            TargetScene::from_pairs(&pairs).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn magnitude_matches_harmonic_expansion(scene in scene_strategy(4), n in 2usize..=256) {
        let geom = ArrayGeometry::half_wavelength(n).unwrap();
        let a = noiseless_mag(&geom, &scene, &PhaseErrorModel::none(), 0);
        let comps = expand_harmonics(&geom, &scene);
        let dc = comps[0].amplitude;
        for (idx, v) in a.iter().enumerate() {
            let e = evaluate_harmonics(&comps, idx as i64);
            prop_assert!((v - e).abs() / dc <= 1e-9, "n={} {} vs {}", idx, v, e);
        }
    }

    #[test]
    fn expansion_shape(scene in scene_strategy(5), spacing in 0.1f64..1.0) {
        let geom = ArrayGeometry::new(8, spacing).unwrap();
        let comps = expand_harmonics(&geom, &scene);
        let k = scene.len();
        prop_assert_eq!(comps.len(), 1 + k * (k - 1) / 2);
        prop_assert!(comps.iter().all(|c| (0.0..=2.0 * spacing).contains(&c.normalized_frequency)));
        for c in comps.iter().filter(|c| !c.is_dc()) {
            let (i, j) = c.target_pair;
            let t = scene.targets();
            prop_assert!((c.amplitude - 2.0 * t[i].amplitude * t[j].amplitude).abs() < 1e-9);
        }
    }

    #[test]
    fn global_phase_invariance(scene in scene_strategy(3), phi in -10.0f64..10.0, seed in any::<u64>()) {
        let geom = ArrayGeometry::half_wavelength(64).unwrap();
        let snap = simulate_snapshot(&geom, &scene, &NoiseModel::new(0.3).unwrap(), &PhaseErrorModel::none(), seed).unwrap();
        let rot = Complex64::from_polar(1.0, phi);
        let rotated = Snapshot { samples: snap.samples.iter().map(|y| y * rot).collect() };
        let a = magnitude_squared(&snap);
        let b = magnitude_squared(&rotated);
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-12 * x.max(1.0));
        }
    }

    #[test]
    fn common_phase_error_cancels(
        angles in prop::collection::vec(0.0f64..=180.0, 1..4),
        max_err in 0.0f64..180.0,
        variance in 0.0f64..0.5,
        seed in any::<u64>(),
    ) {
        let mut pairs = vec![(0.0, 1.0)];
        pairs.extend(angles.iter().map(|a| (*a, 0.7)));
        let scene = TargetScene::from_pairs(&pairs).unwrap();
        let geom = ArrayGeometry::half_wavelength(100).unwrap();
        let noise = NoiseModel::new(variance).unwrap();
        let common = PhaseErrorModel::new(PhaseErrorKind::PerElementCommon, max_err).unwrap();
        let clean = magnitude_squared(&simulate_snapshot(&geom, &scene, &noise, &PhaseErrorModel::none(), seed).unwrap());
        let jittered = magnitude_squared(&simulate_snapshot(&geom, &scene, &noise, &common, seed).unwrap());
        for (x, y) in clean.values().iter().zip(jittered.values()) {
            prop_assert!((x - y).abs() <= 1e-12, "{} vs {}", x, y);
        }
    }

    #[test]
    fn amplitude_scaling_is_quadratic(scene in scene_strategy(3), c in 0.1f64..10.0) {
        let geom = ArrayGeometry::half_wavelength(50).unwrap();
        let a = noiseless_mag(&geom, &scene, &PhaseErrorModel::none(), 0);
        let b = noiseless_mag(&geom, &scene.scaled(c).unwrap(), &PhaseErrorModel::none(), 0);
        let dc = expand_harmonics(&geom, &scene)[0].amplitude;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((y - c * c * x).abs() <= 1e-10 * c * c * dc);
        }
    }
}

#[test]
fn per_target_phase_errors_change_magnitudes() {
    let geom = ArrayGeometry::half_wavelength(64).unwrap();
    let scene = TargetScene::from_pairs(&[(0.0, 10.0), (40.0, 1.0)]).unwrap();
    let jitter = PhaseErrorModel::new(PhaseErrorKind::PerTargetUniform, 60.0).unwrap();
    let a = noiseless_mag(&geom, &scene, &PhaseErrorModel::none(), 5);
    let b = noiseless_mag(&geom, &scene, &jitter, 5);
    assert!(a.iter().zip(&b).any(|(x, y)| (x - y).abs() > 1e-3));
    // zero maximum error draws nothing
    let zero = PhaseErrorModel::new(PhaseErrorKind::PerTargetUniform, 0.0).unwrap();
    assert_eq!(noiseless_mag(&geom, &scene, &zero, 5), a);
}

/// Monte Carlo over 10^4 seeds: the element-averaged power equals the
/// element-averaged harmonic synthesis plus the noise variance.
#[test]
fn mean_power_matches_analytic() {
    let geom = ArrayGeometry::half_wavelength(200).unwrap();
    let scene = TargetScene::from_pairs(&[(0.0, 100.0), (60.0, 1.0), (25.0, 1.0)]).unwrap();
    let noise = NoiseModel::new(0.04).unwrap();
    let comps = expand_harmonics(&geom, &scene);
    let analytic: f64 = (0..200).map(|n| evaluate_harmonics(&comps, n)).sum::<f64>() / 200.0 + 0.04;

    let seeds = 10_000u64;
    let mut total = 0.0;
    for seed in 0..seeds {
        let snap = simulate_snapshot(&geom, &scene, &noise, &PhaseErrorModel::none(), seed).unwrap();
        total += magnitude_squared(&snap).values().iter().sum::<f64>() / 200.0;
    }
    let measured = total / seeds as f64;
    // per-element std of |y|^2 is about sqrt(2 * 100^2 * 0.04) = 28; 2e6 samples
    assert!((measured - analytic).abs() < 0.1, "{measured} vs {analytic}");
    assert!((measured - 10002.04).abs() / 10002.04 < 1e-2);
}

#[test]
fn snapshot_residuals_are_independent_noise() {
    let geom = ArrayGeometry::half_wavelength(200).unwrap();
    let scene = TargetScene::from_pairs(&[(0.0, 100.0), (60.0, 1.0), (25.0, 1.0)]).unwrap();
    let clean = simulate_snapshot(&geom, &scene, &NoiseModel::noiseless(), &PhaseErrorModel::none(), 0).unwrap();
    let mut residuals: Vec<Vec<Complex64>> = Vec::new();
    let mut count = 0usize;
    let mut power = 0.0;
    for seed in 0..200u64 {
        let set = simulate_snapshot_set(&geom, &scene, &NoiseModel::new(0.04).unwrap(), &PhaseErrorModel::none(), 5, seed)
            .unwrap();
        let res: Vec<Vec<Complex64>> = set
            .snapshots
            .iter()
            .map(|s| s.samples.iter().zip(&clean.samples).map(|(y, c)| y - c).collect())
            .collect();
        for r in &res {
            power += r.iter().map(|c| c.norm_sqr()).sum::<f64>();
            count += r.len();
        }
        if seed == 0 {
            residuals = res;
        }
    }
    let variance = power / count as f64;
    assert!((variance - 0.04).abs() < 0.002, "{variance}");

    for i in 0..5 {
        for j in (i + 1)..5 {
            assert_ne!(residuals[i], residuals[j]);
            let cross: Complex64 = residuals[i].iter().zip(&residuals[j]).map(|(a, b)| a * b.conj()).sum();
            // |mean cross product| ~ 0.04 / sqrt(200)
            assert!(cross.norm() / 200.0 < 0.015, "{i},{j}: {}", cross.norm() / 200.0);
        }
    }
}

#[test]
fn noise_model_from_snr() {
    let n = NoiseModel::from_snr_db(10.0).unwrap();
    assert!((n.variance() - 0.1).abs() < 1e-15);
    assert!((snr_from_noise_var(n.variance()).unwrap() - 10.0).abs() < 1e-12);
}
