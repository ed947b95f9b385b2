use subnyquist_chest::channel::TapDistribution;
use subnyquist_chest::evaluation::{run_sweep, run_trial, Arm, ExperimentConfig, TrialSlice};
use subnyquist_chest::sensing::NoiseMode;

fn workers() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

#[test]
fn recovery_does_not_improve_with_more_taps() {
    let cfg = ExperimentConfig {
        k_list: vec![2, 4, 6, 8],
        me_list: vec![16],
        snr_db_list: vec![10.0],
        dist: TapDistribution::Gaussian,
        arms: vec![Arm::Proposed],
        trials: 500,
        ..ExperimentConfig::default()
    };
    let table = run_sweep(&cfg, workers()).unwrap();
    assert_eq!(table.len(), 4);
    for w in table.windows(2) {
        let (a, b) = (&w[0].stats, &w[1].stats);
        assert!(w[0].k < w[1].k);
        let slack = 2.0 * (a.recovery_stderr.powi(2) + b.recovery_stderr.powi(2)).sqrt();
        assert!(
            b.recovery_probability <= a.recovery_probability + slack,
            "K={} {} -> K={} {}",
            w[0].k,
            a.recovery_probability,
            w[1].k,
            b.recovery_probability
        );
    }
}

#[test]
fn zero_estimator_mse_is_energy_over_n() {
    // Independent measurements of a zero-signal arm are not needed: the
    // squared error of the all-zero estimate is ||h||^2, so averaging the
    // channel energies over trials gives its Average MSE.
    let slice = TrialSlice {
        n: 96,
        m: 32,
        p: 8,
        k: 4,
        me: 0,
        snr_db: 20.0,
        dist: TapDistribution::Gaussian,
        noise_mode: NoiseMode::Subsample,
    };
    let trials = 2000;
    let per_trial: Vec<f64> = (0..trials)
        .map(|t| {
            let trial = subnyquist_chest::evaluation::realize_trial(&slice, &[], t, 11).unwrap();
            trial.channel.energy() / 96.0
        })
        .collect();
    let mean = per_trial.iter().sum::<f64>() / trials as f64;
    let var = per_trial.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (trials as f64 - 1.0);
    let stderr = (var / trials as f64).sqrt();
    assert!(
        (mean - 1.0 / 96.0).abs() <= 2.0 * stderr,
        "{mean} vs {}",
        1.0 / 96.0
    );
}

#[test]
fn short_arm_is_identical_across_extraction_lengths() {
    let base = TrialSlice {
        n: 96,
        m: 32,
        p: 8,
        k: 4,
        me: 0,
        snr_db: 10.0,
        dist: TapDistribution::Gaussian,
        noise_mode: NoiseMode::Subsample,
    };
    for t in 0..30 {
        let reference = run_trial(&base, &[Arm::TraditionalShort], t, 3).unwrap();
        for me in [8, 32, 56] {
            let s = TrialSlice { me, ..base.clone() };
            assert_eq!(
                run_trial(&s, &[Arm::TraditionalShort], t, 3).unwrap(),
                reference
            );
        }
    }
}
