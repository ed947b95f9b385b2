use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use subnyquist_chest::channel::{generate_sparse_channel, TapDistribution};
use subnyquist_chest::evaluation::{realize_trial, Arm, TrialSlice};
use subnyquist_chest::recovery::{cosamp, exhaustive_oracle, oracle_ls, RecoveryConfig};
use subnyquist_chest::rng::{complex_gaussian, seeded};
use subnyquist_chest::sensing::{AssembledSystem, NoiseMode};
use subnyquist_chest::C64;

fn random_system(rows: usize, cols: usize, k: usize, sigma2: f64, seed: u64) -> AssembledSystem {
    let mut rng = seeded(seed);
    let matrix = DMatrix::from_fn(rows, cols, |_, _| complex_gaussian(&mut rng, 1.0));
    let h = generate_sparse_channel(cols, k, TapDistribution::Gaussian, &mut rng).unwrap();
    let phi = &matrix * DVector::from_column_slice(h.taps())
        + DVector::from_fn(rows, |_, _| complex_gaussian(&mut rng, sigma2));
    AssembledSystem {
        phi,
        matrix,
        noise_variance: sigma2,
        noise_mode: NoiseMode::Independent,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimates_are_k_sparse_and_never_worse_than_zero(
        rows in 3usize..24,
        cols in 4usize..40,
        k in 1usize..5,
        snr in prop_oneof![Just(f64::INFINITY), 0.0f64..30.0],
        seed in any::<u64>(),
    ) {
        let k = k.min(cols);
        let sigma2 = if snr.is_infinite() { 0.0 } else { 10f64.powf(-snr / 10.0) };
        let sys = random_system(rows, cols, k, sigma2, seed);
        let est = cosamp(&sys, &RecoveryConfig::new(k)).unwrap();
        let nonzero: Vec<usize> = est.coeffs.iter().enumerate()
            .filter(|(_, c)| c.norm() > 0.0).map(|(i, _)| i).collect();
        prop_assert!(nonzero.len() <= k);
        prop_assert_eq!(&nonzero, &est.support);
        prop_assert!(est.final_residual_norm <= sys.phi.norm());
    }

    #[test]
    fn scaling_measurements_scales_the_estimate(
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
        seed in any::<u64>(),
    ) {
        prop_assume!(re.abs() + im.abs() > 0.1);
        let c = C64::new(re, im);
        let sys = random_system(24, 48, 3, 0.01, seed);
        let mut scaled = sys.clone();
        scaled.phi *= c;
        let cfg = RecoveryConfig::new(3);
        let a = cosamp(&sys, &cfg).unwrap();
        let b = cosamp(&scaled, &cfg).unwrap();
        prop_assert_eq!(&a.support, &b.support);
        let scale = a.coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max) * c.norm();
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            prop_assert!((x * c - y).norm() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn permuting_columns_permutes_the_support(seed in any::<u64>(), shift in 1usize..47) {
        let sys = random_system(24, 48, 3, 0.01, seed);
        // column j of the permuted matrix is column perm[j] of the original
        let perm: Vec<usize> = (0..48).map(|j| (j * 5 + shift) % 48).collect();
        let mut permuted = sys.clone();
        for (j, &src) in perm.iter().enumerate() {
            permuted.matrix.set_column(j, &sys.matrix.column(src));
        }
        let cfg = RecoveryConfig::new(3);
        let a = cosamp(&sys, &cfg).unwrap();
        let b = cosamp(&permuted, &cfg).unwrap();
        let mut mapped: Vec<usize> = b.support.iter().map(|&j| perm[j]).collect();
        mapped.sort_unstable();
        prop_assert_eq!(mapped, a.support);
    }
}

/// Greedy recovery against brute force on small noiseless systems. The
/// exhaustive search is exact here, so it always lands on the planted support
/// and CoSaMP can never undercut its residual.
#[test]
fn cosamp_against_exhaustive_search_on_small_noiseless_instances() {
    let mut agree = 0;
    for t in 0..200u64 {
        let k = 1 + (t % 2) as usize;
        let rows = 3 * k + (t as usize % 3);
        let mut rng = seeded(9000 + t);
        let matrix = DMatrix::from_fn(rows, 10, |_, _| complex_gaussian(&mut rng, 1.0));
        let h = generate_sparse_channel(10, k, TapDistribution::Gaussian, &mut rng).unwrap();
        let sys = AssembledSystem {
            phi: &matrix * DVector::from_column_slice(h.taps()),
            matrix,
            noise_variance: 0.0,
            noise_mode: NoiseMode::Independent,
        };
        let greedy = cosamp(&sys, &RecoveryConfig::new(k)).unwrap();
        let brute = exhaustive_oracle(&sys, k).unwrap();
        assert_eq!(brute.support, h.support(), "trial {t}");
        assert!(brute.final_residual_norm < 1e-9 * sys.phi.norm());
        assert!(greedy.final_residual_norm + 1e-9 * sys.phi.norm() >= brute.final_residual_norm);
        agree += usize::from(greedy.support == brute.support);
    }
    assert!(agree >= 160, "{agree}/200");
}

#[test]
fn proposed_arm_recovers_support_at_20_db() {
    let slice = TrialSlice {
        n: 96,
        m: 32,
        p: 8,
        k: 4,
        me: 56,
        snr_db: 20.0,
        dist: TapDistribution::EqualMagnitudeUniform,
        noise_mode: NoiseMode::Subsample,
    };
    let mut hits = 0;
    for t in 0..500 {
        let trial = realize_trial(&slice, &[Arm::Proposed], t, 77).unwrap();
        let est = cosamp(
            trial.system(Arm::Proposed).unwrap(),
            &RecoveryConfig::new(4),
        )
        .unwrap();
        let mut s = est.support.clone();
        s.sort_unstable();
        hits += usize::from(s == trial.channel.support());
    }
    assert!(hits >= 450, "{hits}/500");
}

/// Genie least squares against its closed-form error: with white noise of
/// variance s2, `E||h - h_ls||^2 = s2 * trace((A^H A)^-1)` for the
/// support-restricted matrix `A`. The trace is computed by explicit inversion
/// of the Gram matrix, independently of the SVD used by the solver.
#[test]
fn genie_least_squares_matches_closed_form_error() {
    let slice = TrialSlice {
        n: 96,
        m: 32,
        p: 8,
        k: 4,
        me: 56,
        snr_db: 30.0,
        dist: TapDistribution::EqualMagnitudeUniform,
        noise_mode: NoiseMode::Independent,
    };
    let sigma2 = 1e-3;
    let (mut empirical, mut predicted) = (0.0, 0.0);
    for t in 0..3000 {
        let trial = realize_trial(&slice, &[Arm::Proposed], t, 4242).unwrap();
        let sys = trial.system(Arm::Proposed).unwrap();
        assert_eq!(sys.measurements(), 88);
        let support = trial.channel.support();
        let est = oracle_ls(sys, support).unwrap();
        empirical += trial
            .channel
            .taps()
            .iter()
            .zip(&est.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>();

        let a = DMatrix::from_fn(88, support.len(), |i, j| sys.matrix[(i, support[j])]);
        let gram_inv = (a.adjoint() * &a).try_inverse().unwrap();
        predicted += sigma2 * gram_inv.trace().re;
    }
    let ratio = empirical / predicted;
    assert!(
        (ratio - 1.0).abs() < 0.05,
        "empirical / closed form = {ratio}"
    );
}

#[test]
fn noiseless_genie_is_exact() {
    let mut rng = seeded(5);
    let matrix = DMatrix::from_fn(20, 30, |_, _| complex_gaussian(&mut rng, 1.0));
    let h = generate_sparse_channel(30, 4, TapDistribution::Gaussian, &mut rng).unwrap();
    let sys = AssembledSystem {
        phi: &matrix * DVector::from_column_slice(h.taps()),
        matrix,
        noise_variance: 0.0,
        noise_mode: NoiseMode::Independent,
    };
    let est = oracle_ls(&sys, h.support()).unwrap();
    for (a, b) in est.coeffs.iter().zip(h.taps()) {
        assert!((a - b).norm() < 1e-10);
    }
}
