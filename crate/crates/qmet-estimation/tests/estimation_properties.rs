use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qmet_dense::{qfi_pure, qfi_spectral, CMatrix, DensityMatrix, ThetaFamily};
use qmet_estimation::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// p_k(θ) ∝ exp(θ T_k + b_k)
fn exp_family(seed: u64) -> (Pmf<'static>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.gen_range(2..=4);
    let t: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.5..1.5)).collect();
    let b: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let pmf = Pmf::unlabelled(k, move |th| {
        let w: Vec<f64> = t.iter().zip(&b).map(|(t, b)| (th * t + b).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    });
    (pmf, k)
}

#[test]
fn local_estimator_is_efficient_at_its_anchor() {
    for seed in 0..50u64 {
        let (pmf, _) = exp_family(seed);
        let theta = 0.1 * (seed % 7) as f64 - 0.3;
        let n = 1 + (seed as usize % 12);
        let fi = fisher_information_default(&pmf, theta);
        let stats = local_estimator_stats(&pmf, theta, theta, n).unwrap();
        let want = crb(fi, n).unwrap();
        assert!((stats.mse - want).abs() <= 1e-6 * want, "seed {seed}: {} vs {want}", stats.mse);
        // the score comes from finite differences, so E[score] is zero only to ~1e-11 / FI
        assert!(stats.bias.abs() < 1e-7, "bias {}", stats.bias);
    }
}

#[test]
fn crb_lower_bounds_enumerated_estimators() {
    for seed in 0..20u64 {
        let (pmf, _) = exp_family(1000 + seed);
        let theta = 0.2;
        let n = 6;
        let fi = fisher_information_default(&pmf, theta);
        let bound = crb(fi, n).unwrap();
        // off-anchor local estimators are biased; the CRB for their mean still holds
        for anchor in [0.0, 0.2, 0.5] {
            let s = local_estimator_stats(&pmf, theta, anchor, n).unwrap();
            let dmean = {
                let h = 1e-5;
                let up = local_estimator_stats(&pmf, theta + h, anchor, n).unwrap().mean;
                let dn = local_estimator_stats(&pmf, theta - h, anchor, n).unwrap().mean;
                (up - dn) / (2.0 * h)
            };
            assert!(s.variance >= dmean * dmean * bound * (1.0 - 1e-6), "seed {seed} anchor {anchor}");
            if anchor == theta {
                assert!(s.mse >= bound * (1.0 - 1e-6));
            }
        }
    }
    for &p in &[0.1, 0.5, 0.8] {
        for n in [1usize, 5, 25] {
            let s = coin_mle_stats(p, n).unwrap();
            let bound = crb(1.0 / (p * (1.0 - p)), n).unwrap();
            assert!(s.mse >= bound * (1.0 - 1e-12));
            assert!((s.variance - p * (1.0 - p) / n as f64).abs() < 1e-12);
            assert!(s.bias.abs() < 1e-12);
        }
    }
}

#[test]
fn fisher_information_ignores_labels_and_null_outcomes() {
    let (pmf, k) = exp_family(7);
    let base = fisher_information_default(&pmf, 0.4);
    let permuted = Pmf::unlabelled(k, |th| pmf.probs(th).into_iter().rev().collect());
    let padded = Pmf::unlabelled(k + 2, |th| {
        let mut p = pmf.probs(th);
        p.insert(1, 0.0);
        p.push(0.0);
        p
    });
    assert!((fisher_information_default(&permuted, 0.4) - base).abs() < 1e-12 * base);
    assert!((fisher_information_default(&padded, 0.4) - base).abs() < 1e-12 * base);
}

#[test]
fn phase_qfi_matches_dense_states() {
    for n in 1..=6 {
        for probe in [PhaseProbe::Separable, PhaseProbe::Ghz] {
            let q = qfi_pure(|t| phase_state(n, probe, t), 0.37).unwrap();
            assert!((q - phase_qfi(n, probe)).abs() < 1e-7, "n {n} {probe:?}: {q}");
        }
    }
}

#[test]
fn noon_parity_saturates_the_bound() {
    for n in 1..=8 {
        let nf = n as f64;
        for &theta in &[0.11, 0.4, 1.3] {
            let o = noon_parity_expectation(n, theta);
            assert!((o - (nf * theta - std::f64::consts::PI * nf / 2.0).cos()).abs() < 1e-12, "n {n} o {o} {}", (nf * theta - std::f64::consts::PI * nf / 2.0).cos());
            let norm: f64 = noon_output_amplitudes(n, theta).iter().map(|a| a.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-12);
            // avoid points where the parity slope vanishes
            if (nf * theta - std::f64::consts::PI * nf / 2.0).sin().abs() < 0.05 {
                continue;
            }
            let nu = 10;
            let mse = noon_parity_mse(n, theta, nu).unwrap();
            let want = 1.0 / (nu as f64 * nf * nf);
            assert!((mse - want).abs() < 1e-7 * want, "n {n} θ {theta}: {mse}");
        }
    }
}

fn gibbs_family(energies: Vec<f64>) -> ThetaFamily<'static> {
    ThetaFamily::new(move |t| {
        let p = gibbs_populations(&energies, t).unwrap();
        DensityMatrix::new_unchecked(CMatrix::diag(&p.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>()))
    })
}

#[test]
fn thermometry_matches_spectral_qfi() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let d = rng.gen_range(2..6);
        let energies: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..2.0)).collect();
        let t = rng.gen_range(0.3..2.0);
        let closed = thermometry_qfi(&energies, t).unwrap();
        let fam = gibbs_family(energies.clone());
        let oracle = qfi_spectral(&fam, t).unwrap();
        assert!((closed - oracle).abs() <= 1e-6 * closed, "{closed} vs {oracle}");
        let cv = heat_capacity(&energies, t).unwrap();
        let var = energy_variance(&energies, t);
        assert!((cv - var / (t * t)).abs() <= 1e-6 * cv.abs().max(1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fisher_information_is_nonnegative(seed in any::<u64>(), theta in -1.0f64..1.0) {
        let (pmf, _) = exp_family(seed);
        prop_assert!(fisher_information_default(&pmf, theta) >= 0.0);
    }

    #[test]
    fn coin_stats_satisfy_mse_identity(p in 0.01f64..0.99, n in 1usize..=25) {
        let s = coin_mle_stats(p, n).unwrap();
        prop_assert!((s.mse - (s.variance + s.bias * s.bias)).abs() < 1e-12);
    }
}
