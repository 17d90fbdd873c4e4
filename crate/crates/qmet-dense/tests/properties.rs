mod common;

use common::*;
use proptest::prelude::*;
use qmet_dense::density::partial_trace_matrix;
use qmet_dense::matrix::{embed_1q, pauli_1q};
use qmet_dense::qfi::qfi_from_derivative;
use qmet_dense::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn eigensolver_reconstructs_random_hermitians() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for &d in &[2usize, 3, 4, 8, 16] {
        for _ in 0..10 {
            let h = random_hermitian(&mut rng, d);
            let s = hermitian_eig(&h).unwrap();
            assert!(s.values.windows(2).all(|w| w[0] <= w[1]));
            assert!(s.reconstruct().max_diff(&h) <= 1e-10 * h.max_abs());
            let gram = s.vectors.dagger().matmul(&s.vectors);
            assert!(gram.max_diff(&CMatrix::identity(d)) <= 1e-10);
        }
    }
}

#[test]
fn eigensolver_handles_degenerate_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    // U diag(1,1,1,-2,-2,5) U^dagger
    let u = unitary(&random_hermitian(&mut rng, 6), 1.0);
    let d = CMatrix::diag(&[1.0, 1.0, 1.0, -2.0, -2.0, 5.0].map(|x| C64::new(x, 0.0)));
    let h = u.matmul(&d).matmul(&u.dagger());
    let s = hermitian_eig(&h).unwrap();
    let want = [-2.0, -2.0, 1.0, 1.0, 1.0, 5.0];
    for (a, b) in s.values.iter().zip(want) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(s.reconstruct().max_diff(&h) <= 1e-10 * h.max_abs());
}

#[test]
fn fuchs_van_de_graaf_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in 0..1000 {
        let d = [2usize, 4, 8][k % 3];
        let ra = 1 + k % d;
        let rb = 1 + (k / 3) % d;
        let a = random_density(&mut rng, d, ra);
        let b = random_density(&mut rng, d, rb);
        let f = fidelity(&a, &b).unwrap();
        let f2 = fidelity(&b, &a).unwrap();
        let t = trace_distance(&a, &b).unwrap();
        assert!((f - f2).abs() < 1e-9, "symmetry {f} {f2}");
        assert!(1.0 - f.sqrt() <= t + 1e-9, "lower Fuchs bound");
        assert!(t <= (1.0 - f).sqrt() + 1e-9, "upper Fuchs bound");
    }
}

#[test]
fn random_states_satisfy_density_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for d in [2usize, 4, 8] {
        let rho = random_density(&mut rng, d, d);
        rho.check().unwrap();
        let red = partial_trace(&rho, &[0]).unwrap();
        red.check().unwrap();
        assert!((red.matrix().trace().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zero_rate_lindblad_matches_unitary_conjugation() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for d in [2usize, 4] {
        let h = random_hermitian(&mut rng, d);
        let rho = random_density(&mut rng, d, 2);
        let t = 0.8;
        let u = unitary(&h, t);
        let exact = u.sandwich(rho.matrix());
        let jumps = [Jump::new(0.0, pauli_1q(1).kron_power(d.trailing_zeros() as usize))];
        let out = evolve_lindblad(&rho, &h, &jumps, t, 8).unwrap();
        assert!(out.matrix().max_diff(&exact) < 1e-8);
        out.check().unwrap();
    }
}

#[test]
fn lindblad_output_is_a_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let h = random_hermitian(&mut rng, 4);
    let rho = random_density(&mut rng, 4, 1);
    let jumps = [
        Jump::new(0.3, embed_1q(&pauli_1q(1), 0, 2)),
        Jump::new(0.5, embed_1q(&pauli_1q(3), 1, 2)),
    ];
    let (out, steps) = evolve_lindblad_adaptive(&rho, &h, &jumps, 1.0, 4).unwrap();
    assert!(steps >= 8);
    out.check().unwrap();
}

/// Smooth pure families ψ(θ) = exp(-iθG) exp(-iθ² K) ψ0.
fn pure_family(seed: u64, d: usize) -> impl Fn(f64) -> Vec<C64> + Send + Sync {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_hermitian(&mut rng, d);
    let k = random_hermitian(&mut rng, d).scale_re(0.3);
    let psi0 = random_vector(&mut rng, d);
    move |th: f64| {
        let u = unitary(&g, th).matmul(&unitary(&k, th * th));
        u.apply(&psi0)
    }
}

#[test]
fn three_qfi_evaluators_agree_on_pure_families() {
    for seed in 0..50u64 {
        let d = [2usize, 4, 8][seed as usize % 3];
        let psi = pure_family(100 + seed, d);
        let theta = 0.3;
        let qp = qfi_pure(&psi, theta).unwrap();
        let fam = ThetaFamily::new(|th| DensityMatrix::from_pure(&psi(th)));
        let qs = qfi_spectral(&fam, theta).unwrap();
        let qf = qfi_fidelity_limit(&fam, theta, 1e-3).unwrap();
        let scale = qs.abs().max(1e-12);
        assert!((qp - qs).abs() <= 1e-3 * scale, "pure {qp} vs spectral {qs}");
        assert!((qf - qs).abs() <= 1e-3 * scale, "fidelity {qf} vs spectral {qs}");
        assert!((qp - qs).abs() <= 1e-6 * scale, "projector family agreement {qp} {qs}");
    }
}

#[test]
fn spectral_and_fidelity_limit_agree_on_mixed_families() {
    for seed in 0..20u64 {
        let d = [2usize, 4][seed as usize % 2];
        let mut rng = ChaCha8Rng::seed_from_u64(300 + seed);
        let g = random_hermitian(&mut rng, d);
        let sigma = random_density(&mut rng, d, d);
        let fam = ThetaFamily::new(move |th| DensityMatrix::new_unchecked(unitary(&g, th).sandwich(sigma.matrix())));
        let qs = qfi_spectral(&fam, 0.2).unwrap();
        let qf = qfi_fidelity_limit(&fam, 0.2, 1e-3).unwrap();
        assert!((qf - qs).abs() <= 1e-4f64.max(1e-2 * qs), "{qf} vs {qs}");
    }
}

#[test]
fn qfi_does_not_increase_under_partial_trace() {
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let g = random_hermitian(&mut rng, 8);
        let rho0 = random_density(&mut rng, 8, 1 + seed as usize % 3);
        let full = ThetaFamily::new(|th| DensityMatrix::new_unchecked(unitary(&g, th).sandwich(rho0.matrix())));
        let (r, dr) = full.value_and_derivative(0.1).unwrap();
        let q_full = qfi_from_derivative(&r, &dr).unwrap();
        let keep = [0usize, 2];
        let q_red = qfi_from_derivative(&partial_trace_matrix(&r, &keep).unwrap(), &partial_trace_matrix(&dr, &keep).unwrap())
            .unwrap();
        assert!(q_red <= q_full + 1e-6, "{q_red} > {q_full}");
    }
}

#[test]
fn separable_and_ghz_phase_qfi() {
    for n in 2..=4usize {
        let d = 1 << n;
        let ghz = |th: f64| {
            let mut v = vec![C64::new(0.0, 0.0); d];
            v[0] = C64::from_polar(0.5f64.sqrt(), -(n as f64) * th / 2.0);
            v[d - 1] = C64::from_polar(0.5f64.sqrt(), (n as f64) * th / 2.0);
            v
        };
        let prod = |th: f64| {
            (0..d)
                .map(|k| {
                    let ones = (k as u32).count_ones() as f64;
                    C64::from_polar((d as f64).sqrt().recip(), -th * (n as f64 - 2.0 * ones) / 2.0)
                })
                .collect::<Vec<_>>()
        };
        assert!((qfi_pure(ghz, 0.7).unwrap() - (n * n) as f64).abs() < 1e-8);
        assert!((qfi_pure(prod, 0.7).unwrap() - n as f64).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstruction_property(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, d);
        let s = hermitian_eig(&h).unwrap();
        prop_assert!(s.reconstruct().max_diff(&h) <= 1e-10 * h.max_abs().max(1e-300));
    }

    #[test]
    fn fidelity_is_symmetric_and_bounded(seed in any::<u64>(), ra in 1usize..5, rb in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density(&mut rng, 4, ra);
        let b = random_density(&mut rng, 4, rb);
        let f = fidelity(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - fidelity(&b, &a).unwrap()).abs() < 1e-9);
    }
}
