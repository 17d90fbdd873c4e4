use std::collections::HashMap;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use qmet_dense::matrix::embed_1q;
use qmet_dense::{CMatrix, DensityMatrix};
use qmet_pauli::clifford::conjugation_residual;
use qmet_pauli::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> PauliString {
    s.parse().unwrap()
}

fn random_density(rng: &mut ChaCha8Rng, d: usize) -> DensityMatrix {
    let a = CMatrix::from_vec(d, (0..d * d).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect());
    let m = a.matmul(&a.dagger());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_re(1.0 / tr)).unwrap()
}

#[test]
fn enumerated_elements_are_symplectic_and_distinct() {
    for m in [1, 2] {
        let all = enumerate_clifford(m).unwrap();
        assert!(all.iter().all(|c| c.is_symplectic()));
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
    }
}

#[test]
fn group_order_matches_formula() {
    // |C_m / U(1)| = 2^{m² + 2m} ∏_{j=1..m} (4^j - 1)
    for m in [1u32, 2] {
        let mut order = 1u64 << (m * m + 2 * m);
        for j in 1..=m {
            order *= 4u64.pow(j) - 1;
        }
        assert_eq!(enumerate_clifford(m as usize).unwrap().len() as u64, order);
    }
}

#[test]
fn single_qubit_group_is_closed() {
    let all = enumerate_clifford(1).unwrap();
    let set: std::collections::HashSet<_> = all.iter().cloned().collect();
    for a in all {
        for b in all {
            assert!(set.contains(&a.compose(b)));
        }
    }
}

#[test]
fn conjugating_x_is_uniform_over_signed_paulis() {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for c in enumerate_clifford(1).unwrap() {
        *counts.entry(c.apply(&p("X")).to_string()).or_default() += 1;
    }
    assert_eq!(counts.len(), 6);
    assert!(counts.values().all(|&k| k == 4));
}

#[test]
fn two_qubit_group_maps_nonidentity_paulis_uniformly() {
    let all = enumerate_clifford(2).unwrap();
    for src in PauliString::all(2).filter(|q| !q.is_identity()) {
        let mut counts: HashMap<(u64, u64, u8), usize> = HashMap::new();
        for c in all {
            let r = c.apply(&src);
            *counts.entry((r.x_mask(), r.z_mask(), r.phase())).or_default() += 1;
        }
        // 15 nonidentity Paulis × 2 signs
        assert_eq!(counts.len(), 30);
        assert!(counts.values().all(|&k| k == 11520 / 30));
    }
}

#[test]
fn dense_reconstruction_matches_tableau() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for m in 1..=3 {
        for _ in 0..10 {
            let c = random_clifford(m, &mut rng);
            let u = clifford_to_matrix(&c).unwrap();
            assert!(u.is_unitary(1e-10));
            assert!(conjugation_residual(&c, &u) <= 1e-10);
        }
    }
    assert!(clifford_to_matrix(&random_clifford(4, &mut rng)).is_err());
}

#[test]
fn generator_tableaux_match_dense_gates() {
    let r = 0.5f64.sqrt();
    let h = CMatrix::from_real(2, &[r, r, r, -r]);
    let s = CMatrix::diag(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0)]);
    for q in 0..3 {
        assert!(conjugation_residual(&CliffordElement::hadamard(3, q), &embed_1q(&h, q, 3)) < 1e-14);
        assert!(conjugation_residual(&CliffordElement::phase_gate(3, q), &embed_1q(&s, q, 3)) < 1e-14);
    }
}

#[test]
fn sampler_is_uniform_on_one_qubit() {
    let all = enumerate_clifford(1).unwrap();
    let index: HashMap<_, _> = all.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let mut counts = vec![0usize; 24];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 240_000;
    for _ in 0..draws {
        counts[index[&random_clifford(1, &mut rng)]] += 1;
    }
    let mean = draws as f64 / 24.0;
    let sigma = (mean * (1.0 - 1.0 / 24.0)).sqrt();
    for k in counts {
        assert!((k as f64 - mean).abs() <= 5.0 * sigma, "count {k}");
    }
}

#[test]
fn sampler_is_uniform_on_two_qubits() {
    let all = enumerate_clifford(2).unwrap();
    let index: HashMap<_, _> = all.iter().enumerate().map(|(i, c)| (c.clone(), i)).collect();
    let mut counts = vec![0usize; all.len()];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws = 1_000_000;
    for _ in 0..draws {
        counts[index[&random_clifford(2, &mut rng)]] += 1;
    }
    let k = all.len() as f64;
    let mean = draws as f64 / k;
    let sigma = (mean * (1.0 - 1.0 / k)).sqrt();
    let mut chi2 = 0.0;
    for &c in &counts {
        assert!((c as f64 - mean).abs() <= 5.0 * sigma, "count {c}");
        chi2 += (c as f64 - mean).powi(2) / mean;
    }
    // χ² with k - 1 dof has standard deviation sqrt(2(k - 1))
    assert!((chi2 - (k - 1.0)).abs() <= 5.0 * (2.0 * (k - 1.0)).sqrt(), "chi2 {chi2}");
}

#[test]
fn sampler_is_deterministic() {
    let a = random_clifford(5, &mut ChaCha8Rng::seed_from_u64(1));
    let b = random_clifford(5, &mut ChaCha8Rng::seed_from_u64(1));
    assert_eq!(a, b);
    assert!(random_clifford(3, &mut ChaCha8Rng::seed_from_u64(2)).is_symplectic());
}

#[test]
fn twirl_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rho = random_density(&mut rng, 4);
    assert!(verify_twirl(TwirlKind::Pauli, &p("XI"), &p("ZI"), &rho).unwrap() <= 1e-10);
    assert!(verify_twirl(TwirlKind::LocalClifford, &p("XY"), &p("XZ"), &rho).unwrap() <= 1e-10);
    assert!(verify_twirl(TwirlKind::Clifford, &p("XY"), &p("IZ"), &rho).unwrap() <= 1e-10);
    assert_eq!(verify_twirl(TwirlKind::Pauli, &p("XI"), &p("-XI"), &rho), Err(PauliError::EqualPaulis));
}

#[test]
fn twirls_vanish_for_all_distinct_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rho2 = random_density(&mut rng, 4);
    let rho3 = random_density(&mut rng, 8);
    let paulis2: Vec<_> = PauliString::all(2).collect();
    for a in &paulis2 {
        for b in &paulis2 {
            if a == b {
                continue;
            }
            for kind in [TwirlKind::Pauli, TwirlKind::Clifford, TwirlKind::LocalClifford] {
                assert!(verify_twirl(kind, a, b, &rho2).unwrap() <= 1e-10);
            }
        }
    }
    for (a, b) in [("XYZ", "XYI"), ("ZZZ", "IXY"), ("YII", "IIY")] {
        for kind in [TwirlKind::Pauli, TwirlKind::LocalClifford] {
            assert!(verify_twirl(kind, &p(a), &p(b), &rho3).unwrap() <= 1e-10);
        }
    }
    assert!(matches!(
        verify_twirl(TwirlKind::Clifford, &p("XYZ"), &p("XYI"), &rho3),
        Err(PauliError::TooLarge { .. })
    ));
}

#[test]
fn channel_coefficient_examples() {
    let id = channel_pauli_coeffs(&[CMatrix::identity(2)]).unwrap();
    assert_eq!(id.terms[0].len(), 1);
    assert!((id.terms[0][0].0 - C64::new(1.0, 0.0)).norm() < 1e-15);
    assert!(id.terms[0][0].1.is_identity());

    let depol: Vec<CMatrix> = PauliString::all(1).map(|q| q.to_matrix().scale_re(0.5)).collect();
    let ch = channel_pauli_coeffs(&depol).unwrap();
    for (_, w) in ch.weights() {
        assert!((w - 0.25).abs() < 1e-15);
    }
    assert!((ch.completeness() - 1.0).abs() < 1e-12);

    let pr = 0.3f64;
    let deph = [CMatrix::identity(2).scale_re((1.0 - pr).sqrt()), p("Z").to_matrix().scale_re(pr.sqrt())];
    let ch = channel_pauli_coeffs(&deph).unwrap();
    assert_eq!(ch.terms[0].len(), 1);
    assert!((ch.terms[0][0].0.re - (1.0 - pr).sqrt()).abs() < 1e-15);
    assert_eq!(ch.terms[1][0].1, p("Z"));
    assert!((ch.terms[1][0].0.re - pr.sqrt()).abs() < 1e-15);

    assert!(matches!(
        channel_pauli_coeffs(&[CMatrix::identity(2).scale_re(0.9)]),
        Err(PauliError::NotTracePreserving(_))
    ));
}

fn random_kraus(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Vec<CMatrix> {
    // Stinespring: columns of a random isometry d -> k d
    let cols: Vec<Vec<C64>> = (0..d)
        .map(|_| (0..k * d).map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect())
        .collect();
    let mut ortho: Vec<Vec<C64>> = Vec::new();
    for mut c in cols {
        for o in &ortho {
            let proj: C64 = o.iter().zip(&c).map(|(a, b)| a.conj() * b).sum();
            for (ci, oi) in c.iter_mut().zip(o) {
                *ci -= proj * oi;
            }
        }
        let n = c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        ortho.push(c.into_iter().map(|x| x / n).collect());
    }
    (0..k).map(|a| CMatrix::from_fn(d, |i, j| ortho[j][a * d + i])).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_associative(a in 0u64..16, b in 0u64..16, c in 0u64..16, ph in 0u8..4) {
        let mk = |v: u64, s: u8| PauliString::from_masks(2, v & 3, v >> 2, s);
        let (x, y, z) = (mk(a, ph), mk(b, 0), mk(c, 3));
        prop_assert_eq!((x * y) * z, x * (y * z));
        let dense = x.to_matrix().matmul(&y.to_matrix());
        prop_assert!(dense.max_diff(&(x * y).to_matrix()) < 1e-14);
    }

    #[test]
    fn conjugation_preserves_commutation(seed in any::<u64>(), m in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_clifford(m, &mut rng);
        prop_assert!(c.is_symplectic());
        let full = (1u64 << m) - 1;
        for _ in 0..20 {
            let a = PauliString::hermitian(m, rng.gen::<u64>() & full, rng.gen::<u64>() & full, false);
            let b = PauliString::hermitian(m, rng.gen::<u64>() & full, rng.gen::<u64>() & full, false);
            let (ca, cb) = (clifford_apply(&c, &a).unwrap(), clifford_apply(&c, &b).unwrap());
            prop_assert_eq!(commutes(&a, &b).unwrap(), commutes(&ca, &cb).unwrap());
            prop_assert!(ca.is_hermitian());
            prop_assert_eq!(clifford_apply(&c, &(a * b)).unwrap(), ca * cb);
        }
    }

    #[test]
    fn composition_matches_dense_product(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_clifford(2, &mut rng);
        let b = random_clifford(2, &mut rng);
        let ua = clifford_to_matrix(&a).unwrap();
        let ub = clifford_to_matrix(&b).unwrap();
        prop_assert!(conjugation_residual(&a.compose(&b), &ua.matmul(&ub)) < 1e-10);
        prop_assert_eq!(a.compose(&a.inverse()), CliffordElement::identity(2));
    }

    #[test]
    fn pauli_expansion_reconstructs_kraus(seed in any::<u64>(), k in 1usize..4, n in 1usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kraus = random_kraus(&mut rng, 1 << n, k);
        let ch = channel_pauli_coeffs(&kraus).unwrap();
        prop_assert!((ch.completeness() - 1.0).abs() < 1e-9);
        for (alpha, a) in kraus.iter().enumerate() {
            prop_assert!(ch.reconstruct(alpha).max_diff(a) < 1e-10);
        }
    }
}
