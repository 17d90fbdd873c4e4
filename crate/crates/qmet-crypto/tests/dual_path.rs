//! Pauli casework against brute-force key enumeration, and sampling against both.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use qmet_crypto::attack::unitary_from_generator;
use qmet_crypto::dense::apply_local;
use qmet_crypto::delegated::ideal_distribution;
use qmet_crypto::instance::ghz;
use qmet_crypto::*;
use qmet_dense::{CMatrix, DensityMatrix};
use qmet_pauli::PauliString;

const DUAL_TOL: f64 = 1e-9;

fn small_sizes() -> Vec<(usize, usize)> {
    vec![(1, 1), (2, 1), (1, 2)]
}

/// A non-Pauli unitary attack exp(−iφH) with H a fixed sum of Paulis.
fn rotation_attack(m: usize, phi: f64) -> AttackSpec {
    let mut h = CMatrix::zeros(1 << m);
    for (k, p) in PauliString::all(m).skip(1).step_by(5).enumerate() {
        h += &p.to_matrix().scale_re(0.3 + 0.1 * k as f64);
    }
    AttackSpec::unitary(unitary_from_generator(&h, phi).unwrap())
}

#[test]
fn trap_single_casework_matches_dense_enumeration() {
    for (n, t) in small_sizes() {
        let inst = Instance::ghz(n, t).unwrap();
        let m = n + t;
        let mut attacks = attack_battery(m, 11);
        attacks.push(("rotation".into(), rotation_attack(m, 0.4)));
        for (name, a) in attacks {
            let exact = soundness_trap_single(&inst, &a, Mode::Exact).unwrap();
            let dense = soundness_trap_single(&inst, &a, Mode::Dense).unwrap();
            assert!((exact.lhs - dense.lhs).abs() < DUAL_TOL, "{name} at ({n},{t}): {} vs {}", exact.lhs, dense.lhs);
            assert!((exact.accept_rate - dense.accept_rate).abs() < DUAL_TOL, "{name} acceptance");
        }
    }
}

#[test]
fn trap_double_casework_matches_dense_enumeration() {
    let theta = 0.37;
    for (n, t) in small_sizes() {
        let inst = Instance::ghz(n, t).unwrap();
        let m = n + t;
        let battery = attack_battery(m, 5);
        let pairs: Vec<(AttackSpec, AttackSpec)> = battery
            .iter()
            .step_by(7)
            .zip(battery.iter().rev().step_by(5))
            .map(|(a, b)| (a.1.clone(), b.1.clone()))
            .chain(std::iter::once({
                let g = rotation_attack(m, 0.8);
                (g.clone(), g.adjoint())
            }))
            .collect();
        for (g1, g2) in pairs {
            let exact = soundness_double(Protocol::Trap, &inst, &g1, &g2, theta, Mode::Exact).unwrap();
            let dense = soundness_double(Protocol::Trap, &inst, &g1, &g2, theta, Mode::Dense).unwrap();
            assert!((exact.lhs - dense.lhs).abs() < DUAL_TOL, "({n},{t}) {g1} / {g2}: {} vs {}", exact.lhs, dense.lhs);
            assert!((exact.accept_rate - dense.accept_rate).abs() < DUAL_TOL);
        }
    }
}

#[test]
fn replay_attack_is_detected_within_the_bound() {
    // Γ₂ = Γ₁† undoes the first attack only if the same key were used twice
    let inst = Instance::ghz(2, 1).unwrap();
    let g = rotation_attack(3, 1.1);
    let r = soundness_double(Protocol::Trap, &inst, &g, &g.adjoint(), 0.5, Mode::Dense).unwrap();
    assert!(r.lhs > 1e-3, "replay attack should leave a trace, lhs = {}", r.lhs);
    assert!(r.within_bound());
}

#[test]
fn clifford_closed_forms_match_group_enumeration() {
    let inst = Instance::ghz(1, 1).unwrap();
    let mut attacks = attack_battery(2, 3);
    attacks.push(("rotation".into(), rotation_attack(2, 0.6)));
    for (name, a) in &attacks {
        let exact = soundness_clifford_single(&inst, a, Mode::Exact).unwrap();
        let dense = soundness_clifford_single(&inst, a, Mode::Dense).unwrap();
        assert!((exact.lhs - dense.lhs).abs() < DUAL_TOL, "{name}: {} vs {}", exact.lhs, dense.lhs);
        assert!((exact.accept_rate - dense.accept_rate).abs() < DUAL_TOL);
    }
    for (i, (_, g1)) in attacks.iter().enumerate().step_by(3) {
        let g2 = &attacks[(i * 7 + 2) % attacks.len()].1;
        let exact = soundness_double(Protocol::Clifford, &inst, g1, g2, 0.9, Mode::Exact).unwrap();
        let dense = soundness_double(Protocol::Clifford, &inst, g1, g2, 0.9, Mode::Dense).unwrap();
        assert!((exact.lhs - dense.lhs).abs() < DUAL_TOL, "{g1} / {g2}: {} vs {}", exact.lhs, dense.lhs);
    }
}

#[test]
fn clifford_double_at_zero_identity_weight_is_not_zero() {
    // both attacks always act nontrivially; the output still overlaps the ideal state
    let inst = Instance::ghz(1, 1).unwrap();
    let a: AttackSpec = "pauli:XX".parse().unwrap();
    let exact = soundness_double(Protocol::Clifford, &inst, &a, &a, 0.2, Mode::Exact).unwrap();
    let dense = soundness_double(Protocol::Clifford, &inst, &a, &a, 0.2, Mode::Dense).unwrap();
    assert!(exact.lhs > 0.01);
    assert!((exact.lhs - dense.lhs).abs() < DUAL_TOL);
}

#[test]
fn reused_key_casework_matches_dense_enumeration() {
    for (n, t) in small_sizes() {
        let inst = Instance::ghz(n, t).unwrap();
        let m = n + t;
        for (_, a) in attack_battery(m, 2).into_iter().step_by(4) {
            let exact = reused_key_lhs(&inst, &a, &a, 1.2).unwrap();
            let dense = reused_key_lhs_dense(&inst, &a, &a, 1.2).unwrap();
            assert!((exact.lhs - dense.lhs).abs() < DUAL_TOL, "{a}: {} vs {}", exact.lhs, dense.lhs);
        }
    }
}

#[test]
fn reusing_one_key_breaks_the_two_use_bound() {
    // one data qubit, five flags, Γ₁ = Γ₂ = X on every qubit, θ = π/2.
    // The shared key turns X^6 into the same Pauli L on the data qubit twice:
    // L = Z commutes with the imprint and cancels, L ∈ {X, Y} reverses it,
    // leaving cos θ = 0 overlap. Flags always return to |0>, so lhs = 2/3.
    let inst = Instance::ghz(1, 5).unwrap();
    let x6: AttackSpec = "pauli:XXXXXX".parse().unwrap();
    let broken = reused_key_lhs(&inst, &x6, &x6, PI / 2.0).unwrap();
    assert!((broken.lhs - 2.0 / 3.0).abs() < 1e-12, "lhs = {}", broken.lhs);
    assert!((broken.bound - 0.45).abs() < 1e-15);
    assert!(broken.lhs > broken.bound);
    let honest = soundness_double(Protocol::Trap, &Instance::ghz(1, 3).unwrap(), &"pauli:XXXX".parse().unwrap(), &"pauli:XXXX".parse().unwrap(), PI / 2.0, Mode::Exact).unwrap();
    assert!(honest.within_bound());
}

fn within_4_sigma(sampled: &SoundnessReport, exact: f64) -> bool {
    let ReportMode::Sampled { stderr, .. } = sampled.mode else { panic!("not sampled") };
    (sampled.lhs - exact).abs() <= 4.0 * stderr + 1e-12
}

#[test]
fn sampling_agrees_with_exact_values() {
    let inst = Instance::ghz(2, 2).unwrap();
    let sampled = Mode::Sampled { trials: 20_000, seed: 17 };
    for spec in ["mix:0.5*IIII,0.3*XIZI,0.2*YYII", "depol:0.6", "pauli:ZIXI"] {
        let a: AttackSpec = spec.parse().unwrap();
        let e = soundness_trap_single(&inst, &a, Mode::Exact).unwrap();
        let s = soundness_trap_single(&inst, &a, sampled).unwrap();
        assert!(within_4_sigma(&s, e.lhs), "trap {spec}: {} vs {}", s.lhs, e.lhs);
        let e = soundness_clifford_single(&inst, &a, Mode::Exact).unwrap();
        let s = soundness_clifford_single(&inst, &a, sampled).unwrap();
        assert!(within_4_sigma(&s, e.lhs), "clifford {spec}: {} vs {}", s.lhs, e.lhs);
        let e = soundness_double(Protocol::Trap, &inst, &a, &a, 0.7, Mode::Exact).unwrap();
        let s = soundness_double(Protocol::Trap, &inst, &a, &a, 0.7, sampled).unwrap();
        assert!(within_4_sigma(&s, e.lhs), "trap double {spec}: {} vs {}", s.lhs, e.lhs);
        let e = soundness_double(Protocol::Clifford, &inst, &a, &a, 0.7, Mode::Exact).unwrap();
        let s = soundness_double(Protocol::Clifford, &inst, &a, &a, 0.7, sampled).unwrap();
        assert!(within_4_sigma(&s, e.lhs), "clifford double {spec}: {} vs {}", s.lhs, e.lhs);
    }
}

#[test]
fn sampling_is_reproducible() {
    let inst = Instance::ghz(3, 2).unwrap();
    let a: AttackSpec = "depol:0.3".parse().unwrap();
    let mode = Mode::Sampled { trials: 3000, seed: 99 };
    let r1 = soundness_trap_single(&inst, &a, mode).unwrap();
    let r2 = soundness_trap_single(&inst, &a, mode).unwrap();
    assert_eq!(r1, r2);
    let other = soundness_trap_single(&inst, &a, Mode::Sampled { trials: 3000, seed: 100 }).unwrap();
    assert_ne!(r1.lhs, other.lhs);
}

#[test]
fn sampled_mode_reaches_ten_qubits() {
    let inst = Instance::ghz(7, 3).unwrap();
    let a: AttackSpec = "depol:0.5".parse().unwrap();
    let r = soundness_trap_single(&inst, &a, Mode::Sampled { trials: 2000, seed: 1 }).unwrap();
    assert!(r.lhs <= r.bound);
    assert!(soundness_trap_single(&Instance::ghz(8, 3).unwrap(), &a, Mode::Sampled { trials: 10, seed: 1 }).is_err());
}

fn measure_all(rho: &CMatrix, basis: usize) -> Vec<f64> {
    use qmet_dense::matrix::pauli_1q;
    // rotate each qubit so that the basis letter becomes Z
    let h = CMatrix::from_fn(2, |i, j| C64::new(if i == 1 && j == 1 { -1.0 } else { 1.0 } * std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let sdag = CMatrix::diag(&[C64::new(1.0, 0.0), C64::new(0.0, -1.0)]);
    let v = match basis {
        1 => h,
        2 => h.matmul(&sdag),
        _ => CMatrix::identity(2),
    };
    assert!(v.sandwich(&pauli_1q(basis)).max_diff(&pauli_1q(3)) < 1e-12);
    let n = rho.dim().trailing_zeros() as usize;
    let ops: Vec<Option<&CMatrix>> = (0..n).map(|_| Some(&v)).collect();
    let r = apply_local(rho, &ops);
    (0..rho.dim()).map(|k| r[(k, k)].re).collect()
}

#[test]
fn delegated_statistics_equal_measuring_the_decrypted_state() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let psi = qmet_crypto::instance::phase_encode(&ghz(2), 0.6);
    let rho = DensityMatrix::from_pure(&psi);
    let attacks: Vec<AttackSpec> = vec![
        "mix:0.6*IIII,0.4*XYIZ".parse().unwrap(),
        "depol:0.5".parse().unwrap(),
        rotation_attack(4, 0.7),
    ];
    for a in &attacks {
        for (basis, letter) in [('X', 1), ('Y', 2), ('Z', 3)] {
            let key = TrapKey::random(4, 2, &mut rng).unwrap();
            let round = delegated_measurement_round(&rho, basis, &key, a).unwrap();
            let trap = trap_round_single(&psi, &key, a).unwrap();
            assert!((round.accept_prob - trap.accept_prob).abs() < 1e-12);
            let want = measure_all(trap.output.as_ref().unwrap().matrix(), letter);
            for (g, w) in round.outcomes.iter().zip(&want) {
                assert!((g - w).abs() < 1e-10, "{a} basis {basis}");
            }
        }
    }
}

#[test]
fn delegated_full_depolarization_accepts_two_to_minus_t() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let rho = DensityMatrix::from_pure(&ghz(2));
    for t in 1..=3 {
        let key = TrapKey::random(2 + t, t, &mut rng).unwrap();
        let r = delegated_measurement_round(&rho, 'X', &key, &AttackSpec::Depolarizing(1.0)).unwrap();
        assert!((r.accept_prob - 0.5f64.powi(t as i32)).abs() < 1e-12);
    }
    let key = TrapKey::random(3, 1, &mut rng).unwrap();
    let r = delegated_measurement_round(&rho, 'X', &key, &AttackSpec::Identity).unwrap();
    for (g, w) in r.outcomes.iter().zip(ideal_distribution(&ghz(2), 1)) {
        assert!((g - w).abs() < 1e-12);
    }
}

#[test]
fn measured_soundness_never_exceeds_state_soundness() {
    let psi = qmet_crypto::instance::phase_encode(&ghz(2), 0.4);
    let inst = Instance::new(2, 1, psi.clone()).unwrap();
    for spec in ["pauli:XIZ", "mix:0.8*III,0.2*YYI", "depol:0.7"] {
        let a: AttackSpec = spec.parse().unwrap();
        let quantum = soundness_delegated(&inst, &a, Mode::Exact).unwrap();
        let measured = delegated_measured_lhs(&psi, 1, 'X', &a).unwrap();
        assert!(measured <= quantum.lhs + 1e-10, "{spec}: {measured} > {}", quantum.lhs);
        assert!(quantum.within_bound());
    }
}

#[test]
fn trap_round_examples() {
    let psi = ghz(2);
    let key = TrapKey::from_indices(vec![0], vec![3, 7, 20]).unwrap();
    let r = trap_round_single(&psi, &key, &AttackSpec::Identity).unwrap();
    assert!((r.accept_prob - 1.0).abs() < 1e-12);
    let out = r.output.unwrap();
    assert!(out.matrix().max_diff(&CMatrix::outer(&psi, &psi)) < 1e-12);
    let key = TrapKey::from_indices(vec![1, 2], vec![0, 13, 21, 8]).unwrap();
    let r = trap_round_single(&psi, &key, &AttackSpec::Depolarizing(1.0)).unwrap();
    assert!((r.accept_prob - 0.25).abs() < 1e-12);
    // Z on a flag is harmless exactly when its decryption has no X part
    let table = qmet_crypto::keys::local_table();
    for c in 0..24 {
        let key = TrapKey::from_indices(vec![2], vec![0, 0, c]).unwrap();
        let r = trap_round_single(&psi, &key, &"pauli:IIZ".parse().unwrap()).unwrap();
        let letter = table.conj_inv[c][3];
        let want = if letter == 3 { 1.0 } else { 0.0 };
        assert!((r.accept_prob - want).abs() < 1e-12);
    }
}

#[test]
fn privacy_holds_for_every_protocol() {
    let plus = vec![C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0); 2];
    let d = privacy_deviation(Protocol::Trap, &DensityMatrix::from_pure(&plus), 1).unwrap();
    assert!(d <= 1e-10, "trap {d}");
    let data = DensityMatrix::from_pure(&[C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
    let d = privacy_deviation(Protocol::Clifford, &data, 1).unwrap();
    assert!(d <= 1e-10, "clifford {d}");
    let d = privacy_deviation(Protocol::Delegated, &DensityMatrix::from_pure(&ghz(2)), 1).unwrap();
    assert!(d <= 1e-10, "delegated {d}");
    assert!(privacy_deviation(Protocol::Clifford, &DensityMatrix::from_pure(&ghz(2)), 1).is_err());
}
