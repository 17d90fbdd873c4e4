//! Limits, scaling laws and small-τ expansions of the closed forms.

use qmet_ecc::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn factors_examples() {
    let f = factors(1.0, 0.0, 0.4).unwrap();
    assert_eq!((f.r, f.y.re), (1.0, 0.0));
    assert!((f.phi - 0.4).abs() < 1e-15);
    let f = factors(0.0, 0.6, 0.5).unwrap();
    assert!((f.x_plus.re - 0.3f64.cosh()).abs() < 1e-14 && (f.y.re - 0.3f64.sinh()).abs() < 1e-14);
    // Δ = 0 against Δ = 1e-8 evaluated through the trigonometric branch
    let (g, d) = (1.0, 0.7);
    let at = factors(g, g, d).unwrap();
    let delta = 1e-8;
    let w = (g * g + delta * delta).sqrt();
    let near_y = g * (delta * d).sin() / delta;
    assert!((at.y.re - near_y).abs() < 1e-12);
    let near_xp_im = w * (delta * d).sin() / delta;
    assert!((at.x_plus.im - near_xp_im).abs() < 1e-12);
    assert!(factors(1.0, 1.0, -1.0).is_err());
}

#[test]
fn r_below_one_on_grid() {
    let mut count = 0;
    for i in 0..10 {
        for j in 0..10 {
            for k in 0..10 {
                let w = 10f64.powf(-2.0 + 4.0 * i as f64 / 9.0);
                let g = 10f64.powf(-2.0 + 4.0 * j as f64 / 9.0);
                let tau = 10f64.powf(-3.0 + 3.0 * k as f64 / 9.0);
                let f = factors(w, g, tau).unwrap();
                assert!(f.r < 1.0, "r = {} at ω={w} γ={g} τ={tau}", f.r);
                count += 1;
            }
        }
    }
    assert_eq!(count, 1000);
}

#[test]
fn no_ecc_short_time_coefficient() {
    for n in [5usize, 10] {
        let c = no_ecc_decay_fit(n, 1.0, 0.02).unwrap();
        let want = 2.0 - 4.0 / (3.0 * n as f64);
        assert!(rel(c, want) < 0.01, "n={n}: {c} vs {want}");
    }
}

#[test]
fn noiseless_limits() {
    let params = EccParams::new(5, 0.9, 0.0, 0.1, 0.5);
    let hl = params.heisenberg();
    for q in [qfi_parity_ideal(&params).unwrap(), qfi_bitflip(&params).unwrap(), qfi_no_ecc(5, 0.9, 0.0, 0.5).unwrap()] {
        assert!(rel(q, hl) < 1e-9);
    }
}

#[test]
fn ideal_small_tau_diagnostics() {
    let (n, w, g, t) = (4usize, 1.0, 1.0, 0.5);
    let mut prev_f = f64::NAN;
    let mut prev_r = f64::NAN;
    for tau in [0.01, 0.005, 0.0025] {
        let params = EccParams::new(n, w, g, tau, t);
        let d = ideal_diagnostics(&params).unwrap();
        let ef = (d.f - (1.0 - 2.0 * g * tau)).abs();
        let er = (d.r_pow - (1.0 - (4.0 / 3.0) * n as f64 * (w * tau).powi(2) * g * t)).abs();
        if prev_f.is_finite() {
            // O(τ²) and O(τ³) remainders
            assert!(prev_f / ef > 3.5 && prev_f / ef < 4.5, "f ratio {}", prev_f / ef);
            assert!(prev_r / er > 7.0 && prev_r / er < 9.0, "r ratio {}", prev_r / er);
        }
        prev_f = ef;
        prev_r = er;
    }
}

/// f = 1 − 2γτ + (7/3)γ²τ² + 4γτ²/(3nt) + O(τ³).
#[test]
fn ideal_f_second_order_coefficient() {
    let (n, w, g) = (3usize, 1.0, 1.0);
    for k in [10u32, 100] {
        for tau in [1e-3, 5e-4] {
            let t = k as f64 * tau;
            let d = ideal_diagnostics(&EccParams::new(n, w, g, tau, t)).unwrap();
            let second = (d.f - (1.0 - 2.0 * g * tau)) / (tau * tau);
            let want = (7.0 / 3.0) * g * g + 4.0 * g / (3.0 * n as f64 * t);
            assert!(rel(second, want) < 5e-3, "k={k} τ={tau}: {second} vs {want}");
        }
    }
}

#[test]
fn noisy_ancilla_limits_and_sandwich() {
    let params = EccParams::new(3, 1.0, 0.5, 0.1, 0.5);
    let na = qfi_parity_noisy_ancilla(&params).unwrap();
    assert!(rel(na.qfi, qfi_parity_ideal(&params).unwrap()) < 1e-12);
    assert!(na.g_estimate.is_none());
    let c = 10.0;
    for n in [2usize, 3, 4] {
        for tau in [0.02, 0.01, 0.005] {
            for k in [10u32, 100] {
                let t = k as f64 * tau;
                let params = EccParams::new(n, 1.0, 1.0, tau, t).with_xi(1e-5);
                let g = qfi_parity_noisy_ancilla(&params).unwrap().g_estimate.unwrap();
                let lo = (2.0 / 3.0 - 7.0 * tau) * t - c * tau * tau;
                let hi = 2.5 * (t + tau) + c * tau * tau;
                assert!(lo <= g && g <= hi, "n={n} τ={tau} t={t}: {lo} ≤ {g} ≤ {hi}");
            }
        }
    }
}

#[test]
fn noisy_ancilla_lowers_the_curve() {
    for tau in [1e-5, 1e-4, 1e-3] {
        let base = EccParams::new(25, 20.0, 1.0, tau, 1e3 * tau);
        let q1 = qfi_parity_ideal(&base).unwrap();
        let q2 = qfi_parity_noisy_ancilla(&base.with_xi(1e-4)).unwrap().qfi;
        assert!(q2 < q1, "τ={tau}");
    }
}

#[test]
fn imperfect_limits() {
    let base = EccParams::new(3, 1.0, 0.4, 0.1, 0.5);
    assert!(rel(qfi_parity_imperfect(&base).unwrap(), qfi_parity_ideal(&base).unwrap()) < 1e-12);
    let p = 0.01;
    let params = EccParams::new(25, 1.0, 1.0, 1e-6, 1e-2).with_p(p);
    let norm = qfi_parity_imperfect(&params).unwrap() / params.heisenberg();
    assert!((norm - (1.0 - 2.0 * p).powi(2)).abs() < 1e-4, "{norm}");
}

#[test]
fn imperfect_single_qubit_q_law() {
    // for n = 1 the linear coefficient is 4p(1 − p)ω²t
    let (w, g, t, p) = (1.0, 0.5, 0.4, 0.05);
    for tau in [0.002, 0.001] {
        let d = imperfect_diagnostics(&EccParams::new(1, w, g, tau, t).with_p(p)).unwrap();
        assert!((d.q_pow - (1.0 - 4.0 * p * (1.0 - p) * w * w * t * tau)).abs() < 10.0 * tau * tau);
    }
}

#[test]
fn imperfect_small_tau_laws() {
    let (n, w, g, t, p) = (3usize, 1.0, 0.5, 0.4, 0.05);
    let mut prev = (f64::NAN, f64::NAN);
    for tau in [0.01, 0.005, 0.0025, 0.00125] {
        let d = imperfect_diagnostics(&EccParams::new(n, w, g, tau, t).with_p(p)).unwrap();
        // |q|^{2nt/τ} = (1 − 4p(1 − p)sin²φ)^{nt/τ}, so the linear term carries n
        let eq = (d.q_pow - (1.0 - 4.0 * p * (1.0 - p) * n as f64 * w * w * t * tau)).abs();
        let f = ideal_diagnostics(&EccParams::new(n, w, g, tau, t)).unwrap().f;
        let law = (1.0 - 2.0 * p).powi(2) * f + 4.0 * p * ((1.0 - p) / n as f64 + 1.0 - 2.0 * p) * (tau / t);
        let eh = (d.h - law).abs();
        assert!(eq < 10.0 * tau * tau && eh < 10.0 * tau * tau, "τ={tau}: {eq} {eh}");
        if prev.0.is_finite() {
            assert!(prev.0 / eq > 3.0, "q law ratio {}", prev.0 / eq);
            assert!(prev.1 / eh > 3.0, "h law ratio {}", prev.1 / eh);
        }
        prev = (eq, eh);
    }
}

#[test]
fn bitflip_approaches_ideal_code() {
    for n in [3usize, 5] {
        let order = (n as f64 - 1.0) / 2.0;
        let mut prev = f64::NAN;
        for tau in [0.05, 0.025, 0.0125] {
            let params = EccParams::new(n, 1.0, 1.0, tau, 1.0);
            let d = rel(qfi_bitflip(&params).unwrap(), qfi_parity_ideal(&params).unwrap());
            if prev.is_finite() {
                let ratio = prev / d;
                assert!(ratio >= 2f64.powf(order - 0.5) && ratio <= 2f64.powf(order + 0.5), "n={n} ratio {ratio}");
            }
            prev = d;
        }
    }
}

#[test]
fn optimal_time_examples() {
    let params = EccParams::new(25, 1.0, 0.05, 0.01, 0.01);
    let (ta, _) = optimal_time(&params).unwrap();
    assert!((ta - 12000.0).abs() < 1e-6);
    let (ta2, _) = optimal_time(&EccParams::new(25, 1.0, 0.05, 0.02, 0.02)).unwrap();
    assert!(rel(ta2, ta / 4.0) < 1e-12);
    let (ta, tn) = optimal_time(&EccParams::new(4, 1.0, 0.05, 0.01, 0.01)).unwrap();
    assert!(rel(tn, ta) < 0.1, "{tn} vs {ta}");
    assert!(matches!(optimal_time(&params.with_p(0.1)), Err(EccError::WrongSpecialization(_))));
}

#[test]
fn fisher_on_phase_quadrature_saturates_qfi() {
    let params = EccParams::new(3, 1.0, 1.0, 1e-3, 0.1);
    let s = parity_state(&params).unwrap();
    let q = qfi_parity_ideal(&params).unwrap();
    let fi = fisher_alpha(&params, s.theta + std::f64::consts::FRAC_PI_2).unwrap();
    assert!(rel(fi, q) < 1e-3, "{fi} vs {q}");
    let pure = EccParams::new(3, 1.0, 0.0, 0.1, 0.5);
    let s = parity_state(&pure).unwrap();
    let fi = fisher_alpha(&pure, s.theta + std::f64::consts::FRAC_PI_2).unwrap();
    assert!(rel(fi, pure.heisenberg()) < 1e-9);
}

/// Outcome-probability Fisher information against a finite difference of
/// the explicit distribution.
#[test]
fn fisher_matches_pmf_finite_difference() {
    use qmet_estimation::{fisher_information, Pmf};
    let base = EccParams::new(3, 1.2, 0.8, 0.05, 0.5);
    let m = base.n + 1;
    for alpha_shift in [0.0, 0.4, 1.2] {
        let s = parity_state(&base).unwrap();
        let alpha = s.theta + alpha_shift;
        let pmf = Pmf::unlabelled(m + 1, move |w| {
            let st = parity_state(&base.with_omega(w)).unwrap();
            let x = st.r * (st.theta - alpha).cos();
            let mut binom = 1.0;
            (0..=m)
                .map(|j| {
                    if j > 0 {
                        binom *= (m + 1 - j) as f64 / j as f64;
                    }
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    binom * (1.0 + sign * x) / 2f64.powi(m as i32)
                })
                .collect()
        });
        let fd = fisher_information(&pmf, base.omega, 1e-5);
        let fi = fisher_alpha(&base, alpha).unwrap();
        assert!(rel(fi, fd) < 1e-6, "shift {alpha_shift}: {fi} vs {fd}");
    }
}

/// The compact FI is Ẋ²/(1 − X²) with X = R cos(θ − α); the reading with a
/// single cosine in the denominator does not match the distribution.
#[test]
fn fisher_compact_form_uses_cos_squared() {
    let base = EccParams::new(2, 1.0, 0.6, 0.1, 0.4);
    let s = parity_state(&base).unwrap();
    let alpha = s.theta + 0.7;
    let (sn, cs) = (s.theta - alpha).sin_cos();
    let x = s.r * cs;
    let dx = s.dr * cs - s.r * s.dtheta * sn;
    let fi = fisher_alpha(&base, alpha).unwrap();
    assert!(rel(fi, dx * dx / (1.0 - x * x)) < 1e-10);
    assert!(rel(fi, dx * dx / (1.0 - s.r * s.r * cs)) > 1e-3);
}

#[test]
fn coherence_examples() {
    let c = coherence_report(1.0).unwrap();
    assert_eq!((c.g, c.purity, c.entropy), (0.5, 1.0, 0.0));
    let c = coherence_report(0.0).unwrap();
    assert_eq!((c.g, c.purity), (0.0, 0.5));
    assert!((c.entropy - std::f64::consts::LN_2).abs() < 1e-15);
    assert!((coherence_report(0.6).unwrap().g - 0.1).abs() < 1e-15);
    assert!(coherence_report(1.1).is_err());
}

#[test]
fn rank2_examples() {
    assert_eq!(rank2_qfi(&Rank2State::new(1.0, 0.0, 0.0, 12.0)).unwrap(), 144.0);
    assert_eq!(rank2_qfi(&Rank2State::new(0.0, 0.0, 0.3, 5.0)).unwrap(), 0.09);
    assert!((rank2_qfi(&Rank2State::new(0.6, 0.0, 0.1, 2.0)).unwrap() - 1.455625).abs() < 1e-14);
    assert!(matches!(rank2_qfi(&Rank2State::new(1.0, 0.0, 0.1, 1.0)), Err(EccError::SingularPurity { .. })));
}

/// Normalized ideal-code QFI for n = 25: a plateau near the Heisenberg limit
/// at small τ, then a collapse. For ω/γ = 20 the half-height point sits where
/// (4/3)nω²τ²γt is of order one.
#[test]
fn collapse_curve_shape() {
    for ratio in [20.0, 0.05] {
        for k in [1e3, 1e6] {
            let norm = |tau: f64| {
                let p = EccParams::new(25, ratio, 1.0, tau, k * tau);
                qfi_parity_ideal(&p).unwrap() / p.heisenberg()
            };
            let taus: Vec<f64> = (0..=40).map(|i| 10f64.powf(-8.0 + 8.0 * i as f64 / 40.0)).collect();
            let vals: Vec<f64> = taus.iter().map(|&t| norm(t)).collect();
            assert!(vals[0] > 0.99, "no plateau for ω/γ={ratio}, t={k}τ: {}", vals[0]);
            assert!(*vals.last().unwrap() < 0.1, "no collapse for ω/γ={ratio}, t={k}τ");
            let onset = collapse_onset(25, ratio, 1.0, k as u64).unwrap();
            if ratio == 20.0 {
                let stat = (4.0 / 3.0) * 25.0 * ratio * ratio * onset * onset * k * onset;
                assert!((0.3..=3.0).contains(&stat), "ω/γ={ratio} t={k}τ: {stat}");
            }
        }
    }
}
