use proptest::prelude::*;
use qmet_ecc::*;

fn params() -> impl Strategy<Value = EccParams> {
    (1usize..=12, 0.01f64..30.0, 0.0f64..5.0, 0.0f64..2.0, 0.0f64..=0.5, 1e-4f64..0.3, 0u32..200).prop_map(
        |(n, w, g, xi, p, tau, k)| EccParams { n, omega: w, gamma: g, xi, p, tau, t: k as f64 * tau },
    )
}

fn in_bounds(q: f64, params: &EccParams) -> bool {
    q >= -1e-8 && q <= params.heisenberg() * (1.0 + 1e-6) + 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parity_qfi_is_bounded(p in params()) {
        let q = qfi_parity(&p).unwrap();
        prop_assert!(in_bounds(q, &p), "{q} vs {}", p.heisenberg());
    }

    #[test]
    fn specializations_are_bounded(p in params()) {
        let ideal = EccParams { xi: 0.0, p: 0.0, ..p };
        prop_assert!(in_bounds(qfi_parity_ideal(&ideal).unwrap(), &ideal));
        let imperfect = EccParams { xi: 0.0, ..p };
        prop_assert!(in_bounds(qfi_parity_imperfect(&imperfect).unwrap(), &imperfect));
        let noisy = EccParams { p: 0.0, ..p };
        prop_assert!(in_bounds(qfi_parity_noisy_ancilla(&noisy).unwrap().qfi, &noisy));
        if p.n % 2 == 1 {
            prop_assert!(in_bounds(qfi_bitflip(&ideal).unwrap(), &ideal));
        }
        if p.n <= 12 {
            prop_assert!(in_bounds(qfi_no_ecc(p.n, p.omega, p.gamma, p.t).unwrap(), &p));
        }
    }

    #[test]
    fn general_agrees_with_specializations(p in params()) {
        let imperfect = EccParams { xi: 0.0, ..p };
        let a = qfi_parity(&imperfect).unwrap();
        let b = qfi_parity_imperfect(&imperfect).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a.abs().max(b.abs()).max(1e-12), "{a} vs {b}");
    }

    #[test]
    fn entanglement_identity(r in 0.0f64..=1.0, dtheta in -50.0f64..50.0) {
        let g = coherence_report(r).unwrap().g;
        let lhs = r * r * dtheta * dtheta;
        let rhs = 4.0 * g * (1.0 - g) * dtheta * dtheta;
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + dtheta * dtheta));
    }

    #[test]
    fn single_interval_r_below_one(w in 1e-3f64..100.0, g in 1e-3f64..10.0, tau in 1e-4f64..1.0) {
        let f = factors(w, g, tau).unwrap();
        prop_assert!(f.r < 1.0 && f.r >= 0.0);
    }
}

#[test]
fn sweeps_are_deterministic() {
    let (base, code) = preset("nv-benchmark").unwrap();
    let spec: SweepSpec = "t:1e-6:1e-3:40:log".parse().unwrap();
    let render = || {
        let rows = run_sweep(&base, code, &spec, false).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows, false).unwrap();
        buf
    };
    assert_eq!(render(), render());
}
