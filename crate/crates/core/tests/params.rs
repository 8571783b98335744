use proptest::prelude::*;

use satbody_core::params::{
    certify_params, certify_params_q, default_n_blocks_q, net_cardinality_log, default_kappa, q_exponents, safe_exp,
    Constants, ParamCertificate,
};
use satbody_core::Error;

#[path = "../../cli/tests/support/params_oracle.rs"]
mod oracle;

#[test]
fn net_cardinality_examples() {
    let v = net_cardinality_log(100, 50, 1.0 / 80.0, 3.0).unwrap();
    assert!((v - 13_701.597).abs() < 1e-3, "{v}");
    assert_eq!(net_cardinality_log(64, 64, 0.01, 3.0).unwrap(), 0.0);
    assert!(net_cardinality_log(10, 11, 0.1, 3.0).is_err());
    assert!(net_cardinality_log(10, 5, 0.0, 3.0).is_err());
}

#[test]
fn exponents_have_closed_forms() {
    let cases = [
        (4.5, 9.0 / 7.0, 13.0 / 14.0, 11.0 / 14.0),
        (6.0, 6.0 / 5.0, 4.0 / 5.0, 7.0 / 10.0),
        (10.0, 10.0 / 9.0, 2.0 / 3.0, 11.0 / 18.0),
    ];
    for (q, p, beta, gamma) in cases {
        assert_eq!(q_exponents(q), (p, beta, gamma), "q={q}");
    }
}

#[test]
fn large_instance_is_feasible_with_ordered_terms() {
    let n = 1_000_000u64;
    let nf = n as f64;
    let big = (nf.powf(1.5) * nf.ln()).ceil() as u64;
    let cert = certify_params(n, n / 2, big, 1, &Constants::default()).unwrap();
    assert!(cert.feasible);
    let t = &cert.bounds.kmax_terms;
    let m = (n / 2) as f64;
    assert!((t[0] - m / nf.sqrt()).abs() < 1e-9);
    assert!((t[1] - m * m / (nf * (big as f64).ln())).abs() < 1e-6);
    assert!((t[2] - m * big as f64 / (nf * nf * nf.ln())).abs() < 1e-6);
    // N = n^{3/2} log n makes the first and third terms meet
    assert!((t[0] - t[2]).abs() / t[0] < 1e-6);
}

#[test]
fn kappa_defaults() {
    let c = Constants::default();
    let cert = certify_params(48, 36, 240, 2, &c).unwrap();
    assert_eq!(cert.kappa, default_kappa(48, 36, 2));
    assert_eq!(cert.ell, 80);
    assert!((cert.delta - 1.0 / (8.0 * 48f64.sqrt())).abs() < 1e-15);
    let q = certify_params_q(48, 36, Some(240), 2, 6.0, &c, false).unwrap();
    assert!((q.kappa - default_kappa(48, 36, 2) * 240f64.powf(-1.0 / 6.0)).abs() < 1e-15);
    assert!(q.q_details.as_ref().unwrap().unproven_bound.is_none());
}

#[test]
fn default_block_count_in_q_mode() {
    let c = Constants::default();
    let cert = certify_params_q(100, 80, None, 1, 6.0, &c, true).unwrap();
    let expected = (1000.0 * 100f64.ln()).powf(1.2).ceil() as u64;
    assert_eq!(cert.n_blocks, expected);
    assert_eq!(default_n_blocks_q(100, 6.0).unwrap(), expected);
    let d = cert.q_details.unwrap();
    assert!(d.default_n_blocks && d.proof_regime);
    assert_eq!(d.unproven_eta, Some(4.0 / 14.0));
}

#[test]
fn preconditions_are_reported() {
    let c = Constants::default();
    for r in [
        certify_params(100, 50, 100, 0, &c),
        certify_params(100, 50, 100, 51, &c),
        certify_params(100, 101, 200, 1, &c),
        certify_params(100, 50, 99, 1, &c),
    ] {
        assert!(matches!(r, Err(Error::Precondition(_))), "{r:?}");
    }
    assert!(certify_params_q(100, 50, Some(200), 1, 2.0, &c, false).is_err());
    let bad = Constants {
        c2: -1.0,
        ..Constants::default()
    };
    assert!(certify_params(100, 50, 200, 1, &bad).is_err());
}

#[test]
fn probabilities_are_stored_as_logs() {
    // e^{-9n/32} underflows at n = 4000; the log stays exact
    let cert = certify_params(4000, 3000, 1_000_000, 1, &Constants::default()).unwrap();
    assert_eq!(cert.bounds.omega1_bound, 0.0);
    let expected = 1e6f64.ln() - 9.0 * 4000.0 / 32.0;
    assert!((cert.bounds.log_omega1 - expected).abs() < 1e-9);
    assert_eq!(safe_exp(-750.0), 0.0);
    assert!(safe_exp(700.0).is_finite());
}

#[test]
fn certificate_round_trips_through_json() {
    let c = Constants::default();
    for cert in [
        certify_params(48, 36, 240, 2, &c).unwrap(),
        certify_params_q(200, 150, Some(5000), 2, 6.0, &c, true).unwrap(),
    ] {
        let s = serde_json::to_string(&cert).unwrap();
        let back: ParamCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back.feasible, cert.feasible);
        assert_eq!(back.checks, cert.checks);
        assert_eq!(back.n_blocks, cert.n_blocks);
        assert!((back.kappa - cert.kappa).abs() <= 1e-15 * cert.kappa);
    }
}

#[test]
fn q_table_lists_exponents() {
    let cert = certify_params_q(200, 150, Some(5000), 2, 6.0, &Constants::default(), false).unwrap();
    let t = cert.table();
    let row = |name: &str| t.lines().find(|l| l.split_whitespace().next() == Some(name)).map(str::to_owned);
    assert!(row("beta").unwrap().contains("0.800000"));
    assert!(row("gamma").unwrap().contains("0.700000"));
    assert!(row("feasible").is_some());
}

fn tuple() -> impl Strategy<Value = (u64, u64, u64, u64)> {
    (2u64..5000).prop_flat_map(|n| {
        (1u64..=n).prop_flat_map(move |m0| {
            (1u64..=m0.min(8)).prop_flat_map(move |k| {
                let lo = n.div_ceil(k);
                (Just(n), Just(m0), lo..lo + 200_000, Just(k))
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn agrees_with_independent_evaluation((n, m0, big, k) in tuple()) {
        let c = Constants::default();
        let cert = certify_params(n, m0, big, k, &c).unwrap();
        let o = oracle::evaluate(n, m0, Some(big), k, None, &c).unwrap();
        let mm = oracle::mismatches(&cert, &o);
        prop_assert!(mm.is_empty(), "{:?}", mm);
    }

    #[test]
    fn q_mode_agrees_with_independent_evaluation((n, m0, big, k) in tuple(), q in 2.1f64..20.0) {
        let c = Constants::default();
        let cert = certify_params_q(n, m0, Some(big), k, q, &c, false).unwrap();
        let o = oracle::evaluate(n, m0, Some(big), k, Some(q), &c).unwrap();
        let mm = oracle::mismatches(&cert, &o);
        prop_assert!(mm.is_empty(), "{:?}", mm);
    }

    #[test]
    fn feasibility_is_the_conjunction_of_gating_checks((n, m0, big, k) in tuple(), c1 in 0.01f64..10.0) {
        let c = Constants { c1, ..Constants::default() };
        let cert = certify_params(n, m0, big, k, &c).unwrap();
        prop_assert_eq!(cert.feasible, cert.checks.iter().all(|x| x.pass));
        prop_assert!(cert.check("cube_in_ball").unwrap().pass);
        prop_assert!((cert.bounds.c1_max * cert.bounds.kmax_terms.iter().cloned().fold(f64::INFINITY, f64::min)
            - cert.bounds.kmax_explicit).abs() <= 1e-9 * cert.bounds.kmax_explicit.max(1e-300));
    }

    #[test]
    fn kmax_is_nondecreasing_in_m0((n, m0, big, k) in tuple()) {
        prop_assume!(m0 < n);
        let c = Constants::default();
        let a = certify_params(n, m0, big, k, &c).unwrap();
        let b = certify_params(n, m0 + 1, big, k, &c).unwrap();
        prop_assert!(b.bounds.kmax >= a.bounds.kmax);
    }
}
