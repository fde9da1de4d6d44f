//! Property tests over randomly drawn parameters.

use std::f64::consts::TAU;

use proptest::prelude::*;
use qonsager::boundary::{check_dual_reflection, check_reflection, check_sixteen};
use qonsager::config::TwistMode;
use qonsager::lax::{
    check_lax_inverse, check_rll, check_twisted_relations, check_untwisted_relations, CasimirSet,
};
use qonsager::linalg::ONE;
use qonsager::report::{Comparison, Environment, SuiteReport};
use qonsager::transfer::{check_commutation, check_twist_gauge};
use qonsager::yang_baxter::{check_twist_conjugation, check_unitarity};
use qonsager::{
    build_kminus_c, c, check_ybe, diagonalize, dressed_kminus, dualize, embed_site, kron,
    mccoy_wu_hamiltonian, rel_residual, spin_half_rep, AuxOperator, BoundaryParams, CMatrix,
    CheckRecord, ModelParams, RunConfig, Sampler, VerificationReport, C64,
};

fn generic() -> impl Strategy<Value = C64> {
    (0.7f64..1.4, 0.0..TAU).prop_map(|(m, ph)| C64::from_polar(m, ph))
}

fn unimodular() -> impl Strategy<Value = C64> {
    (0.0..TAU).prop_map(|ph| C64::from_polar(1.0, ph))
}

fn deformation() -> impl Strategy<Value = C64> {
    generic().prop_filter("q near ±1", |q| {
        (q - ONE).norm() >= 0.05 && (q + ONE).norm() >= 0.3
    })
}

fn spectral() -> impl Strategy<Value = C64> {
    generic().prop_filter("u² near 1", |u| (u * u - ONE).norm() >= 0.05)
}

fn boundary() -> impl Strategy<Value = BoundaryParams> {
    prop::array::uniform8(generic()).prop_map(|b| BoundaryParams {
        eps_plus: b[0],
        eps_minus: b[1],
        k_plus: b[2],
        k_minus: b[3],
        kappa: b[4],
        kappa_star: b[5],
        kappa_plus: b[6],
        kappa_minus: b[7],
    })
}

fn model(n: usize) -> impl Strategy<Value = ModelParams> {
    (
        deformation(),
        prop::collection::vec(unimodular(), n),
        prop::collection::vec(generic(), n),
        boundary(),
    )
        .prop_map(|(q, t, v, b)| ModelParams::new(q, t, v, b).unwrap())
}

/// Square matrix with small integer entries, so products are exact.
fn int_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-4i32..5, -4i32..5), n * n).prop_map(move |d| {
        let data = d.into_iter().map(|(a, b)| c(a as f64, b as f64)).collect();
        CMatrix::new(n, n, data).unwrap()
    })
}

fn float_matrix(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), n * n).prop_map(move |d| {
        CMatrix::new(n, n, d.into_iter().map(|(a, b)| c(a, b)).collect()).unwrap()
    })
}

fn cnum(k: CMatrix) -> AuxOperator {
    AuxOperator::from_c_number(&k, 0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in int_matrix(2), b in int_matrix(3), m in int_matrix(2)) {
        prop_assert_eq!(kron(&kron(&a, &b), &m), kron(&a, &kron(&b, &m)));
    }

    #[test]
    fn distinct_sites_commute_exactly(
        a in int_matrix(2),
        b in int_matrix(2),
        n in 2usize..5,
        (i, j) in (1usize..5, 1usize..5),
    ) {
        prop_assume!(i != j && i <= n && j <= n);
        let x = embed_site(&a, i, n).unwrap().into_matrix();
        let y = embed_site(&b, j, n).unwrap().into_matrix();
        prop_assert_eq!(&x * &y, &y * &x);
    }

    #[test]
    fn residual_symmetric_and_zero_iff_equal(a in float_matrix(3), b in float_matrix(3)) {
        let ab = rel_residual(&a, &b).unwrap();
        prop_assert_eq!(ab, rel_residual(&b, &a).unwrap());
        prop_assert_eq!(rel_residual(&a, &a).unwrap(), 0.0);
        prop_assert_eq!(ab == 0.0, a == b);
    }

    #[test]
    fn yang_baxter(q in deformation(), t in generic(), u in spectral(), v in spectral(), w in spectral()) {
        prop_assert!(check_ybe(q, t, u, v, w).unwrap() <= 1e-10);
    }

    #[test]
    fn unitarity_for_any_twist(q in deformation(), t in generic(), u in spectral()) {
        prop_assert!(check_unitarity(u, q, t).unwrap() <= 1e-12);
    }

    #[test]
    fn twist_conjugation(q in deformation(), u in spectral(), theta in generic()) {
        prop_assert!(check_twist_conjugation(u, q, theta).unwrap() <= 1e-12);
    }

    #[test]
    fn spin_half_exchange_relations(q in deformation(), t in generic()) {
        let rep = spin_half_rep(q, t).unwrap();
        for (name, r) in check_twisted_relations(&rep).into_iter().chain(check_untwisted_relations(&rep)) {
            prop_assert!(r <= 1e-12, "{name}: {r:e}");
        }
    }

    #[test]
    fn casimir_product_rule(q in deformation(), t in generic()) {
        let cas = spin_half_rep(q, t).unwrap().casimirs();
        let lhs = cas.w_minus * cas.w_plus;
        prop_assert!((lhs - cas.w01 * cas.w02).norm() <= 1e-12);
        let closed = CasimirSet::spin_half(q);
        prop_assert!((cas.w - closed.w).norm() <= 1e-12 * closed.w.norm().max(1.0));
    }

    #[test]
    fn lax_inverse_and_rll(q in deformation(), t in generic(), u in spectral(), v in spectral()) {
        let rep = spin_half_rep(q, t).unwrap();
        prop_assert!(check_lax_inverse(u, &rep).unwrap() <= 1e-12);
        prop_assert!(check_rll(u, v, &rep).unwrap() <= 1e-12);
    }

    #[test]
    fn c_number_reflection_and_components(
        b in boundary(), q in deformation(), t in unimodular(), u in spectral(), v in spectral(),
    ) {
        let ku = cnum(build_kminus_c(u, &b, q).unwrap());
        let kv = cnum(build_kminus_c(v, &b, q).unwrap());
        let re = check_reflection(&ku, &kv, q, t, u, v).unwrap();
        prop_assert!(re <= 1e-12, "reflection {re:e}");
        let six = check_sixteen(&ku, &kv, q, u, v).unwrap();
        prop_assert!(six.matrix.iter().all(|&x| x <= 1e-12));
    }

    #[test]
    fn dualized_solution_solves_dual_equation(
        b in boundary(), q in deformation(), t in unimodular(), u in spectral(), v in spectral(),
    ) {
        let km = |x: C64| build_kminus_c(x, &b, q).unwrap();
        let re = check_reflection(&cnum(km(u)), &cnum(km(v)), q, t, u, v).unwrap();
        prop_assume!(re <= 1e-12);
        let kp = dualize(km, q);
        prop_assert!(check_dual_reflection(&cnum(kp(u)), &cnum(kp(v)), q, t, u, v).unwrap() <= 1e-12);
    }

    #[test]
    fn reflection_residual_independent_of_twist(
        b in boundary(), q in deformation(), t in generic(), u in spectral(), v in spectral(),
    ) {
        let ku = cnum(build_kminus_c(u, &b, q).unwrap());
        let kv = cnum(build_kminus_c(v, &b, q).unwrap());
        let r1 = check_reflection(&ku, &kv, q, ONE, u, v).unwrap();
        let rt = check_reflection(&ku, &kv, q, t, u, v).unwrap();
        prop_assert!((r1 - rt).abs() <= 1e-12);
    }

    #[test]
    fn sampler_and_config_are_deterministic(seed in any::<u64>(), n in 1usize..5) {
        prop_assert_eq!(Sampler::new(seed).model(n), Sampler::new(seed).model(n));
        let cfg = RunConfig { seed, twist_mode: TwistMode::Generic, ..RunConfig::default() };
        let a = cfg.model(&mut cfg.sampler("reflection.x", 3), n).unwrap();
        let b = cfg.model(&mut cfg.sampler("reflection.x", 3), n).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn report_json_round_trip(
        residuals in prop::collection::vec(prop_oneof![Just(f64::NAN), 0.0f64..1.0, 1e-18f64..1e-9], 1..6),
        seed in any::<u64>(),
    ) {
        let checks = residuals
            .iter()
            .enumerate()
            .map(|(i, &r)| CheckRecord::judge(format!("c{i}"), "x = y", i + 1, r, 1e-10, Comparison::AtMost))
            .collect();
        let cfg = RunConfig { seed, ..RunConfig::default() };
        let rep = VerificationReport::new(cfg, Environment::current(1), vec![SuiteReport::new("ybe", checks)]);
        let text = qonsager::emit_report(&rep, qonsager::Format::Json);
        prop_assert_eq!(VerificationReport::from_json(&text).unwrap(), rep);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dressed_reflection_small_chains(
        p in model(2), t in unimodular(), u in spectral(), v in spectral(), n in 1usize..3,
    ) {
        let p = p.truncated(n);
        let ku = dressed_kminus(u, &p).unwrap().k;
        let kv = dressed_kminus(v, &p).unwrap().k;
        let r = check_reflection(&ku, &kv, p.q, t, u, v).unwrap();
        prop_assert!(r <= 1e-9, "N={n}: {r:e}");
        prop_assert!(ku.to_full().is_finite());
    }

    #[test]
    fn transfer_matrices_commute(p in model(2), us in prop::array::uniform3(spectral())) {
        prop_assert!(check_commutation(&p, &us).unwrap() <= 1e-9);
    }

    #[test]
    fn spectrum_has_full_count(p in model(3), n in 1usize..4) {
        let p = p.truncated(n);
        let h = mccoy_wu_hamiltonian(&p).unwrap();
        prop_assert!(h.is_finite());
        prop_assert_eq!(diagonalize(&h).unwrap().eigenvalues.len(), 1 << n);
    }

    #[test]
    fn hamiltonian_twist_gauge(p in model(3)) {
        prop_assert!(check_twist_gauge(&p).unwrap() <= 1e-12);
    }
}
