use iwasawa_core::bernoulli::{irregular_scan, s_invariant};
use iwasawa_core::congruence::{verify_congruence, Verdict};
use iwasawa_core::iwasawa::{lambda_invariant, TermPath};
use iwasawa_core::structure::{
    cardinality_count, sni_formula, sni_structure, sni_structure_with, spectrum_report, v_plus_structure, Basis,
    ReportOptions, VPlusVariant,
};

#[test]
fn snf_matches_formula_for_small_irregular_primes() {
    for p in [37u64, 59, 67, 157] {
        for d in irregular_scan(p).unwrap() {
            let (s, lambda) = (s_invariant(p, d.i).unwrap(), lambda_invariant(p, d.i).unwrap());
            for n in 0..=1 {
                let g = sni_structure(p, d.i, n, n + s + 3).unwrap();
                assert!(g.same_group(&sni_formula(p, n, s, lambda)), "p={p} i={} n={n}: {g}", d.i);
            }
        }
    }
}

#[test]
fn bases_agree_on_irregular_indices() {
    for (p, i, n) in [(37u64, 5u64, 1u32), (59, 15, 1), (67, 9, 1), (7, 3, 3), (5, 3, 3)] {
        let a = sni_structure_with(p, i, n, n + 4, Basis::GroupRing, 2000).unwrap();
        let b = sni_structure_with(p, i, n, n + 4, Basis::Monomial, 2000).unwrap();
        assert_eq!(a, b, "p={p} i={i} n={n}");
    }
}

#[test]
fn p37_level_two_has_lambda_factors() {
    let s = s_invariant(37, 5).unwrap();
    let g = sni_structure(37, 5, 2, 2 + s + 2).unwrap();
    assert_eq!(g.factor_count(), lambda_invariant(37, 5).unwrap() as usize);
    assert_eq!(g.exponents, vec![2 + s]);
}

#[test]
fn cardinality_identity() {
    for (r0, lambda) in [(0u32, 0u32), (1, 1), (2, 2), (1, 3)] {
        for n in 1..=3 {
            let ullom = v_plus_structure(101, r0, lambda, n, VPlusVariant::Ullom).unwrap();
            let announced = v_plus_structure(101, r0, lambda, n, VPlusVariant::Announced).unwrap();
            assert_eq!(ullom.order_exponent(), cardinality_count(r0, lambda, n));
            assert_eq!(announced.order_exponent(), cardinality_count(r0, lambda, n) + lambda as u64);
        }
    }
}

#[test]
fn report_for_p157() {
    let r = spectrum_report(157, &ReportOptions::default()).unwrap();
    assert_eq!(r.r0, 2);
    let lambda: u32 = r.irregular.iter().map(|e| e.lambda.unwrap()).sum();
    let nu: u32 = r.irregular.iter().map(|e| e.s.unwrap()).sum();
    assert_eq!((r.lambda_total, r.nu), (Some(lambda), Some(nu)));
    assert_eq!(r.km_verdict, Some(r.irregular.iter().all(|e| e.s == Some(1))));
    assert!(r.flags.announced_index_shift);
    assert!(r.all_checks_pass(), "{:?}", r.flags.checks);
    assert_eq!(r.structures[&1].s_ni.len(), 2);
}

#[test]
fn report_annotates_capped_levels() {
    let options = ReportOptions { n_max: 2, ..ReportOptions::default() };
    let r = spectrum_report(59, &options).unwrap();
    assert_eq!(r.errors.len(), 1);
    assert!(r.errors[0].field.starts_with("structures[2]"));
    assert!(r.structures[&2].s_ni.is_empty());
    assert!(r.structures[&2].v_ullom.is_some());
}

#[test]
fn congruences_for_p37() {
    let c0 = verify_congruence(37, 5, 0, None).unwrap();
    let c1 = verify_congruence(37, 5, 1, None).unwrap();
    assert_eq!(c0.t_n, 32);
    assert!(c1.t_n <= 1328);
    assert_eq!(c1.terms[0].path, TermPath::ExactRational);
    for c in [&c0, &c1] {
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(c.valuation >= c.n + c.lambda_i);
        assert!(c.is_consistent());
        assert_eq!(c.replay().unwrap().verdict, c.verdict);
    }
}

#[test]
fn congruence_with_extra_precision() {
    let c = verify_congruence(59, 15, 1, Some(4)).unwrap();
    assert_eq!(c.precision, 4);
    assert_eq!(c.verdict, Verdict::Pass);
    assert_eq!(c.t_n % 58, 44);
}
