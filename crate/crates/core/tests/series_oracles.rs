mod common;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use common::{bernoulli_recurrence, lp_target};
use iwasawa_core::bernoulli::b1_chi;
use iwasawa_core::iwasawa::{
    beta_and_t, bm_over_m_mod_via, delta_iterated_with, delta_power, delta_power_with, find_s0,
    index_for_exponent, lambda_invariant, lp_value, lp_value_at_level, stickelberger_approx, ApproximantCache,
    ApproximantKey, ApproximantStore, IwasawaApproximant, TermPath,
};
use iwasawa_core::{Error, Padic};
use num_rational::BigRational;
use proptest::prelude::*;

fn oracle() -> &'static [BigRational] {
    static B: OnceLock<Vec<BigRational>> = OnceLock::new();
    B.get_or_init(|| bernoulli_recurrence(200))
}

#[test]
fn interpolation_at_negative_integers() {
    for p in [5u64, 7, 37, 59] {
        for m in (2..=120u64).step_by(2).filter(|m| m % (p - 1) != 0) {
            let i = index_for_exponent(p, m).unwrap();
            for k in 1..=3u32 {
                let s = Padic::from_i64(p, k, 1 - m as i64).unwrap();
                let got = lp_value(p, i, &s, k).unwrap();
                assert_eq!(got.precision(), k);
                assert_eq!(got.residue(), lp_target(oracle(), p, m as usize, k), "p={p} m={m} K={k}");
            }
        }
    }
}

#[test]
fn projection_is_exact() {
    for (p, i) in [(7u64, 3u64), (7, 5), (37, 5), (11, 7)] {
        let high = stickelberger_approx(p, i, 3, 3).unwrap();
        let low = stickelberger_approx(p, i, 2, 3).unwrap();
        assert_eq!(high.project(2).unwrap(), low, "p={p} i={i}");
    }
}

#[test]
fn constant_term_matches_character_sum() {
    for (p, i) in [(5u64, 3u64), (7, 3), (7, 5), (37, 5), (59, 15)] {
        let g = stickelberger_approx(p, i, 2, 3).unwrap();
        assert_eq!(g.constant_term(), b1_chi(p, i, 3).unwrap().neg(), "p={p} i={i}");
    }
}

#[test]
fn lambda_is_stable_under_precision() {
    for (p, i) in [(37u64, 5u64), (59, 15), (67, 9), (101, 33)] {
        let lambda = lambda_invariant(p, i).unwrap();
        let series = stickelberger_approx(p, i, 1, 3).unwrap().to_t_basis().unwrap();
        assert_eq!(series.first_unit_index(), Some(lambda as usize));
        assert!(lambda >= 1 && lambda <= p as u32 - 1);
    }
    for (p, i) in [(37u64, 3u64), (7, 5), (11, 3)] {
        assert_eq!(lambda_invariant(p, i).unwrap(), 0, "regular p={p} i={i}");
    }
}

#[test]
fn terms_agree_across_paths() {
    for (p, ms) in [(37u64, vec![32u64, 68, 284, 1328]), (7, vec![2, 4, 8, 10, 100]), (59, vec![44, 102])] {
        for m in ms {
            for k in 1..=3u32 {
                let exact = bm_over_m_mod_via(p, m, k, TermPath::ExactRational).unwrap();
                let series = bm_over_m_mod_via(p, m, k, TermPath::LpSeries).unwrap();
                assert_eq!(exact.value, series.value, "p={p} m={m} K={k}");
            }
        }
    }
}

#[test]
fn zero_certificate_p37() {
    let u = Padic::from_i64(37, 4, 36).unwrap();
    let z = find_s0(37, 5, &u, 4).unwrap();
    assert_eq!(z.seeds.len(), 1);
    assert!(z.residual_valuation >= 4);
    assert!(z.next_difference_valuation < z.working_precision);
    assert!(z.beta_digits.iter().all(|&b| b < 37));
    assert_eq!(z.t[0], (0, 32));
    for &(n, t) in &z.t {
        assert_eq!(t % 36, 32, "t_{n}");
        let r: u128 = z.beta_digits[..n as usize].iter().rev().fold(0, |acc, &b| acc * 37 + b as u128);
        assert_eq!(t, 32 + 36 * r);
    }
    // λ = 1: the zero is that of L_p itself, re-evaluated here independently
    let s0 = Padic::new(37, 4, z.s0).unwrap();
    assert!(lp_value(37, 5, &s0, 4).unwrap().valuation() >= 4);
    // s_0 ≡ 1 - t_n - (λ - 1)(p - 1) (mod p^n)
    for &(n, t) in z.t.iter().skip(1) {
        let m = 37u64.pow(n);
        assert_eq!((z.s0 % m) as i128, (1 - t as i128).rem_euclid(m as i128), "n={n}");
    }
}

#[test]
fn zero_seed_is_unique_by_direct_scan() {
    // v(L_p(c)) >= 2 singles out the residue class of s_0
    let hits: Vec<u64> = (0..37u64)
        .filter(|&c| lp_value(37, 5, &Padic::new(37, 3, c).unwrap(), 3).unwrap().valuation() >= 2)
        .collect();
    let u = Padic::from_i64(37, 3, 36).unwrap();
    assert_eq!(hits, find_s0(37, 5, &u, 2).unwrap().seeds);
}

#[test]
fn zero_certificate_p59() {
    let u = Padic::from_i64(59, 3, 58).unwrap();
    let z = find_s0(59, 15, &u, 3).unwrap();
    assert_eq!(z.seeds.len(), 1);
    assert!(z.residual_valuation >= 3);
    let b = beta_and_t(59, 15, z.lambda_i, &z.s0_element().unwrap(), 1).unwrap();
    assert_eq!(b.t_n % 58, 44);
}

#[test]
fn regular_index_has_no_zero() {
    let u = Padic::from_i64(37, 3, 36).unwrap();
    assert!(matches!(find_s0(37, 3, &u, 3), Err(Error::Domain(_))));
}

#[test]
fn delta_forms_agree_on_lp() {
    let u = Padic::from_i64(7, 3, 6).unwrap();
    let f = |s: &Padic| lp_value(7, 5, s, 3);
    for s in [0i64, 3, -11, 40] {
        let s = Padic::from_i64(7, 3, s).unwrap();
        for k in 0..4 {
            assert_eq!(
                delta_power_with(f, &u, k, &s).unwrap(),
                delta_iterated_with(&f, &u, k, &s).unwrap()
            );
            assert_eq!(delta_power(7, 5, &u, k, &s, 3).unwrap(), delta_power_with(f, &u, k, &s).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn delta_forms_agree_on_polynomials(c in prop::collection::vec(any::<u16>(), 1..6), k in 0u32..6, s in any::<i32>(), u in 1i64..1000) {
        let poly = |x: &Padic| {
            let mut acc = Padic::zero(11, 4)?;
            for &ci in c.iter().rev() {
                acc = acc.mul(x)?.add_i64(ci as i64);
            }
            Ok(acc)
        };
        let s = Padic::from_i64(11, 4, s as i64).unwrap();
        let u = Padic::from_i64(11, 4, u).unwrap();
        let a = delta_power_with(poly, &u, k, &s).unwrap();
        prop_assert_eq!(a, delta_iterated_with(&poly, &u, k, &s).unwrap());
        // Δ^k kills polynomials of degree < k
        if k as usize >= c.len() {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn level_stability(s in -500i64..500, pi in 0usize..3) {
        let (p, i) = [(7u64, 3u64), (7, 5), (37, 5)][pi];
        let k = 2;
        let x = Padic::from_i64(p, k, s).unwrap();
        let base = lp_value_at_level(p, i, &x, k, 1).unwrap();
        for level in 2..=3 {
            prop_assert_eq!(lp_value_at_level(p, i, &x, k, level).unwrap(), base);
        }
    }
}

#[derive(Default)]
struct MemoryStore {
    entries: Mutex<HashMap<ApproximantKey, Vec<u64>>>,
    loads: Mutex<usize>,
}

impl ApproximantStore for MemoryStore {
    fn load(&self, key: &ApproximantKey) -> Option<Vec<u64>> {
        *self.loads.lock().unwrap() += 1;
        self.entries.lock().unwrap().get(key).cloned()
    }

    fn store(&self, key: &ApproximantKey, coeffs: &[u64]) {
        self.entries.lock().unwrap().insert(*key, coeffs.to_vec());
    }
}

#[test]
fn cache_store_round_trip_and_rejection() {
    let store = Arc::new(MemoryStore::default());
    let cache = ApproximantCache::default();
    cache.set_store(Some(store.clone()));
    let built = cache.get(11, 5, 2, 3).unwrap();
    let key = ApproximantKey { p: 11, i: 5, level: 2, precision: 3 };
    assert_eq!(store.entries.lock().unwrap()[&key], built.group_ring_coeffs());

    // a fresh cache over the same store reuses the payload
    let warm = ApproximantCache::default();
    warm.set_store(Some(store.clone()));
    assert_eq!(*warm.get(11, 5, 2, 3).unwrap(), *built);

    // a tampered payload fails verification and is rebuilt
    store.entries.lock().unwrap().get_mut(&key).unwrap()[0] ^= 1;
    let cold = ApproximantCache::default();
    cold.set_store(Some(store.clone()));
    assert_eq!(*cold.get(11, 5, 2, 3).unwrap(), *built);
    assert_eq!(store.entries.lock().unwrap()[&key], built.group_ring_coeffs());

    assert!(IwasawaApproximant::from_parts(11, 5, 2, 3, vec![0; 5]).is_err());
}
