use std::collections::HashSet;

use iwasawa_core::snf::{smith_normal_form, Exponent};
use iwasawa_core::Padic;
use proptest::prelude::*;

/// All vectors of `(Z/p^N)^n`.
fn all_vectors(q: u64, n: usize) -> Vec<Vec<u64>> {
    (0..q.pow(n as u32))
        .map(|mut x| {
            (0..n)
                .map(|_| {
                    let d = x % q;
                    x /= q;
                    d
                })
                .collect()
        })
        .collect()
}

/// `|M[p^j]|` for `j = 1..=N`, where `M = (Z/p^N)^n / A (Z/p^N)^n`, counted by
/// enumerating the image of `A`.
fn torsion_counts(a: &[Vec<u64>], p: u64, precision: u32) -> Vec<u64> {
    let q = p.pow(precision);
    let n = a.len();
    let vectors = all_vectors(q, n);
    let image: HashSet<Vec<u64>> = vectors
        .iter()
        .map(|x| (0..n).map(|r| (0..n).map(|c| a[r][c] * x[c]).sum::<u64>() % q).collect())
        .collect();
    (1..=precision)
        .map(|j| {
            let pj = p.pow(j);
            let killed = vectors
                .iter()
                .filter(|y| image.contains(&y.iter().map(|v| v * pj % q).collect::<Vec<_>>()))
                .count() as u64;
            killed / image.len() as u64
        })
        .collect()
}

fn counts_from_divisors(exponents: &[Exponent], p: u64, precision: u32) -> Vec<u64> {
    (1..=precision)
        .map(|j| exponents.iter().map(|e| p.pow(j.min(e.bound()))).product())
        .collect()
}

fn matrix_strategy() -> impl Strategy<Value = (u64, u32, Vec<Vec<u64>>)> {
    (prop::sample::select(vec![(3u64, 1u32), (3, 2), (3, 3), (5, 1), (5, 2)]), 2usize..=3).prop_flat_map(
        |((p, precision), n)| {
            let q = p.pow(precision);
            // bias towards non-units so that nontrivial cokernels are common
            let entry = prop_oneof![0..q, (0..q / p).prop_map(move |x| x * p)];
            (Just(p), Just(precision), prop::collection::vec(prop::collection::vec(entry, n), n))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn snf_matches_cokernel_enumeration((p, precision, a) in matrix_strategy()) {
        // 3x3 over Z/27 enumerates 27^3 vectors
        let elements: Vec<Vec<Padic>> = a
            .iter()
            .map(|row| row.iter().map(|&x| Padic::new(p, precision, x).unwrap()).collect())
            .collect();
        let d = smith_normal_form(&elements).unwrap();
        prop_assert_eq!(counts_from_divisors(&d.exponents, p, precision), torsion_counts(&a, p, precision));
        prop_assert!(d.exponents.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn snf_is_invariant_under_transposition((p, precision, a) in matrix_strategy()) {
        let n = a.len();
        let to_elements = |m: &Vec<Vec<u64>>| -> Vec<Vec<Padic>> {
            m.iter().map(|row| row.iter().map(|&x| Padic::new(p, precision, x).unwrap()).collect()).collect()
        };
        let t: Vec<Vec<u64>> = (0..n).map(|r| (0..n).map(|c| a[c][r]).collect()).collect();
        prop_assert_eq!(smith_normal_form(&to_elements(&a)).unwrap(), smith_normal_form(&to_elements(&t)).unwrap());
    }
}
