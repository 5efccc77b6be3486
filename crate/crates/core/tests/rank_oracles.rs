//! `d(k)` against the homomorphism-count oracle and, at height one, against
//! partitions of `k` into powers of `p`.

use msym_core::sym_rank::{
    default_depth, enumerate_orbit_types, hom_count_oracle, rank_d, rank_table, sylow_valuation_check,
    transfer_unit_witness, DEFAULT_HOM_BUDGET_K,
};
use msym_core::{vp_binomial, Error, Prime};
use num_bigint::BigUint;
use proptest::prelude::*;

fn p(v: u64) -> Prime {
    Prime::new(v).unwrap()
}

/// Partitions of `k` into parts from `parts`, by the usual coin-change table.
fn partitions_into(k: usize, parts: &[usize]) -> u64 {
    let mut ways = vec![0u64; k + 1];
    ways[0] = 1;
    for &part in parts {
        for total in part..=k {
            ways[total] += ways[total - part];
        }
    }
    ways[k]
}

#[test]
fn ranks_match_hom_counts() {
    let grid: &[(u64, u32, u32)] = &[(2, 1, 6), (2, 2, 6), (3, 1, 4), (3, 2, 4), (5, 1, 5), (2, 3, 4)];
    for &(pp, n, kmax) in grid {
        for k in 0..=kmax {
            let oracle = hom_count_oracle(k, p(pp), n, 3, DEFAULT_HOM_BUDGET_K).unwrap();
            assert_eq!(rank_d(k, p(pp), n), oracle, "p={pp} n={n} k={k}");
        }
    }
}

#[test]
fn height_one_counts_partitions_into_prime_powers() {
    for pp in [2u64, 3, 5, 7] {
        let powers: Vec<usize> = (0..8).map(|j| pp.pow(j) as usize).filter(|&q| q <= 60).collect();
        let table = rank_table(60, p(pp), 1);
        for (k, d) in table.iter().enumerate() {
            assert_eq!(*d, BigUint::from(partitions_into(k, &powers)), "p={pp} k={k}");
        }
    }
}

#[test]
fn known_values() {
    let row: Vec<u64> = rank_table(6, p(2), 2).iter().map(|d| d.try_into().unwrap()).collect();
    assert_eq!(&row[..3], &[1, 1, 4]);
    let row: Vec<u64> = rank_table(4, p(3), 1).iter().map(|d| d.try_into().unwrap()).collect();
    assert_eq!(row, vec![1, 1, 1, 2, 2]);
}

#[test]
fn oracle_budget() {
    assert!(matches!(
        hom_count_oracle(DEFAULT_HOM_BUDGET_K + 1, p(2), 1, 3, DEFAULT_HOM_BUDGET_K),
        Err(Error::Budget { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_is_independent_of_depth(pp in prop::sample::select(vec![2u64, 3]), n in 1u32..3, k in 0u32..6) {
        let base = default_depth(k, p(pp));
        let a = hom_count_oracle(k, p(pp), n, base, DEFAULT_HOM_BUDGET_K).unwrap();
        let b = hom_count_oracle(k, p(pp), n, base + 2, DEFAULT_HOM_BUDGET_K).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn orbit_types_enumerate_rank(pp in prop::sample::select(vec![2u64, 3, 5]), n in 1u32..4, k in 0u32..8) {
        let types = enumerate_orbit_types(k, p(pp), n, 1 << 20).unwrap();
        prop_assert_eq!(BigUint::from(types.len()), rank_d(k, p(pp), n));
        for t in &types {
            prop_assert_eq!(t.order(p(pp)), u64::from(k));
        }
        let mut sorted = types.clone();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), types.len());
    }

    #[test]
    fn rank_table_is_pointwise(pp in prop::sample::select(vec![2u64, 3, 5]), n in 1u32..4, kmax in 0u32..12) {
        let table = rank_table(kmax, p(pp), n);
        prop_assert_eq!(table.len() as u32, kmax + 1);
        for (k, d) in table.iter().enumerate() {
            prop_assert_eq!(d, &rank_d(k as u32, p(pp), n));
        }
    }

    #[test]
    fn transfer_witness_iff_not_prime_power(pp in prop::sample::select(vec![2u64, 3, 5, 7]), m in 1u64..400) {
        let w = transfer_unit_witness(m, p(pp));
        prop_assert_eq!(w.is_some(), !p(pp).is_power(m));
        if let Some(w) = w {
            prop_assert_eq!(w.i + w.j, m);
            prop_assert_eq!(vp_binomial(m, w.i, p(pp)), 0);
        }
    }
}

#[test]
fn sylow_rows_balance() {
    for pp in [2u64, 3, 5] {
        for k in 1..=3 {
            let rows = sylow_valuation_check(k, p(pp), 1 << 16).unwrap();
            assert_eq!(rows.len() as u64, pp.pow(k) - 1);
            assert!(rows.iter().all(|r| r.holds()), "p={pp} k={k}");
        }
    }
    assert!(sylow_valuation_check(0, p(2), 16).is_err());
}
