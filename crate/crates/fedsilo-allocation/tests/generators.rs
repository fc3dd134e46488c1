//! Distribution-level checks and conservation properties.

use fedsilo_allocation::*;
use proptest::prelude::*;

#[test]
fn uniform_counts_concentrate_binomially() {
    // 1e5 records over 100 users: per-user counts within 5 sigma of 1000
    let a = allocate_uniform(100_000, 100, 5, 12).unwrap();
    let h = histogram_of(&a);
    let mean = 1000.0;
    let sigma = (100_000.0 * 0.01 * 0.99f64).sqrt();
    for u in 0..100 {
        let c = h.user_total(u) as f64;
        assert!(
            (c - mean).abs() <= 5.0 * sigma,
            "user {u} count {c} outside 5 sigma"
        );
    }
    // silo marginal too
    let silo_mean = 20_000.0;
    let silo_sigma = (100_000.0 * 0.2 * 0.8f64).sqrt();
    for s in 0..5 {
        let c = h.silo_total(s) as f64;
        assert!((c - silo_mean).abs() <= 5.0 * silo_sigma);
    }
}

#[test]
fn fixed_silo_primary_share_is_ceil_on_small_instance() {
    // capacities consistent with the quota: 25 records, primary take
    // ceil(0.8 * 25) = 20, remainder 5 in the other silo
    let a = allocate_fixed_silo_zipf(&[20, 5], 1, 0.5, 0.8, 0, 0).unwrap();
    let h = histogram_of(&a);
    assert_eq!(h.count(0, 0), 20);
    assert_eq!(h.count(1, 0), 5);
}

#[test]
fn fixed_silo_primary_silo_dominates() {
    // with capacity pressure the exact quota can truncate for late users,
    // but one silo per user must still clearly dominate
    let per_silo = vec![100u64; 5];
    let a = allocate_fixed_silo_zipf(&per_silo, 10, 0.5, 0.8, 22, 0).unwrap();
    let h = histogram_of(&a);
    for u in 0..10u32 {
        let total = h.user_total(u);
        if total < 5 {
            continue;
        }
        let primary = (0..5).map(|s| h.count(s, u)).max().unwrap();
        assert!(
            primary as f64 >= 0.6 * total as f64,
            "user {u}: primary {primary} of {total}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn conservation_uniform(records in 1u64..2000, users in 1u32..20, silos in 1u32..8, s in 0u64..1000) {
        let a = allocate_uniform(records, users, silos, s).unwrap();
        let h = histogram_of(&a);
        prop_assert_eq!(h.total(), records);
        prop_assert_eq!(a.len() as u64, records);
    }

    #[test]
    fn conservation_zipf(records in 1u64..2000, users in 1u32..20, silos in 1u32..8, s in 0u64..1000) {
        let a = allocate_zipf(records, users, silos, 0.5, 2.0, s).unwrap();
        prop_assert_eq!(histogram_of(&a).total(), records);
    }

    #[test]
    fn determinism_across_kinds(records in 1u64..500, users in 1u32..10, silos in 1u32..5, s in 0u64..100) {
        let spec = DistributionSpec {
            kind: DistributionKind::Zipf { user_alpha: 0.5, silo_alpha: 2.0 },
            seed: s,
            min_records_per_pair: 0,
        };
        prop_assert_eq!(
            spec.allocate(records, users, silos).unwrap(),
            spec.allocate(records, users, silos).unwrap()
        );
    }

    #[test]
    fn flag_cap_holds_everywhere(records in 1u64..1000, users in 1u32..12, silos in 1u32..5, k in 1u32..20, s in 0u64..100) {
        let a = allocate_uniform(records, users, silos, s).unwrap();
        let f = contribution_flags(&a, k).unwrap();
        let mut per_user = vec![0u32; users as usize];
        for (r, u, _) in a.iter() {
            if f.keep(r) {
                per_user[u as usize] += 1;
            }
        }
        prop_assert!(per_user.iter().all(|&c| c <= k));
    }

    #[test]
    fn fixed_silo_exact_totals(users in 1u32..10, s in 0u64..100) {
        let per_silo = vec![37u64, 15, 48];
        let a = allocate_fixed_silo_zipf(&per_silo, users, 0.5, 0.8, s, 0).unwrap();
        let h = histogram_of(&a);
        for (i, &want) in per_silo.iter().enumerate() {
            prop_assert_eq!(h.silo_total(i as u32), want);
        }
    }
}
