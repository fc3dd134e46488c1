//! Record-to-(user, silo) allocation under uniform and zipf regimes.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::AllocationError;
use crate::seed;

/// Assignment of every record to exactly one (user, silo) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordAllocation {
    users: Vec<u32>,
    silos: Vec<u32>,
    num_users: u32,
    num_silos: u32,
}

impl RecordAllocation {
    pub fn new(
        users: Vec<u32>,
        silos: Vec<u32>,
        num_users: u32,
        num_silos: u32,
    ) -> Result<Self, AllocationError> {
        assert_eq!(users.len(), silos.len());
        for (i, &u) in users.iter().enumerate() {
            if u >= num_users {
                return Err(AllocationError::UserOutOfRange {
                    record: i,
                    user: u,
                    num_users,
                });
            }
        }
        for (i, &s) in silos.iter().enumerate() {
            if s >= num_silos {
                return Err(AllocationError::SiloOutOfRange {
                    record: i,
                    silo: s,
                    num_silos,
                });
            }
        }
        Ok(Self {
            users,
            silos,
            num_users,
            num_silos,
        })
    }

    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }

    pub fn num_users(&self) -> u32 {
        self.num_users
    }

    pub fn num_silos(&self) -> u32 {
        self.num_silos
    }

    pub fn user_of(&self, record: usize) -> u32 {
        self.users[record]
    }

    pub fn silo_of(&self, record: usize) -> u32 {
        self.silos[record]
    }

    /// Iterates `(record, user, silo)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, u32, u32)> + '_ {
        self.users
            .iter()
            .zip(self.silos.iter())
            .enumerate()
            .map(|(r, (&u, &s))| (r, u, s))
    }
}

/// How records are scattered across users and silos.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DistributionKind {
    Uniform,
    Zipf {
        user_alpha: f64,
        silo_alpha: f64,
    },
    FixedSiloZipf {
        user_alpha: f64,
        primary_fraction: f64,
    },
}

/// Allocation recipe: distribution, generator seed, and the per-pair floor
/// enforced by the fixed-silo variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    #[serde(flatten)]
    pub kind: DistributionKind,
    pub seed: u64,
    #[serde(default)]
    pub min_records_per_pair: u64,
}

impl DistributionSpec {
    /// Runs the allocator this spec describes. The fixed-silo variant splits
    /// `num_records` as evenly as possible across silos for its fixed counts.
    pub fn allocate(
        &self,
        num_records: u64,
        num_users: u32,
        num_silos: u32,
    ) -> Result<RecordAllocation, AllocationError> {
        match self.kind {
            DistributionKind::Uniform => {
                allocate_uniform(num_records, num_users, num_silos, self.seed)
            }
            DistributionKind::Zipf {
                user_alpha,
                silo_alpha,
            } => allocate_zipf(
                num_records, num_users, num_silos, user_alpha, silo_alpha, self.seed,
            ),
            DistributionKind::FixedSiloZipf {
                user_alpha,
                primary_fraction,
            } => {
                if num_silos == 0 {
                    return Err(AllocationError::EmptyDomain("num_silos"));
                }
                let base = num_records / num_silos as u64;
                let extra = (num_records % num_silos as u64) as usize;
                let per_silo: Vec<u64> = (0..num_silos as usize)
                    .map(|s| base + u64::from(s < extra))
                    .collect();
                allocate_fixed_silo_zipf(
                    &per_silo,
                    num_users,
                    user_alpha,
                    primary_fraction,
                    self.seed,
                    self.min_records_per_pair,
                )
            }
        }
    }
}

/// Every record drawn independently: uniform user, uniform silo.
pub fn allocate_uniform(
    num_records: u64,
    num_users: u32,
    num_silos: u32,
    seed: u64,
) -> Result<RecordAllocation, AllocationError> {
    if num_records == 0 {
        return Err(AllocationError::EmptyDomain("num_records"));
    }
    if num_users == 0 {
        return Err(AllocationError::EmptyDomain("num_users"));
    }
    if num_silos == 0 {
        return Err(AllocationError::EmptyDomain("num_silos"));
    }
    let mut rng = seed::named_rng(seed, "alloc-uniform", &[]);
    let mut users = Vec::with_capacity(num_records as usize);
    let mut silos = Vec::with_capacity(num_records as usize);
    for _ in 0..num_records {
        users.push(rng.gen_range(0..num_users));
        silos.push(rng.gen_range(0..num_silos));
    }
    RecordAllocation::new(users, silos, num_users, num_silos)
}

/// Rank weights `i^-alpha`, i = 1..=n.
fn zipf_weights(n: usize, alpha: f64) -> Vec<f64> {
    (1..=n).map(|i| (i as f64).powf(-alpha)).collect()
}

/// Splits `total` into integer counts proportional to `weights`, assigning
/// leftovers by largest remainder (ties to the lower index).
fn largest_remainder_counts(weights: &[f64], total: u64) -> Vec<u64> {
    let w_sum: f64 = weights.iter().sum();
    let mut counts = Vec::with_capacity(weights.len());
    let mut fractions: Vec<(usize, f64)> = Vec::with_capacity(weights.len());
    let mut assigned = 0u64;
    for (i, &w) in weights.iter().enumerate() {
        let quota = total as f64 * w / w_sum;
        let floor = quota.floor() as u64;
        counts.push(floor);
        assigned += floor;
        fractions.push((i, quota - floor.min(total) as f64));
    }
    fractions.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let mut leftover = total - assigned;
    for (i, _) in fractions {
        if leftover == 0 {
            break;
        }
        counts[i] += 1;
        leftover -= 1;
    }
    counts
}

/// Zipf(user_alpha) record counts over users; each user's records split
/// across silos by Zipf(silo_alpha) over a per-user random silo ranking.
pub fn allocate_zipf(
    num_records: u64,
    num_users: u32,
    num_silos: u32,
    user_alpha: f64,
    silo_alpha: f64,
    seed: u64,
) -> Result<RecordAllocation, AllocationError> {
    if num_records == 0 {
        return Err(AllocationError::EmptyDomain("num_records"));
    }
    if num_users == 0 {
        return Err(AllocationError::EmptyDomain("num_users"));
    }
    if num_silos == 0 {
        return Err(AllocationError::EmptyDomain("num_silos"));
    }
    if user_alpha.is_nan() || user_alpha <= 0.0 {
        return Err(AllocationError::BadZipfExponent(user_alpha));
    }
    if silo_alpha.is_nan() || silo_alpha <= 0.0 {
        return Err(AllocationError::BadZipfExponent(silo_alpha));
    }

    let mut rng = seed::named_rng(seed, "alloc-zipf", &[]);
    let mut user_counts =
        largest_remainder_counts(&zipf_weights(num_users as usize, user_alpha), num_records);
    user_counts.shuffle(&mut rng);

    let mut users = Vec::with_capacity(num_records as usize);
    let mut silos = Vec::with_capacity(num_records as usize);
    for (u, &count) in user_counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let mut ranking: Vec<u32> = (0..num_silos).collect();
        ranking.shuffle(&mut rng);
        let silo_counts =
            largest_remainder_counts(&zipf_weights(num_silos as usize, silo_alpha), count);
        for (rank, &sc) in silo_counts.iter().enumerate() {
            for _ in 0..sc {
                users.push(u as u32);
                silos.push(ranking[rank]);
            }
        }
    }
    RecordAllocation::new(users, silos, num_users, num_silos)
}

const FIXED_ZIPF_REDRAWS: u64 = 16;

/// Benchmark-style allocation: per-silo record counts are fixed. User counts
/// follow Zipf(user_alpha); each user sends `primary_fraction` of its records
/// to a randomly chosen primary silo and spreads the rest evenly over the
/// others, all subject to remaining silo capacity. Pairs left below
/// `min_records_per_pair` trigger a re-draw, then an in-silo repair that
/// keeps silo totals exact.
pub fn allocate_fixed_silo_zipf(
    per_silo_records: &[u64],
    num_users: u32,
    user_alpha: f64,
    primary_fraction: f64,
    seed: u64,
    min_records_per_pair: u64,
) -> Result<RecordAllocation, AllocationError> {
    let num_silos = per_silo_records.len() as u32;
    if num_silos == 0 {
        return Err(AllocationError::EmptyDomain("num_silos"));
    }
    if num_users == 0 {
        return Err(AllocationError::EmptyDomain("num_users"));
    }
    if user_alpha.is_nan() || user_alpha <= 0.0 {
        return Err(AllocationError::BadZipfExponent(user_alpha));
    }
    if primary_fraction.is_nan() || primary_fraction <= 0.0 || primary_fraction > 1.0 {
        return Err(AllocationError::BadPrimaryFraction(primary_fraction));
    }
    let total: u64 = per_silo_records.iter().sum();
    if total == 0 {
        return Err(AllocationError::EmptyDomain("num_records"));
    }
    if min_records_per_pair > 0
        && min_records_per_pair
            .saturating_mul(num_users as u64)
            .saturating_mul(num_silos as u64)
            > total
    {
        return Err(AllocationError::InfeasibleFloor {
            floor: min_records_per_pair,
            users: num_users as u64,
            silos: num_silos as u64,
            records: total,
        });
    }

    for attempt in 0..=FIXED_ZIPF_REDRAWS {
        let counts = draw_fixed_silo_counts(
            per_silo_records,
            num_users,
            user_alpha,
            primary_fraction,
            seed::derive(seed, &[seed::label("fixed-zipf"), attempt]),
        );
        if floor_satisfied(&counts, min_records_per_pair) {
            return Ok(counts_to_allocation(&counts, num_users, num_silos));
        }
        if attempt == FIXED_ZIPF_REDRAWS {
            let repaired = repair_floor(counts, min_records_per_pair);
            return Ok(counts_to_allocation(&repaired, num_users, num_silos));
        }
    }
    unreachable!()
}

/// One draw of the pair-count matrix `counts[silo][user]`.
fn draw_fixed_silo_counts(
    per_silo_records: &[u64],
    num_users: u32,
    user_alpha: f64,
    primary_fraction: f64,
    seed: u64,
) -> Vec<Vec<u64>> {
    let num_silos = per_silo_records.len();
    let total: u64 = per_silo_records.iter().sum();
    let mut rng = seed::named_rng(seed, "fixed-zipf-draw", &[]);

    let mut user_counts =
        largest_remainder_counts(&zipf_weights(num_users as usize, user_alpha), total);
    user_counts.shuffle(&mut rng);

    let mut capacity = per_silo_records.to_vec();
    let mut counts = vec![vec![0u64; num_users as usize]; num_silos];

    let mut order: Vec<usize> = (0..num_users as usize).collect();
    order.shuffle(&mut rng);
    for &u in &order {
        let count = user_counts[u];
        if count == 0 {
            continue;
        }
        let with_capacity: Vec<usize> =
            (0..num_silos).filter(|&s| capacity[s] > 0).collect();
        if with_capacity.is_empty() {
            break;
        }
        let primary = *with_capacity.as_slice().choose(&mut rng).unwrap();
        let want_primary = if primary_fraction >= 1.0 {
            count
        } else {
            (primary_fraction * count as f64).ceil() as u64
        };
        let take = want_primary.min(capacity[primary]);
        counts[primary][u] += take;
        capacity[primary] -= take;

        let mut rest = count - take;
        // spread the remainder over the other silos round-robin from a
        // random starting point, respecting capacity
        let mut others: Vec<usize> = (0..num_silos).filter(|&s| s != primary).collect();
        others.shuffle(&mut rng);
        let mut idx = 0;
        let mut stalled = 0;
        while rest > 0 {
            let pool: &[usize] = if others.iter().any(|&s| capacity[s] > 0) {
                &others
            } else {
                // only the primary (or nothing) has room left
                std::slice::from_ref(&primary)
            };
            let s = pool[idx % pool.len()];
            idx += 1;
            if capacity[s] > 0 {
                counts[s][u] += 1;
                capacity[s] -= 1;
                rest -= 1;
                stalled = 0;
            } else {
                stalled += 1;
                if stalled > num_silos {
                    break; // no capacity anywhere
                }
            }
        }
    }
    counts
}

fn floor_satisfied(counts: &[Vec<u64>], floor: u64) -> bool {
    if floor == 0 {
        return true;
    }
    counts
        .iter()
        .all(|row| row.iter().all(|&n| n == 0 || n >= floor))
}

/// Moves records between users within a silo until every active pair meets
/// the floor. Silo totals never change; deficient pairs either get topped up
/// from the richest pair or folded into it.
fn repair_floor(mut counts: Vec<Vec<u64>>, floor: u64) -> Vec<Vec<u64>> {
    if floor == 0 {
        return counts;
    }
    for row in counts.iter_mut() {
        loop {
            let deficient = row
                .iter()
                .position(|&n| n > 0 && n < floor);
            let Some(u) = deficient else { break };
            let need = floor - row[u];
            // richest other pair in this silo
            let donor = (0..row.len())
                .filter(|&v| v != u)
                .max_by_key(|&v| row[v]);
            match donor {
                Some(v) if row[v] >= floor + need => {
                    row[v] -= need;
                    row[u] += need;
                }
                Some(v) if row[v] > 0 => {
                    row[v] += row[u];
                    row[u] = 0;
                }
                _ => {
                    // nobody to trade with; fold the pair away is impossible,
                    // leave as-is (only reachable when the silo has a single
                    // active user below the floor)
                    break;
                }
            }
        }
    }
    counts
}

fn counts_to_allocation(counts: &[Vec<u64>], num_users: u32, num_silos: u32) -> RecordAllocation {
    let mut users = Vec::new();
    let mut silos = Vec::new();
    for (s, row) in counts.iter().enumerate() {
        for (u, &n) in row.iter().enumerate() {
            for _ in 0..n {
                users.push(u as u32);
                silos.push(s as u32);
            }
        }
    }
    RecordAllocation::new(users, silos, num_users, num_silos).expect("counts are in range")
}

/// The pair-count matrix `n_{s,u}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    num_silos: u32,
    num_users: u32,
    /// silo-major: `counts[silo][user]`
    counts: Vec<Vec<u64>>,
}

impl Histogram {
    pub fn count(&self, silo: u32, user: u32) -> u64 {
        self.counts[silo as usize][user as usize]
    }

    pub fn num_silos(&self) -> u32 {
        self.num_silos
    }

    pub fn num_users(&self) -> u32 {
        self.num_users
    }

    /// `N_u`: total records of one user across silos.
    pub fn user_total(&self, user: u32) -> u64 {
        self.counts.iter().map(|row| row[user as usize]).sum()
    }

    pub fn silo_total(&self, silo: u32) -> u64 {
        self.counts[silo as usize].iter().sum()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }
}

/// Counts records per (silo, user) pair.
pub fn histogram_of(alloc: &RecordAllocation) -> Histogram {
    let mut counts = vec![vec![0u64; alloc.num_users() as usize]; alloc.num_silos() as usize];
    for (_, u, s) in alloc.iter() {
        counts[s as usize][u as usize] += 1;
    }
    Histogram {
        num_silos: alloc.num_silos(),
        num_users: alloc.num_users(),
        counts,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_uniform_goes_to_single_pair() {
        let a = allocate_uniform(4, 1, 1, 0).unwrap();
        assert!(a.iter().all(|(_, u, s)| u == 0 && s == 0));
    }

    #[test]
    fn uniform_is_deterministic_under_seed() {
        let a = allocate_uniform(1000, 10, 3, 99).unwrap();
        let b = allocate_uniform(1000, 10, 3, 99).unwrap();
        assert_eq!(a, b);
        let c = allocate_uniform(1000, 10, 3, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn histogram_conserves_and_counts() {
        let a = RecordAllocation::new(vec![0, 0, 0], vec![0, 0, 0], 2, 2).unwrap();
        let h = histogram_of(&a);
        assert_eq!(h.count(0, 0), 3);
        assert_eq!(h.count(0, 1), 0);
        assert_eq!(h.count(1, 0), 0);
        assert_eq!(h.total(), 3);
    }

    #[test]
    fn single_user_owns_everything_under_zipf() {
        let a = allocate_zipf(50, 1, 4, 0.5, 2.0, 3).unwrap();
        assert!(a.iter().all(|(_, u, _)| u == 0));
        assert_eq!(a.len(), 50);
    }

    #[test]
    fn zipf_max_share_grows_with_user_alpha() {
        let max_share = |alpha: f64| {
            let a = allocate_zipf(10_000, 100, 5, alpha, 2.0, 7).unwrap();
            let h = histogram_of(&a);
            (0..100).map(|u| h.user_total(u)).max().unwrap()
        };
        let s05 = max_share(0.5);
        let s10 = max_share(1.0);
        let s20 = max_share(2.0);
        assert!(s05 < s10 && s10 < s20, "{s05} {s10} {s20}");
    }

    #[test]
    fn zipf_default_parameters_are_skewed_both_ways() {
        let a = allocate_zipf(10_000, 100, 5, 0.5, 2.0, 11).unwrap();
        let h = histogram_of(&a);
        let totals: Vec<u64> = (0..100).map(|u| h.user_total(u)).collect();
        let max = *totals.iter().max().unwrap();
        let min = *totals.iter().min().unwrap();
        assert!(max >= 4 * min.max(1), "user skew missing: {max} vs {min}");
        // per-user silo concentration: primary silo holds the majority
        for u in 0..100u32 {
            let mut per_silo: Vec<u64> = (0..5).map(|s| h.count(s, u)).collect();
            per_silo.sort_unstable_by(|x, y| y.cmp(x));
            if h.user_total(u) >= 10 {
                assert!(per_silo[0] > h.user_total(u) / 2);
            }
        }
    }

    #[test]
    fn fixed_silo_totals_are_exact() {
        let per_silo = vec![40, 25, 35];
        let a = allocate_fixed_silo_zipf(&per_silo, 6, 0.5, 0.8, 5, 0).unwrap();
        let h = histogram_of(&a);
        for (s, &want) in per_silo.iter().enumerate() {
            assert_eq!(h.silo_total(s as u32), want);
        }
        assert_eq!(h.total(), 100);
    }

    #[test]
    fn fixed_silo_single_silo_full_fraction() {
        let a = allocate_fixed_silo_zipf(&[30], 3, 0.5, 1.0, 1, 0).unwrap();
        assert!(a.iter().all(|(_, _, s)| s == 0));
    }

    #[test]
    fn fixed_silo_floor_is_honored() {
        let a = allocate_fixed_silo_zipf(&[60, 60], 5, 0.5, 0.8, 2, 2).unwrap();
        let h = histogram_of(&a);
        for s in 0..2 {
            for u in 0..5 {
                let n = h.count(s, u);
                assert!(n == 0 || n >= 2, "pair ({s},{u}) has {n}");
            }
        }
        assert_eq!(h.silo_total(0), 60);
        assert_eq!(h.silo_total(1), 60);
    }

    #[test]
    fn infeasible_floor_rejected() {
        let err = allocate_fixed_silo_zipf(&[5, 5], 4, 0.5, 0.8, 2, 2).unwrap_err();
        assert!(matches!(err, AllocationError::InfeasibleFloor { .. }));
    }

    #[test]
    fn largest_remainder_is_exact() {
        let counts = largest_remainder_counts(&[1.0, 1.0, 1.0], 10);
        assert_eq!(counts.iter().sum::<u64>(), 10);
        assert_eq!(counts, vec![4, 3, 3]);
    }
}
