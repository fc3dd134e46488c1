//! Contribution-limiting flags for the group-privacy baseline.

use crate::allocation::RecordAllocation;
use crate::error::AllocationError;

/// Per-record booleans limiting every user to at most `k` training records
/// across all silos. Fixed once, reused for every round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionFlags {
    keep: Vec<bool>,
    k: u32,
}

impl ContributionFlags {
    pub fn keep(&self, record: usize) -> bool {
        self.keep[record]
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn kept_count(&self) -> usize {
        self.keep.iter().filter(|&&b| b).count()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.keep
    }
}

/// Keeps up to `k` records per user, chosen by the stable order
/// (silo id, then record index) so no record is wasted and the selection is
/// identical across rounds.
pub fn contribution_flags(
    alloc: &RecordAllocation,
    k: u32,
) -> Result<ContributionFlags, AllocationError> {
    if k < 1 {
        return Err(AllocationError::BadGroupSize);
    }
    let mut per_user: Vec<Vec<(u32, usize)>> = vec![Vec::new(); alloc.num_users() as usize];
    for (r, u, s) in alloc.iter() {
        per_user[u as usize].push((s, r));
    }
    let mut keep = vec![false; alloc.len()];
    for records in per_user.iter_mut() {
        records.sort_unstable();
        for &(_, r) in records.iter().take(k as usize) {
            keep[r] = true;
        }
    }
    Ok(ContributionFlags { keep, k })
}
