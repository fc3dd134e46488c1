//! Record allocation across users and silos, contribution flags, and the
//! synthetic datasets the simulator trains on.
//!
//! Generators are pure functions of their seed: equal inputs produce
//! bit-identical allocations.

mod allocation;
mod dataset;
mod error;
mod flags;
pub mod seed;

pub use allocation::{
    allocate_fixed_silo_zipf, allocate_uniform, allocate_zipf, histogram_of, DistributionKind,
    DistributionSpec, Histogram, RecordAllocation,
};
pub use dataset::{
    read_allocation_csv, shard_index, write_allocation_csv, DataSet, GaussianMixture, ShardIndex,
    SyntheticSpec,
};
pub use error::AllocationError;
pub use flags::{contribution_flags, ContributionFlags};
