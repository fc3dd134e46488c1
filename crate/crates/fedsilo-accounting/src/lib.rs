//! Renyi-DP accountant for cross-silo federated training.
//!
//! Mechanisms produce [`RdpCurve`]s over an order grid; curves compose by
//! pointwise addition and convert to `(epsilon, delta)`-DP or group-DP. All
//! functions are pure and safe to call concurrently. Epsilons are in nats.

mod budgets;
mod convert;
mod curve;
mod error;
mod mechanisms;

pub use budgets::{
    budget_uldp_avg_user_sampled, budget_uldp_group, budget_uldp_naive_avg, GroupBudgetReport,
};
pub use convert::{
    compose_rdp, dp_group_convert, group_rdp_convert, group_rdp_convert_relaxed,
    normal_group_epsilon_search, rdp_to_dp, rdp_to_dp_log_delta, DpConversion,
    GroupEpsilonSearch,
};
pub use curve::{
    default_order_grid, integer_order_grid, DpBudget, GroupDpBudget, NoiseConfig, RdpCurve,
};
pub use error::AccountingError;
pub use mechanisms::{
    gaussian_curve, gaussian_rdp, subsampled_gaussian_curve, subsampled_gaussian_rdp,
};
