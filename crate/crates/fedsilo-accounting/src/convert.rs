//! Composition and conversion between RDP, DP, and group-DP.

use crate::curve::{DpBudget, GroupDpBudget, RdpCurve};
use crate::error::AccountingError;

/// Pointwise sum of RDP curves sharing one order grid (sequential composition).
pub fn compose_rdp(curves: &[RdpCurve]) -> Result<RdpCurve, AccountingError> {
    let first = curves.first().ok_or(AccountingError::EmptyCurve)?;
    let mut rhos = first.rhos().to_vec();
    for c in &curves[1..] {
        if !c.same_grid(first) {
            return Err(AccountingError::GridMismatch);
        }
        for (acc, r) in rhos.iter_mut().zip(c.rhos()) {
            *acc += r;
        }
    }
    RdpCurve::new(first.orders().to_vec(), rhos)
}

/// Result of optimizing the RDP-to-DP conversion over the order grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpConversion {
    pub epsilon: f64,
    pub best_alpha: f64,
}

/// Converts a curve to `(epsilon, delta)`-DP, minimizing
/// `rho + log((a-1)/a) - (log delta + log a)/(a-1)` over the grid.
///
/// The raw minimum is returned even when negative; callers that want a
/// clamped report do so themselves.
pub fn rdp_to_dp(curve: &RdpCurve, delta: f64) -> Result<DpConversion, AccountingError> {
    if delta.is_nan() || delta <= 0.0 || delta >= 1.0 {
        return Err(AccountingError::BadDelta(delta));
    }
    rdp_to_dp_log_delta(curve, delta.ln())
}

/// Same conversion parameterized by `ln delta`, so searches can reach
/// intermediate deltas far below the smallest positive f64.
pub fn rdp_to_dp_log_delta(
    curve: &RdpCurve,
    ln_delta: f64,
) -> Result<DpConversion, AccountingError> {
    if ln_delta.is_nan() || ln_delta >= 0.0 {
        return Err(AccountingError::BadDelta(ln_delta.exp()));
    }
    let mut best = DpConversion {
        epsilon: f64::INFINITY,
        best_alpha: f64::NAN,
    };
    for (a, rho) in curve.points() {
        let eps = rho + ((a - 1.0) / a).ln() - (ln_delta + a.ln()) / (a - 1.0);
        if eps < best.epsilon {
            best = DpConversion {
                epsilon: eps,
                best_alpha: a,
            };
        }
    }
    if best.best_alpha.is_nan() {
        return Err(AccountingError::EmptyCurve);
    }
    Ok(best)
}

/// Group conversion of an RDP curve: order `alpha/2^k`, loss `3^k rho`,
/// keeping only grid points with `alpha >= 2^(k+1)`.
pub fn group_rdp_convert(curve: &RdpCurve, k: u32) -> Result<RdpCurve, AccountingError> {
    convert_orders(curve, k, false)
}

/// Group conversion that keeps every point whose converted order stays > 1.
///
/// The strict form drops converted orders below 2; reference sweeps keep
/// them, which is what the published group-privacy comparison numbers used.
/// Exposed separately so both behaviors stay testable.
pub fn group_rdp_convert_relaxed(curve: &RdpCurve, k: u32) -> Result<RdpCurve, AccountingError> {
    convert_orders(curve, k, true)
}

fn convert_orders(
    curve: &RdpCurve,
    k: u32,
    relaxed: bool,
) -> Result<RdpCurve, AccountingError> {
    if k < 1 {
        return Err(AccountingError::BadGroupExponent(k));
    }
    let scale = 2f64.powi(k as i32);
    let loss_factor = 3f64.powi(k as i32);
    let min_alpha = if relaxed { scale } else { 2.0 * scale };
    let mut orders = Vec::new();
    let mut rhos = Vec::new();
    for (a, rho) in curve.points() {
        let keep = if relaxed { a > min_alpha } else { a >= min_alpha };
        if keep {
            orders.push(a / scale);
            rhos.push(loss_factor * rho);
        }
    }
    if orders.is_empty() {
        return Err(AccountingError::EmptyConvertibleGrid(min_alpha));
    }
    RdpCurve::new(orders, rhos)
}

/// Group conversion of a DP budget: `(k, k eps, k e^((k-1) eps) delta)`.
///
/// Saturates to `+inf` instead of erroring when the delta inflation exceeds
/// the floating-point range; check [`GroupDpBudget::saturated`].
pub fn dp_group_convert(budget: &DpBudget, k: u32) -> Result<GroupDpBudget, AccountingError> {
    if k < 1 {
        return Err(AccountingError::BadGroupSize(k));
    }
    let kf = k as f64;
    // overflow of the exp factor saturates delta to +inf on its own
    let delta = kf * ((kf - 1.0) * budget.epsilon).exp() * budget.delta;
    Ok(GroupDpBudget {
        k,
        epsilon: kf * budget.epsilon,
        delta,
    })
}

/// Outcome of the normal-DP group-epsilon search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupEpsilonSearch {
    /// Group epsilon `k * eps_record`.
    pub epsilon: f64,
    /// Record-level epsilon at the intermediate delta the search settled on.
    pub record_epsilon: f64,
    /// Order that minimized the record-level conversion.
    pub best_alpha: f64,
    /// `ln` of the intermediate delta fed to the RDP-to-DP conversion.
    pub intermediate_ln_delta: f64,
    /// Final group delta actually achieved; within tolerance of the target.
    pub achieved_delta: f64,
}

const SEARCH_DELTA_TOLERANCE: f64 = 1e-8;
const SEARCH_MAX_ITERS: u32 = 400;

/// Finds the group epsilon at a fixed final delta by converting RDP to DP at
/// an intermediate delta and inflating with the group-DP lemma, binary
/// searching the intermediate delta (in log space) until the final delta
/// matches the target to within 1e-8.
pub fn normal_group_epsilon_search(
    curve: &RdpCurve,
    target_delta: f64,
    k: u32,
) -> Result<GroupEpsilonSearch, AccountingError> {
    if target_delta.is_nan() || target_delta <= 0.0 || target_delta >= 1.0 {
        return Err(AccountingError::BadDelta(target_delta));
    }
    if k < 1 {
        return Err(AccountingError::BadGroupSize(k));
    }
    let ln_target = target_delta.ln();
    if k == 1 {
        let conv = rdp_to_dp_log_delta(curve, ln_target)?;
        return Ok(GroupEpsilonSearch {
            epsilon: conv.epsilon,
            record_epsilon: conv.epsilon,
            best_alpha: conv.best_alpha,
            intermediate_ln_delta: ln_target,
            achieved_delta: target_delta,
        });
    }

    let kf = k as f64;
    // ln of the final group delta as a function of the intermediate ln delta
    let final_ln_delta = |ln_dp: f64| -> Result<(f64, DpConversion), AccountingError> {
        let conv = rdp_to_dp_log_delta(curve, ln_dp)?;
        Ok((kf.ln() + (kf - 1.0) * conv.epsilon + ln_dp, conv))
    };

    let mut hi = ln_target;
    let (f_hi, _) = final_ln_delta(hi)?;
    if f_hi <= ln_target {
        // inflation is already within target at delta' = target
        let conv = rdp_to_dp_log_delta(curve, hi)?;
        return Ok(GroupEpsilonSearch {
            epsilon: kf * conv.epsilon,
            record_epsilon: conv.epsilon,
            best_alpha: conv.best_alpha,
            intermediate_ln_delta: hi,
            achieved_delta: f_hi.exp(),
        });
    }

    // expand downward until the final delta drops below the target
    let mut step = 16.0;
    let mut lo = hi - step;
    let mut expansions = 0;
    while final_ln_delta(lo)?.0 > ln_target {
        step *= 2.0;
        lo = hi - step;
        expansions += 1;
        if expansions > 64 {
            return Err(AccountingError::SearchDidNotConverge(expansions));
        }
    }

    for _ in 0..SEARCH_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        let (f_mid, conv) = final_ln_delta(mid)?;
        let achieved = f_mid.exp();
        if (achieved - target_delta).abs() <= SEARCH_DELTA_TOLERANCE {
            return Ok(GroupEpsilonSearch {
                epsilon: kf * conv.epsilon,
                record_epsilon: conv.epsilon,
                best_alpha: conv.best_alpha,
                intermediate_ln_delta: mid,
                achieved_delta: achieved,
            });
        }
        if f_mid > ln_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(AccountingError::SearchDidNotConverge(SEARCH_MAX_ITERS))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_point(alpha: f64, rho: f64) -> RdpCurve {
        RdpCurve::new(vec![alpha], vec![rho]).unwrap()
    }

    #[test]
    fn compose_is_pointwise_sum() {
        let c = single_point(2.0, 0.04);
        let sum = compose_rdp(&[c.clone(), c.clone()]).unwrap();
        assert_eq!(sum.rhos(), &[0.08]);
        // identity on a single curve
        let one = compose_rdp(std::slice::from_ref(&c)).unwrap();
        assert_eq!(one, c);
    }

    #[test]
    fn compose_rejects_mismatched_grids() {
        let a = single_point(2.0, 0.1);
        let b = single_point(4.0, 0.1);
        assert_eq!(
            compose_rdp(&[a, b]),
            Err(AccountingError::GridMismatch)
        );
    }

    #[test]
    fn rdp_to_dp_frozen_point() {
        // eps = 1 + ln(1/2) - (ln 1e-5 + ln 2) / 1, evaluated independently
        let conv = rdp_to_dp(&single_point(2.0, 1.0), 1e-5).unwrap();
        assert!((conv.epsilon - 11.126631103850338).abs() < 1e-12);
        assert_eq!(conv.best_alpha, 2.0);
    }

    #[test]
    fn rdp_to_dp_returns_raw_negative_epsilon() {
        let conv = rdp_to_dp(&single_point(2.0, 0.0), 1.0 - 1e-9).unwrap();
        assert!((conv.epsilon - (0.5f64.ln() - 2f64.ln())).abs() < 1e-6);
        assert!(conv.epsilon < 0.0);
    }

    #[test]
    fn group_rdp_examples() {
        let c = single_point(64.0, 0.1);
        let g = group_rdp_convert(&c, 4).unwrap();
        assert_eq!(g.orders(), &[4.0]);
        assert!((g.rhos()[0] - 8.1).abs() < 1e-12);

        let z = group_rdp_convert(&single_point(32.0, 0.0), 1).unwrap();
        assert_eq!(z.orders(), &[16.0]);
        assert_eq!(z.rhos(), &[0.0]);
    }

    #[test]
    fn group_rdp_empty_grid_is_distinct_error() {
        let c = RdpCurve::new(vec![4.0, 8.0], vec![0.1, 0.2]).unwrap();
        assert_eq!(
            group_rdp_convert(&c, 3),
            Err(AccountingError::EmptyConvertibleGrid(16.0))
        );
    }

    #[test]
    fn relaxed_keeps_orders_above_one() {
        let c = RdpCurve::new(vec![40.0, 63.0], vec![0.1, 0.2]).unwrap();
        let strict = group_rdp_convert(&c, 5);
        assert!(strict.is_err());
        let relaxed = group_rdp_convert_relaxed(&c, 5).unwrap();
        assert_eq!(relaxed.orders(), &[40.0 / 32.0, 63.0 / 32.0]);
    }

    #[test]
    fn dp_group_examples() {
        let b = DpBudget::new(1.0, 1e-5).unwrap();
        let g = dp_group_convert(&b, 2).unwrap();
        assert_eq!(g.epsilon, 2.0);
        assert!((g.delta - 2.0 * std::f64::consts::E * 1e-5).abs() < 1e-18);

        let id = dp_group_convert(&b, 1).unwrap();
        assert_eq!((id.epsilon, id.delta), (b.epsilon, b.delta));

        let zero = dp_group_convert(&DpBudget::new(0.0, 1e-5).unwrap(), 7).unwrap();
        assert_eq!(zero.epsilon, 0.0);
        assert!((zero.delta - 7e-5).abs() < 1e-18);
    }

    #[test]
    fn dp_group_saturates_to_infinity() {
        let b = DpBudget::new(1e4, 1e-5).unwrap();
        let g = dp_group_convert(&b, 1000).unwrap();
        assert!(g.delta.is_infinite());
        assert!(g.saturated());
    }
}
