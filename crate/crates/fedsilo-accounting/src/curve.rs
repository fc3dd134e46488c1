//! RDP curves and the budget types they convert into.

use crate::error::AccountingError;

/// Privacy loss `rho(alpha)` tabulated over a grid of Renyi orders.
///
/// This is the accountant's universal currency: mechanisms produce curves,
/// composition adds them pointwise, and conversions consume them.
#[derive(Debug, Clone, PartialEq)]
pub struct RdpCurve {
    orders: Vec<f64>,
    rhos: Vec<f64>,
}

impl RdpCurve {
    /// Builds a curve, validating that all orders are > 1 and losses >= 0.
    pub fn new(orders: Vec<f64>, rhos: Vec<f64>) -> Result<Self, AccountingError> {
        if orders.is_empty() {
            return Err(AccountingError::EmptyCurve);
        }
        if orders.len() != rhos.len() {
            return Err(AccountingError::LengthMismatch {
                orders: orders.len(),
                rhos: rhos.len(),
            });
        }
        for &a in &orders {
            if !a.is_finite() || a <= 1.0 {
                return Err(AccountingError::BadOrder(a));
            }
        }
        for &r in &rhos {
            if r.is_nan() || r < 0.0 {
                return Err(AccountingError::BadRho(r));
            }
        }
        Ok(Self { orders, rhos })
    }

    /// Tabulates `rho(alpha)` over `orders`.
    pub fn from_fn(
        orders: &[f64],
        mut rho: impl FnMut(f64) -> f64,
    ) -> Result<Self, AccountingError> {
        let rhos = orders.iter().map(|&a| rho(a)).collect();
        Self::new(orders.to_vec(), rhos)
    }

    pub fn orders(&self) -> &[f64] {
        &self.orders
    }

    pub fn rhos(&self) -> &[f64] {
        &self.rhos
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.orders.iter().copied().zip(self.rhos.iter().copied())
    }

    /// True when the tabulated loss never decreases along the grid.
    /// Holds for every mechanism curve this crate produces.
    pub fn is_monotone(&self) -> bool {
        self.rhos.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        self.orders == other.orders
    }
}

/// A record-level `(epsilon, delta)` differential-privacy budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpBudget {
    pub epsilon: f64,
    pub delta: f64,
}

impl DpBudget {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self, AccountingError> {
        if delta.is_nan() || delta <= 0.0 || delta >= 1.0 {
            return Err(AccountingError::BadDelta(delta));
        }
        if !epsilon.is_finite() {
            return Err(AccountingError::BadRho(epsilon));
        }
        Ok(Self { epsilon, delta })
    }
}

/// A `(k, epsilon, delta)` group-DP budget.
///
/// Group conversions may push `epsilon` or `delta` past the floating-point
/// range; such results are kept as `+inf` and reported via [`Self::saturated`]
/// so sweeps degrade gracefully instead of erroring.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupDpBudget {
    pub k: u32,
    pub epsilon: f64,
    pub delta: f64,
}

impl GroupDpBudget {
    pub fn saturated(&self) -> bool {
        !self.epsilon.is_finite() || !self.delta.is_finite() || self.delta >= 1.0
    }
}

/// Gaussian-mechanism parameters fed to the budget helpers: noise multiplier,
/// sampling rate, and the number of compositions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub sigma: f64,
    pub q: f64,
    pub steps: u64,
}

impl NoiseConfig {
    pub fn new(sigma: f64, q: f64, steps: u64) -> Result<Self, AccountingError> {
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(AccountingError::BadSigma(sigma));
        }
        if !(0.0..=1.0).contains(&q) {
            return Err(AccountingError::BadSamplingRate(q));
        }
        Ok(Self { sigma, q, steps })
    }
}

/// Default order grid: a fine fractional band near 1 plus integers 2..=512.
///
/// The fractional band matters before group conversion collapses orders; the
/// integer tail is what the sub-sampled mechanism and group conversions use.
pub fn default_order_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (1..=99).map(|x| 1.0 + x as f64 / 10.0).collect();
    grid.extend((2..=512).map(|a| a as f64));
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}

/// Integer orders 2..=512, the domain of the sub-sampled Gaussian bound.
pub fn integer_order_grid() -> Vec<u32> {
    (2..=512).collect()
}
