//! Constant-product pool state, swap mechanics, and the closed-form pool
//! value.
//!
//! A pool holds reserves `x` and `y` with invariant `k = x*y` and fee
//! retention factor `gamma` (the venue keeps `1 - gamma` of the incoming
//! leg off the curve). A trade of `dy` units of Y for X must satisfy
//! `(x - dx)(y + gamma*dy) = k`; the invariant is then recomputed from the
//! full post-trade reserves, so fees accrete into `k`.

use crate::{Error, Result};

/// Immutable pool state; swaps return a fresh state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolState {
    x: f64,
    y: f64,
    gamma: f64,
    k: f64,
}

impl PoolState {
    pub fn new(x: f64, y: f64, gamma: f64) -> Result<Self> {
        if !(x > 0.0 && x.is_finite()) || !(y > 0.0 && y.is_finite()) {
            return Err(Error::Domain(format!(
                "reserves must be positive and finite, got x={x}, y={y}"
            )));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Domain(format!(
                "fee retention factor must lie in (0, 1], got {gamma}"
            )));
        }
        let k = x * y;
        if !k.is_finite() || !(y / x).is_finite() || y / x == 0.0 {
            return Err(Error::Domain(
                "reserve magnitudes overflow the invariant or the implied price".into(),
            ));
        }
        Ok(Self { x, y, gamma, k })
    }

    /// Reserve of token X.
    pub fn x(&self) -> f64 {
        self.x
    }

    /// Reserve of token Y.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Fee retention factor in (0, 1].
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Invariant product, recomputed after every swap.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// Marginal exchange rate quoted by the pool: y/x units of Y per X.
    pub fn implied_price(&self) -> f64 {
        self.y / self.x
    }

    /// Sells `dy` units of Y into the pool; returns the X amount paid out
    /// and the post-trade state. The fee applies to the incoming Y leg.
    pub fn swap_y_for_x(&self, dy: f64) -> Result<(f64, PoolState)> {
        if !(dy > 0.0 && dy.is_finite()) {
            return Err(Error::Domain(format!(
                "swap amount must be positive, got {dy}"
            )));
        }
        let dx = self.x - self.k / (self.y + self.gamma * dy);
        if !(dx > 0.0 && dx < self.x) {
            return Err(Error::Domain(format!(
                "swap of {dy} is below numeric resolution or drains the reserve"
            )));
        }
        let next = PoolState::new(self.x - dx, self.y + dy, self.gamma)?;
        Ok((dx, next))
    }

    /// Symmetric counterpart: sells `dx` units of X, the fee applying to
    /// the incoming X leg.
    pub fn swap_x_for_y(&self, dx: f64) -> Result<(f64, PoolState)> {
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::Domain(format!(
                "swap amount must be positive, got {dx}"
            )));
        }
        let dy = self.y - self.k / (self.x + self.gamma * dx);
        if !(dy > 0.0 && dy < self.y) {
            return Err(Error::Domain(format!(
                "swap of {dx} is below numeric resolution or drains the reserve"
            )));
        }
        let next = PoolState::new(self.x + dx, self.y - dy, self.gamma)?;
        Ok((dy, next))
    }
}

/// Value of a fee-free pool with invariant `k` at price `p`: `2*sqrt(k*p)`
/// units of Y.
pub fn pool_value(k: f64, p: f64) -> Result<f64> {
    if !(k > 0.0 && k.is_finite()) || !(p > 0.0 && p.is_finite()) {
        return Err(Error::Domain(format!(
            "pool value needs positive invariant and price, got k={k}, p={p}"
        )));
    }
    Ok(2.0 * (k * p).sqrt())
}

/// Per-step relative return of the pool between two prices:
/// `sqrt(p_now / p_prev)`. Products over a price path telescope to
/// `sqrt(p_end / p_start)`.
pub fn relative_return(p_prev: f64, p_now: f64) -> Result<f64> {
    if !(p_prev > 0.0 && p_prev.is_finite()) || !(p_now > 0.0 && p_now.is_finite()) {
        return Err(Error::Domain(format!(
            "relative return needs positive prices, got {p_prev} and {p_now}"
        )));
    }
    Ok((p_now / p_prev).sqrt())
}
