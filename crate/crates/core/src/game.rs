//! The price-competition market: utilities and closed-form best responses.
//!
//! UEs post per-session prices; the model owner answers with per-UE accuracy
//! purchases. The owner's quadratic cost couples UEs through a
//! substitutability weight `v`, which collapses into two market constants
//!
//! ```text
//! A = -(1 - 2v + Kv) / ((1 - v)(Kv + 1 - v))      (A < 0 for K >= 2, v in (0,1))
//! B =            v   / ((1 - v)(Kv + 1 - v))      (B > 0 for v > 0)
//! ```
//!
//! The owner's direct purchase map applies these coefficients as posted.
//! Differentiating its own first-order objective instead yields the
//! componentwise negation, so both variants are exposed as [`ResponseMode`];
//! callers choose which market they are simulating and nothing here guesses
//! between them.

use crate::error::{Error, Result};

/// Which accuracy-purchase map the model owner plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResponseMode {
    /// The direct linear map `theta_k = A * own + B * rivals`, applied as
    /// posted. Only defined for unit eta.
    #[default]
    Printed,
    /// Exact minimizer of the first-order purchase cost: solves
    /// `theta_k + v * sum_{j != k} theta_j = eta_k * own_k`.
    Derived,
}

/// Market constants shared by every UE in a game of `players` sellers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketCoefficients {
    pub a: f64,
    pub b: f64,
    pub players: usize,
    pub substitutability: f64,
}

/// Compute the market constants for `players` UEs at substitutability `v`.
pub fn market_coefficients(players: usize, v: f64) -> Result<MarketCoefficients> {
    if players == 0 {
        return Err(Error::invalid("a market needs at least one seller"));
    }
    if !(0.0..1.0).contains(&v) {
        return Err(Error::invalid(format!(
            "substitutability must lie in [0,1), got {v}"
        )));
    }
    let k = players as f64;
    let denom = (1.0 - v) * (k * v + 1.0 - v);
    Ok(MarketCoefficients {
        a: -(1.0 - 2.0 * v + k * v) / denom,
        b: v / denom,
        players,
        substitutability: v,
    })
}

/// Per-UE price vectors, one entry per session. Prices are nonnegative.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceProfile {
    per_ue: Vec<Vec<f64>>,
}

impl PriceProfile {
    pub fn new(per_ue: Vec<Vec<f64>>) -> Result<Self> {
        for (k, prices) in per_ue.iter().enumerate() {
            for (t, &p) in prices.iter().enumerate() {
                if p.is_nan() || p < 0.0 {
                    return Err(Error::invalid(format!(
                        "price of UE index {k} in session {} must be nonnegative, got {p}",
                        t + 1
                    )));
                }
            }
        }
        Ok(PriceProfile { per_ue })
    }

    pub fn ue_count(&self) -> usize {
        self.per_ue.len()
    }

    pub fn prices(&self, ue: usize) -> &[f64] {
        &self.per_ue[ue]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.per_ue
    }

    /// Sum of one UE's prices across sessions.
    pub fn total(&self, ue: usize) -> f64 {
        self.per_ue[ue].iter().sum()
    }

    /// Sum of every rival's prices across all sessions.
    pub fn rival_total(&self, ue: usize) -> f64 {
        (0..self.per_ue.len())
            .filter(|&x| x != ue)
            .map(|x| self.total(x))
            .sum()
    }
}

/// The owner's purchase profile: one local accuracy per UE.
#[derive(Debug, Clone, PartialEq)]
pub struct PurchaseProfile {
    pub thetas: Vec<f64>,
}

/// Constants one UE sees when pricing a single session: its own marginal
/// cost terms and the rival price mass entering the market factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SessionGameConstants {
    /// Linear cost coefficient from the predicted background load (J s).
    pub load_cost: f64,
    /// Quadratic cost coefficient from the workload itself (J s^2).
    pub quad_cost: f64,
    /// Aggregate rival prices feeding the market factor.
    pub rival_prices: f64,
    /// Predicted upload energy for the session (J).
    pub transmission_j: f64,
}

/// The market factor `1 + A*S - B*V` shared by a UE's session terms.
fn market_factor(own_sum: f64, coeffs: &MarketCoefficients, rivals: f64) -> f64 {
    1.0 + coeffs.a * own_sum - coeffs.b * rivals
}

/// One session's seller utility at price `rho` given own session sum `own_sum`
/// (which includes `rho` itself).
pub fn ue_session_utility(
    rho: f64,
    own_sum: f64,
    consts: &SessionGameConstants,
    coeffs: &MarketCoefficients,
) -> f64 {
    let f = market_factor(own_sum, coeffs, consts.rival_prices);
    rho * f - consts.load_cost * f - (consts.quad_cost * f * f + consts.transmission_j)
}

/// Stationary session price before the nonnegativity clamp.
///
/// `other_sessions` is the sum of the UE's prices in every other session,
/// held fixed for the update.
pub fn ue_best_response_session_raw(
    consts: &SessionGameConstants,
    coeffs: &MarketCoefficients,
    other_sessions: f64,
) -> Result<f64> {
    let a = coeffs.a;
    let b = coeffs.b;
    if a == 0.0 {
        return Err(Error::invalid(
            "degenerate market: price response undefined for A = 0",
        ));
    }
    let denom = 2.0 * a * a * consts.quad_cost - 2.0 * a;
    if denom == 0.0 {
        return Err(Error::invalid("degenerate market: 2A^2 D - 2A vanished"));
    }
    let num = 1.0 - a * consts.load_cost - b * consts.rival_prices - 2.0 * a * consts.quad_cost
        + 2.0 * a * b * consts.quad_cost * consts.rival_prices;
    Ok(num / denom - other_sessions)
}

/// [`ue_best_response_session_raw`] clamped to the admissible price space.
pub fn ue_best_response_session(
    consts: &SessionGameConstants,
    coeffs: &MarketCoefficients,
    other_sessions: f64,
) -> Result<f64> {
    Ok(ue_best_response_session_raw(consts, coeffs, other_sessions)?.max(0.0))
}

/// Seller profit over a game cycle: payments minus forecast energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UeProfit {
    /// Total payment received, `iterations * sum of prices`.
    pub payment: f64,
    /// Total forecast energy spent.
    pub energy: f64,
    /// `payment - energy`, stored so the decomposition is exact.
    pub profit: f64,
}

/// Profit of one UE given its prices, its per-session energies and the
/// iteration count the buyer purchases.
pub fn ue_utility(prices: &[f64], session_energies: &[f64], iterations: f64) -> UeProfit {
    let payment: f64 = prices.iter().map(|p| p * iterations).sum();
    let energy: f64 = session_energies.iter().sum();
    UeProfit {
        payment,
        energy,
        profit: payment - energy,
    }
}

/// The owner's exact cost: payments at the logarithmic iteration count plus
/// the substitutability-weighted quadratic accuracy term.
pub fn mo_utility(prices: &PriceProfile, thetas: &[f64], v: f64, etas: &[f64]) -> Result<f64> {
    let k = prices.ue_count();
    if thetas.len() != k || etas.len() != k {
        return Err(Error::invalid("price, theta and eta lengths disagree"));
    }
    let mut payments = 0.0;
    for i in 0..k {
        let total = prices.total(i);
        if total == 0.0 {
            continue; // nothing bought from this UE, whatever its accuracy
        }
        payments += total * crate::cost::local_iterations(thetas[i], etas[i])?;
    }
    Ok(payments + purchase_quadratic(thetas, v))
}

/// The owner's cost under the first-order iteration count; this is the
/// objective whose minimizer the derived purchase map returns.
pub fn mo_utility_taylor(
    prices: &PriceProfile,
    thetas: &[f64],
    coeffs: &MarketCoefficients,
    etas: &[f64],
) -> Result<f64> {
    let k = prices.ue_count();
    if thetas.len() != k || etas.len() != k {
        return Err(Error::invalid("price, theta and eta lengths disagree"));
    }
    let mut payments = 0.0;
    for i in 0..k {
        payments += prices.total(i) * etas[i] * (1.0 - thetas[i]);
    }
    Ok(payments + purchase_quadratic(thetas, coeffs.substitutability))
}

/// The buyer's quadratic accuracy cost: half the sum of squared purchases
/// plus the substitutability-weighted cross terms over unordered pairs.
pub fn purchase_quadratic(thetas: &[f64], v: f64) -> f64 {
    let squares: f64 = thetas.iter().map(|t| t * t).sum();
    let mut cross = 0.0;
    for i in 0..thetas.len() {
        for j in (i + 1)..thetas.len() {
            cross += thetas[i] * thetas[j];
        }
    }
    0.5 * (squares + 2.0 * v * cross)
}

/// The owner's accuracy purchase for a posted price profile.
///
/// `Printed` applies the direct linear map and requires every eta to be
/// one. `Derived` solves the first-order system in closed form (rank-one
/// update of a scaled identity), which is the direct map with both
/// coefficients negated.
pub fn mo_best_response(
    prices: &PriceProfile,
    coeffs: &MarketCoefficients,
    etas: &[f64],
    mode: ResponseMode,
) -> Result<PurchaseProfile> {
    let k = prices.ue_count();
    if etas.len() != k {
        return Err(Error::invalid("one eta per UE is required"));
    }
    if k != coeffs.players {
        return Err(Error::invalid(format!(
            "market constants were built for {} players, got {k} price vectors",
            coeffs.players
        )));
    }
    let totals: Vec<f64> = (0..k).map(|i| prices.total(i)).collect();
    let thetas = match mode {
        ResponseMode::Printed => {
            if etas.iter().any(|&e| e != 1.0) {
                return Err(Error::Configuration(
                    "the printed purchase map is only defined for eta = 1".into(),
                ));
            }
            let grand: f64 = totals.iter().sum();
            totals
                .iter()
                .map(|&own| coeffs.a * own + coeffs.b * (grand - own))
                .collect()
        }
        ResponseMode::Derived => {
            let v = coeffs.substitutability;
            if v >= 1.0 {
                return Err(Error::invalid("purchase system is singular at v = 1"));
            }
            // M = (1-v) I + v * ones; invert by the rank-one update formula.
            let b: Vec<f64> = (0..k).map(|i| etas[i] * totals[i]).collect();
            let sum_b: f64 = b.iter().sum();
            let shrink = v / (1.0 - v + k as f64 * v);
            b.iter()
                .map(|&bi| (bi - shrink * sum_b) / (1.0 - v))
                .collect()
        }
    };
    Ok(PurchaseProfile { thetas })
}
