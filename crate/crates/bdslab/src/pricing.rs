//! Feasibility bounds and the equilibrium value of the trade price `T(p)`.
//!
//! The betraying coalition (power `p`) sells its withheld full proofs of work
//! to the victim pool for `T(p)` per unit of published reward. For the trade
//! to happen at all, three conditions must hold:
//!
//! * the victim must not lose by buying — an **upper** bound on `T(p)`
//!   ([`c1_upper_bound`]): at that price the victim earns exactly what it
//!   earned under pure withholding;
//! * the betrayer must not lose versus staying loyal — a **lower** bound
//!   ([`c2_lower_bound`]): at that price betraying pays exactly as much as
//!   cooperating with the attack;
//! * the price must stay below the betraying power itself (no pool would pay
//!   a stream of blocks more than the power producing it could honestly
//!   earn) — which the upper bound already implies.
//!
//! For every scenario satisfying `0 < p <= tau*alpha < beta < 0.5` the
//! interval is non-empty, so a mutually profitable price always exists. The
//! one-shot bargaining over that interval is an ultimatum: the betrayer
//! proposes, the victim accepts anything not below its indifference point,
//! so the subgame-perfect offer is the upper bound itself
//! ([`equilibrium_price`]).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Scenario;

/// The feasible trade-price interval for a given betraying power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriceBounds {
    /// Lowest price the betraying coalition accepts (its indifference point
    /// versus staying loyal).
    pub lower: f64,
    /// Highest price the victim pool accepts (its indifference point versus
    /// refusing the trade).
    pub upper: f64,
    /// Whether `lower < upper`, i.e. a mutually profitable price exists.
    pub feasible: bool,
}

fn check_betraying_power(s: &Scenario, p: f64) -> Result<()> {
    let ta = s.infiltrating_power();
    if !p.is_finite() || p <= 0.0 || p > ta * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "betraying power must lie in (0, tau*alpha = {ta}], got {p}"
        )));
    }
    Ok(())
}

/// Upper feasibility bound on `T(p)`: the victim pool's indifference price.
///
/// Buying power `p`'s blocks raises the victim's publication share from
/// `beta` to `beta + p` while raising the network-wide publication rate from
/// `1 - tau*alpha` to `1 - tau*alpha + p`; the bound is exactly the price
/// that cancels the gain:
///
/// ```text
/// b(p) = p * (1 - tau*alpha - beta) / ((1 - tau*alpha + p) * (1 - tau*alpha))
/// ```
///
/// It is strictly below `p` for every valid scenario.
pub fn c1_upper_bound(s: &Scenario, p: f64) -> Result<f64> {
    check_betraying_power(s, p)?;
    let ta = s.infiltrating_power();
    Ok(p * (1.0 - ta - s.beta()) / ((1.0 - ta + p) * (1.0 - ta)))
}

/// Lower feasibility bound on `T(p)`: the betraying coalition's indifference
/// price, i.e. the `T` at which [`crate::model::bds_miner_revenue`] equals
/// the loyal-miner baseline for the same power.
///
/// Solving that equality for `T` gives
///
/// ```text
/// a(p) = (beta + tau*alpha) / (beta + tau*alpha - p*tau)
///        * 1 / ((1 - tau*alpha) * (1 - tau*alpha + p))
///        * (p / alpha)
///        * [ p*(1-tau)*alpha
///            + tau*alpha/(beta + tau*alpha) * (p*beta - p*(1 - tau*alpha)) ]
/// ```
///
/// For `tau` at or near the attacker's optimum the bound is strictly
/// positive: betraying carries an opportunity cost (the betrayer's own pool
/// distributions shrink as the sabotage is undone), so a zero-price sale
/// would be a net loss. At `tau` far above the optimum the formula can go
/// negative — betraying then pays for itself even for free — and it is
/// returned as-is.
pub fn c2_lower_bound(s: &Scenario, p: f64) -> Result<f64> {
    check_betraying_power(s, p)?;
    let (a, b, tau) = (s.alpha(), s.beta(), s.tau());
    let ta = s.infiltrating_power();
    let prefactor = (b + ta) / (b + ta - p * tau) / ((1.0 - ta) * (1.0 - ta + p));
    let bracket = p * (1.0 - tau) * a + (ta / (b + ta)) * (p * b - p * (1.0 - ta));
    Ok(prefactor * (p / a) * bracket)
}

/// Both bounds plus a feasibility flag.
///
/// Degenerate requests (no infiltration, hence nothing to sell) are rejected;
/// a betraying power above `tau*alpha` is infeasible.
pub fn price_bounds(s: &Scenario, p: f64) -> Result<PriceBounds> {
    if s.infiltrating_power() == 0.0 {
        return Err(Error::DegenerateInput(
            "tau = 0 means no infiltration and no blocks to sell".to_string(),
        ));
    }
    if !p.is_finite() || p <= 0.0 {
        return Err(Error::DegenerateInput(format!(
            "betraying power must be positive to price a trade, got {p}"
        )));
    }
    if p > s.infiltrating_power() * (1.0 + 1e-12) {
        return Err(Error::InfeasibleScenario(format!(
            "betraying power {p} exceeds the infiltrating power {}",
            s.infiltrating_power()
        )));
    }
    let lower = c2_lower_bound(s, p)?;
    let upper = c1_upper_bound(s, p)?;
    Ok(PriceBounds {
        lower,
        upper,
        feasible: lower < upper,
    })
}

/// The subgame-perfect ultimatum price: the upper bound, where the victim is
/// indifferent and accepts. Errors if the interval is empty.
pub fn equilibrium_price(s: &Scenario, p: f64) -> Result<f64> {
    let bounds = price_bounds(s, p)?;
    if !bounds.feasible {
        return Err(Error::InfeasiblePrice(format!(
            "empty feasible interval [{}, {}] — no price profits both sides",
            bounds.lower, bounds.upper
        )));
    }
    Ok(bounds.upper)
}
