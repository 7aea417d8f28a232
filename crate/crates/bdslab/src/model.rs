//! Closed-form revenue model for block-withholding (BWH) infiltration and the
//! block double-submission (BDS) trade built on top of it.
//!
//! Setting: total network hash power is 1. An attacking pool with power
//! `alpha` diverts a fraction `tau` of its power into a victim pool of power
//! `beta`. The infiltrators submit only partial proofs of work, so the victim
//! pays them shares while they contribute no blocks — the classic BWH attack.
//! In the BDS variant, a sub-fraction `participation` of the infiltrating
//! power betrays the attacker: those miners sell their withheld full proofs
//! of work to the victim pool, which publishes them and pays a trade price.
//!
//! All revenues here are expected values **per unit of total published block
//! reward**. When power `tau*alpha - p` withholds its finds (where
//! `p = participation*tau*alpha` is the betraying power), only a fraction
//! `1 - tau*alpha + p` of rounds yield a published block; dividing by that
//! factor converts per-round expectations into per-published-reward shares.
//! Every formula in this module keeps that normalization, which is what makes
//! the conservation identity (all revenue shares sum to 1) hold exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pricing;

/// A unitless fraction of total network hash power, validated to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerShare(f64);

impl PowerShare {
    /// Wraps a hash-power fraction, rejecting values outside `[0, 1]` and
    /// non-finite input.
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter(format!(
                "power share must lie in [0, 1], got {value}"
            )));
        }
        Ok(PowerShare(value))
    }

    /// The raw fraction.
    pub fn value(self) -> f64 {
        self.0
    }
}

/// One attack configuration: pool powers, infiltration, and betrayal level.
///
/// Construction enforces the inequality chain the whole analysis rests on:
/// `0 < alpha < 0.5`, `0 < beta < 0.5`, `tau` and `participation` in
/// `[0, 1]`, and `tau*alpha < beta` whenever `tau > 0` (an infiltration force
/// at least as large as the victim's own power breaks the trade-price
/// analysis, so such scenarios are rejected rather than silently mispriced).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    alpha: f64,
    beta: f64,
    tau: f64,
    participation: f64,
}

impl Scenario {
    /// Validates and builds a scenario.
    ///
    /// `alpha`: attacking pool power. `beta`: victim pool power. `tau`:
    /// fraction of `alpha` infiltrated into the victim. `participation`:
    /// fraction of the infiltrating power that betrays via BDS.
    pub fn new(alpha: f64, beta: f64, tau: f64, participation: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() || v <= 0.0 || v >= 0.5 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie strictly between 0 and 0.5 (pool powers above \
                     half the network are out of scope), got {v}"
                )));
            }
        }
        for (name, v) in [("tau", tau), ("participation", participation)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        if tau * alpha >= beta {
            return Err(Error::InfeasibleScenario(format!(
                "infiltrating power tau*alpha = {} must stay below the victim's own \
                 power beta = {beta}; reduce tau or alpha",
                tau * alpha
            )));
        }
        Ok(Scenario {
            alpha,
            beta,
            tau,
            participation,
        })
    }

    /// Attacking pool power `alpha`.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Victim pool power `beta`.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Infiltration ratio `tau`.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Fraction of the infiltrating power that betrays.
    pub fn participation(&self) -> f64 {
        self.participation
    }

    /// Total infiltrating power `tau*alpha`.
    pub fn infiltrating_power(&self) -> f64 {
        self.tau * self.alpha
    }

    /// Betraying power `p = participation * tau * alpha`.
    pub fn betraying_power(&self) -> f64 {
        self.participation * self.tau * self.alpha
    }

    /// Same powers and infiltration, different betrayal level.
    pub fn with_participation(&self, participation: f64) -> Result<Self> {
        Scenario::new(self.alpha, self.beta, self.tau, participation)
    }

    /// Same powers and infiltration, with `participation` chosen so the
    /// betraying power equals `p` (used by the game module, where the
    /// betraying power is decided by which miners defect).
    pub fn with_betraying_power(&self, p: f64) -> Result<Self> {
        let ta = self.infiltrating_power();
        if !(0.0..=ta * (1.0 + 1e-12)).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "betraying power {p} must lie in [0, tau*alpha = {ta}]"
            )));
        }
        let r = if ta == 0.0 { 0.0 } else { (p / ta).min(1.0) };
        self.with_participation(r)
    }
}

/// How the trade price is chosen when building a [`RevenueReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PricePolicy {
    /// The ultimatum-equilibrium price: the victim's indifference point,
    /// i.e. the upper feasibility bound. This is the price the one-shot
    /// proposer/responder analysis predicts.
    Equilibrium,
    /// Midpoint of the feasible interval, with the lower bound floored at
    /// zero (a betrayer never pays the victim to take blocks); useful for
    /// sensitivity checks away from the equilibrium endpoint.
    Midpoint,
    /// A caller-supplied price per unit of published reward; rejected if it
    /// falls outside `[0, upper bound]`.
    Fixed(f64),
    /// Betrayers give the blocks away. Isolates the publication-rate effect
    /// of the trade from the payment itself.
    Zero,
}

/// Expected per-actor revenue decomposition for one scenario, all fields in
/// units of total published block reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevenueReport {
    /// Everything distributed through the attacking pool's books: its own
    /// miners' blocks plus the victim-pool shares its infiltrators earn.
    pub attacker_pool: f64,
    /// The victim pool's own (non-infiltrator) miners.
    pub victim_own_miners: f64,
    /// Betrayers' private income from selling full proofs of work.
    pub bds_trade_income: f64,
    /// Betrayers' total: trade income plus their cut of the attacking pool's
    /// distributions.
    pub bds_miner_total: f64,
    /// Total revenue of the loyal (non-betraying) infiltrating power.
    pub loyal_miner_total: f64,
    /// Miners outside both pools.
    pub others: f64,
    /// The trade price `T` actually used.
    pub price: f64,
}

impl RevenueReport {
    /// Total revenue of one actor (for betrayers this includes trade
    /// income).
    pub fn get(&self, actor: Actor) -> f64 {
        match actor {
            Actor::AttackerPool => self.attacker_pool,
            Actor::VictimOwnMiners => self.victim_own_miners,
            Actor::BdsMiner => self.bds_miner_total,
            Actor::LoyalMiner => self.loyal_miner_total,
            Actor::Others => self.others,
        }
    }
}

/// The five revenue-earning actors the laboratory tracks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Actor {
    /// The attacking pool's books as a whole.
    AttackerPool,
    /// The victim pool's own (non-infiltrator) miners.
    VictimOwnMiners,
    /// The betraying infiltrators, trade income included.
    BdsMiner,
    /// The loyal (withholding) infiltrators.
    LoyalMiner,
    /// Everyone outside both pools.
    Others,
}

impl Actor {
    /// All actors in reporting order.
    pub const ALL: [Actor; 5] = [
        Actor::AttackerPool,
        Actor::VictimOwnMiners,
        Actor::BdsMiner,
        Actor::LoyalMiner,
        Actor::Others,
    ];

    /// Stable snake_case name used in CSV/JSON output.
    pub fn name(self) -> &'static str {
        match self {
            Actor::AttackerPool => "attacker_pool",
            Actor::VictimOwnMiners => "victim_own_miners",
            Actor::BdsMiner => "bds_miner",
            Actor::LoyalMiner => "loyal_miner",
            Actor::Others => "others",
        }
    }

    /// The actor's honest revenue baseline: its hash power in the scenario.
    pub fn honest_power(self, s: &Scenario) -> f64 {
        match self {
            Actor::AttackerPool => s.alpha(),
            Actor::VictimOwnMiners => s.beta(),
            Actor::BdsMiner => s.betraying_power(),
            Actor::LoyalMiner => s.infiltrating_power() - s.betraying_power(),
            Actor::Others => 1.0 - s.alpha() - s.beta(),
        }
    }
}

impl std::fmt::Display for Actor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-actor relative extra reward (RER) versus honest mining, as fractions
/// (0.5 = +50%). Actors whose honest baseline power is zero are reported as
/// 0 by convention: no stake, no extra reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActorRers {
    pub attacker_pool: f64,
    pub victim_own_miners: f64,
    pub bds_miner: f64,
    pub loyal_miner: f64,
    pub others: f64,
}

impl ActorRers {
    /// Field access by actor.
    pub fn get(&self, actor: Actor) -> f64 {
        match actor {
            Actor::AttackerPool => self.attacker_pool,
            Actor::VictimOwnMiners => self.victim_own_miners,
            Actor::BdsMiner => self.bds_miner,
            Actor::LoyalMiner => self.loyal_miner,
            Actor::Others => self.others,
        }
    }
}

/// Revenue of the attacking pool under pure BWH (nobody betrays;
/// `participation` is ignored).
///
/// Two terms: its direct mining `(1-tau)*alpha` scaled by the publication
/// rate `1 - tau*alpha`, plus the victim-pool share its infiltrators earn —
/// the victim's per-published-reward income `beta/(1-tau*alpha)` split by
/// partial-proof contribution, of which the infiltrators hold
/// `tau*alpha/(beta + tau*alpha)`.
pub fn bwh_attacker_revenue(s: &Scenario) -> f64 {
    let (a, b, ta) = (s.alpha, s.beta, s.infiltrating_power());
    (1.0 - s.tau) * a / (1.0 - ta) + (b / (1.0 - ta)) * (ta / (b + ta))
}

/// Revenue of the victim pool's own miners under pure BWH: the pool's income
/// `beta/(1-tau*alpha)` times the share `beta/(beta + tau*alpha)` its own
/// miners hold of the pool's partial proofs.
pub fn bwh_victim_revenue(s: &Scenario) -> f64 {
    let (b, ta) = (s.beta, s.infiltrating_power());
    (b / (1.0 - ta)) * (b / (b + ta))
}

/// The infiltration ratio that maximizes [`bwh_attacker_revenue`] for the
/// given pool powers, in closed form.
///
/// Setting the derivative of the attacker revenue in `tau` to zero yields a
/// quadratic; this is its root inside the unit interval:
///
/// ```text
/// tau* = (beta - alpha*beta - sqrt(beta^2 - alpha*beta^2 - alpha*beta^3))
///        / (-alpha + alpha^2 + alpha*beta)
/// ```
///
/// For all valid pool powers the result lies in `(0, 0.5)` — even two pools
/// approaching half the network each never divert half their power.
pub fn optimal_tau(alpha: f64, beta: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("beta", beta)] {
        if !v.is_finite() || v <= 0.0 || v >= 0.5 {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie strictly between 0 and 0.5, got {v}"
            )));
        }
    }
    let denominator = -alpha + alpha * alpha + alpha * beta;
    if denominator == 0.0 {
        return Err(Error::DegenerateInput(format!(
            "optimal infiltration is undefined at alpha = {alpha}, beta = {beta} \
             (zero denominator)"
        )));
    }
    let discriminant = beta * beta - alpha * beta * beta - alpha * beta * beta * beta;
    debug_assert!(
        discriminant >= 0.0,
        "discriminant is positive for alpha < 1"
    );
    Ok((beta - alpha * beta - discriminant.sqrt()) / denominator)
}

/// Revenue of the victim pool's own miners when betraying power
/// `p = participation*tau*alpha` sells its blocks to the victim at `price`.
///
/// The victim now publishes at rate `beta + p` (its own blocks plus the
/// purchased ones) out of `1 - tau*alpha + p` network-wide, pays `price` per
/// unit of published reward for the stream, and splits the remainder by
/// partial-proof contribution, its own miners holding
/// `beta/(beta + tau*alpha)`.
pub fn bds_victim_revenue(s: &Scenario, price: f64) -> Result<f64> {
    let p = s.betraying_power();
    if p == 0.0 {
        return Err(Error::DegenerateInput(
            "no betraying power, so no trade to evaluate (participation*tau*alpha = 0)".to_string(),
        ));
    }
    if !price.is_finite() || price < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "price must be finite and non-negative, got {price}"
        )));
    }
    let (b, ta) = (s.beta, s.infiltrating_power());
    Ok(((b + p) / (1.0 - ta + p) - price) * (b / (b + ta)))
}

/// Revenue of one betraying miner of power `p_individual` when the collective
/// betraying power `p = participation*tau*alpha` sells at `price`.
///
/// Trade income is split within the betraying coalition proportionally to
/// power; pool-routed income is the miner's power share of the attacking
/// pool's distributions (direct blocks plus the victim-pool shares routed
/// back through infiltrator accounts, net of the victim's trade payment).
/// With `p_individual = p` this is the whole coalition's revenue.
pub fn bds_miner_revenue(s: &Scenario, p_individual: f64, price: f64) -> Result<f64> {
    let p = s.betraying_power();
    if p == 0.0 {
        return Err(Error::DegenerateInput(
            "no betraying power, so no betrayer revenue to evaluate".to_string(),
        ));
    }
    if !p_individual.is_finite() || p_individual <= 0.0 || p_individual > p * (1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "individual betraying power must lie in (0, p = {p}], got {p_individual}"
        )));
    }
    if !price.is_finite() || price < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "price must be finite and non-negative, got {price}"
        )));
    }
    let (a, b, ta) = (s.alpha, s.beta, s.infiltrating_power());
    let rate = 1.0 - ta + p;
    let pool_books = (1.0 - s.tau) * a / rate + ((b + p) / rate - price) * (ta / (b + ta));
    Ok((p_individual / p) * price + (p_individual / a) * pool_books)
}

/// Revenue of a loyal attacking-pool miner of power `q_individual` while
/// betraying power `p = participation*tau*alpha` trades at `price`.
///
/// The loyal miner earns only its power share of the attacking pool's
/// distributions — which the betrayal dilutes twice: the publication rate
/// rises (their withheld sabotage is partly undone) and the victim's trade
/// payment comes out of the shares routed back. With `p = 0, price = 0` this
/// is the plain BWH member baseline.
pub fn loyal_miner_revenue(s: &Scenario, q_individual: f64, price: f64) -> Result<f64> {
    if !q_individual.is_finite() || q_individual <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "individual power must be positive, got {q_individual}"
        )));
    }
    if !price.is_finite() || price < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "price must be finite and non-negative, got {price}"
        )));
    }
    let (a, b, ta, p) = (s.alpha, s.beta, s.infiltrating_power(), s.betraying_power());
    let rate = 1.0 - ta + p;
    let pool_books = (1.0 - s.tau) * a / rate + ((b + p) / rate - price) * (ta / (b + ta));
    Ok((q_individual / a) * pool_books)
}

/// Relative extra reward: `(revenue_attack - revenue_honest) / revenue_honest`.
pub fn rer(revenue_attack: f64, revenue_honest: f64) -> Result<f64> {
    if !revenue_honest.is_finite() || revenue_honest <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "honest revenue must be positive to form a ratio, got {revenue_honest}"
        )));
    }
    if !revenue_attack.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "attack revenue must be finite, got {revenue_attack}"
        )));
    }
    Ok((revenue_attack - revenue_honest) / revenue_honest)
}

/// Resolves a [`PricePolicy`] to a concrete trade price for betraying power
/// `p` under scenario `s`.
///
/// With `p = 0` there is no trade: every policy resolves to 0 except a fixed
/// positive price, which is rejected as infeasible.
pub fn resolve_price(s: &Scenario, policy: PricePolicy) -> Result<f64> {
    let p = s.betraying_power();
    if p == 0.0 {
        return match policy {
            PricePolicy::Fixed(t) if t != 0.0 => Err(Error::InfeasiblePrice(format!(
                "fixed price {t} with zero betraying power: there is no trade to price"
            ))),
            _ => Ok(0.0),
        };
    }
    match policy {
        PricePolicy::Equilibrium => pricing::equilibrium_price(s, p),
        PricePolicy::Midpoint => {
            let bounds = pricing::price_bounds(s, p)?;
            Ok(0.5 * (bounds.lower.max(0.0) + bounds.upper))
        }
        PricePolicy::Zero => Ok(0.0),
        PricePolicy::Fixed(t) => {
            let upper = pricing::c1_upper_bound(s, p)?;
            if !t.is_finite() || t < 0.0 || t > upper {
                return Err(Error::InfeasiblePrice(format!(
                    "fixed price {t} outside the feasible interval [0, {upper}]"
                )));
            }
            Ok(t)
        }
    }
}

/// Full per-actor revenue decomposition for one scenario under a price
/// policy. The fields satisfy exact conservation:
/// `others + victim_own_miners + attacker_pool + bds_trade_income = 1`
/// (the trade payment transfers value, never creates it).
pub fn revenue_report(s: &Scenario, policy: PricePolicy) -> Result<RevenueReport> {
    let price = resolve_price(s, policy)?;
    let (a, b, ta, p) = (s.alpha, s.beta, s.infiltrating_power(), s.betraying_power());
    let rate = 1.0 - ta + p;

    let others = (1.0 - a - b) / rate;
    // Victim-pool income net of the trade payment, split by partial-proof
    // contribution between its own miners and the infiltrator accounts.
    let victim_net = (b + p) / rate - price;
    let split = if ta == 0.0 { 0.0 } else { ta / (b + ta) };
    let victim_own_miners = victim_net - victim_net * split;
    let routed = victim_net * split;
    let attacker_pool = (1.0 - s.tau) * a / rate + routed;
    let bds_miner_total = price + (p / a) * attacker_pool;
    let loyal_miner_total = (ta - p) / a * attacker_pool;

    Ok(RevenueReport {
        attacker_pool,
        victim_own_miners,
        bds_trade_income: price,
        bds_miner_total,
        loyal_miner_total,
        others,
        price,
    })
}

/// Per-actor RERs for a report, against honest baselines equal to each
/// actor's hash power (attacking pool `alpha`, victim's own miners `beta`,
/// betrayers `p`, loyal infiltrators `tau*alpha - p`, outsiders
/// `1 - alpha - beta`). Zero-power actors get RER 0 by convention.
pub fn actor_rers(s: &Scenario, report: &RevenueReport) -> ActorRers {
    let p = s.betraying_power();
    let loyal_power = s.infiltrating_power() - p;
    let rer_or_zero = |revenue: f64, honest: f64| {
        if honest > 0.0 {
            (revenue - honest) / honest
        } else {
            0.0
        }
    };
    ActorRers {
        attacker_pool: rer_or_zero(report.attacker_pool, s.alpha),
        victim_own_miners: rer_or_zero(report.victim_own_miners, s.beta),
        bds_miner: rer_or_zero(report.bds_miner_total, p),
        loyal_miner: rer_or_zero(report.loyal_miner_total, loyal_power),
        others: rer_or_zero(report.others, 1.0 - s.alpha - s.beta),
    }
}
