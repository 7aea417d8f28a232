//! The betrayal games played inside the attacking pool, solved exactly.
//!
//! Three layers, mirroring the analysis:
//!
//! 1. **Miner vs. miner** ([`payoff_table_two`], [`n_miner_game`]): each
//!    infiltrating miner chooses Cooperate (keep withholding for the
//!    attacker) or Betray (sell withheld blocks to the victim). Payoffs come
//!    straight from the revenue model with the betraying coalition's
//!    collective power setting the trade price. Betrayal strictly dominates,
//!    so all-Betray is the unique pure Nash equilibrium.
//! 2. **Betrayers vs. victim** ([`ultimatum_equilibrium`]): a one-shot
//!    ultimatum over the feasible price interval; the proposer offers the
//!    victim's indifference price and the victim accepts.
//! 3. **Pool vs. its own miners** ([`principal_agent`]): anticipating
//!    all-Betray at the equilibrium price, the pool's treasury under attack
//!    drops below its honest revenue, so the pool chooses Honest. The
//!    attack defeats itself.
//!
//! Equilibria are found by exhaustive best-response enumeration over all
//! `2^N` profiles — exact, but capped at `N <= 12` miners.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, PricePolicy, Scenario};
use crate::pricing;

/// Maximum number of miners the exhaustive enumeration accepts.
pub const MAX_MINERS: usize = 12;

/// A single miner's choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinerAction {
    /// Keep withholding for the attacking pool.
    Cooperate,
    /// Sell withheld blocks to the victim pool.
    Betray,
}

impl std::fmt::Display for MinerAction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MinerAction::Cooperate => "C",
            MinerAction::Betray => "B",
        })
    }
}

/// The pool-level move in the principal-agent stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PoolAction {
    /// Launch the block-withholding attack (and live with the betrayal).
    Attack,
    /// Mine honestly.
    Honest,
}

/// One strategy profile: an action per miner, plus the pool's move when the
/// principal-agent stage is in play.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyProfile {
    pub actions: Vec<MinerAction>,
    pub pool_action: Option<PoolAction>,
}

impl std::fmt::Display for StrategyProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if let Some(pool) = self.pool_action {
            let tag = match pool {
                PoolAction::Attack => "A",
                PoolAction::Honest => "H",
            };
            write!(f, "{tag}")?;
            if !self.actions.is_empty() {
                write!(f, ",")?;
            }
        }
        let mut first = true;
        for a in &self.actions {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
            first = false;
        }
        Ok(())
    }
}

/// Payoffs of the two-miner betrayal game. Miner 1 holds power `p`, miner 2
/// holds power `q`; both are infiltrators inside the victim pool.
///
/// Field naming follows the conventional letters for this game:
/// `r` — reward when both cooperate; `d` — miner 1 cooperates while the
/// other betrays (the sucker payoff: the trade dilutes the pool books);
/// `h` — miner 1 betrays alone; `l` — both betray. The `*_prime` fields are
/// miner 2's payoffs in the same profile order. For every feasible price the
/// chains `h > r > d` and `l > r > d` hold, which is exactly why betrayal
/// dominates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffTable2 {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub d: f64,
    pub h: f64,
    pub l: f64,
    pub r_prime: f64,
    pub d_prime: f64,
    pub h_prime: f64,
    pub l_prime: f64,
}

/// Result of exhaustive pure-Nash enumeration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashResult {
    /// All pure equilibria, in profile-enumeration order (miner 1 is the
    /// least significant bit; Betray = bit set).
    pub equilibria: Vec<StrategyProfile>,
    /// Whether exactly one pure equilibrium exists.
    pub unique: bool,
}

/// Victim pool's move in the ultimatum stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UltimatumResponse {
    Accept,
    Reject,
}

/// A finite n-player Cooperate/Betray game in normal form, with payoffs
/// stored per profile. Profile index: bit `i` set means player `i` betrays.
#[derive(Debug, Clone)]
pub struct NormalFormGame {
    players: usize,
    /// `payoffs[profile][player]`.
    payoffs: Vec<Vec<f64>>,
}

impl NormalFormGame {
    /// Builds a game from an explicit payoff table;
    /// `payoffs[profile][player]` with the bitmask profile convention.
    pub fn from_profile_payoffs(players: usize, payoffs: Vec<Vec<f64>>) -> Result<Self> {
        if players == 0 {
            return Err(Error::InvalidParameter(
                "a game needs at least one player".to_string(),
            ));
        }
        if players > MAX_MINERS {
            return Err(Error::Capacity(format!(
                "{players} players exceed the exhaustive-enumeration cap of {MAX_MINERS}"
            )));
        }
        if payoffs.len() != 1 << players || payoffs.iter().any(|row| row.len() != players) {
            return Err(Error::InvalidParameter(format!(
                "payoff table must be 2^{players} profiles x {players} players"
            )));
        }
        Ok(NormalFormGame { players, payoffs })
    }

    /// Builds a game by evaluating `payoff(profile, player)` on every
    /// profile.
    pub fn from_fn(
        players: usize,
        mut payoff: impl FnMut(&[MinerAction], usize) -> Result<f64>,
    ) -> Result<Self> {
        if players == 0 {
            return Err(Error::InvalidParameter(
                "a game needs at least one player".to_string(),
            ));
        }
        if players > MAX_MINERS {
            return Err(Error::Capacity(format!(
                "{players} players exceed the exhaustive-enumeration cap of {MAX_MINERS}"
            )));
        }
        let mut payoffs = Vec::with_capacity(1 << players);
        let mut actions = vec![MinerAction::Cooperate; players];
        for profile in 0u32..(1 << players) {
            for (i, a) in actions.iter_mut().enumerate() {
                *a = if profile & (1 << i) != 0 {
                    MinerAction::Betray
                } else {
                    MinerAction::Cooperate
                };
            }
            let row: Result<Vec<f64>> = (0..players).map(|i| payoff(&actions, i)).collect();
            payoffs.push(row?);
        }
        Ok(NormalFormGame { players, payoffs })
    }

    fn profile(&self, mask: u32) -> StrategyProfile {
        let actions = (0..self.players)
            .map(|i| {
                if mask & (1 << i) != 0 {
                    MinerAction::Betray
                } else {
                    MinerAction::Cooperate
                }
            })
            .collect();
        StrategyProfile {
            actions,
            pool_action: None,
        }
    }

    /// Exhaustive pure-Nash search: a profile survives if no single player
    /// gains *strictly* by flipping their own action.
    pub fn pure_nash(&self) -> NashResult {
        let mut equilibria = Vec::new();
        for mask in 0u32..(1 << self.players) {
            let stable = (0..self.players).all(|i| {
                let deviation = mask ^ (1 << i);
                self.payoffs[deviation as usize][i] <= self.payoffs[mask as usize][i]
            });
            if stable {
                equilibria.push(self.profile(mask));
            }
        }
        let unique = equilibria.len() == 1;
        NashResult { equilibria, unique }
    }
}

/// Validates a miner power list against the scenario's infiltrating power.
fn check_powers(s: &Scenario, powers: &[f64]) -> Result<f64> {
    let ta = s.infiltrating_power();
    if ta == 0.0 {
        return Err(Error::DegenerateInput(
            "tau = 0: without infiltration there is nothing to betray".to_string(),
        ));
    }
    if powers.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one miner is required".to_string(),
        ));
    }
    if powers.len() > MAX_MINERS {
        return Err(Error::Capacity(format!(
            "{} miners exceed the exhaustive-enumeration cap of {MAX_MINERS}",
            powers.len()
        )));
    }
    for &w in powers {
        if !w.is_finite() || w <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "miner powers must be positive, got {w}"
            )));
        }
    }
    let sum: f64 = powers.iter().sum();
    if sum > ta * (1.0 + 1e-9) {
        return Err(Error::InvalidParameter(format!(
            "miner powers sum to {sum}, above the infiltrating power tau*alpha = {ta}"
        )));
    }
    Ok(sum.min(ta))
}

/// Payoff of `miner_power` given the betraying coalition `coalition_power`
/// (which includes the miner iff `betrays`), under the given price policy.
///
/// The trade price is re-resolved for each realized coalition: `T` depends
/// on the collective betraying power, so every subset of betrayers faces its
/// own price. An empty coalition trades nothing and the price is zero no
/// matter the policy.
fn member_payoff(
    s: &Scenario,
    miner_power: f64,
    coalition_power: f64,
    betrays: bool,
    policy: PricePolicy,
) -> Result<f64> {
    let world = s.with_betraying_power(coalition_power)?;
    if coalition_power == 0.0 {
        return model::loyal_miner_revenue(&world, miner_power, 0.0);
    }
    let price = model::resolve_price(&world, policy)?;
    if betrays {
        model::bds_miner_revenue(&world, miner_power, price)
    } else {
        model::loyal_miner_revenue(&world, miner_power, price)
    }
}

/// The 2x2 betrayal game between two infiltrating miners of powers `p` and
/// `q`.
pub fn payoff_table_two(s: &Scenario, p: f64, q: f64, policy: PricePolicy) -> Result<PayoffTable2> {
    check_powers(s, &[p, q])?;
    Ok(PayoffTable2 {
        p,
        q,
        r: member_payoff(s, p, 0.0, false, policy)?,
        d: member_payoff(s, p, q, false, policy)?,
        h: member_payoff(s, p, p, true, policy)?,
        l: member_payoff(s, p, p + q, true, policy)?,
        r_prime: member_payoff(s, q, 0.0, false, policy)?,
        d_prime: member_payoff(s, q, p, false, policy)?,
        h_prime: member_payoff(s, q, q, true, policy)?,
        l_prime: member_payoff(s, q, p + q, true, policy)?,
    })
}

/// Pure-Nash enumeration of a two-miner payoff table.
pub fn pure_nash_two(table: &PayoffTable2) -> NashResult {
    let payoffs = vec![
        vec![table.r, table.r_prime], // C, C
        vec![table.h, table.d_prime], // B, C
        vec![table.d, table.h_prime], // C, B
        vec![table.l, table.l_prime], // B, B
    ];
    NormalFormGame::from_profile_payoffs(2, payoffs)
        .expect("2-player table is always within capacity")
        .pure_nash()
}

/// Builds the n-miner betrayal game for the given powers and enumerates its
/// pure Nash equilibria.
///
/// Every profile's payoffs use collective-betrayal accounting: the betraying
/// subset pools its power, trades at the policy price for that collective
/// power, splits trade income proportionally to power, and everyone collects
/// their power share of the attacking pool's books.
pub fn n_miner_game(s: &Scenario, powers: &[f64], policy: PricePolicy) -> Result<NashResult> {
    check_powers(s, powers)?;
    let ta = s.infiltrating_power();
    let game = NormalFormGame::from_fn(powers.len(), |actions, i| {
        let coalition: f64 = powers
            .iter()
            .zip(actions)
            .filter(|(_, a)| **a == MinerAction::Betray)
            .map(|(w, _)| *w)
            .sum();
        member_payoff(
            s,
            powers[i],
            coalition.min(ta),
            actions[i] == MinerAction::Betray,
            policy,
        )
    })?;
    Ok(game.pure_nash())
}

/// Solves the two-stage pool game by backward induction.
///
/// Stage 2: given pool action Attack, the miners play the betrayal game and
/// land on its equilibrium (all-Betray). Stage 1: the pool compares its
/// treasury under that outcome at the equilibrium price with its honest
/// revenue `alpha`, attacking only for a strict gain — so ties go to
/// Honest. Since the equilibrium-price treasury is strictly below `alpha`
/// whenever anything is withheld, the returned profile is
/// (Honest, Betray, ..., Betray).
///
/// Degenerate case: with `tau = 0` (and hence no infiltrating miners —
/// `powers` must be empty) attacking changes nothing, the comparison ties,
/// and the profile is (Honest) with no miner actions.
pub fn principal_agent(s: &Scenario, powers: &[f64]) -> Result<StrategyProfile> {
    if s.infiltrating_power() == 0.0 && powers.is_empty() {
        return Ok(StrategyProfile {
            actions: Vec::new(),
            pool_action: Some(PoolAction::Honest),
        });
    }
    let subgame = n_miner_game(s, powers, PricePolicy::Equilibrium)?;
    // The subgame is dominance-solvable, so enumeration returns exactly one
    // profile; if a degenerate payoff tie ever produced several, the pool
    // plans for the most-betrayal one, and if float pathologies produced
    // none, the dominant all-Betray profile stands in.
    let betrayal_power = |profile: &StrategyProfile| {
        powers
            .iter()
            .zip(&profile.actions)
            .filter(|(_, act)| **act == MinerAction::Betray)
            .map(|(w, _)| *w)
            .sum::<f64>()
    };
    let miner_profile = subgame
        .equilibria
        .iter()
        .max_by(|a, b| betrayal_power(a).total_cmp(&betrayal_power(b)))
        .cloned()
        .unwrap_or_else(|| StrategyProfile {
            actions: vec![MinerAction::Betray; powers.len()],
            pool_action: None,
        });
    let betraying: f64 = powers
        .iter()
        .zip(&miner_profile.actions)
        .filter(|(_, act)| **act == MinerAction::Betray)
        .map(|(w, _)| *w)
        .sum();
    let world = s.with_betraying_power(betraying.min(s.infiltrating_power()))?;
    let treasury = model::revenue_report(&world, PricePolicy::Equilibrium)?.attacker_pool;
    let pool_action = if treasury > s.alpha() {
        PoolAction::Attack
    } else {
        PoolAction::Honest
    };
    Ok(StrategyProfile {
        actions: miner_profile.actions,
        pool_action: Some(pool_action),
    })
}

/// The one-shot ultimatum between the betraying coalition (proposer) and the
/// victim pool (responder): the proposer offers the victim's indifference
/// price — the upper bound — and the victim accepts.
pub fn ultimatum_equilibrium(s: &Scenario, p: f64) -> Result<(f64, UltimatumResponse)> {
    let price = pricing::equilibrium_price(s, p)?;
    Ok((price, UltimatumResponse::Accept))
}
