//! Monte Carlo replay of the mining race, cross-validating the closed
//! forms.
//!
//! One trial = one full proof of work found somewhere in the network. The
//! finder is drawn from five categories with probabilities equal to their
//! hash powers:
//!
//! | category            | power              | outcome                        |
//! |---------------------|--------------------|--------------------------------|
//! | outside miners      | `1 - alpha - beta`  | external block, reward 1      |
//! | attacker direct     | `(1-tau) * alpha`   | attacker treasury +1          |
//! | victim's own        | `beta`              | victim pool +1                |
//! | loyal infiltrator   | `(1-r) * tau*alpha` | withheld — no block published |
//! | betrayer            | `r * tau*alpha`     | sold to victim, published;    |
//! |                     |                     | betrayer pockets the sale     |
//!
//! Withheld trials consume a trial without a published block, which is
//! exactly how the analytic `1/(1 - tau*alpha + p)` normalization arises;
//! everything downstream is accounted per published block so the simulator
//! and the formulas share units. The analytic trade price `T` is quoted per
//! unit of published reward, so each individual sale clears at
//! `pi = T * (1 - tau*alpha + p) / p`, making expected payments per
//! published block equal `T`.
//!
//! Settlement is expectation-style (pay-per-share): the victim pool splits
//! its net income between its own miners and the infiltrator accounts in
//! proportion to partial-proof contributions, and the attacking pool
//! redistributes its books proportionally to member power. In
//! [`SimMode::RoundLevel`] those proportions are the exact powers; in
//! [`SimMode::ShareLevel`] the partial proofs are actually drawn (a
//! geometric number of extra shares per trial, multinomially assigned by
//! power) and both pools settle on the realized share tallies instead.
//!
//! Reproducibility: the generator is ChaCha12, seeded from the master seed,
//! with two dedicated streams per replica — stream `2*replica` drives finder
//! draws, stream `2*replica + 1` drives share draws. Replicas merge in index
//! order, so results are bit-identical for a fixed `(scenario, config)`
//! regardless of thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{self, Actor, PricePolicy, Scenario};

/// Granularity of the stochastic replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SimMode {
    /// Draw only block finders; settle pools at exact power proportions.
    RoundLevel,
    /// Additionally draw partial-proof submissions and settle pools on the
    /// realized share tallies.
    ShareLevel,
}

/// Simulator configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    /// Hash-race trials per replica.
    pub rounds: u64,
    /// Master RNG seed; replica streams derive from it deterministically.
    pub seed: u64,
    /// Independent repetitions for variance estimation.
    pub replicas: u32,
    /// Replay granularity.
    pub mode: SimMode,
    /// Expected partial proofs per full proof (ShareLevel only); 1 means
    /// shares carry no extra information beyond the finds themselves.
    pub share_difficulty: u32,
    /// Fault injection: betrayers submit shares but "forget" the full proof
    /// of work. The victim pool pays nothing for such submissions, so the
    /// betrayal degenerates to ordinary withholding.
    pub betrayer_omits_fpow: bool,
}

impl SimConfig {
    /// Round-level config with the given trial count and seed, one replica.
    pub fn new(rounds: u64, seed: u64) -> Self {
        SimConfig {
            rounds,
            seed,
            replicas: 1,
            mode: SimMode::RoundLevel,
            share_difficulty: 1,
            betrayer_omits_fpow: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::InvalidParameter(
                "rounds must be at least 1".to_string(),
            ));
        }
        if self.replicas == 0 {
            return Err(Error::InvalidParameter(
                "replicas must be at least 1".to_string(),
            ));
        }
        if self.share_difficulty == 0 {
            return Err(Error::InvalidParameter(
                "share difficulty must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// Raw integer tallies accumulated over all replicas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Tallies {
    /// Trials executed.
    pub rounds: u64,
    /// Blocks actually published.
    pub published: u64,
    /// Finds withheld (loyal infiltrators, plus faulty betrayers when the
    /// fault flag is on).
    pub withheld: u64,
    pub found_by_others: u64,
    pub found_by_attacker_direct: u64,
    pub found_by_victim_own: u64,
    pub found_by_loyal: u64,
    pub found_by_betrayer: u64,
}

/// One actor's aggregated estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActorEstimate {
    pub actor: Actor,
    /// Mean RER across replicas, as a fraction.
    pub mean_rer: f64,
    /// Standard error of that mean (0 with a single replica).
    pub stderr: f64,
    /// Mean revenue per unit of published reward.
    pub mean_revenue: f64,
    /// The honest baseline (the actor's hash power).
    pub honest_power: f64,
}

/// Monte Carlo estimates with reproducibility metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimate {
    /// Per-actor estimates in [`Actor::ALL`] order.
    pub actors: Vec<ActorEstimate>,
    /// Integer tallies summed over replicas.
    pub tallies: Tallies,
    /// Mean trade payment per unit of published reward (equals the price
    /// in expectation; exactly zero when betrayers omit the full proofs).
    pub trade_income: f64,
    /// The per-published-reward trade price used.
    pub price: f64,
    pub rounds_per_replica: u64,
    pub replicas: u32,
    pub seed: u64,
    pub mode: SimMode,
}

impl SimEstimate {
    /// Estimate for one actor.
    pub fn actor(&self, actor: Actor) -> &ActorEstimate {
        self.actors
            .iter()
            .find(|a| a.actor == actor)
            .expect("all actors are always present")
    }
}

/// Per-replica outcome: tallies plus the derived per-actor revenue
/// fractions (per unit of published reward).
struct ReplicaOutcome {
    tallies: Tallies,
    revenue: [f64; 5],
    trade_frac: f64,
}

/// Cumulative category thresholds for one uniform draw in [0, 1).
/// Order: others, attacker direct, victim own, loyal infiltrator; anything
/// above the last threshold is a betrayer.
#[derive(Clone, Copy)]
struct CategoryDist {
    up_to_others: f64,
    up_to_attacker: f64,
    up_to_victim: f64,
    up_to_loyal: f64,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Category {
    Others,
    AttackerDirect,
    VictimOwn,
    Loyal,
    Betrayer,
}

impl CategoryDist {
    fn for_scenario(s: &Scenario) -> Self {
        let others = 1.0 - s.alpha() - s.beta();
        let attacker = (1.0 - s.tau()) * s.alpha();
        let victim = s.beta();
        let loyal = s.infiltrating_power() - s.betraying_power();
        CategoryDist {
            up_to_others: others,
            up_to_attacker: others + attacker,
            up_to_victim: others + attacker + victim,
            up_to_loyal: others + attacker + victim + loyal,
        }
    }

    #[inline]
    fn draw(&self, u: f64) -> Category {
        if u < self.up_to_others {
            Category::Others
        } else if u < self.up_to_attacker {
            Category::AttackerDirect
        } else if u < self.up_to_victim {
            Category::VictimOwn
        } else if u < self.up_to_loyal {
            Category::Loyal
        } else {
            Category::Betrayer
        }
    }
}

/// Integer tallies local to one replica run.
#[derive(Default)]
struct Counts {
    found: [u64; 5],
    withheld: u64,
    published: u64,
    shares: [u64; 5],
}

fn run_replica(
    s: &Scenario,
    cfg: &SimConfig,
    dist: &CategoryDist,
    per_sale_price: f64,
    replica: u32,
) -> ReplicaOutcome {
    let mut finder_rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    finder_rng.set_stream(2 * replica as u64);
    let mut share_rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    share_rng.set_stream(2 * replica as u64 + 1);

    let share_level = cfg.mode == SimMode::ShareLevel;
    let d = cfg.share_difficulty as f64;
    // Inverse-CDF constant for the geometric extra-share count; unused at
    // difficulty 1 where the count is always zero.
    let log_keep = if cfg.share_difficulty > 1 {
        (1.0 - 1.0 / d).ln()
    } else {
        0.0
    };

    let mut c = Counts::default();
    for _ in 0..cfg.rounds {
        let category = dist.draw(finder_rng.gen::<f64>());
        c.found[category as usize] += 1;
        let publishes = match category {
            Category::Loyal => false,
            Category::Betrayer => !cfg.betrayer_omits_fpow,
            _ => true,
        };
        if publishes {
            c.published += 1;
        } else {
            c.withheld += 1;
        }
        if share_level {
            // The find itself is also a share (a full proof meets the share
            // difficulty), plus a geometric number of extra shares spread
            // over the whole network by power.
            c.shares[category as usize] += 1;
            if cfg.share_difficulty > 1 {
                let u = share_rng.gen::<f64>();
                let extra = ((1.0 - u).ln() / log_keep) as u64;
                for _ in 0..extra {
                    let sc = dist.draw(share_rng.gen::<f64>());
                    c.shares[sc as usize] += 1;
                }
            }
        }
    }

    settle(s, cfg, &c, per_sale_price)
}

/// Converts integer tallies into per-actor revenue fractions.
///
/// Victim-pool gross income is one block reward per published victim-side
/// block (own finds plus purchased betrayer finds); the per-sale price is
/// paid out of it, and the remainder is split own-miners : infiltrators.
/// The attacking pool's books (direct blocks plus the routed infiltrator
/// share) are redistributed to direct, loyal, and betraying members. The
/// split proportions are exact powers at round level and realized share
/// tallies at share level.
fn settle(s: &Scenario, cfg: &SimConfig, c: &Counts, per_sale_price: f64) -> ReplicaOutcome {
    let sold = if cfg.betrayer_omits_fpow {
        0
    } else {
        c.found[Category::Betrayer as usize]
    };
    let victim_gross = (c.found[Category::VictimOwn as usize] + sold) as f64;
    let trade_income = sold as f64 * per_sale_price;
    let victim_net = victim_gross - trade_income;

    // Victim pool split between its own miners and infiltrator accounts.
    let (own_weight, infiltrator_weight) = match cfg.mode {
        SimMode::RoundLevel => (s.beta(), s.infiltrating_power()),
        SimMode::ShareLevel => (
            c.shares[Category::VictimOwn as usize] as f64,
            (c.shares[Category::Loyal as usize] + c.shares[Category::Betrayer as usize]) as f64,
        ),
    };
    let victim_pool_weight = own_weight + infiltrator_weight;
    let routed = if victim_pool_weight > 0.0 {
        victim_net * (infiltrator_weight / victim_pool_weight)
    } else {
        0.0
    };
    let victim_own = victim_net - routed;

    // Attacking pool redistribution across its three member groups.
    let treasury = c.found[Category::AttackerDirect as usize] as f64 + routed;
    let (direct_w, loyal_w, betrayer_w) = match cfg.mode {
        SimMode::RoundLevel => (
            (1.0 - s.tau()) * s.alpha(),
            s.infiltrating_power() - s.betraying_power(),
            s.betraying_power(),
        ),
        SimMode::ShareLevel => (
            c.shares[Category::AttackerDirect as usize] as f64,
            c.shares[Category::Loyal as usize] as f64,
            c.shares[Category::Betrayer as usize] as f64,
        ),
    };
    let attacker_weight = direct_w + loyal_w + betrayer_w;
    let (loyal_cut, betrayer_cut) = if attacker_weight > 0.0 {
        (
            treasury * (loyal_w / attacker_weight),
            treasury * (betrayer_w / attacker_weight),
        )
    } else {
        (0.0, 0.0)
    };

    let published = c.published as f64;
    let frac = |v: f64| if published > 0.0 { v / published } else { 0.0 };
    // Actor order: AttackerPool, VictimOwnMiners, BdsMiner, LoyalMiner,
    // Others — matching Actor::ALL.
    let revenue = [
        frac(treasury),
        frac(victim_own),
        frac(trade_income + betrayer_cut),
        frac(loyal_cut),
        frac(c.found[Category::Others as usize] as f64),
    ];

    ReplicaOutcome {
        tallies: Tallies {
            rounds: cfg.rounds,
            published: c.published,
            withheld: c.withheld,
            found_by_others: c.found[Category::Others as usize],
            found_by_attacker_direct: c.found[Category::AttackerDirect as usize],
            found_by_victim_own: c.found[Category::VictimOwn as usize],
            found_by_loyal: c.found[Category::Loyal as usize],
            found_by_betrayer: c.found[Category::Betrayer as usize],
        },
        revenue,
        trade_frac: frac(trade_income),
    }
}

fn aggregate(
    s: &Scenario,
    cfg: &SimConfig,
    price: f64,
    outcomes: Vec<ReplicaOutcome>,
) -> SimEstimate {
    let n = outcomes.len() as f64;
    let mut tallies = Tallies::default();
    for o in &outcomes {
        tallies.rounds += o.tallies.rounds;
        tallies.published += o.tallies.published;
        tallies.withheld += o.tallies.withheld;
        tallies.found_by_others += o.tallies.found_by_others;
        tallies.found_by_attacker_direct += o.tallies.found_by_attacker_direct;
        tallies.found_by_victim_own += o.tallies.found_by_victim_own;
        tallies.found_by_loyal += o.tallies.found_by_loyal;
        tallies.found_by_betrayer += o.tallies.found_by_betrayer;
    }

    let actors = Actor::ALL
        .iter()
        .enumerate()
        .map(|(i, &actor)| {
            let honest = actor.honest_power(s);
            let rers: Vec<f64> = outcomes
                .iter()
                .map(|o| {
                    if honest > 0.0 {
                        (o.revenue[i] - honest) / honest
                    } else {
                        0.0
                    }
                })
                .collect();
            let mean_rer = rers.iter().sum::<f64>() / n;
            let stderr = if rers.len() > 1 {
                let var = rers.iter().map(|r| (r - mean_rer).powi(2)).sum::<f64>() / (n - 1.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            let mean_revenue = outcomes.iter().map(|o| o.revenue[i]).sum::<f64>() / n;
            ActorEstimate {
                actor,
                mean_rer,
                stderr,
                mean_revenue,
                honest_power: honest,
            }
        })
        .collect();

    let trade_income = outcomes.iter().map(|o| o.trade_frac).sum::<f64>() / n;
    SimEstimate {
        actors,
        tallies,
        trade_income,
        price,
        rounds_per_replica: cfg.rounds,
        replicas: cfg.replicas,
        seed: cfg.seed,
        mode: cfg.mode,
    }
}

fn run(s: &Scenario, cfg: &SimConfig, policy: PricePolicy) -> Result<SimEstimate> {
    cfg.validate()?;
    let price = model::resolve_price(s, policy)?;
    let p = s.betraying_power();
    let per_sale_price = if p > 0.0 {
        price * (1.0 - s.infiltrating_power() + p) / p
    } else {
        0.0
    };
    let dist = CategoryDist::for_scenario(s);
    // Deterministic merge: replicas collect in index order no matter how
    // the thread pool schedules them.
    let outcomes: Vec<ReplicaOutcome> = (0..cfg.replicas)
        .into_par_iter()
        .map(|replica| run_replica(s, cfg, &dist, per_sale_price, replica))
        .collect();
    Ok(aggregate(s, cfg, price, outcomes))
}

/// Runs the simulator in whatever mode the config selects.
pub fn simulate(s: &Scenario, cfg: &SimConfig, policy: PricePolicy) -> Result<SimEstimate> {
    run(s, cfg, policy)
}

/// Share-level run; rejects configs whose mode says otherwise.
pub fn simulate_share_level(
    s: &Scenario,
    cfg: &SimConfig,
    policy: PricePolicy,
) -> Result<SimEstimate> {
    if cfg.mode != SimMode::ShareLevel {
        return Err(Error::InvalidParameter(
            "share-level simulation requires mode = ShareLevel".to_string(),
        ));
    }
    run(s, cfg, policy)
}

/// Multi-replica run for variance estimation; requires at least two
/// replicas so the standard error is defined.
pub fn replicate(s: &Scenario, cfg: &SimConfig, policy: PricePolicy) -> Result<SimEstimate> {
    if cfg.replicas < 2 {
        return Err(Error::InvalidParameter(
            "replication needs at least 2 replicas".to_string(),
        ));
    }
    run(s, cfg, policy)
}
