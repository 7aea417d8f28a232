//! Simulator validation: convergence to the closed forms, exact tally
//! conservation, share-level/round-level agreement, determinism, and the
//! fault-injection path.

use bdslab::model::{self, Actor, PricePolicy, Scenario};
use bdslab::montecarlo::{self, SimConfig, SimMode};
use bdslab::Error;

const CASE1: (f64, f64) = (0.18, 0.15);
const CASE2: (f64, f64) = (0.12, 0.18);

fn scenario(case: (f64, f64), participation: f64) -> Scenario {
    let tau = model::optimal_tau(case.0, case.1).unwrap();
    Scenario::new(case.0, case.1, tau, participation).unwrap()
}

#[test]
fn config_validation() {
    let s = scenario(CASE1, 1.0);
    let mut cfg = SimConfig::new(0, 1);
    assert!(matches!(
        montecarlo::simulate(&s, &cfg, PricePolicy::Equilibrium),
        Err(Error::InvalidParameter(_))
    ));
    cfg.rounds = 10;
    cfg.replicas = 0;
    assert!(matches!(
        montecarlo::simulate(&s, &cfg, PricePolicy::Equilibrium),
        Err(Error::InvalidParameter(_))
    ));
    cfg.replicas = 1;
    cfg.share_difficulty = 0;
    assert!(matches!(
        montecarlo::simulate(&s, &cfg, PricePolicy::Equilibrium),
        Err(Error::InvalidParameter(_))
    ));
    cfg.share_difficulty = 1;
    assert!(matches!(
        montecarlo::simulate_share_level(&s, &cfg, PricePolicy::Equilibrium),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        montecarlo::replicate(&s, &cfg, PricePolicy::Equilibrium),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn no_attack_means_no_extra_reward_for_anyone() {
    let s = Scenario::new(0.18, 0.15, 0.0, 0.0).unwrap();
    let mut cfg = SimConfig::new(100_000, 0xA11CE);
    cfg.replicas = 8;
    let est = montecarlo::simulate(&s, &cfg, PricePolicy::Equilibrium).unwrap();
    assert_eq!(est.tallies.withheld, 0);
    assert_eq!(est.trade_income, 0.0);
    for actor in [Actor::AttackerPool, Actor::VictimOwnMiners, Actor::Others] {
        let a = est.actor(actor);
        assert!(
            a.mean_rer.abs() < 3.0 * a.stderr,
            "{actor}: RER {} not within 3 stderr ({}) of zero",
            a.mean_rer,
            a.stderr
        );
    }
}

#[test]
fn tallies_conserve_rewards_exactly() {
    for (case, participation) in [(CASE1, 0.2), (CASE1, 1.0), (CASE2, 0.6)] {
        let s = scenario(case, participation);
        let mut cfg = SimConfig::new(200_000, 0xC0);
        cfg.replicas = 4;
        for mode in [SimMode::RoundLevel, SimMode::ShareLevel] {
            cfg.mode = mode;
            cfg.share_difficulty = 10;
            let est = montecarlo::simulate(&s, &cfg, PricePolicy::Equilibrium).unwrap();
            // Per published block: external + victim own + attacker books
            // + trade payment account for the whole reward.
            let total = est.actor(Actor::Others).mean_revenue
                + est.actor(Actor::VictimOwnMiners).mean_revenue
                + est.actor(Actor::AttackerPool).mean_revenue
                + est.trade_income;
            assert!(
                (total - 1.0).abs() < 1e-12,
                "conservation broke in {mode:?}: {total}"
            );
            // Finder categories partition the trials.
            let t = &est.tallies;
            assert_eq!(
                t.found_by_others
                    + t.found_by_attacker_direct
                    + t.found_by_victim_own
                    + t.found_by_loyal
                    + t.found_by_betrayer,
                t.rounds
            );
            assert_eq!(t.published + t.withheld, t.rounds);
            assert_eq!(t.withheld, t.found_by_loyal);
        }
    }
}

#[test]
fn case1_low_participation_reproduces_the_published_value() {
    // Benchmark: betrayer RER approximately 86.36% at 20% participation.
    let s = scenario(CASE1, 0.2);
    let mut cfg = SimConfig::new(1_000_000, 0xBD5_0001);
    cfg.replicas = 8;
    let est = montecarlo::replicate(&s, &cfg, PricePolicy::Equilibrium).unwrap();
    let bds = est.actor(Actor::BdsMiner);
    assert!(
        (bds.mean_rer - 0.8636).abs() < 3.0 * bds.stderr,
        "RER {} +- {} vs published 0.8636",
        bds.mean_rer,
        bds.stderr
    );
}

#[test]
fn case2_full_participation_reproduces_the_published_value() {
    // Benchmark: betrayer RER approximately 81.32% at full participation.
    let s = scenario(CASE2, 1.0);
    let mut cfg = SimConfig::new(1_000_000, 0xBD5_0002);
    cfg.replicas = 8;
    let est = montecarlo::replicate(&s, &cfg, PricePolicy::Equilibrium).unwrap();
    let bds = est.actor(Actor::BdsMiner);
    assert!(
        (bds.mean_rer - 0.8132).abs() < 3.0 * bds.stderr,
        "RER {} +- {} vs published 0.8132",
        bds.mean_rer,
        bds.stderr
    );
}

#[test]
fn every_actor_converges_to_the_analytic_value() {
    let mut cfg = SimConfig::new(200_000, 0xBD5_0003);
    cfg.replicas = 16;
    for case in [CASE1, CASE2] {
        for participation in [0.2, 0.4, 0.6, 0.8, 1.0] {
            let s = scenario(case, participation);
            let report = model::revenue_report(&s, PricePolicy::Equilibrium).unwrap();
            let analytic = model::actor_rers(&s, &report);
            let est = montecarlo::simulate(&s, &cfg, PricePolicy::Equilibrium).unwrap();
            for actor in Actor::ALL {
                let a = est.actor(actor);
                let gap = (a.mean_rer - analytic.get(actor)).abs();
                // `<=` so a powerless actor (exact zero on both sides, zero
                // stderr) counts as agreement.
                assert!(
                    gap <= 3.0 * a.stderr,
                    "{actor} at {case:?} r={participation}: |{} - {}| = {gap} \
                     exceeds 3 x {}",
                    a.mean_rer,
                    analytic.get(actor),
                    a.stderr
                );
            }
        }
    }
}

#[test]
fn withheld_rate_matches_the_loyal_infiltrating_power() {
    let s = scenario(CASE1, 0.4);
    let expected = s.infiltrating_power() - s.betraying_power();
    let mut cfg = SimConfig::new(500_000, 0xBD5_0004);
    cfg.replicas = 4;
    let est = montecarlo::simulate(&s, &cfg, PricePolicy::Equilibrium).unwrap();
    let total_rounds = est.tallies.rounds as f64;
    let rate = est.tallies.withheld as f64 / total_rounds;
    let sigma = (expected * (1.0 - expected) / total_rounds).sqrt();
    assert!(
        (rate - expected).abs() < 3.0 * sigma,
        "withheld rate {rate} vs {expected} (sigma {sigma})"
    );
}

#[test]
fn identical_configs_are_bit_identical() {
    let s = scenario(CASE1, 0.7);
    for mode in [SimMode::RoundLevel, SimMode::ShareLevel] {
        let mut cfg = SimConfig::new(50_000, 0xD7D7);
        cfg.replicas = 3;
        cfg.mode = mode;
        cfg.share_difficulty = 5;
        let a = montecarlo::simulate(&s, &cfg, PricePolicy::Equilibrium).unwrap();
        let b = montecarlo::simulate(&s, &cfg, PricePolicy::Equilibrium).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn stderr_shrinks_like_root_replicas() {
    let s = scenario(CASE1, 1.0);
    let mut stderrs = Vec::new();
    for replicas in [4u32, 16, 64] {
        let mut cfg = SimConfig::new(10_000, 0xBD5_0005);
        cfg.replicas = replicas;
        let est = montecarlo::replicate(&s, &cfg, PricePolicy::Equilibrium).unwrap();
        stderrs.push(est.actor(Actor::BdsMiner).stderr);
    }
    // Quadrupling the replicas should halve the standard error, up to
    // sampling noise in the variance estimate itself.
    for pair in stderrs.windows(2) {
        let ratio = pair[1] / pair[0];
        assert!(
            (0.25..0.85).contains(&ratio),
            "stderr ratio {ratio} far from the expected 0.5 ({stderrs:?})"
        );
    }
}

#[test]
fn share_level_at_difficulty_one_has_identical_block_tallies() {
    let s = scenario(CASE1, 0.5);
    let mut round = SimConfig::new(100_000, 0x5A5A);
    round.replicas = 2;
    let mut share = round;
    share.mode = SimMode::ShareLevel;
    share.share_difficulty = 1;
    let a = montecarlo::simulate(&s, &round, PricePolicy::Equilibrium).unwrap();
    let b = montecarlo::simulate(&s, &share, PricePolicy::Equilibrium).unwrap();
    assert_eq!(a.tallies, b.tallies);
}

#[test]
fn share_level_converges_to_round_level() {
    let s = scenario(CASE1, 1.0);
    let mut round = SimConfig::new(400_000, 0xBD5_0006);
    round.replicas = 8;
    let mut share = round;
    share.mode = SimMode::ShareLevel;
    share.share_difficulty = 100;
    let a = montecarlo::simulate(&s, &round, PricePolicy::Equilibrium).unwrap();
    let b = montecarlo::simulate_share_level(&s, &share, PricePolicy::Equilibrium).unwrap();
    for actor in Actor::ALL {
        let (ra, rb) = (a.actor(actor), b.actor(actor));
        let gap = (ra.mean_rer - rb.mean_rer).abs();
        let sigma = (ra.stderr.powi(2) + rb.stderr.powi(2)).sqrt();
        assert!(
            gap <= 3.0 * sigma,
            "{actor}: share-level {} vs round-level {} (3 sigma = {})",
            rb.mean_rer,
            ra.mean_rer,
            3.0 * sigma
        );
    }
}

#[test]
fn omitted_full_proofs_earn_nothing_from_the_trade() {
    let s = scenario(CASE1, 0.5);
    let mut cfg = SimConfig::new(300_000, 0xFA117);
    cfg.replicas = 8;
    cfg.mode = SimMode::ShareLevel;
    cfg.share_difficulty = 20;
    cfg.betrayer_omits_fpow = true;
    let faulty = montecarlo::simulate_share_level(&s, &cfg, PricePolicy::Equilibrium).unwrap();
    assert_eq!(faulty.trade_income, 0.0);
    // Without the full proofs the "betrayers" are just withholding like
    // everyone else: same per-power revenue as the loyal infiltrators.
    let bds = faulty.actor(Actor::BdsMiner);
    let loyal = faulty.actor(Actor::LoyalMiner);
    let sigma = (bds.stderr.powi(2) + loyal.stderr.powi(2)).sqrt();
    assert!(
        (bds.mean_rer - loyal.mean_rer).abs() < 3.0 * sigma,
        "faulty betrayer RER {} vs loyal RER {}",
        bds.mean_rer,
        loyal.mean_rer
    );
    // Their withheld finds now also consume trials without blocks.
    let t = &faulty.tallies;
    assert_eq!(t.withheld, t.found_by_loyal + t.found_by_betrayer);

    cfg.betrayer_omits_fpow = false;
    let honest_protocol =
        montecarlo::simulate_share_level(&s, &cfg, PricePolicy::Equilibrium).unwrap();
    assert!(honest_protocol.trade_income > 0.0);
}
