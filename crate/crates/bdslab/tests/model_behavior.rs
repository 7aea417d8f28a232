//! Example-level behavior of the revenue model and pricing: exact reductions
//! at the edges of the parameter space, validation failures, and the basic
//! orderings the analysis rests on.

use bdslab::model::{self, PricePolicy, Scenario};
use bdslab::pricing;
use bdslab::Error;

const CASE1: (f64, f64) = (0.18, 0.15);

fn case1_at(participation: f64) -> Scenario {
    let (alpha, beta) = CASE1;
    let tau = model::optimal_tau(alpha, beta).unwrap();
    Scenario::new(alpha, beta, tau, participation).unwrap()
}

#[test]
fn scenario_validation_rejects_out_of_range_powers() {
    assert!(matches!(
        Scenario::new(0.6, 0.15, 0.1, 1.0),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        Scenario::new(0.18, 0.0, 0.1, 1.0),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        Scenario::new(0.18, 0.15, 1.5, 1.0),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        Scenario::new(0.18, 0.15, 0.1, -0.2),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        Scenario::new(f64::NAN, 0.15, 0.1, 1.0),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn scenario_validation_rejects_overwhelming_infiltration() {
    // tau*alpha = 0.2 >= beta = 0.15: the trade analysis assumptions break.
    assert!(matches!(
        Scenario::new(0.4, 0.15, 0.5, 1.0),
        Err(Error::InfeasibleScenario(_))
    ));
    // Just below the line is fine.
    assert!(Scenario::new(0.4, 0.15, 0.37, 1.0).is_ok());
}

#[test]
fn no_infiltration_reduces_to_honest_shares() {
    let s = Scenario::new(0.18, 0.15, 0.0, 0.0).unwrap();
    assert_eq!(model::bwh_attacker_revenue(&s), 0.18);
    assert_eq!(model::bwh_victim_revenue(&s), 0.15);
    let report = model::revenue_report(&s, PricePolicy::Equilibrium).unwrap();
    assert!((report.attacker_pool - 0.18).abs() < 1e-15);
    assert!((report.victim_own_miners - 0.15).abs() < 1e-15);
    assert!((report.others - 0.67).abs() < 1e-15);
    assert_eq!(report.bds_trade_income, 0.0);
    assert_eq!(report.price, 0.0);
    let rers = model::actor_rers(&s, &report);
    assert!(rers.attacker_pool.abs() < 1e-14);
    assert!(rers.victim_own_miners.abs() < 1e-14);
    assert!(rers.others.abs() < 1e-14);
    // Zero-power actors report RER 0 by convention.
    assert_eq!(rers.bds_miner, 0.0);
    assert_eq!(rers.loyal_miner, 0.0);
}

#[test]
fn attacker_revenue_at_the_half_half_corner() {
    // Both pools just below half the network, half the attacker infiltrated:
    // the formula tends to 5/9. Direct arithmetic:
    // 0.25/0.75 + (0.5/0.75)*(0.25/0.75) = 1/3 + 2/9.
    let eps = 1e-9;
    let s = Scenario::new(0.5 - eps, 0.5 - eps, 0.5, 0.0).unwrap();
    assert!((model::bwh_attacker_revenue(&s) - 5.0 / 9.0).abs() < 1e-6);
}

#[test]
fn infiltration_hurts_the_victim() {
    let s = case1_at(0.0);
    assert!(model::bwh_victim_revenue(&s) < s.beta());
}

#[test]
fn bwh_baseline_conserves_total_reward() {
    let s = case1_at(0.0);
    let others = (1.0 - s.alpha() - s.beta()) / (1.0 - s.infiltrating_power());
    let total = model::bwh_attacker_revenue(&s) + model::bwh_victim_revenue(&s) + others;
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn full_betrayal_at_zero_price_restores_victim_scale() {
    // Every withheld block is handed over for free: the victim publishes at
    // its honest rate again.
    let s = case1_at(1.0);
    let v = model::bds_victim_revenue(&s, 0.0).unwrap();
    assert!((v - s.beta()).abs() < 1e-12);
}

#[test]
fn trade_operations_reject_degenerate_scenarios() {
    let s = case1_at(0.0); // nobody betrays: p = 0
    assert!(matches!(
        model::bds_victim_revenue(&s, 0.01),
        Err(Error::DegenerateInput(_))
    ));
    assert!(matches!(
        model::bds_miner_revenue(&s, 0.001, 0.01),
        Err(Error::DegenerateInput(_))
    ));
    let no_attack = Scenario::new(0.18, 0.15, 0.0, 1.0).unwrap();
    assert!(matches!(
        pricing::price_bounds(&no_attack, 0.001),
        Err(Error::DegenerateInput(_))
    ));
}

#[test]
fn betrayer_cannot_claim_more_than_the_coalition() {
    let s = case1_at(0.5);
    let p = s.betraying_power();
    assert!(matches!(
        model::bds_miner_revenue(&s, p * 1.01, 0.001),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn miner_revenue_rises_with_price_victim_revenue_falls() {
    let s = case1_at(1.0);
    let p = s.betraying_power();
    let upper = pricing::c1_upper_bound(&s, p).unwrap();
    let mut last_miner = f64::NEG_INFINITY;
    let mut last_victim = f64::INFINITY;
    for i in 0..=10 {
        let t = upper * i as f64 / 10.0;
        let m = model::bds_miner_revenue(&s, p, t).unwrap();
        let v = model::bds_victim_revenue(&s, t).unwrap();
        assert!(m > last_miner, "miner revenue must increase with price");
        assert!(v < last_victim, "victim revenue must decrease with price");
        last_miner = m;
        last_victim = v;
    }
}

#[test]
fn loyal_member_of_an_honest_pool_earns_its_power() {
    let s = Scenario::new(0.18, 0.15, 0.0, 0.0).unwrap();
    let q = 0.01;
    let v = model::loyal_miner_revenue(&s, q, 0.0).unwrap();
    assert!((v - q).abs() < 1e-15);
}

#[test]
fn loyal_baseline_matches_raw_member_formula() {
    // With no betrayal and no price, a member of power q earns its share of
    // the pure-BWH pool books: (q/alpha) * [ (1-tau)alpha/(1-tau*alpha)
    // + beta/(1-tau*alpha) * tau*alpha/(beta+tau*alpha) ].
    let s = case1_at(0.0);
    let (a, b, tau) = (s.alpha(), s.beta(), s.tau());
    let ta = tau * a;
    let q = 0.004;
    let raw = (q / a) * ((1.0 - tau) * a / (1.0 - ta) + b / (1.0 - ta) * (ta / (b + ta)));
    let v = model::loyal_miner_revenue(&s, q, 0.0).unwrap();
    assert!((v - raw).abs() < 1e-15);
}

#[test]
fn rer_basics() {
    assert_eq!(model::rer(0.18, 0.18).unwrap(), 0.0);
    assert!((model::rer(0.09, 0.10).unwrap() + 0.1).abs() < 1e-12);
    // Benchmark spot value: betrayer total vs its honest power at full
    // betrayal in the (0.18, 0.15) case.
    let r = model::rer(0.029053, 0.015785).unwrap();
    assert!((r - 0.8406).abs() < 1e-4);
    assert!(matches!(
        model::rer(0.1, 0.0),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn optimal_tau_validation() {
    assert!(matches!(
        model::optimal_tau(0.0, 0.2),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        model::optimal_tau(0.5, 0.2),
        Err(Error::InvalidParameter(_))
    ));
    assert!(matches!(
        model::optimal_tau(0.2, 0.7),
        Err(Error::InvalidParameter(_))
    ));
}

#[test]
fn price_bound_vanishes_with_the_betraying_power() {
    let s = case1_at(1.0);
    let tiny = pricing::c1_upper_bound(&s, 1e-12).unwrap();
    assert!(tiny > 0.0 && tiny < 1e-11);
    let tiny_lower = pricing::c2_lower_bound(&s, 1e-12).unwrap();
    assert!(tiny_lower.abs() < 1e-11);
}

#[test]
fn upper_bound_stays_below_the_betraying_power() {
    for participation in [0.1, 0.5, 1.0] {
        let s = case1_at(participation);
        let p = s.betraying_power();
        assert!(pricing::c1_upper_bound(&s, p).unwrap() < p);
    }
}

#[test]
fn price_bounds_reject_excessive_power() {
    let s = case1_at(1.0);
    let ta = s.infiltrating_power();
    assert!(matches!(
        pricing::price_bounds(&s, ta * 1.5),
        Err(Error::InfeasibleScenario(_))
    ));
}

#[test]
fn equilibrium_price_is_the_upper_bound() {
    let s = case1_at(0.7);
    let p = s.betraying_power();
    let bounds = pricing::price_bounds(&s, p).unwrap();
    assert!(bounds.feasible);
    assert_eq!(pricing::equilibrium_price(&s, p).unwrap(), bounds.upper);
}

#[test]
fn fixed_price_outside_bounds_is_rejected() {
    let s = case1_at(1.0);
    let p = s.betraying_power();
    let upper = pricing::c1_upper_bound(&s, p).unwrap();
    assert!(matches!(
        model::revenue_report(&s, PricePolicy::Fixed(upper * 1.01)),
        Err(Error::InfeasiblePrice(_))
    ));
    assert!(matches!(
        model::revenue_report(&s, PricePolicy::Fixed(-0.001)),
        Err(Error::InfeasiblePrice(_))
    ));
    assert!(model::revenue_report(&s, PricePolicy::Fixed(upper * 0.5)).is_ok());
}

#[test]
fn no_betrayal_report_reduces_to_bwh_baseline() {
    let s = case1_at(0.0);
    let report = model::revenue_report(&s, PricePolicy::Equilibrium).unwrap();
    assert!((report.attacker_pool - model::bwh_attacker_revenue(&s)).abs() < 1e-15);
    assert!((report.victim_own_miners - model::bwh_victim_revenue(&s)).abs() < 1e-15);
    assert_eq!(report.bds_trade_income, 0.0);
    assert_eq!(report.bds_miner_total, 0.0);
}

#[test]
fn equilibrium_betrayal_leaves_the_attacker_below_honest() {
    let s = case1_at(1.0);
    let report = model::revenue_report(&s, PricePolicy::Equilibrium).unwrap();
    assert!(report.attacker_pool < s.alpha());
}

#[test]
fn fixed_positive_price_without_betrayal_is_rejected() {
    let s = case1_at(0.0);
    assert!(matches!(
        model::revenue_report(&s, PricePolicy::Fixed(0.001)),
        Err(Error::InfeasiblePrice(_))
    ));
    assert!(model::revenue_report(&s, PricePolicy::Fixed(0.0)).is_ok());
}
