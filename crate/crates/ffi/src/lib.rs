//! C ABI for the bdslab library.
//!
//! The surface follows the usual C conventions: scenarios live behind an
//! opaque handle created by [`bdslab_scenario_new`] and released by
//! [`bdslab_scenario_free`]; every fallible call returns a [`BdslabStatus`]
//! and writes its result through an out-pointer only on success; the reason
//! for the most recent failure on the current thread is available as text
//! from [`bdslab_last_error_message`].
//!
//! The matching C header is committed at `include/bdslab.h`. It is the
//! cbindgen output for this file; rebuild it with
//! `cargo build -p bdslab-ffi --features generate-header` after changing
//! the surface.
//!
//! All revenue and reward quantities use the same units as the core
//! library: fractions of the total published block reward, with relative
//! extra reward (RER) expressed as a fraction (0.5 = +50%).

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bdslab::model::{actor_rers, optimal_tau, revenue_report, Actor, PricePolicy, Scenario};
use bdslab::montecarlo::{simulate, SimConfig, SimMode};
use bdslab::pricing::{equilibrium_price, price_bounds};
use bdslab::Error;

/// Outcome of a library call. Anything other than `Ok` leaves the
/// out-pointers untouched; call [`bdslab_last_error_message`] for the
/// reason.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdslabStatus {
    /// The call succeeded and the out-pointers hold valid results.
    Ok = 0,
    /// An argument was out of range, non-finite, or otherwise malformed.
    InvalidParameter = 1,
    /// The inputs were formally valid but describe a degenerate case with
    /// no defined answer (for example a zero honest baseline).
    DegenerateInput = 2,
    /// The power split cannot occur: the infiltrating power must stay
    /// strictly below the victim pool's size.
    InfeasibleScenario = 3,
    /// No trade price in the requested range is acceptable to both sides.
    InfeasiblePrice = 4,
    /// A size limit was exceeded (the core library caps exhaustive game
    /// enumeration).
    Capacity = 5,
    /// A required pointer argument was null.
    NullPointer = 6,
    /// The library caught an internal panic; treat the out-values as
    /// garbage and please report the scenario that triggered it.
    Internal = 7,
}

/// Trade-price policy selector for [`bdslab_revenue_report`] and
/// [`bdslab_simulate`]. `Fixed` reads the price from the separate
/// `fixed_price` argument; the other policies ignore that argument.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdslabPricePolicy {
    /// The victim pool's indifference price (the upper feasibility bound).
    Equilibrium = 0,
    /// Midpoint of the feasible interval, lower bound floored at zero.
    Midpoint = 1,
    /// The caller-supplied `fixed_price`, rejected when outside the
    /// feasible range.
    Fixed = 2,
    /// Betrayers hand their blocks over for nothing.
    Zero = 3,
}

/// Index of each revenue-earning actor in [`BdslabSimSummary::actors`] and
/// the field order of [`BdslabActorRers`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BdslabActor {
    /// The attacking pool's books as a whole.
    AttackerPool = 0,
    /// The victim pool's own (non-infiltrator) miners.
    VictimOwnMiners = 1,
    /// The betraying infiltrators, trade income included.
    BdsMiner = 2,
    /// The loyal (withholding) infiltrators.
    LoyalMiner = 3,
    /// Everyone outside both pools.
    Others = 4,
}

/// The parameters a scenario handle was built from, plus the derived
/// powers.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdslabScenarioParams {
    /// Attacking pool's share of total hash power.
    pub alpha: f64,
    /// Victim pool's share of total hash power.
    pub beta: f64,
    /// Fraction of the attacking pool infiltrated into the victim.
    pub tau: f64,
    /// Fraction of the infiltrating power that betrays.
    pub participation: f64,
    /// `tau * alpha`, the power mining inside the victim pool.
    pub infiltrating_power: f64,
    /// `participation * tau * alpha`, the power that betrays.
    pub betraying_power: f64,
}

/// Feasible trade-price interval for a given betraying power.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdslabPriceBounds {
    /// Lowest price the betraying coalition accepts.
    pub lower: f64,
    /// Highest price the victim pool accepts.
    pub upper: f64,
    /// Whether `lower < upper`, i.e. a mutually profitable price exists.
    pub feasible: bool,
}

/// Expected per-actor revenue decomposition for one scenario, all fields
/// in units of total published block reward.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdslabRevenueReport {
    /// Everything distributed through the attacking pool's books.
    pub attacker_pool: f64,
    /// The victim pool's own (non-infiltrator) miners.
    pub victim_own_miners: f64,
    /// Betrayers' private income from selling full proofs of work.
    pub bds_trade_income: f64,
    /// Betrayers' total: trade income plus pool distributions.
    pub bds_miner_total: f64,
    /// Total revenue of the loyal (non-betraying) infiltrating power.
    pub loyal_miner_total: f64,
    /// Miners outside both pools.
    pub others: f64,
    /// The trade price actually used.
    pub price: f64,
}

/// Per-actor relative extra reward versus honest mining, as fractions.
/// Actors with zero honest power report 0 by convention.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdslabActorRers {
    pub attacker_pool: f64,
    pub victim_own_miners: f64,
    pub bds_miner: f64,
    pub loyal_miner: f64,
    pub others: f64,
}

/// Monte Carlo controls for [`bdslab_simulate`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdslabSimConfig {
    /// Mining rounds per replica. Must be at least 1.
    pub rounds: u64,
    /// Master seed; identical seeds and settings give identical results.
    pub seed: u64,
    /// Independent replicas. Must be at least 1; standard errors are zero
    /// with a single replica and meaningful from two upward.
    pub replicas: u32,
    /// Shares per block on average when simulating at share level. Must be
    /// at least 1; ignored unless `share_level` is set.
    pub share_difficulty: u32,
    /// Simulate individual share submissions instead of settling each
    /// round in expectation.
    pub share_level: bool,
    /// Betrayers keep full proofs of work out of the victim's books
    /// entirely instead of selling them (a what-if lever; the trade income
    /// it forgoes is reported as zero).
    pub betrayer_omits_fpow: bool,
}

/// Per-actor simulation estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdslabActorEstimate {
    /// Mean relative extra reward across replicas, as a fraction.
    pub mean_rer: f64,
    /// Standard error of that mean (zero with a single replica). Named to
    /// avoid C's `stderr` macro from stdio.h.
    pub std_error: f64,
    /// Mean revenue, in units of total published block reward.
    pub mean_revenue: f64,
    /// The actor's honest baseline: its hash power.
    pub honest_power: f64,
}

/// Aggregated result of a simulation run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BdslabSimSummary {
    /// One estimate per actor, indexed by [`BdslabActor`].
    pub actors: [BdslabActorEstimate; 5],
    /// Mean betrayer trade income per published reward.
    pub trade_income: f64,
    /// The trade price in force.
    pub price: f64,
    /// Rounds simulated in each replica.
    pub rounds_per_replica: u64,
    /// Blocks published across all replicas.
    pub published: u64,
    /// Blocks found but withheld across all replicas.
    pub withheld: u64,
    /// Number of replicas actually run.
    pub replicas: u32,
}

/// Opaque scenario handle. Create with [`bdslab_scenario_new`], release
/// with [`bdslab_scenario_free`].
pub struct BdslabScenario(Scenario);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    // Interior NULs cannot reach here from the library's own messages, but
    // never panic inside an error path.
    let stored = CString::new(message.replace('\0', "?")).unwrap_or_else(|_| CString::default());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = stored);
}

fn fail(e: Error) -> BdslabStatus {
    let status = match e {
        Error::InvalidParameter(_) => BdslabStatus::InvalidParameter,
        Error::DegenerateInput(_) => BdslabStatus::DegenerateInput,
        Error::InfeasibleScenario(_) => BdslabStatus::InfeasibleScenario,
        Error::InfeasiblePrice(_) => BdslabStatus::InfeasiblePrice,
        Error::Capacity(_) => BdslabStatus::Capacity,
    };
    set_last_error(&e.to_string());
    status
}

fn null_arg(name: &str) -> BdslabStatus {
    set_last_error(&format!("{name} must not be null"));
    BdslabStatus::NullPointer
}

/// Runs a wrapper body, converting any panic that escapes the core library
/// into a status code instead of unwinding across the C boundary.
fn guarded(body: impl FnOnce() -> BdslabStatus) -> BdslabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic in bdslab");
            BdslabStatus::Internal
        }
    }
}

fn to_policy(policy: BdslabPricePolicy, fixed_price: f64) -> PricePolicy {
    match policy {
        BdslabPricePolicy::Equilibrium => PricePolicy::Equilibrium,
        BdslabPricePolicy::Midpoint => PricePolicy::Midpoint,
        BdslabPricePolicy::Fixed => PricePolicy::Fixed(fixed_price),
        BdslabPricePolicy::Zero => PricePolicy::Zero,
    }
}

/// Version of the library as a static NUL-terminated string. Never null;
/// do not free.
#[no_mangle]
pub extern "C" fn bdslab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Text describing the most recent failure on the calling thread, or an
/// empty string when nothing has failed yet. The pointer stays valid until
/// the next bdslab call on the same thread; copy the string if you need to
/// keep it. Never null; do not free.
#[no_mangle]
pub extern "C" fn bdslab_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// The infiltration fraction that maximizes the attacking pool's classic
/// withholding revenue for pool sizes `alpha` and `beta`.
///
/// # Safety
/// `out_tau` must be a valid pointer to writable memory for one `double`.
#[no_mangle]
pub unsafe extern "C" fn bdslab_optimal_tau(
    alpha: f64,
    beta: f64,
    out_tau: *mut f64,
) -> BdslabStatus {
    if out_tau.is_null() {
        return null_arg("out_tau");
    }
    guarded(|| match optimal_tau(alpha, beta) {
        Ok(tau) => {
            // SAFETY: Caller guarantees `out_tau` is valid for writes.
            unsafe { *out_tau = tau };
            BdslabStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Builds a scenario handle after validating the power split: pools in
/// `(0, 0.5)`, `tau` and `participation` in `[0, 1]`, and the infiltrating
/// power strictly below `beta`. On success writes the new handle to
/// `out_scenario`; release it with [`bdslab_scenario_free`].
///
/// # Safety
/// `out_scenario` must be a valid pointer to writable memory for one
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn bdslab_scenario_new(
    alpha: f64,
    beta: f64,
    tau: f64,
    participation: f64,
    out_scenario: *mut *mut BdslabScenario,
) -> BdslabStatus {
    if out_scenario.is_null() {
        return null_arg("out_scenario");
    }
    guarded(|| match Scenario::new(alpha, beta, tau, participation) {
        Ok(s) => {
            let handle = Box::into_raw(Box::new(BdslabScenario(s)));
            // SAFETY: Caller guarantees `out_scenario` is valid for writes.
            unsafe { *out_scenario = handle };
            BdslabStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Releases a scenario handle. Passing null is a no-op.
///
/// # Safety
/// `scenario` must be null or a pointer previously returned by
/// [`bdslab_scenario_new`] that has not been freed yet; it must not be
/// used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bdslab_scenario_free(scenario: *mut BdslabScenario) {
    if scenario.is_null() {
        return;
    }
    // SAFETY: Caller guarantees `scenario` came from `bdslab_scenario_new`
    // and is not yet freed.
    drop(unsafe { Box::from_raw(scenario) });
}

/// Reads back a scenario's parameters and derived powers.
///
/// # Safety
/// `scenario` must be a live handle from [`bdslab_scenario_new`];
/// `out_params` must be a valid pointer to writable memory for one
/// `BdslabScenarioParams`.
#[no_mangle]
pub unsafe extern "C" fn bdslab_scenario_params(
    scenario: *const BdslabScenario,
    out_params: *mut BdslabScenarioParams,
) -> BdslabStatus {
    if scenario.is_null() {
        return null_arg("scenario");
    }
    if out_params.is_null() {
        return null_arg("out_params");
    }
    // SAFETY: Caller guarantees `scenario` is a live handle.
    let s = unsafe { &(*scenario).0 };
    let params = BdslabScenarioParams {
        alpha: s.alpha(),
        beta: s.beta(),
        tau: s.tau(),
        participation: s.participation(),
        infiltrating_power: s.infiltrating_power(),
        betraying_power: s.betraying_power(),
    };
    // SAFETY: Caller guarantees `out_params` is valid for writes.
    unsafe { *out_params = params };
    BdslabStatus::Ok
}

/// The feasible trade-price interval when `betraying_power` (in `(0,
/// tau*alpha]`) betrays in the given scenario.
///
/// # Safety
/// `scenario` must be a live handle from [`bdslab_scenario_new`];
/// `out_bounds` must be a valid pointer to writable memory for one
/// `BdslabPriceBounds`.
#[no_mangle]
pub unsafe extern "C" fn bdslab_price_bounds(
    scenario: *const BdslabScenario,
    betraying_power: f64,
    out_bounds: *mut BdslabPriceBounds,
) -> BdslabStatus {
    if scenario.is_null() {
        return null_arg("scenario");
    }
    if out_bounds.is_null() {
        return null_arg("out_bounds");
    }
    // SAFETY: Caller guarantees `scenario` is a live handle.
    let s = unsafe { &(*scenario).0 };
    guarded(|| match price_bounds(s, betraying_power) {
        Ok(b) => {
            let bounds = BdslabPriceBounds {
                lower: b.lower,
                upper: b.upper,
                feasible: b.feasible,
            };
            // SAFETY: Caller guarantees `out_bounds` is valid for writes.
            unsafe { *out_bounds = bounds };
            BdslabStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// The equilibrium trade price (the victim's indifference point) when
/// `betraying_power` betrays in the given scenario.
///
/// # Safety
/// `scenario` must be a live handle from [`bdslab_scenario_new`];
/// `out_price` must be a valid pointer to writable memory for one
/// `double`.
#[no_mangle]
pub unsafe extern "C" fn bdslab_equilibrium_price(
    scenario: *const BdslabScenario,
    betraying_power: f64,
    out_price: *mut f64,
) -> BdslabStatus {
    if scenario.is_null() {
        return null_arg("scenario");
    }
    if out_price.is_null() {
        return null_arg("out_price");
    }
    // SAFETY: Caller guarantees `scenario` is a live handle.
    let s = unsafe { &(*scenario).0 };
    guarded(|| match equilibrium_price(s, betraying_power) {
        Ok(price) => {
            // SAFETY: Caller guarantees `out_price` is valid for writes.
            unsafe { *out_price = price };
            BdslabStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Closed-form per-actor revenue for the scenario under the chosen price
/// policy. `fixed_price` is read only when `policy` is `Fixed`. On success
/// fills `out_report`, and `out_rers` too unless it is null.
///
/// # Safety
/// `scenario` must be a live handle from [`bdslab_scenario_new`];
/// `out_report` must be a valid pointer to writable memory for one
/// `BdslabRevenueReport`; `out_rers` must be null or a valid pointer to
/// writable memory for one `BdslabActorRers`.
#[no_mangle]
pub unsafe extern "C" fn bdslab_revenue_report(
    scenario: *const BdslabScenario,
    policy: BdslabPricePolicy,
    fixed_price: f64,
    out_report: *mut BdslabRevenueReport,
    out_rers: *mut BdslabActorRers,
) -> BdslabStatus {
    if scenario.is_null() {
        return null_arg("scenario");
    }
    if out_report.is_null() {
        return null_arg("out_report");
    }
    // SAFETY: Caller guarantees `scenario` is a live handle.
    let s = unsafe { &(*scenario).0 };
    guarded(|| match revenue_report(s, to_policy(policy, fixed_price)) {
        Ok(r) => {
            let report = BdslabRevenueReport {
                attacker_pool: r.attacker_pool,
                victim_own_miners: r.victim_own_miners,
                bds_trade_income: r.bds_trade_income,
                bds_miner_total: r.bds_miner_total,
                loyal_miner_total: r.loyal_miner_total,
                others: r.others,
                price: r.price,
            };
            // SAFETY: Caller guarantees `out_report` is valid for writes.
            unsafe { *out_report = report };
            if !out_rers.is_null() {
                let rers = actor_rers(s, &r);
                let out = BdslabActorRers {
                    attacker_pool: rers.attacker_pool,
                    victim_own_miners: rers.victim_own_miners,
                    bds_miner: rers.bds_miner,
                    loyal_miner: rers.loyal_miner,
                    others: rers.others,
                };
                // SAFETY: Caller guarantees non-null `out_rers` is valid
                // for writes.
                unsafe { *out_rers = out };
            }
            BdslabStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Runs the Monte Carlo simulator for the scenario and writes the
/// aggregated estimates. Identical configs give bit-identical summaries.
/// `fixed_price` is read only when `policy` is `Fixed`.
///
/// # Safety
/// `scenario` must be a live handle from [`bdslab_scenario_new`];
/// `config` must be a valid pointer to a readable `BdslabSimConfig`;
/// `out_summary` must be a valid pointer to writable memory for one
/// `BdslabSimSummary`.
#[no_mangle]
pub unsafe extern "C" fn bdslab_simulate(
    scenario: *const BdslabScenario,
    config: *const BdslabSimConfig,
    policy: BdslabPricePolicy,
    fixed_price: f64,
    out_summary: *mut BdslabSimSummary,
) -> BdslabStatus {
    if scenario.is_null() {
        return null_arg("scenario");
    }
    if config.is_null() {
        return null_arg("config");
    }
    if out_summary.is_null() {
        return null_arg("out_summary");
    }
    // SAFETY: Caller guarantees `scenario` and `config` are valid.
    let s = unsafe { &(*scenario).0 };
    let c = unsafe { *config };
    let cfg = SimConfig {
        rounds: c.rounds,
        seed: c.seed,
        replicas: c.replicas,
        mode: if c.share_level {
            SimMode::ShareLevel
        } else {
            SimMode::RoundLevel
        },
        share_difficulty: c.share_difficulty,
        betrayer_omits_fpow: c.betrayer_omits_fpow,
    };
    guarded(|| match simulate(s, &cfg, to_policy(policy, fixed_price)) {
        Ok(est) => {
            let mut actors = [BdslabActorEstimate {
                mean_rer: 0.0,
                std_error: 0.0,
                mean_revenue: 0.0,
                honest_power: 0.0,
            }; 5];
            for (slot, actor) in actors.iter_mut().zip(Actor::ALL) {
                let a = est.actor(actor);
                *slot = BdslabActorEstimate {
                    mean_rer: a.mean_rer,
                    std_error: a.stderr,
                    mean_revenue: a.mean_revenue,
                    honest_power: a.honest_power,
                };
            }
            let summary = BdslabSimSummary {
                actors,
                trade_income: est.trade_income,
                price: est.price,
                rounds_per_replica: est.rounds_per_replica,
                published: est.tallies.published,
                withheld: est.tallies.withheld,
                replicas: est.replicas,
            };
            // SAFETY: Caller guarantees `out_summary` is valid for writes.
            unsafe { *out_summary = summary };
            BdslabStatus::Ok
        }
        Err(e) => fail(e),
    })
}
