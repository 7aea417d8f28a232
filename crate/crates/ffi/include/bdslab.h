/* C interface for the bdslab mining-pool attack economics library. */

#ifndef BDSLAB_H
#define BDSLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Index of each revenue-earning actor in [`BdslabSimSummary::actors`] and
// the field order of [`BdslabActorRers`].
typedef enum BdslabActor {
  // The attacking pool's books as a whole.
  BdslabActor_AttackerPool = 0,
  // The victim pool's own (non-infiltrator) miners.
  BdslabActor_VictimOwnMiners = 1,
  // The betraying infiltrators, trade income included.
  BdslabActor_BdsMiner = 2,
  // The loyal (withholding) infiltrators.
  BdslabActor_LoyalMiner = 3,
  // Everyone outside both pools.
  BdslabActor_Others = 4,
} BdslabActor;

// Trade-price policy selector for [`bdslab_revenue_report`] and
// [`bdslab_simulate`]. `Fixed` reads the price from the separate
// `fixed_price` argument; the other policies ignore that argument.
typedef enum BdslabPricePolicy {
  // The victim pool's indifference price (the upper feasibility bound).
  BdslabPricePolicy_Equilibrium = 0,
  // Midpoint of the feasible interval, lower bound floored at zero.
  BdslabPricePolicy_Midpoint = 1,
  // The caller-supplied `fixed_price`, rejected when outside the
  // feasible range.
  BdslabPricePolicy_Fixed = 2,
  // Betrayers hand their blocks over for nothing.
  BdslabPricePolicy_Zero = 3,
} BdslabPricePolicy;

// Outcome of a library call. Anything other than `Ok` leaves the
// out-pointers untouched; call [`bdslab_last_error_message`] for the
// reason.
typedef enum BdslabStatus {
  // The call succeeded and the out-pointers hold valid results.
  BdslabStatus_Ok = 0,
  // An argument was out of range, non-finite, or otherwise malformed.
  BdslabStatus_InvalidParameter = 1,
  // The inputs were formally valid but describe a degenerate case with
  // no defined answer (for example a zero honest baseline).
  BdslabStatus_DegenerateInput = 2,
  // The power split cannot occur: the infiltrating power must stay
  // strictly below the victim pool's size.
  BdslabStatus_InfeasibleScenario = 3,
  // No trade price in the requested range is acceptable to both sides.
  BdslabStatus_InfeasiblePrice = 4,
  // A size limit was exceeded (the core library caps exhaustive game
  // enumeration).
  BdslabStatus_Capacity = 5,
  // A required pointer argument was null.
  BdslabStatus_NullPointer = 6,
  // The library caught an internal panic; treat the out-values as
  // garbage and please report the scenario that triggered it.
  BdslabStatus_Internal = 7,
} BdslabStatus;

// Opaque scenario handle. Create with [`bdslab_scenario_new`], release
// with [`bdslab_scenario_free`].
typedef struct BdslabScenario BdslabScenario;

// The parameters a scenario handle was built from, plus the derived
// powers.
typedef struct BdslabScenarioParams {
  // Attacking pool's share of total hash power.
  double alpha;
  // Victim pool's share of total hash power.
  double beta;
  // Fraction of the attacking pool infiltrated into the victim.
  double tau;
  // Fraction of the infiltrating power that betrays.
  double participation;
  // `tau * alpha`, the power mining inside the victim pool.
  double infiltrating_power;
  // `participation * tau * alpha`, the power that betrays.
  double betraying_power;
} BdslabScenarioParams;

// Feasible trade-price interval for a given betraying power.
typedef struct BdslabPriceBounds {
  // Lowest price the betraying coalition accepts.
  double lower;
  // Highest price the victim pool accepts.
  double upper;
  // Whether `lower < upper`, i.e. a mutually profitable price exists.
  bool feasible;
} BdslabPriceBounds;

// Expected per-actor revenue decomposition for one scenario, all fields
// in units of total published block reward.
typedef struct BdslabRevenueReport {
  // Everything distributed through the attacking pool's books.
  double attacker_pool;
  // The victim pool's own (non-infiltrator) miners.
  double victim_own_miners;
  // Betrayers' private income from selling full proofs of work.
  double bds_trade_income;
  // Betrayers' total: trade income plus pool distributions.
  double bds_miner_total;
  // Total revenue of the loyal (non-betraying) infiltrating power.
  double loyal_miner_total;
  // Miners outside both pools.
  double others;
  // The trade price actually used.
  double price;
} BdslabRevenueReport;

// Per-actor relative extra reward versus honest mining, as fractions.
// Actors with zero honest power report 0 by convention.
typedef struct BdslabActorRers {
  double attacker_pool;
  double victim_own_miners;
  double bds_miner;
  double loyal_miner;
  double others;
} BdslabActorRers;

// Monte Carlo controls for [`bdslab_simulate`].
typedef struct BdslabSimConfig {
  // Mining rounds per replica. Must be at least 1.
  uint64_t rounds;
  // Master seed; identical seeds and settings give identical results.
  uint64_t seed;
  // Independent replicas. Must be at least 1; standard errors are zero
  // with a single replica and meaningful from two upward.
  uint32_t replicas;
  // Shares per block on average when simulating at share level. Must be
  // at least 1; ignored unless `share_level` is set.
  uint32_t share_difficulty;
  // Simulate individual share submissions instead of settling each
  // round in expectation.
  bool share_level;
  // Betrayers keep full proofs of work out of the victim's books
  // entirely instead of selling them (a what-if lever; the trade income
  // it forgoes is reported as zero).
  bool betrayer_omits_fpow;
} BdslabSimConfig;

// Per-actor simulation estimate.
typedef struct BdslabActorEstimate {
  // Mean relative extra reward across replicas, as a fraction.
  double mean_rer;
  // Standard error of that mean (zero with a single replica). Named to
  // avoid C's `stderr` macro from stdio.h.
  double std_error;
  // Mean revenue, in units of total published block reward.
  double mean_revenue;
  // The actor's honest baseline: its hash power.
  double honest_power;
} BdslabActorEstimate;

// Aggregated result of a simulation run.
typedef struct BdslabSimSummary {
  // One estimate per actor, indexed by [`BdslabActor`].
  struct BdslabActorEstimate actors[5];
  // Mean betrayer trade income per published reward.
  double trade_income;
  // The trade price in force.
  double price;
  // Rounds simulated in each replica.
  uint64_t rounds_per_replica;
  // Blocks published across all replicas.
  uint64_t published;
  // Blocks found but withheld across all replicas.
  uint64_t withheld;
  // Number of replicas actually run.
  uint32_t replicas;
} BdslabSimSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the library as a static NUL-terminated string. Never null;
// do not free.
const char *bdslab_version(void);

// Text describing the most recent failure on the calling thread, or an
// empty string when nothing has failed yet. The pointer stays valid until
// the next bdslab call on the same thread; copy the string if you need to
// keep it. Never null; do not free.
const char *bdslab_last_error_message(void);

// The infiltration fraction that maximizes the attacking pool's classic
// withholding revenue for pool sizes `alpha` and `beta`.
//
// # Safety
// `out_tau` must be a valid pointer to writable memory for one `double`.
enum BdslabStatus bdslab_optimal_tau(double alpha, double beta, double *out_tau);

// Builds a scenario handle after validating the power split: pools in
// `(0, 0.5)`, `tau` and `participation` in `[0, 1]`, and the infiltrating
// power strictly below `beta`. On success writes the new handle to
// `out_scenario`; release it with [`bdslab_scenario_free`].
//
// # Safety
// `out_scenario` must be a valid pointer to writable memory for one
// pointer.
enum BdslabStatus bdslab_scenario_new(double alpha,
                                      double beta,
                                      double tau,
                                      double participation,
                                      struct BdslabScenario **out_scenario);

// Releases a scenario handle. Passing null is a no-op.
//
// # Safety
// `scenario` must be null or a pointer previously returned by
// [`bdslab_scenario_new`] that has not been freed yet; it must not be
// used afterwards.
void bdslab_scenario_free(struct BdslabScenario *scenario);

// Reads back a scenario's parameters and derived powers.
//
// # Safety
// `scenario` must be a live handle from [`bdslab_scenario_new`];
// `out_params` must be a valid pointer to writable memory for one
// `BdslabScenarioParams`.
enum BdslabStatus bdslab_scenario_params(const struct BdslabScenario *scenario,
                                         struct BdslabScenarioParams *out_params);

// The feasible trade-price interval when `betraying_power` (in `(0,
// tau*alpha]`) betrays in the given scenario.
//
// # Safety
// `scenario` must be a live handle from [`bdslab_scenario_new`];
// `out_bounds` must be a valid pointer to writable memory for one
// `BdslabPriceBounds`.
enum BdslabStatus bdslab_price_bounds(const struct BdslabScenario *scenario,
                                      double betraying_power,
                                      struct BdslabPriceBounds *out_bounds);

// The equilibrium trade price (the victim's indifference point) when
// `betraying_power` betrays in the given scenario.
//
// # Safety
// `scenario` must be a live handle from [`bdslab_scenario_new`];
// `out_price` must be a valid pointer to writable memory for one
// `double`.
enum BdslabStatus bdslab_equilibrium_price(const struct BdslabScenario *scenario,
                                           double betraying_power,
                                           double *out_price);

// Closed-form per-actor revenue for the scenario under the chosen price
// policy. `fixed_price` is read only when `policy` is `Fixed`. On success
// fills `out_report`, and `out_rers` too unless it is null.
//
// # Safety
// `scenario` must be a live handle from [`bdslab_scenario_new`];
// `out_report` must be a valid pointer to writable memory for one
// `BdslabRevenueReport`; `out_rers` must be null or a valid pointer to
// writable memory for one `BdslabActorRers`.
enum BdslabStatus bdslab_revenue_report(const struct BdslabScenario *scenario,
                                        enum BdslabPricePolicy policy,
                                        double fixed_price,
                                        struct BdslabRevenueReport *out_report,
                                        struct BdslabActorRers *out_rers);

// Runs the Monte Carlo simulator for the scenario and writes the
// aggregated estimates. Identical configs give bit-identical summaries.
// `fixed_price` is read only when `policy` is `Fixed`.
//
// # Safety
// `scenario` must be a live handle from [`bdslab_scenario_new`];
// `config` must be a valid pointer to a readable `BdslabSimConfig`;
// `out_summary` must be a valid pointer to writable memory for one
// `BdslabSimSummary`.
enum BdslabStatus bdslab_simulate(const struct BdslabScenario *scenario,
                                  const struct BdslabSimConfig *config,
                                  enum BdslabPricePolicy policy,
                                  double fixed_price,
                                  struct BdslabSimSummary *out_summary);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BDSLAB_H */
