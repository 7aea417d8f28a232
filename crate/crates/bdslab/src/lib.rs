//! A desk-scale laboratory for the economics of the block double-submission
//! (BDS) attack on proof-of-work mining pools.
//!
//! A block-withholding (BWH) attacker infiltrates a victim pool and submits
//! only partial proofs of work, earning shares while sabotaging the victim's
//! block output. The BDS twist: infiltrating miners can betray the attacker
//! by selling the withheld full proofs of work back to the victim, who
//! publishes them. This crate provides
//!
//! * [`model`] — the closed-form per-actor revenue accounting for both
//!   attacks, plus the attacker's optimal infiltration ratio;
//! * [`pricing`] — feasibility bounds and the ultimatum-equilibrium value of
//!   the trade price;
//! * [`game`] — the miner-betrayal games (pairwise, n-miner, and the
//!   pool-level principal-agent stage), solved by exhaustive enumeration;
//! * [`montecarlo`] — a deterministic, replicated Monte Carlo simulator of
//!   the mining race that cross-validates the analytic results;
//! * [`sweep`] — grid evaluation of RER surfaces over pool powers;
//! * [`mod@reference`] — the two published benchmark cases with their reported
//!   RER values and the tolerances used to reproduce them.
//!
//! The headline result the tooling reproduces: betrayal is individually
//! rational at every feasible price (it strictly dominates loyalty), the
//! equilibrium price transfers the entire surplus to the betrayers, and a
//! rational pool therefore never launches the BWH attack in the first place.

pub mod cli;
pub mod error;
pub mod game;
pub mod model;
pub mod montecarlo;
pub mod pricing;
pub mod reference;
pub mod sweep;

pub use error::{Error, Result};
