//! Command-line front end.
//!
//! Five subcommands: `analytic` (closed forms for one scenario), `simulate`
//! (Monte Carlo with the analytic reference column), `repro-table3` (grade
//! the published benchmark), `sweep` (surfaces over a power grid), and
//! `game` (payoff tables, equilibria, principal-agent, ultimatum).
//!
//! Conventions, shared by every subcommand:
//!
//! * exit codes: 0 success, 1 invalid usage or parameters, 2 infeasible
//!   scenario or price, 3 capacity exceeded;
//! * `--config FILE` supplies defaults from a flat JSON object whose keys
//!   mirror the flag names (`"alpha"`, `"optimal-tau"`, `"rounds"`, ...);
//!   explicit flags win, and keys a subcommand does not know are ignored so
//!   one file can serve several subcommands;
//! * `--format human|csv|json`: human output quotes extra rewards in
//!   percent, CSV and JSON always carry plain fractions; CSV starts with a
//!   `# schema:` comment line followed by a header row, and computed numbers
//!   are printed to six significant digits;
//! * `--output PATH` writes the report to a file; relative paths resolve
//!   under [`OUTPUT_DIR_ENV`] when that variable is set.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::game;
use crate::model::{self, Actor, PricePolicy, Scenario};
use crate::montecarlo::{self, SimConfig, SimMode};
use crate::pricing;
use crate::reference;
use crate::sweep::{self, GridSpec, SweepMetric};

/// Environment variable naming the directory for relative `--output` paths.
pub const OUTPUT_DIR_ENV: &str = "BDSLAB_OUTPUT_DIR";

/// Parse `std::env::args`, run, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // clap exits with 2 on usage errors by default; this tool
            // reserves 2 for infeasible scenarios, so usage maps to 1.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) | Error::DegenerateInput(_) => 1,
        Error::InfeasibleScenario(_) | Error::InfeasiblePrice(_) => 2,
        Error::Capacity(_) => 3,
    }
}

#[derive(Parser)]
#[command(
    name = "bdslab",
    version,
    about = "Economics of the block double-submission mining-pool attack: \
             closed forms, Monte Carlo simulation, surfaces, betrayal games"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Args)]
struct IoArgs {
    /// JSON file with defaults for any flag (keys mirror flag names;
    /// explicit flags win)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Report format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout (relative paths resolve
    /// under $BDSLAB_OUTPUT_DIR)
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form revenue split, price bounds, and extra rewards
    Analytic(AnalyticArgs),
    /// Monte Carlo estimates next to the analytic reference column
    Simulate(SimulateArgs),
    /// Reproduce the published benchmark table and grade every cell
    #[command(name = "repro-table3")]
    ReproTable3(ReproArgs),
    /// Evaluate an extra-reward surface over an (alpha, beta) grid
    Sweep(SweepArgs),
    /// Betrayal games: payoffs, equilibria, principal-agent, ultimatum
    Game(GameArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Csv,
    Json,
}

// ---------------------------------------------------------------------------
// Config file

/// Flat JSON object backing `--config`; typed getters with real errors.
struct Config(serde_json::Map<String, Value>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config(serde_json::Map::new()));
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidParameter(format!("cannot read config {}: {e}", path.display()))
        })?;
        let value: Value = serde_json::from_str(&text).map_err(|e| {
            Error::InvalidParameter(format!("config {} is not valid JSON: {e}", path.display()))
        })?;
        match value {
            Value::Object(map) => Ok(Config(map)),
            _ => Err(Error::InvalidParameter(format!(
                "config {} must hold a JSON object",
                path.display()
            ))),
        }
    }

    fn wrong_type(key: &str, want: &str) -> Error {
        Error::InvalidParameter(format!("config key \"{key}\" must be a {want}"))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| Self::wrong_type(key, "number")),
        }
    }

    fn u64(&self, key: &str) -> Result<Option<u64>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| Self::wrong_type(key, "non-negative integer")),
        }
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_bool()
                .map(Some)
                .ok_or_else(|| Self::wrong_type(key, "boolean")),
        }
    }

    fn str(&self, key: &str) -> Result<Option<&str>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| Self::wrong_type(key, "string")),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| Self::wrong_type(key, "number array"))
                })
                .collect::<Result<Vec<f64>>>()
                .map(Some),
            Some(_) => Err(Self::wrong_type(key, "number array")),
        }
    }

    /// Parse a config string through the same `ValueEnum` the flag uses.
    fn value_enum<T: ValueEnum>(&self, key: &str) -> Result<Option<T>> {
        match self.str(key)? {
            None => Ok(None),
            Some(s) => T::from_str(s, true).map(Some).map_err(|_| {
                Error::InvalidParameter(format!("config key \"{key}\": unknown value \"{s}\""))
            }),
        }
    }
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidParameter(format!("{flag} is required")))
}

// ---------------------------------------------------------------------------
// Shared flag groups

#[derive(Args)]
struct ScenarioArgs {
    /// Attacking pool's power share, in (0, 0.5)
    #[arg(long)]
    alpha: Option<f64>,
    /// Victim pool's power share, in (0, 0.5)
    #[arg(long)]
    beta: Option<f64>,
    /// Infiltration ratio in [0, 1]
    #[arg(long, conflicts_with = "optimal_tau")]
    tau: Option<f64>,
    /// Use the revenue-maximising infiltration ratio for (alpha, beta)
    #[arg(long)]
    optimal_tau: bool,
    /// Betrayal participation ratio in [0, 1]
    #[arg(long)]
    participation: Option<f64>,
}

impl ScenarioArgs {
    fn resolve(&self, cfg: &Config, default_participation: Option<f64>) -> Result<Scenario> {
        let alpha = require(self.alpha.or(cfg.f64("alpha")?), "--alpha")?;
        let beta = require(self.beta.or(cfg.f64("beta")?), "--beta")?;
        let tau = if self.optimal_tau {
            model::optimal_tau(alpha, beta)?
        } else if let Some(tau) = self.tau {
            tau
        } else {
            let cfg_tau = cfg.f64("tau")?;
            let cfg_optimal = cfg.bool("optimal-tau")?.unwrap_or(false);
            match (cfg_tau, cfg_optimal) {
                (Some(_), true) => {
                    return Err(Error::InvalidParameter(
                        "config sets both \"tau\" and \"optimal-tau\"".into(),
                    ))
                }
                (_, true) => model::optimal_tau(alpha, beta)?,
                (Some(tau), false) => tau,
                (None, false) => {
                    return Err(require::<f64>(None, "--tau (or --optimal-tau)")
                        .map(|_| unreachable!())
                        .unwrap_err())
                }
            }
        };
        let participation = self
            .participation
            .or(cfg.f64("participation")?)
            .or(default_participation);
        Scenario::new(alpha, beta, tau, require(participation, "--participation")?)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyArg {
    Equilibrium,
    Midpoint,
    Zero,
    Fixed,
}

#[derive(Args)]
struct PolicyArgs {
    /// Trade price rule
    #[arg(long, value_enum)]
    price_policy: Option<PolicyArg>,
    /// Price per unit published reward; implies `--price-policy fixed`
    #[arg(long)]
    price: Option<f64>,
}

impl PolicyArgs {
    fn resolve(&self, cfg: &Config) -> Result<PricePolicy> {
        let arg = match self.price_policy {
            Some(a) => Some(a),
            None => cfg.value_enum::<PolicyArg>("price-policy")?,
        };
        let price = self.price.or(cfg.f64("price")?);
        match (arg, price) {
            (Some(PolicyArg::Fixed) | None, Some(t)) => Ok(PricePolicy::Fixed(t)),
            (Some(PolicyArg::Fixed), None) => Err(Error::InvalidParameter(
                "--price-policy fixed needs --price".into(),
            )),
            (Some(PolicyArg::Equilibrium) | None, None) => Ok(PricePolicy::Equilibrium),
            (Some(PolicyArg::Midpoint), None) => Ok(PricePolicy::Midpoint),
            (Some(PolicyArg::Zero), None) => Ok(PricePolicy::Zero),
            (Some(_), Some(_)) => Err(Error::InvalidParameter(
                "--price only applies with --price-policy fixed".into(),
            )),
        }
    }
}

// ---------------------------------------------------------------------------
// Formatting helpers

/// Six significant digits, plain decimal notation.
fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Human-facing extra reward: percent, six significant digits.
fn pct(x: f64) -> String {
    format!("{} %", sig6(100.0 * x))
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// `# schema:` comment, header row, then records.
fn csv_report(schema: &str, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .expect("in-memory csv write cannot fail");
    for row in rows {
        w.write_record(row)
            .expect("in-memory csv write cannot fail");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory csv flush cannot fail"))
        .expect("csv output is utf-8");
    format!("# schema: bdslab/{schema}/v1\n{body}")
}

fn json_report(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    text.push('\n');
    text
}

fn actor_csv_name(actor: Actor) -> &'static str {
    actor.name()
}

// ---------------------------------------------------------------------------
// Dispatch

fn execute(cli: Cli) -> Result<()> {
    let cfg = Config::load(cli.io.config.as_deref())?;
    let format = match cli.io.format {
        Some(f) => f,
        None => cfg.value_enum::<Format>("format")?.unwrap_or(Format::Human),
    };
    let output = cli.io.output.or_else(|| {
        cfg.0
            .get("output")
            .and_then(|v| v.as_str())
            .map(PathBuf::from)
    });
    let report = match cli.command {
        Command::Analytic(args) => cmd_analytic(&args, &cfg, format)?,
        Command::Simulate(args) => cmd_simulate(&args, &cfg, format)?,
        Command::ReproTable3(args) => cmd_repro(&args, &cfg, format)?,
        Command::Sweep(args) => cmd_sweep(&args, &cfg, format)?,
        Command::Game(args) => cmd_game(&args, &cfg, format)?,
    };
    emit(&report, output.as_deref())
}

fn emit(report: &str, output: Option<&Path>) -> Result<()> {
    match output {
        None => {
            print!("{report}");
            Ok(())
        }
        Some(path) => {
            let resolved = if path.is_relative() {
                match std::env::var_os(OUTPUT_DIR_ENV) {
                    Some(dir) => PathBuf::from(dir).join(path),
                    None => path.to_path_buf(),
                }
            } else {
                path.to_path_buf()
            };
            std::fs::write(&resolved, report).map_err(|e| {
                Error::InvalidParameter(format!("cannot write {}: {e}", resolved.display()))
            })
        }
    }
}

// ---------------------------------------------------------------------------
// analytic

#[derive(Args)]
struct AnalyticArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    policy: PolicyArgs,
}

fn cmd_analytic(args: &AnalyticArgs, cfg: &Config, format: Format) -> Result<String> {
    let s = args.scenario.resolve(cfg, None)?;
    let policy = args.policy.resolve(cfg)?;
    let report = model::revenue_report(&s, policy)?;
    let rers = model::actor_rers(&s, &report);
    let p = s.betraying_power();
    let bounds = if p > 0.0 {
        Some(pricing::price_bounds(&s, p)?)
    } else {
        None
    };

    Ok(match format {
        Format::Human => {
            let mut out = String::new();
            out.push_str(&format!(
                "scenario        alpha {}  beta {}  tau {}  participation {}\n",
                s.alpha(),
                s.beta(),
                sig6(s.tau()),
                s.participation()
            ));
            out.push_str(&format!(
                "infiltration    {} of total power inside the victim pool, {} betraying\n",
                sig6(s.infiltrating_power()),
                sig6(p)
            ));
            match &bounds {
                Some(b) => out.push_str(&format!(
                    "price bounds    lower {}  upper {}\n",
                    sig6(b.lower),
                    sig6(b.upper)
                )),
                None => out.push_str("price bounds    none (no betraying power, no trade)\n"),
            }
            out.push_str(&format!(
                "trade price     {} per unit published reward\n\n",
                sig6(report.price)
            ));
            out.push_str(&format!(
                "{:<20}{:>12}{:>15}{:>14}\n",
                "actor", "revenue", "honest power", "RER"
            ));
            for actor in Actor::ALL {
                out.push_str(&format!(
                    "{:<20}{:>12}{:>15}{:>14}\n",
                    actor.name(),
                    sig6(report.get(actor)),
                    sig6(actor.honest_power(&s)),
                    pct(rers.get(actor))
                ));
            }
            out.push_str(&format!(
                "\ntrade income    {} per unit published reward\n",
                sig6(report.bds_trade_income)
            ));
            out
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = Actor::ALL
                .iter()
                .map(|&actor| {
                    vec![
                        s.alpha().to_string(),
                        s.beta().to_string(),
                        sig6(s.tau()),
                        s.participation().to_string(),
                        actor_csv_name(actor).to_string(),
                        sig6(rers.get(actor)),
                    ]
                })
                .collect();
            csv_report(
                "analytic",
                &[
                    "alpha",
                    "beta",
                    "tau",
                    "participation",
                    "actor",
                    "rer_analytic",
                ],
                &rows,
            )
        }
        Format::Json => json_report(&json!({
            "scenario": {
                "alpha": s.alpha(),
                "beta": s.beta(),
                "tau": s.tau(),
                "participation": s.participation(),
                "infiltrating_power": s.infiltrating_power(),
                "betraying_power": p,
            },
            "price_bounds": bounds.map(|b| json!({
                "lower": b.lower,
                "upper": b.upper,
                "feasible": b.feasible,
            })),
            "price": report.price,
            "revenue": {
                "attacker_pool": report.attacker_pool,
                "victim_own_miners": report.victim_own_miners,
                "bds_trade_income": report.bds_trade_income,
                "bds_miner_total": report.bds_miner_total,
                "loyal_miner_total": report.loyal_miner_total,
                "others": report.others,
            },
            "rer": Value::Object(
                Actor::ALL
                    .iter()
                    .map(|&a| (a.name().to_string(), json!(rers.get(a))))
                    .collect()
            ),
        })),
    })
}

// ---------------------------------------------------------------------------
// simulate

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    /// Trials per replica
    #[arg(long)]
    rounds: Option<u64>,
    /// Master RNG seed (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Independent replicas behind the standard errors (default 4)
    #[arg(long)]
    replicas: Option<u32>,
    /// Track share-level accounting instead of expectation splits
    #[arg(long)]
    share_level: bool,
    /// Shares per block under --share-level (default 1)
    #[arg(long)]
    difficulty: Option<u32>,
    /// Fault injection: betrayers sell blocks but omit the full proof
    #[arg(long)]
    omit_fpow: bool,
}

fn cmd_simulate(args: &SimulateArgs, cfg: &Config, format: Format) -> Result<String> {
    let s = args.scenario.resolve(cfg, None)?;
    let policy = args.policy.resolve(cfg)?;
    let mut sim_cfg = SimConfig::new(
        require(args.rounds.or(cfg.u64("rounds")?), "--rounds")?,
        args.seed.or(cfg.u64("seed")?).unwrap_or(0),
    );
    sim_cfg.replicas = args
        .replicas
        .or(cfg.u64("replicas")?.map(|r| r as u32))
        .unwrap_or(4);
    if args.share_level || cfg.bool("share-level")?.unwrap_or(false) {
        sim_cfg.mode = SimMode::ShareLevel;
    }
    sim_cfg.share_difficulty = args
        .difficulty
        .or(cfg.u64("difficulty")?.map(|d| d as u32))
        .unwrap_or(1);
    sim_cfg.betrayer_omits_fpow = args.omit_fpow || cfg.bool("omit-fpow")?.unwrap_or(false);

    let est = montecarlo::simulate(&s, &sim_cfg, policy)?;
    let analytic = model::actor_rers(&s, &model::revenue_report(&s, policy)?);

    Ok(match format {
        Format::Human => {
            let mode = match est.mode {
                SimMode::RoundLevel => "round-level".to_string(),
                SimMode::ShareLevel => {
                    format!("share-level, difficulty {}", sim_cfg.share_difficulty)
                }
            };
            let mut out = String::new();
            out.push_str(&format!(
                "scenario        alpha {}  beta {}  tau {}  participation {}\n",
                s.alpha(),
                s.beta(),
                sig6(s.tau()),
                s.participation()
            ));
            out.push_str(&format!(
                "simulator       {} rounds x {} replicas, {mode}, seed {}\n",
                est.rounds_per_replica, est.replicas, est.seed
            ));
            out.push_str(&format!(
                "trade price     {} per unit published reward\n",
                sig6(est.price)
            ));
            let t = &est.tallies;
            out.push_str(&format!(
                "tallies         {} trials, {} published, {} withheld\n\n",
                t.rounds, t.published, t.withheld
            ));
            out.push_str(&format!(
                "{:<20}{:>15}{:>15}{:>13}\n",
                "actor", "analytic RER", "simulated RER", "stderr (pp)"
            ));
            for actor in Actor::ALL {
                let a = est.actor(actor);
                out.push_str(&format!(
                    "{:<20}{:>15}{:>15}{:>13}\n",
                    actor.name(),
                    pct(analytic.get(actor)),
                    pct(a.mean_rer),
                    sig6(100.0 * a.stderr)
                ));
            }
            out.push_str(&format!(
                "\ntrade income    mean {} per unit published reward\n",
                sig6(est.trade_income)
            ));
            out
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = Actor::ALL
                .iter()
                .map(|&actor| {
                    let a = est.actor(actor);
                    vec![
                        s.alpha().to_string(),
                        s.beta().to_string(),
                        sig6(s.tau()),
                        s.participation().to_string(),
                        actor_csv_name(actor).to_string(),
                        sig6(analytic.get(actor)),
                        sig6(a.mean_rer),
                        sig6(a.stderr),
                    ]
                })
                .collect();
            csv_report(
                "simulate",
                &[
                    "alpha",
                    "beta",
                    "tau",
                    "participation",
                    "actor",
                    "rer_analytic",
                    "rer_sim",
                    "stderr",
                ],
                &rows,
            )
        }
        Format::Json => json_report(&json!({
            "scenario": {
                "alpha": s.alpha(),
                "beta": s.beta(),
                "tau": s.tau(),
                "participation": s.participation(),
            },
            "config": sim_cfg,
            "estimate": est,
            "rer_analytic": Value::Object(
                Actor::ALL
                    .iter()
                    .map(|&a| (a.name().to_string(), json!(analytic.get(a))))
                    .collect()
            ),
        })),
    })
}

// ---------------------------------------------------------------------------
// repro-table3

#[derive(Args)]
struct ReproArgs {
    /// Trials per replica (default 1000000)
    #[arg(long)]
    rounds: Option<u64>,
    /// Replicas per cell (default 8)
    #[arg(long)]
    replicas: Option<u32>,
    /// Master RNG seed (default: the pinned reproduction seed)
    #[arg(long)]
    seed: Option<u64>,
    /// Grade only the closed forms; skip the Monte Carlo column
    #[arg(long)]
    analytic_only: bool,
}

fn cmd_repro(args: &ReproArgs, cfg: &Config, format: Format) -> Result<String> {
    let analytic_only = args.analytic_only || cfg.bool("analytic-only")?.unwrap_or(false);
    let sim_cfg = if analytic_only {
        None
    } else {
        let mut c = SimConfig::new(
            args.rounds
                .or(cfg.u64("rounds")?)
                .unwrap_or(reference::DEFAULT_ROUNDS),
            args.seed
                .or(cfg.u64("seed")?)
                .unwrap_or(reference::DEFAULT_SEED),
        );
        c.replicas = args
            .replicas
            .or(cfg.u64("replicas")?.map(|r| r as u32))
            .unwrap_or(reference::DEFAULT_REPLICAS);
        Some(c)
    };
    let cells = reference::evaluate_all(sim_cfg.as_ref())?;
    let passed = cells.iter().filter(|c| c.pass()).count();

    Ok(match format {
        Format::Human => {
            let mut out = String::new();
            out.push_str("benchmark reproduction: betraying-miner extra reward, percent\n");
            if let Some(c) = &sim_cfg {
                out.push_str(&format!(
                    "simulator: {} rounds x {} replicas per cell, seed {}\n",
                    c.rounds, c.replicas, c.seed
                ));
            }
            let mut last_case = "";
            for cell in &cells {
                if cell.case != last_case {
                    last_case = cell.case;
                    out.push_str(&format!(
                        "\n{}: alpha {}, beta {}, optimal tau {}\n",
                        cell.case,
                        cell.alpha,
                        cell.beta,
                        sig6(cell.tau)
                    ));
                    if analytic_only {
                        out.push_str(&format!(
                            "{:>6}{:>13}{:>11}{:>8}\n",
                            "r", "closed form", "reported", "cell"
                        ));
                    } else {
                        out.push_str(&format!(
                            "{:>6}{:>13}{:>11}{:>12}{:>9}{:>11}{:>8}\n",
                            "r",
                            "closed form",
                            "reported",
                            "simulated",
                            "stderr",
                            "reported",
                            "cell"
                        ));
                    }
                }
                match &cell.sim {
                    None => out.push_str(&format!(
                        "{:>6}{:>13}{:>11}{:>8}\n",
                        cell.participation,
                        sig6(cell.analytic_pct),
                        cell.reported_analytic_pct,
                        pass_word(cell.analytic_pass)
                    )),
                    Some(sim) => out.push_str(&format!(
                        "{:>6}{:>13}{:>11}{:>12}{:>9}{:>11}{:>8}\n",
                        cell.participation,
                        sig6(cell.analytic_pct),
                        cell.reported_analytic_pct,
                        sig6(sim.simulated_pct),
                        format!("{:.4}", sim.stderr_pct),
                        sim.reported_pct,
                        pass_word(cell.pass())
                    )),
                }
            }
            out.push_str(&format!("\nverdict: {passed}/{} cells pass\n", cells.len()));
            out
        }
        Format::Csv => {
            let mut header = vec![
                "case",
                "alpha",
                "beta",
                "tau",
                "participation",
                "actor",
                "rer_analytic",
                "reported_analytic",
                "analytic_pass",
            ];
            if !analytic_only {
                header.extend(["rer_sim", "stderr", "reported_sim", "sim_pass"]);
            }
            let rows: Vec<Vec<String>> = cells
                .iter()
                .map(|cell| {
                    let mut row = vec![
                        cell.case.to_string(),
                        cell.alpha.to_string(),
                        cell.beta.to_string(),
                        sig6(cell.tau),
                        cell.participation.to_string(),
                        Actor::BdsMiner.name().to_string(),
                        sig6(cell.analytic_pct / 100.0),
                        (cell.reported_analytic_pct / 100.0).to_string(),
                        cell.analytic_pass.to_string(),
                    ];
                    if let Some(sim) = &cell.sim {
                        row.extend([
                            sig6(sim.simulated_pct / 100.0),
                            sig6(sim.stderr_pct / 100.0),
                            (sim.reported_pct / 100.0).to_string(),
                            sim.pass().to_string(),
                        ]);
                    }
                    row
                })
                .collect();
            csv_report("repro-table3", &header, &rows)
        }
        Format::Json => {
            let cell_values: Vec<Value> = cells
                .iter()
                .map(|cell| {
                    json!({
                        "case": cell.case,
                        "alpha": cell.alpha,
                        "beta": cell.beta,
                        "tau": cell.tau,
                        "participation": cell.participation,
                        "actor": Actor::BdsMiner.name(),
                        "rer_analytic": cell.analytic_pct / 100.0,
                        "reported_analytic": cell.reported_analytic_pct / 100.0,
                        "analytic_pass": cell.analytic_pass,
                        "sim": cell.sim.map(|sim| json!({
                            "rer_sim": sim.simulated_pct / 100.0,
                            "stderr": sim.stderr_pct / 100.0,
                            "reported_sim": sim.reported_pct / 100.0,
                            "within_sigma": sim.within_sigma,
                            "within_tolerance": sim.within_tolerance,
                        })),
                        "pass": cell.pass(),
                    })
                })
                .collect();
            json_report(&json!({
                "config": sim_cfg,
                "cells": cell_values,
                "passed": passed,
                "total": cells.len(),
            }))
        }
    })
}

// ---------------------------------------------------------------------------
// sweep

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    AttackerPool,
    BdsMiner,
    Victim,
}

impl From<MetricArg> for SweepMetric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::AttackerPool => SweepMetric::AttackerPoolRer,
            MetricArg::BdsMiner => SweepMetric::BdsMinerRer,
            MetricArg::Victim => SweepMetric::VictimRer,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    alpha_min: Option<f64>,
    #[arg(long)]
    alpha_max: Option<f64>,
    #[arg(long)]
    alpha_step: Option<f64>,
    #[arg(long)]
    beta_min: Option<f64>,
    #[arg(long)]
    beta_max: Option<f64>,
    #[arg(long)]
    beta_step: Option<f64>,
    /// Comma-separated participation ratios
    #[arg(long, value_delimiter = ',')]
    participations: Vec<f64>,
    /// Surface to record (default bds-miner)
    #[arg(long, value_enum)]
    metric: Option<MetricArg>,
}

fn cmd_sweep(args: &SweepArgs, cfg: &Config, format: Format) -> Result<String> {
    let metric_arg = match args.metric {
        Some(m) => m,
        None => cfg
            .value_enum::<MetricArg>("metric")?
            .unwrap_or(MetricArg::BdsMiner),
    };
    let mut grid = GridSpec::new(metric_arg.into());
    for (value, slot) in [
        (
            args.alpha_min.or(cfg.f64("alpha-min")?),
            &mut grid.alpha_min,
        ),
        (
            args.alpha_max.or(cfg.f64("alpha-max")?),
            &mut grid.alpha_max,
        ),
        (
            args.alpha_step.or(cfg.f64("alpha-step")?),
            &mut grid.alpha_step,
        ),
        (args.beta_min.or(cfg.f64("beta-min")?), &mut grid.beta_min),
        (args.beta_max.or(cfg.f64("beta-max")?), &mut grid.beta_max),
        (
            args.beta_step.or(cfg.f64("beta-step")?),
            &mut grid.beta_step,
        ),
    ] {
        if let Some(v) = value {
            *slot = v;
        }
    }
    if !args.participations.is_empty() {
        grid.participations = args.participations.clone();
    } else if let Some(list) = cfg.f64_list("participations")? {
        grid.participations = list;
    }
    let result = sweep::run_sweep(&grid)?;
    let actor = grid.metric.actor();

    let row_json = |row: &sweep::SweepRow| {
        json!({
            "alpha": row.alpha,
            "beta": row.beta,
            "tau": row.tau,
            "participation": row.participation,
            "actor": actor.name(),
            "rer_analytic": row.rer_analytic,
        })
    };

    Ok(match format {
        Format::Human => {
            let mut out = String::new();
            out.push_str(&format!(
                "sweep           alpha [{}, {}] step {}, beta [{}, {}] step {}\n",
                grid.alpha_min,
                grid.alpha_max,
                grid.alpha_step,
                grid.beta_min,
                grid.beta_max,
                grid.beta_step
            ));
            out.push_str(&format!(
                "metric          {} RER at optimal tau, equilibrium price\n",
                actor.name()
            ));
            out.push_str(&format!("participations  {:?}\n", grid.participations));
            out.push_str(&format!(
                "rows            {} ({} cells skipped)\n",
                result.rows.len(),
                result.skipped.len()
            ));
            if let Some(row) = &result.argmax {
                out.push_str(&format!(
                    "maximum         {} at alpha {}, beta {}, r {}\n",
                    pct(row.rer_analytic),
                    row.alpha,
                    row.beta,
                    row.participation
                ));
            }
            if let Some(row) = &result.argmin {
                out.push_str(&format!(
                    "minimum         {} at alpha {}, beta {}, r {}\n",
                    pct(row.rer_analytic),
                    row.alpha,
                    row.beta,
                    row.participation
                ));
            }
            for cell in &result.skipped {
                out.push_str(&format!(
                    "skipped         alpha {}, beta {}: {}\n",
                    cell.alpha, cell.beta, cell.reason
                ));
            }
            out.push_str("full surface: rerun with --format csv or --format json\n");
            out
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = result
                .rows
                .iter()
                .map(|row| {
                    vec![
                        row.alpha.to_string(),
                        row.beta.to_string(),
                        sig6(row.tau),
                        row.participation.to_string(),
                        actor.name().to_string(),
                        sig6(row.rer_analytic),
                    ]
                })
                .collect();
            let mut out = csv_report(
                "sweep",
                &[
                    "alpha",
                    "beta",
                    "tau",
                    "participation",
                    "actor",
                    "rer_analytic",
                ],
                &rows,
            );
            for cell in &result.skipped {
                out.push_str(&format!(
                    "# skipped: alpha={} beta={} reason={}\n",
                    cell.alpha, cell.beta, cell.reason
                ));
            }
            out
        }
        Format::Json => json_report(&json!({
            "grid": {
                "alpha-min": grid.alpha_min,
                "alpha-max": grid.alpha_max,
                "alpha-step": grid.alpha_step,
                "beta-min": grid.beta_min,
                "beta-max": grid.beta_max,
                "beta-step": grid.beta_step,
                "participations": grid.participations,
                "metric": actor.name(),
            },
            "rows": result.rows.iter().map(row_json).collect::<Vec<_>>(),
            "skipped": result.skipped.iter().map(|c| json!({
                "alpha": c.alpha,
                "beta": c.beta,
                "reason": c.reason,
            })).collect::<Vec<_>>(),
            "argmax": result.argmax.as_ref().map(row_json),
            "argmin": result.argmin.as_ref().map(row_json),
        })),
    })
}

// ---------------------------------------------------------------------------
// game

#[derive(Args)]
struct GameArgs {
    #[command(subcommand)]
    command: GameCommand,
}

#[derive(Subcommand)]
enum GameCommand {
    /// Exhaustive pure-Nash solve of the n-miner betrayal game
    Solve(GameSolveArgs),
    /// Two-miner payoff table in the conventional letters
    Table(GameTableArgs),
    /// Pool's best reply on top of the miners' betrayal subgame
    PrincipalAgent(GamePowersArgs),
    /// Price-setting stage: equilibrium offer and the victim's response
    Ultimatum(GameUltimatumArgs),
}

#[derive(Args)]
struct GamePowersArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Comma-separated miner powers (fractions of total network power)
    #[arg(long, value_delimiter = ',')]
    powers: Vec<f64>,
}

#[derive(Args)]
struct GameSolveArgs {
    #[command(flatten)]
    base: GamePowersArgs,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct GameTableArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Miner 1's power (fraction of total network power)
    #[arg(long)]
    p: Option<f64>,
    /// Miner 2's power (fraction of total network power)
    #[arg(long)]
    q: Option<f64>,
    #[command(flatten)]
    policy: PolicyArgs,
}

#[derive(Args)]
struct GameUltimatumArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Betraying power behind the offer (default: the scenario's own)
    #[arg(long)]
    betraying_power: Option<f64>,
}

fn powers_of(args: &GamePowersArgs, cfg: &Config) -> Result<(Scenario, Vec<f64>)> {
    // Participation is irrelevant here: the solvers re-derive the betraying
    // power from each coalition, so any valid placeholder works.
    let s = args.scenario.resolve(cfg, Some(1.0))?;
    let powers = if args.powers.is_empty() {
        cfg.f64_list("powers")?
            .ok_or_else(|| Error::InvalidParameter("--powers is required".into()))?
    } else {
        args.powers.clone()
    };
    Ok((s, powers))
}

fn nash_human(result: &game::NashResult) -> String {
    let mut out = String::new();
    let list = result
        .equilibria
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join("  ");
    out.push_str(&format!(
        "pure equilibria: {}\n",
        if list.is_empty() { "none" } else { &list }
    ));
    out.push_str(&format!(
        "unique: {}\n",
        if result.unique { "yes" } else { "no" }
    ));
    out
}

fn cmd_game(args: &GameArgs, cfg: &Config, format: Format) -> Result<String> {
    if format == Format::Csv {
        return Err(Error::InvalidParameter(
            "game reports have no CSV form; use --format human or json".into(),
        ));
    }
    match &args.command {
        GameCommand::Solve(solve) => {
            let (s, powers) = powers_of(&solve.base, cfg)?;
            let policy = solve.policy.resolve(cfg)?;
            let result = game::n_miner_game(&s, &powers, policy)?;
            Ok(match format {
                Format::Human => {
                    let mut out = format!(
                        "betrayal game with {} miners, powers {:?}\n",
                        powers.len(),
                        powers
                    );
                    out.push_str(&nash_human(&result));
                    out
                }
                _ => json_report(&json!({
                    "scenario": s,
                    "powers": powers,
                    "equilibria": result.equilibria,
                    "unique": result.unique,
                })),
            })
        }
        GameCommand::Table(table) => {
            let s = table.scenario.resolve(cfg, Some(1.0))?;
            let p = require(table.p.or(cfg.f64("p")?), "--p")?;
            let q = require(table.q.or(cfg.f64("q")?), "--q")?;
            let policy = table.policy.resolve(cfg)?;
            let t = game::payoff_table_two(&s, p, q, policy)?;
            let result = game::pure_nash_two(&t);
            Ok(match format {
                Format::Human => {
                    let mut out = String::new();
                    out.push_str(&format!(
                        "two-miner betrayal payoffs, powers p={p} q={q}\n\n"
                    ));
                    out.push_str(&format!(
                        "{:<22}{:<30}{:<30}\n",
                        "", "miner 2 cooperates", "miner 2 betrays"
                    ));
                    out.push_str(&format!(
                        "{:<22}{:<30}{:<30}\n",
                        "miner 1 cooperates",
                        format!("R={} R'={}", sig6(t.r), sig6(t.r_prime)),
                        format!("D={} H'={}", sig6(t.d), sig6(t.h_prime)),
                    ));
                    out.push_str(&format!(
                        "{:<22}{:<30}{:<30}\n\n",
                        "miner 1 betrays",
                        format!("H={} D'={}", sig6(t.h), sig6(t.d_prime)),
                        format!("L={} L'={}", sig6(t.l), sig6(t.l_prime)),
                    ));
                    out.push_str(&nash_human(&result));
                    out
                }
                _ => json_report(&json!({
                    "scenario": s,
                    "table": t,
                    "equilibria": result.equilibria,
                    "unique": result.unique,
                })),
            })
        }
        GameCommand::PrincipalAgent(pa) => {
            let (s, powers) = powers_of(pa, cfg)?;
            let profile = game::principal_agent(&s, &powers)?;
            Ok(match format {
                Format::Human => {
                    let pool = match profile.pool_action {
                        Some(game::PoolAction::Attack) => "attack",
                        Some(game::PoolAction::Honest) => "mine honestly",
                        None => "(no pool stage)",
                    };
                    format!("principal-agent equilibrium: {profile}\npool's best reply: {pool}\n")
                }
                _ => json_report(&json!({
                    "scenario": s,
                    "powers": powers,
                    "profile": profile,
                    "display": profile.to_string(),
                })),
            })
        }
        GameCommand::Ultimatum(u) => {
            let s = u.scenario.resolve(cfg, Some(1.0))?;
            let p = u
                .betraying_power
                .or(cfg.f64("betraying-power")?)
                .unwrap_or_else(|| s.betraying_power());
            let (price, response) = game::ultimatum_equilibrium(&s, p)?;
            Ok(match format {
                Format::Human => format!(
                    "ultimatum price: {} per unit published reward\nvictim's response: {}\n",
                    sig6(price),
                    match response {
                        game::UltimatumResponse::Accept => "accept",
                        game::UltimatumResponse::Reject => "reject",
                    }
                ),
                _ => json_report(&json!({
                    "scenario": s,
                    "betraying_power": p,
                    "price": price,
                    "response": response,
                })),
            })
        }
    }
}
