//! Scenario files: the simulator's single input format.
//!
//! A scenario is a TOML document with four parts:
//!
//! ```toml
//! id = "example"
//!
//! [mo]                      # the posted task and market parameters
//! epsilon = 0.3             # global relative accuracy target, (0, 1]
//! zeta = 1.0                # global iteration-bound scale
//! global_sessions = 2       # training sessions bought per cycle
//! t_train_s = 2.0           # seconds per local training round
//! t_comm_s = 0.2            # seconds per parameter upload
//! substitutability = 0.5    # buyer-side substitutability v, [0, 1)
//! bandwidth_hz = 1e6
//! payload_bits = 1e5
//! noise_power_w = 1e-9
//! bit_error_rate = 1e-3
//! correlation_time_s = 0.2  # t_train_s must be an integer multiple
//!
//! [solver]                  # optional; defaults shown
//! xi = 0.01
//! max_iterations = 500
//! mode = "derived"          # "printed" | "derived"
//! initial_pricing = "break-even"   # "break-even" | "zeros"
//! iteration_rule = "taylor" # "taylor" | "exact"
//!
//! ilps_markup = 0.1         # optional; cost-plus markup for comparisons
//!
//! [channel]                 # shared gain forecast model
//! gain_low = 0.32
//! gain_high = 7.57
//! levels = 10
//! observation_slots = 100   # trace-ingestion metadata (X)
//! initial_distribution = "uniform"   # or a probability vector
//! stp = [ [ ... ], ... ]    # row-stochastic, levels x levels
//! # or: trace = [0, 3, 1, ...]       # estimated at load time instead
//!
//! [[ues]]
//! id = 1
//! nu = 1e-28                # effective switched capacitance
//! cycles_per_sample = 15.0
//! dataset_size = 8e7
//! eta = 1.0
//! f_max_hz = 2e9
//! load_levels = 5
//! initial_load_state = 0
//! stp = [ [ ... ], ... ]    # or: trace = [ ... ]
//! ```
//!
//! Matrices may be replaced by raw observation traces; the loader then
//! estimates the transition matrix by transition counting. Every invariant
//! is checked at load time and violations are reported by name.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cost::{IterationRule, MoContract, UeProfile};
use crate::error::{Error, Result};
use crate::game::ResponseMode;
use crate::markov::{
    discretize, estimate_stp, Distribution, MarkovChain, ObservationTrace, SpaceKind,
};
use crate::solver::{InitialPricing, SolverConfig};

/// The shared channel forecast model.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel {
    pub chain: MarkovChain,
    pub initial: Distribution,
    /// Slots per observation window when the chain is estimated from traces.
    pub observation_slots: u32,
}

/// A fully validated simulation input.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub contract: MoContract,
    pub solver: SolverConfig,
    pub ilps_markup: f64,
    pub channel: ChannelModel,
    pub ues: Vec<UeProfile>,
}

// --- raw serde mirror ------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct RawScenario {
    id: String,
    mo: RawMo,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solver: Option<RawSolver>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ilps_markup: Option<f64>,
    channel: RawChannel,
    ues: Vec<RawUe>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawMo {
    epsilon: f64,
    zeta: f64,
    global_sessions: u32,
    t_train_s: f64,
    t_comm_s: f64,
    substitutability: f64,
    bandwidth_hz: f64,
    payload_bits: f64,
    noise_power_w: f64,
    bit_error_rate: f64,
    correlation_time_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawSolver {
    #[serde(default = "default_xi")]
    xi: f64,
    #[serde(default = "default_cap")]
    max_iterations: usize,
    #[serde(default = "default_mode")]
    mode: String,
    #[serde(default = "default_pricing")]
    initial_pricing: String,
    #[serde(default = "default_rule")]
    iteration_rule: String,
}

fn default_xi() -> f64 {
    0.01
}
fn default_cap() -> usize {
    500
}
fn default_mode() -> String {
    "printed".into()
}
fn default_pricing() -> String {
    "break-even".into()
}
fn default_rule() -> String {
    "taylor".into()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawDistribution {
    Named(String),
    Probs(Vec<f64>),
}

#[derive(Debug, Serialize, Deserialize)]
struct RawChannel {
    gain_low: f64,
    gain_high: f64,
    levels: usize,
    #[serde(default = "default_observation_slots")]
    observation_slots: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_distribution: Option<RawDistribution>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stp: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<usize>>,
}

fn default_observation_slots() -> u32 {
    100
}

#[derive(Debug, Serialize, Deserialize)]
struct RawUe {
    id: u32,
    nu: f64,
    cycles_per_sample: f64,
    dataset_size: f64,
    eta: f64,
    f_max_hz: f64,
    load_levels: usize,
    initial_load_state: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stp: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    trace: Option<Vec<usize>>,
}

// --- loading ---------------------------------------------------------------

fn invalid(path: &str, detail: impl Into<String>) -> Error {
    Error::ScenarioValidation {
        path: path.to_string(),
        detail: detail.into(),
    }
}

fn chain_from_parts(
    path: &str,
    what: &str,
    space: crate::markov::StateSpace,
    stp: Option<Vec<Vec<f64>>>,
    trace: Option<Vec<usize>>,
    window: f64,
) -> Result<MarkovChain> {
    match (stp, trace) {
        (Some(_), Some(_)) => Err(invalid(
            path,
            format!("{what}: give either stp or trace, not both"),
        )),
        (None, None) => Err(invalid(
            path,
            format!("{what}: one of stp or trace is required"),
        )),
        (Some(rows), None) => {
            MarkovChain::new(space, rows).map_err(|e| invalid(path, format!("{what}: {e}")))
        }
        (None, Some(slots)) => {
            let trace = ObservationTrace::new(slots, window);
            estimate_stp(&space, &trace).map_err(|e| invalid(path, format!("{what}: {e}")))
        }
    }
}

fn parse_mode(path: &str, s: &str) -> Result<ResponseMode> {
    match s {
        "printed" => Ok(ResponseMode::Printed),
        "derived" => Ok(ResponseMode::Derived),
        other => Err(invalid(
            path,
            format!("unknown solver mode {other:?} (printed|derived)"),
        )),
    }
}

fn parse_pricing(path: &str, s: &str) -> Result<InitialPricing> {
    match s {
        "break-even" => Ok(InitialPricing::BreakEven),
        "zeros" => Ok(InitialPricing::Zeros),
        other => Err(invalid(
            path,
            format!("unknown initial pricing {other:?} (break-even|zeros)"),
        )),
    }
}

fn parse_rule(path: &str, s: &str) -> Result<IterationRule> {
    match s {
        "taylor" => Ok(IterationRule::Taylor),
        "exact" => Ok(IterationRule::Exact),
        other => Err(invalid(
            path,
            format!("unknown iteration rule {other:?} (taylor|exact)"),
        )),
    }
}

fn validate(path: &str, raw: RawScenario) -> Result<Scenario> {
    let contract = MoContract {
        epsilon: raw.mo.epsilon,
        zeta: raw.mo.zeta,
        global_sessions: raw.mo.global_sessions,
        t_train: raw.mo.t_train_s,
        t_comm: raw.mo.t_comm_s,
        substitutability: raw.mo.substitutability,
        bandwidth: raw.mo.bandwidth_hz,
        payload_bits: raw.mo.payload_bits,
        noise_power: raw.mo.noise_power_w,
        bit_error_rate: raw.mo.bit_error_rate,
        correlation_time: raw.mo.correlation_time_s,
    };
    contract
        .validate()
        .map_err(|e| invalid(path, format!("mo: {e}")))?;

    let solver = match raw.solver {
        None => SolverConfig::default(),
        Some(s) => {
            let config = SolverConfig {
                xi: s.xi,
                max_iterations: s.max_iterations,
                mode: parse_mode(path, &s.mode)?,
                initial_pricing: parse_pricing(path, &s.initial_pricing)?,
                iteration_rule: parse_rule(path, &s.iteration_rule)?,
            };
            config
                .validate()
                .map_err(|e| invalid(path, format!("solver: {e}")))?;
            config
        }
    };

    let ilps_markup = raw.ilps_markup.unwrap_or(0.1);
    if ilps_markup < 0.0 {
        return Err(invalid(
            path,
            format!("ilps_markup must be nonnegative, got {ilps_markup}"),
        ));
    }

    let gain_space = discretize(
        SpaceKind::Gain,
        raw.channel.gain_low,
        raw.channel.gain_high,
        raw.channel.levels,
    )
    .map_err(|e| invalid(path, format!("channel: {e}")))?;
    let channel_window = raw.channel.observation_slots as f64 * contract.correlation_time;
    let chain = chain_from_parts(
        path,
        "channel",
        gain_space,
        raw.channel.stp,
        raw.channel.trace,
        channel_window,
    )?;
    let initial = match raw.channel.initial_distribution {
        None | Some(RawDistribution::Named(_)) => {
            if let Some(RawDistribution::Named(name)) = &raw.channel.initial_distribution {
                if name != "uniform" {
                    return Err(invalid(
                        path,
                        format!("channel: unknown initial distribution {name:?}"),
                    ));
                }
            }
            Distribution::uniform(chain.state_count())
        }
        Some(RawDistribution::Probs(probs)) => {
            if probs.len() != chain.state_count() {
                return Err(invalid(
                    path,
                    format!(
                        "channel: initial distribution has {} entries for {} states",
                        probs.len(),
                        chain.state_count()
                    ),
                ));
            }
            Distribution::new(probs).map_err(|e| invalid(path, format!("channel: {e}")))?
        }
    };
    let channel = ChannelModel {
        chain,
        initial,
        observation_slots: raw.channel.observation_slots,
    };

    if raw.ues.is_empty() {
        return Err(invalid(path, "at least one UE is required"));
    }
    let load_window = contract.global_sessions as f64 * (contract.t_train + contract.t_comm);
    let mut ues = Vec::with_capacity(raw.ues.len());
    for raw_ue in raw.ues {
        let label = format!("ues[{}]", raw_ue.id);
        let space = discretize(SpaceKind::Load, 0.0, raw_ue.f_max_hz, raw_ue.load_levels)
            .map_err(|e| invalid(path, format!("{label}: {e}")))?;
        let load_chain =
            chain_from_parts(path, &label, space, raw_ue.stp, raw_ue.trace, load_window)?;
        let profile = UeProfile {
            id: raw_ue.id,
            nu: raw_ue.nu,
            cycles_per_sample: raw_ue.cycles_per_sample,
            dataset_size: raw_ue.dataset_size,
            eta: raw_ue.eta,
            f_max: raw_ue.f_max_hz,
            load_chain,
            initial_load_state: raw_ue.initial_load_state,
        };
        profile
            .validate()
            .map_err(|e| invalid(path, format!("{label}: {e}")))?;
        ues.push(profile);
    }
    let mut ids: Vec<u32> = ues.iter().map(|u| u.id).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() != ues.len() {
        return Err(invalid(path, "UE ids must be unique"));
    }
    ues.sort_by_key(|u| u.id);

    Ok(Scenario {
        id: raw.id,
        contract,
        solver,
        ilps_markup,
        channel,
        ues,
    })
}

/// Parse and validate a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: shown.clone(),
        source,
    })?;
    load_scenario_str(&shown, &text)
}

/// Parse and validate scenario text; `path` only labels error messages.
pub fn load_scenario_str(path: &str, text: &str) -> Result<Scenario> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| Error::ScenarioParse {
        path: path.to_string(),
        detail: e.to_string(),
    })?;
    validate(path, raw)
}

// --- saving ----------------------------------------------------------------

fn mode_name(mode: ResponseMode) -> &'static str {
    match mode {
        ResponseMode::Printed => "printed",
        ResponseMode::Derived => "derived",
    }
}

fn pricing_name(p: &InitialPricing) -> Result<&'static str> {
    match p {
        InitialPricing::BreakEven => Ok("break-even"),
        InitialPricing::Zeros => Ok("zeros"),
        InitialPricing::Explicit(_) => Err(Error::invalid(
            "explicit initial prices cannot be expressed in a scenario file",
        )),
    }
}

fn rule_name(r: IterationRule) -> &'static str {
    match r {
        IterationRule::Taylor => "taylor",
        IterationRule::Exact => "exact",
    }
}

/// Render a scenario back to TOML. Loading the result reproduces the
/// scenario exactly.
pub fn scenario_to_toml(scenario: &Scenario) -> Result<String> {
    let c = &scenario.contract;
    let raw = RawScenario {
        id: scenario.id.clone(),
        mo: RawMo {
            epsilon: c.epsilon,
            zeta: c.zeta,
            global_sessions: c.global_sessions,
            t_train_s: c.t_train,
            t_comm_s: c.t_comm,
            substitutability: c.substitutability,
            bandwidth_hz: c.bandwidth,
            payload_bits: c.payload_bits,
            noise_power_w: c.noise_power,
            bit_error_rate: c.bit_error_rate,
            correlation_time_s: c.correlation_time,
        },
        solver: Some(RawSolver {
            xi: scenario.solver.xi,
            max_iterations: scenario.solver.max_iterations,
            mode: mode_name(scenario.solver.mode).to_string(),
            initial_pricing: pricing_name(&scenario.solver.initial_pricing)?.to_string(),
            iteration_rule: rule_name(scenario.solver.iteration_rule).to_string(),
        }),
        ilps_markup: Some(scenario.ilps_markup),
        channel: RawChannel {
            gain_low: scenario.channel.chain.space().level(0),
            gain_high: scenario
                .channel
                .chain
                .space()
                .level(scenario.channel.chain.state_count() - 1),
            levels: scenario.channel.chain.state_count(),
            observation_slots: scenario.channel.observation_slots,
            initial_distribution: Some(RawDistribution::Probs(
                scenario.channel.initial.probs().to_vec(),
            )),
            stp: Some(scenario.channel.chain.matrix().to_vec()),
            trace: None,
        },
        ues: scenario
            .ues
            .iter()
            .map(|u| RawUe {
                id: u.id,
                nu: u.nu,
                cycles_per_sample: u.cycles_per_sample,
                dataset_size: u.dataset_size,
                eta: u.eta,
                f_max_hz: u.f_max,
                load_levels: u.load_chain.state_count(),
                initial_load_state: u.initial_load_state,
                stp: Some(u.load_chain.matrix().to_vec()),
                trace: None,
            })
            .collect(),
    };
    toml::to_string_pretty(&raw)
        .map_err(|e| Error::invalid(format!("scenario not serializable: {e}")))
}

/// Write a scenario to disk in the documented format.
pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = scenario_to_toml(scenario)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
