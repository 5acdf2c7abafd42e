//! Comparison pricing schemes and the profit-comparison harness.
//!
//! Three schemes run against identical forecasts:
//!
//! * `TlaGts` — the full game: load-aware costing plus the selection loop.
//! * `PureGts` — the identical game, except every seller prices as if its
//!   background load were zero. Forecasts and final accounting are
//!   unchanged; only the cost model inside the quotes is blinded.
//! * `Ilps` — no game at all: each seller quotes cost-plus at a reference
//!   accuracy, ignoring everyone else.
//!
//! Profits are always evaluated with the true load-aware energy model; a
//! scheme does not get to grade itself with its own mistaken cost book.

use std::hash::{Hash, Hasher};

use crate::cost::{estimate_sessions, MoContract, UeProfile};
use crate::error::{Error, Result};
use crate::game::{mo_best_response, ue_utility, PriceProfile};
use crate::markov::{Distribution, MarkovChain};
use crate::solver::{market_hash_input, run_selection, NeOutcome, SolverConfig};

/// Identifies one of the three pricing schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeId {
    TlaGts,
    PureGts,
    Ilps,
}

impl SchemeId {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::TlaGts => "tla-gts",
            SchemeId::PureGts => "pure-gts",
            SchemeId::Ilps => "ilps",
        }
    }
}

/// Per-UE profit line inside a [`ProfitReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitEntry {
    pub ue: u32,
    /// True-cost profit; zero for sellers the scheme did not admit.
    pub profit: f64,
    pub payment: f64,
    pub eliminated: bool,
}

/// One scheme's outcome over a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfitReport {
    pub scheme: SchemeId,
    pub scenario_id: String,
    /// Hash of the solver configuration and markup the run used.
    pub config_hash: u64,
    /// Hash of the per-UE forecast state sequences the run priced against.
    pub prediction_fingerprint: u64,
    pub entries: Vec<ProfitEntry>,
    /// Total buyer payment across admitted sellers.
    pub mo_total_payment: f64,
}

/// The load-blind variant of the full game. Quotes are computed as if every
/// session's background load were zero; selection and final accounting work
/// exactly as in the load-aware game.
pub fn pure_gts(
    ues: &[UeProfile],
    contract: &MoContract,
    channel: &MarkovChain,
    initial_gain: &Distribution,
    config: &SolverConfig,
) -> Result<NeOutcome> {
    run_selection(ues, contract, channel, initial_gain, config, false)
}

/// Rival-independent cost-plus quotes: each session priced at
/// `(1 + markup) * psi / iterations`, both taken at the reference accuracy
/// `theta_max / 2`.
pub fn ilps(
    ues: &[UeProfile],
    contract: &MoContract,
    channel: &MarkovChain,
    initial_gain: &Distribution,
    config: &SolverConfig,
    markup: f64,
) -> Result<PriceProfile> {
    if markup < 0.0 {
        return Err(Error::invalid(format!(
            "markup must be nonnegative, got {markup}"
        )));
    }
    let theta_ref = contract.theta_max()? / 2.0;
    let mut rows = Vec::with_capacity(ues.len());
    for ue in ues {
        let est = estimate_sessions(
            ue,
            contract,
            channel,
            initial_gain,
            theta_ref,
            config.iteration_rule,
        )?;
        rows.push(
            est.sessions
                .iter()
                .map(|s| (1.0 + markup) * s.total_j / est.iterations)
                .collect(),
        );
    }
    PriceProfile::new(rows)
}

fn fingerprint(
    ues: &[UeProfile],
    contract: &MoContract,
    channel: &MarkovChain,
    initial_gain: &Distribution,
) -> Result<u64> {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    let sessions = contract.global_sessions as usize;
    let delta = contract.delta()?;
    for ue in ues {
        ue.id.hash(&mut h);
        let loads =
            crate::markov::predict_load_sequence(&ue.load_chain, ue.initial_load_state, sessions)?;
        loads.hash(&mut h);
        for t in 1..=sessions {
            crate::markov::predict_channel_state(channel, initial_gain, t as u64, delta)?
                .hash(&mut h);
        }
    }
    Ok(h.finish())
}

fn game_report(
    scheme: SchemeId,
    outcome: &NeOutcome,
    ues: &[UeProfile],
    scenario_id: &str,
    config_hash: u64,
    prediction_fingerprint: u64,
) -> ProfitReport {
    let entries = ues
        .iter()
        .map(|p| match outcome.ues.iter().find(|u| u.id == p.id) {
            Some(u) => ProfitEntry {
                ue: p.id,
                profit: u.profit,
                payment: u.payment,
                eliminated: false,
            },
            None => ProfitEntry {
                ue: p.id,
                profit: 0.0,
                payment: 0.0,
                eliminated: true,
            },
        })
        .collect();
    let mo_total_payment = outcome.ues.iter().map(|u| u.payment).sum();
    ProfitReport {
        scheme,
        scenario_id: scenario_id.to_string(),
        config_hash,
        prediction_fingerprint,
        entries,
        mo_total_payment,
    }
}

/// Run all three schemes on one scenario and report true-cost profits.
///
/// The game schemes are graded at the purchase their own equilibrium
/// produces; the cost-plus scheme is graded at the reference accuracy its
/// quotes were computed for. The buyer's response to the cost-plus quotes
/// is still taken (it determines the recorded purchase), but a quote-based
/// seller delivers the accuracy it priced.
pub fn compare_schemes(
    ues: &[UeProfile],
    contract: &MoContract,
    channel: &MarkovChain,
    initial_gain: &Distribution,
    config: &SolverConfig,
    markup: f64,
    scenario_id: &str,
) -> Result<Vec<ProfitReport>> {
    if ues.is_empty() {
        return Ok(Vec::new());
    }
    let config_hash = {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        market_hash_input(config).hash(&mut h);
        markup.to_bits().hash(&mut h);
        h.finish()
    };
    let fp = fingerprint(ues, contract, channel, initial_gain)?;

    let tla = crate::solver::tla_gts(ues, contract, channel, initial_gain, config)
        .map_err(|e| Error::Configuration(format!("{}: {e}", SchemeId::TlaGts.as_str())))?;
    let pure = pure_gts(ues, contract, channel, initial_gain, config)
        .map_err(|e| Error::Configuration(format!("{}: {e}", SchemeId::PureGts.as_str())))?;

    // Cost-plus quotes, graded at their reference accuracy.
    let theta_ref = contract.theta_max()? / 2.0;
    let mut ilps_entries = Vec::with_capacity(ues.len());
    let mut quoted_rows: Vec<Vec<f64>> = Vec::new();
    let mut quoting: Vec<&UeProfile> = Vec::new();
    for ue in ues {
        match estimate_sessions(
            ue,
            contract,
            channel,
            initial_gain,
            theta_ref,
            config.iteration_rule,
        ) {
            Ok(est) => {
                let prices: Vec<f64> = est
                    .sessions
                    .iter()
                    .map(|s| (1.0 + markup) * s.total_j / est.iterations)
                    .collect();
                let psi: Vec<f64> = est.sessions.iter().map(|s| s.total_j).collect();
                let profit = ue_utility(&prices, &psi, est.iterations);
                ilps_entries.push(ProfitEntry {
                    ue: ue.id,
                    profit: profit.profit,
                    payment: profit.payment,
                    eliminated: false,
                });
                quoted_rows.push(prices);
                quoting.push(ue);
            }
            Err(Error::FrequencyCap { .. }) => {
                ilps_entries.push(ProfitEntry {
                    ue: ue.id,
                    profit: 0.0,
                    payment: 0.0,
                    eliminated: true,
                });
            }
            Err(other) => {
                return Err(Error::Configuration(format!(
                    "{}: {other}",
                    SchemeId::Ilps.as_str()
                )))
            }
        }
    }
    // Record the buyer's reaction to the quotes; it has no bearing on the
    // quoted prices by construction.
    if !quoting.is_empty() {
        let quotes = PriceProfile::new(quoted_rows)?;
        let coeffs = crate::game::market_coefficients(quoting.len(), contract.substitutability)?;
        let etas: Vec<f64> = quoting.iter().map(|u| u.eta).collect();
        let _ = mo_best_response(&quotes, &coeffs, &etas, config.mode)?;
    }
    let ilps_payment = ilps_entries.iter().map(|e| e.payment).sum();

    Ok(vec![
        game_report(SchemeId::TlaGts, &tla, ues, scenario_id, config_hash, fp),
        game_report(SchemeId::PureGts, &pure, ues, scenario_id, config_hash, fp),
        ProfitReport {
            scheme: SchemeId::Ilps,
            scenario_id: scenario_id.to_string(),
            config_hash,
            prediction_fingerprint: fp,
            entries: ilps_entries,
            mo_total_payment: ilps_payment,
        },
    ])
}
