//! Price-competition simulator for federated-learning incentives.
//!
//! A model owner posts a training task; mobile sellers (UEs) quote
//! per-session prices for their local work, each forecasting its own future
//! background CPU load and channel quality with finite-state Markov chains.
//! The crate covers the whole pipeline:
//!
//! * [`markov`] — state-space quantization, transition-matrix estimation
//!   from traces, and argmax forecasting for loads and channel gains;
//! * [`cost`] — iteration accounting plus per-session training and
//!   transmission energy models;
//! * [`game`] — buyer/seller utilities and both closed-form best responses;
//! * [`solver`] — the iterative equilibrium search, the seller-selection
//!   loop, and the numeric oracles used to verify the closed forms;
//! * [`baselines`] — the load-blind game and rival-independent cost-plus
//!   pricing, with a harness comparing all three schemes at true cost;
//! * [`scenario`] / [`emit`] — TOML scenario ingestion and deterministic
//!   CSV/JSON result emission;
//! * [`cli`] — the `fedmarket` command-line front end.
//!
//! The `examples/` directory demonstrates each capability end to end on the
//! bundled scenario; start with `cargo run --example price_convergence`.

pub mod baselines;
pub mod cli;
pub mod cost;
pub mod emit;
pub mod error;
pub mod game;
pub mod markov;
pub mod scenario;
pub mod solver;

#[cfg(test)]
pub(crate) mod testdata;

pub use baselines::{compare_schemes, ilps, pure_gts, ProfitEntry, ProfitReport, SchemeId};
pub use cost::{
    ber_gap, estimate_sessions, global_iterations, local_iterations, local_iterations_taylor,
    required_extra_frequency, theta_max, training_energy, transmission_energy, IterationRule,
    MoContract, SessionEstimate, SessionEstimates, UeProfile,
};
pub use emit::{emit_results, read_outcome, ResultBundle};
pub use error::{Error, Result};
pub use game::{
    market_coefficients, mo_best_response, mo_utility, mo_utility_taylor, purchase_quadratic,
    ue_best_response_session, ue_best_response_session_raw, ue_session_utility, ue_utility,
    MarketCoefficients, PriceProfile, PurchaseProfile, ResponseMode, SessionGameConstants,
    UeProfit,
};
pub use markov::{
    discretize, estimate_stp, evolve_distribution, predict_channel_state, predict_load_sequence,
    predict_next_state, Distribution, MarkovChain, ObservationTrace, SpaceKind, StateSpace,
};
pub use scenario::{load_scenario, load_scenario_str, save_scenario, ChannelModel, Scenario};
pub use solver::{
    check_feasibility, find_ne, gradient_ue, numeric_mo_oracle, numeric_price_oracle, tla_gts,
    Feasibility, InitialPricing, IterationRecord, NeOutcome, SolverConfig, UeOutcome,
};
