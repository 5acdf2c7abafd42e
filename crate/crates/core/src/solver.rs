//! Iterative best-response search for the market equilibrium, plus the
//! UE-selection loop that removes sellers the contract cannot accommodate.
//!
//! # Update scheme
//!
//! Each seller's cycle profit decomposes into one subproblem per session:
//! the session price enters its own term linearly and through the shared
//! market factor, while rival prices are exogenous. The solver therefore
//! sweeps all (seller, session) pairs jointly: every subproblem jumps to its
//! closed-form stationary price (clamped at zero) computed against a
//! snapshot of the previous iteration's prices, and the buyer refreshes its
//! accuracy purchase after every sweep. Snapshot semantics keep a sweep
//! order-independent and deterministic.
//!
//! # Stopping rule
//!
//! After each sweep the solver records, per seller, the projected gradient
//! of every session subproblem at the new joint state (identically zero at
//! a clamped boundary optimum). Iteration `i >= 2` converges when
//! `||g_k[i]|| <= xi * ||g_k[i-1]||` for every remaining seller; the cap
//! `max_iterations` bounds the search otherwise. Because each update lands
//! exactly on its subproblem's optimum, the residual vanishes identically
//! once prices stop moving, which makes the ratio test fire in finite time
//! whenever the sweep map contracts.

use crate::cost::{estimate_sessions, IterationRule, MoContract, SessionEstimates, UeProfile};
use crate::error::{Error, Result};
use crate::game::{
    market_coefficients, mo_best_response, purchase_quadratic, ue_best_response_session_raw,
    ue_utility, MarketCoefficients, PriceProfile, PurchaseProfile, ResponseMode,
    SessionGameConstants,
};
use crate::markov::{predict_channel_state, predict_load_sequence, Distribution, MarkovChain};

/// How the first sweep's prices are seeded.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialPricing {
    /// Price each session at forecast cost per iteration, so every seller
    /// starts at zero profit.
    #[default]
    BreakEven,
    Zeros,
    /// Explicit per-seller, per-session price vectors.
    Explicit(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Convergence ratio for the gradient-norm test, in (0, 1).
    pub xi: f64,
    /// Hard cap on recorded iterations.
    pub max_iterations: usize,
    pub mode: ResponseMode,
    pub initial_pricing: InitialPricing,
    /// Iteration count used for payments and energy accounting.
    pub iteration_rule: IterationRule,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            xi: 0.01,
            max_iterations: 500,
            mode: ResponseMode::default(),
            initial_pricing: InitialPricing::default(),
            iteration_rule: IterationRule::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return Err(Error::invalid(format!(
                "xi must lie in (0,1), got {}",
                self.xi
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// One recorded sweep of the best-response loop.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    /// 1-based; record 1 is the initial state before any sweep.
    pub index: usize,
    /// Per remaining seller, per session.
    pub prices: Vec<Vec<f64>>,
    /// Buyer purchase after this sweep.
    pub thetas: Vec<f64>,
    /// Per-seller projected-gradient norms at this state.
    pub grad_norms: Vec<f64>,
    /// Sessions whose update was clamped to zero, per seller.
    pub clamped: Vec<usize>,
    /// Largest absolute price change of the sweep.
    pub max_price_step: f64,
}

/// Final per-seller accounting at the equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct UeOutcome {
    pub id: u32,
    pub prices: Vec<f64>,
    /// Raw purchase from the buyer's response map.
    pub theta: f64,
    /// Purchase clamped into (0, theta_max] for accounting.
    pub theta_eval: f64,
    pub theta_clamped: bool,
    /// Iterations bought per session at `theta_eval`.
    pub iterations_bought: f64,
    pub payment: f64,
    pub energy: f64,
    pub profit: f64,
}

/// Result of an equilibrium search, with or without the selection loop.
#[derive(Debug, Clone, PartialEq)]
pub struct NeOutcome {
    pub theta_max: f64,
    pub converged: bool,
    /// Recorded iterations, the initial state included.
    pub iterations: usize,
    /// True when the selection loop emptied the candidate set.
    pub infeasible: bool,
    /// Removed sellers in removal order.
    pub eliminated: Vec<u32>,
    /// Surviving sellers in play order.
    pub ues: Vec<UeOutcome>,
    /// Buyer cost at the final state: payments plus the quadratic
    /// accuracy term.
    pub mo_cost: f64,
    pub trajectory: Vec<IterationRecord>,
}

impl NeOutcome {
    fn empty(theta_max: f64, eliminated: Vec<u32>) -> Self {
        NeOutcome {
            theta_max,
            converged: false,
            iterations: 0,
            infeasible: true,
            eliminated,
            ues: Vec::new(),
            mo_cost: 0.0,
            trajectory: Vec::new(),
        }
    }
}

/// Whether a purchase respects the contract's accuracy window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Ok,
    Violates,
}

/// Flag each purchase against `0 < theta <= theta_max` (upper bound closed).
pub fn check_feasibility(thetas: &[f64], theta_max: f64) -> Vec<Feasibility> {
    thetas
        .iter()
        .map(|&t| {
            if t > 0.0 && t <= theta_max {
                Feasibility::Ok
            } else {
                Feasibility::Violates
            }
        })
        .collect()
}

/// Analytic gradient of a seller's cycle profit with respect to each of its
/// session prices, with the market factor shared across its sessions.
///
/// With `F_t = 1 + A*S - B*V_t` and `S` the seller's price total, component
/// `tau` is `F_tau + A * sum_t (rho_t - C_t) - 2A * sum_t D_t * F_t`.
pub fn gradient_ue(
    own_prices: &[f64],
    consts: &[SessionGameConstants],
    coeffs: &MarketCoefficients,
) -> Vec<f64> {
    assert_eq!(
        own_prices.len(),
        consts.len(),
        "one constant set per session"
    );
    let a = coeffs.a;
    let b = coeffs.b;
    let s: f64 = own_prices.iter().sum();
    let mut linear = 0.0;
    let mut quad = 0.0;
    let factors: Vec<f64> = consts
        .iter()
        .zip(own_prices)
        .map(|(c, &rho)| {
            let f = 1.0 + a * s - b * c.rival_prices;
            linear += rho - c.load_cost;
            quad += c.quad_cost * f;
            f
        })
        .collect();
    factors
        .iter()
        .map(|&f_tau| f_tau + a * linear - 2.0 * a * quad)
        .collect()
}

// ---------------------------------------------------------------------------
// Internal game assembly
// ---------------------------------------------------------------------------

/// Shared read-only inputs of one game run.
#[derive(Clone, Copy)]
struct Market<'a> {
    contract: &'a MoContract,
    channel: &'a MarkovChain,
    initial_gain: &'a Distribution,
}

impl Market<'_> {
    fn reference_estimates(
        &self,
        profile: &UeProfile,
        theta: f64,
        rule: IterationRule,
    ) -> Result<SessionEstimates> {
        estimate_sessions(
            profile,
            self.contract,
            self.channel,
            self.initial_gain,
            theta,
            rule,
        )
    }
}

/// Everything the sweep loop needs to price one seller.
#[derive(Debug, Clone)]
struct SellerView {
    /// Linear session cost coefficients; zeroed for load-blind pricing.
    load_costs: Vec<f64>,
    /// Quadratic cost coefficient.
    quad_cost: f64,
    /// Forecast upload energy per session.
    transmission: Vec<f64>,
    /// Forecast total energy per session under this view's cost model.
    view_psi: Vec<f64>,
    /// Iterations at the reference accuracy, for break-even seeding.
    reference_iterations: f64,
}

fn build_view(
    profile: &UeProfile,
    market: Market<'_>,
    theta_ref: f64,
    rule: IterationRule,
    load_aware: bool,
) -> Result<SellerView> {
    profile.validate()?;
    let contract = market.contract;
    let channel = market.channel;
    let sessions = contract.global_sessions as usize;
    let iters = rule.iterations(theta_ref, profile.eta)?;
    let f_k = crate::cost::required_extra_frequency(
        profile.cycles_per_sample,
        profile.dataset_size,
        iters,
        contract.t_train,
    );
    let delta = contract.delta()?;
    let load_states =
        predict_load_sequence(&profile.load_chain, profile.initial_load_state, sessions)?;
    let mut load_costs = Vec::with_capacity(sessions);
    let mut transmission = Vec::with_capacity(sessions);
    let mut view_psi = Vec::with_capacity(sessions);
    for (t, &m) in load_states.iter().enumerate() {
        let true_f_ex = profile.load_chain.space().level(m);
        let f_ex = if load_aware { true_f_ex } else { 0.0 };
        let n = predict_channel_state(channel, market.initial_gain, (t + 1) as u64, delta)?;
        let e_c = contract.transmission_energy(channel.space().level(n))?;
        let e_f = crate::cost::training_energy(profile.nu, f_ex, f_k, contract.t_train);
        load_costs.push(2.0 * profile.nu * profile.cycles_per_sample * profile.dataset_size * f_ex);
        transmission.push(e_c);
        view_psi.push(e_f + e_c);
    }
    let quad_cost = profile.nu
        * profile.cycles_per_sample
        * profile.cycles_per_sample
        * profile.dataset_size
        * profile.dataset_size
        / contract.t_train;
    Ok(SellerView {
        load_costs,
        quad_cost,
        transmission,
        view_psi,
        reference_iterations: iters,
    })
}

fn session_constants(view: &SellerView, t: usize, rival_prices: f64) -> SessionGameConstants {
    SessionGameConstants {
        load_cost: view.load_costs[t],
        quad_cost: view.quad_cost,
        rival_prices,
        transmission_j: view.transmission[t],
    }
}

struct SweepResult {
    prices: Vec<Vec<f64>>,
    thetas: Vec<f64>,
    converged: bool,
    iterations: usize,
    trajectory: Vec<IterationRecord>,
}

/// The best-response loop over a fixed seller set.
fn run_sweeps(
    views: &[SellerView],
    etas: &[f64],
    coeffs: &MarketCoefficients,
    sessions: usize,
    config: &SolverConfig,
) -> Result<SweepResult> {
    let k = views.len();
    let mut prices: Vec<Vec<f64>> = match &config.initial_pricing {
        InitialPricing::Zeros => vec![vec![0.0; sessions]; k],
        InitialPricing::BreakEven => views
            .iter()
            .map(|v| {
                if v.reference_iterations <= 0.0 {
                    return Err(Error::Configuration(
                        "break-even seeding needs a positive reference iteration count".into(),
                    ));
                }
                Ok(v.view_psi
                    .iter()
                    .map(|psi| psi / v.reference_iterations)
                    .collect())
            })
            .collect::<Result<_>>()?,
        InitialPricing::Explicit(seed) => {
            if seed.len() != k || seed.iter().any(|row| row.len() != sessions) {
                return Err(Error::Configuration(format!(
                    "explicit initial prices must be {k} x {sessions}"
                )));
            }
            if seed.iter().flatten().any(|&p| p.is_nan() || p < 0.0) {
                return Err(Error::Configuration(
                    "initial prices must be nonnegative".into(),
                ));
            }
            seed.clone()
        }
    };

    let rival_sum = |prices: &[Vec<f64>], ue: usize, t: usize| -> f64 {
        (0..k).filter(|&x| x != ue).map(|x| prices[x][t]).sum()
    };

    // Projected gradient of every session subproblem at a joint state.
    let residuals = |prices: &[Vec<f64>]| -> Result<Vec<Vec<f64>>> {
        let mut all = Vec::with_capacity(k);
        for (i, view) in views.iter().enumerate() {
            let den = 2.0 * coeffs.a * coeffs.a * view.quad_cost - 2.0 * coeffs.a;
            let mut g = Vec::with_capacity(sessions);
            for t in 0..sessions {
                let consts = session_constants(view, t, rival_sum(prices, i, t));
                let target = ue_best_response_session_raw(&consts, coeffs, 0.0)?.max(0.0);
                g.push(den * (target - prices[i][t]));
            }
            all.push(g);
        }
        Ok(all)
    };
    let norms = |g: &[Vec<f64>]| -> Vec<f64> {
        g.iter()
            .map(|v| v.iter().map(|x| x * x).sum::<f64>().sqrt())
            .collect()
    };

    let purchase = |prices: &[Vec<f64>]| -> Result<Vec<f64>> {
        let profile = PriceProfile::new(prices.to_vec())?;
        Ok(mo_best_response(&profile, coeffs, etas, config.mode)?.thetas)
    };

    let mut thetas = purchase(&prices)?;
    let mut grad_norms = norms(&residuals(&prices)?);
    let mut trajectory = vec![IterationRecord {
        index: 1,
        prices: prices.clone(),
        thetas: thetas.clone(),
        grad_norms: grad_norms.clone(),
        clamped: vec![0; k],
        max_price_step: 0.0,
    }];

    let mut converged = false;
    let mut iterations = 1;
    while iterations < config.max_iterations {
        iterations += 1;
        let mut next = vec![vec![0.0; sessions]; k];
        let mut clamped = vec![0usize; k];
        let mut max_step: f64 = 0.0;
        for (i, view) in views.iter().enumerate() {
            for t in 0..sessions {
                let consts = session_constants(view, t, rival_sum(&prices, i, t));
                let raw = ue_best_response_session_raw(&consts, coeffs, 0.0)?;
                let p = raw.max(0.0);
                if raw < 0.0 {
                    clamped[i] += 1;
                }
                max_step = max_step.max((p - prices[i][t]).abs());
                next[i][t] = p;
            }
        }
        prices = next;
        thetas = purchase(&prices)?;
        let new_norms = norms(&residuals(&prices)?);
        trajectory.push(IterationRecord {
            index: iterations,
            prices: prices.clone(),
            thetas: thetas.clone(),
            grad_norms: new_norms.clone(),
            clamped,
            max_price_step: max_step,
        });
        let pass = new_norms
            .iter()
            .zip(&grad_norms)
            .all(|(n, p)| *n <= config.xi * *p);
        grad_norms = new_norms;
        if pass {
            converged = true;
            break;
        }
    }

    Ok(SweepResult {
        prices,
        thetas,
        converged,
        iterations,
        trajectory,
    })
}

/// Clamp a raw purchase into (0, theta_max] for accounting. Purchases above
/// the window are held at its top; nonpositive purchases carry no workable
/// accuracy demand at all, so accounting falls back to the cap-vetted
/// reference accuracy. Either clamp is flagged.
fn eval_theta(theta: f64, theta_max: f64) -> (f64, bool) {
    if theta > 0.0 && theta <= theta_max {
        (theta, false)
    } else if theta > theta_max {
        (theta_max, true)
    } else {
        (theta_max / 2.0, true)
    }
}

/// Final per-seller accounting with the true (load-aware) cost model.
fn evaluate_ue(
    profile: &UeProfile,
    market: Market<'_>,
    prices: &[f64],
    theta: f64,
    theta_max: f64,
    rule: IterationRule,
) -> Result<UeOutcome> {
    let (theta_eval, theta_clamped) = eval_theta(theta, theta_max);
    let estimates = market.reference_estimates(profile, theta_eval, rule)?;
    let psi: Vec<f64> = estimates.sessions.iter().map(|s| s.total_j).collect();
    let profit = ue_utility(prices, &psi, estimates.iterations);
    Ok(UeOutcome {
        id: profile.id,
        prices: prices.to_vec(),
        theta,
        theta_eval,
        theta_clamped,
        iterations_bought: estimates.iterations,
        payment: profit.payment,
        energy: profit.energy,
        profit: profit.profit,
    })
}

fn assemble_outcome(
    profiles: &[&UeProfile],
    market: Market<'_>,
    sweep: SweepResult,
    theta_max: f64,
    rule: IterationRule,
    eliminated: Vec<u32>,
) -> Result<NeOutcome> {
    let v = market.contract.substitutability;
    let mut ues = Vec::with_capacity(profiles.len());
    for (i, profile) in profiles.iter().enumerate() {
        ues.push(evaluate_ue(
            profile,
            market,
            &sweep.prices[i],
            sweep.thetas[i],
            theta_max,
            rule,
        )?);
    }
    let payments: f64 = ues.iter().map(|u| u.payment).sum();
    let eval_thetas: Vec<f64> = ues.iter().map(|u| u.theta_eval).collect();
    let mo_cost = payments + purchase_quadratic(&eval_thetas, v);
    Ok(NeOutcome {
        theta_max,
        converged: sweep.converged,
        iterations: sweep.iterations,
        infeasible: false,
        eliminated,
        ues,
        mo_cost,
        trajectory: sweep.trajectory,
    })
}

/// Search for the equilibrium of the posted game over a fixed seller set.
///
/// Applies no feasibility screening; the selection loop does that. Fails if
/// any seller's reference estimates or final accounting hit the frequency
/// cap.
pub fn find_ne(
    ues: &[UeProfile],
    contract: &MoContract,
    channel: &MarkovChain,
    initial_gain: &Distribution,
    config: &SolverConfig,
) -> Result<NeOutcome> {
    solve_fixed(ues, contract, channel, initial_gain, config, true)
}

/// Equilibrium search with a selectable pricing view: `load_aware = false`
/// blinds every quote to background load while final accounting stays true.
pub(crate) fn solve_fixed(
    ues: &[UeProfile],
    contract: &MoContract,
    channel: &MarkovChain,
    initial_gain: &Distribution,
    config: &SolverConfig,
    load_aware: bool,
) -> Result<NeOutcome> {
    config.validate()?;
    contract.validate()?;
    if ues.is_empty() {
        return Err(Error::invalid("the game needs at least one seller"));
    }
    let market = Market {
        contract,
        channel,
        initial_gain,
    };
    let theta_max = contract.theta_max()?;
    let theta_ref = theta_max / 2.0;
    let views: Vec<SellerView> = ues
        .iter()
        .map(|p| build_view(p, market, theta_ref, config.iteration_rule, load_aware))
        .collect::<Result<_>>()?;
    if load_aware {
        // Reference estimates must respect the cap before anyone quotes.
        for p in ues {
            market.reference_estimates(p, theta_ref, config.iteration_rule)?;
        }
    }
    let etas: Vec<f64> = ues.iter().map(|p| p.eta).collect();
    let coeffs = market_coefficients(ues.len(), contract.substitutability)?;
    let sweep = run_sweeps(
        &views,
        &etas,
        &coeffs,
        contract.global_sessions as usize,
        config,
    )?;
    let refs: Vec<&UeProfile> = ues.iter().collect();
    assemble_outcome(
        &refs,
        market,
        sweep,
        theta_max,
        config.iteration_rule,
        Vec::new(),
    )
}

/// The full selection loop: run the game, remove sellers whose purchases
/// fall outside the accuracy window, rerun, until every survivor fits or
/// the set empties.
///
/// Sellers whose reference-cost forecast already violates the frequency cap
/// are removed before the first game. In each later round exactly one
/// violator is removed: the one with the highest total asked price, ties to
/// the lowest id. An empty set yields an outcome flagged infeasible; the
/// buyer must lower its performance metrics and repost.
pub fn tla_gts(
    candidates: &[UeProfile],
    contract: &MoContract,
    channel: &MarkovChain,
    initial_gain: &Distribution,
    config: &SolverConfig,
) -> Result<NeOutcome> {
    run_selection(candidates, contract, channel, initial_gain, config, true)
}

pub(crate) fn run_selection(
    candidates: &[UeProfile],
    contract: &MoContract,
    channel: &MarkovChain,
    initial_gain: &Distribution,
    config: &SolverConfig,
    load_aware: bool,
) -> Result<NeOutcome> {
    config.validate()?;
    contract.validate()?;
    let market = Market {
        contract,
        channel,
        initial_gain,
    };
    let theta_max = contract.theta_max()?;
    let theta_ref = theta_max / 2.0;

    for p in candidates {
        p.validate()?;
    }
    let mut eliminated: Vec<u32> = Vec::new();
    let mut active: Vec<&UeProfile> = Vec::with_capacity(candidates.len());

    // Sellers that cannot even host the reference workload never quote.
    // A load-blind game only sees the blind cap here; true violations
    // surface in final accounting below.
    for p in candidates {
        let fits = if load_aware {
            match market.reference_estimates(p, theta_ref, config.iteration_rule) {
                Ok(_) => true,
                Err(Error::FrequencyCap { .. }) => false,
                Err(other) => return Err(other),
            }
        } else {
            let iters = config.iteration_rule.iterations(theta_ref, p.eta)?;
            crate::cost::required_extra_frequency(
                p.cycles_per_sample,
                p.dataset_size,
                iters,
                contract.t_train,
            ) <= p.f_max
        };
        if fits {
            active.push(p);
        } else {
            eliminated.push(p.id);
        }
    }

    loop {
        if active.is_empty() {
            return Ok(NeOutcome::empty(theta_max, eliminated));
        }
        let etas: Vec<f64> = active.iter().map(|p| p.eta).collect();
        let coeffs = market_coefficients(active.len(), contract.substitutability)?;
        let views: Vec<SellerView> = active
            .iter()
            .map(|p| build_view(p, market, theta_ref, config.iteration_rule, load_aware))
            .collect::<Result<_>>()?;
        let sweep = run_sweeps(
            &views,
            &etas,
            &coeffs,
            contract.global_sessions as usize,
            config,
        )?;

        let flags = check_feasibility(&sweep.thetas, theta_max);
        let mut violators: Vec<usize> = (0..active.len())
            .filter(|&i| flags[i] == Feasibility::Violates)
            .collect();

        if violators.is_empty() {
            // Feasible purchases; the only remaining hazard is a frequency
            // cap hit during true-cost accounting.
            match assemble_outcome(
                &active,
                market,
                sweep,
                theta_max,
                config.iteration_rule,
                eliminated.clone(),
            ) {
                Ok(outcome) => return Ok(outcome),
                Err(Error::FrequencyCap { ue, .. }) => {
                    eliminated.push(ue);
                    active.retain(|p| p.id != ue);
                    continue;
                }
                Err(other) => return Err(other),
            }
        }

        // Remove the violator asking the highest total price; ties fall to
        // the lowest id.
        violators.sort_by(|&x, &y| {
            let sx: f64 = sweep.prices[x].iter().sum();
            let sy: f64 = sweep.prices[y].iter().sum();
            sy.partial_cmp(&sx)
                .unwrap()
                .then(active[x].id.cmp(&active[y].id))
        });
        let out = violators[0];
        eliminated.push(active[out].id);
        active.remove(out);
    }
}

/// Stable, hashable description of a solver configuration.
pub(crate) fn market_hash_input(config: &SolverConfig) -> Vec<u64> {
    let mut out = vec![
        config.xi.to_bits(),
        config.max_iterations as u64,
        matches!(config.mode, ResponseMode::Derived) as u64,
        matches!(config.iteration_rule, IterationRule::Exact) as u64,
    ];
    match &config.initial_pricing {
        InitialPricing::BreakEven => out.push(0),
        InitialPricing::Zeros => out.push(1),
        InitialPricing::Explicit(rows) => {
            out.push(2);
            for row in rows {
                for p in row {
                    out.push(p.to_bits());
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Verification oracles
// ---------------------------------------------------------------------------

/// Golden-section argmax of a unimodal objective on `[lo, hi]`, to absolute
/// argument tolerance 1e-9.
pub fn numeric_price_oracle<F: Fn(f64) -> f64>(objective: F, lo: f64, hi: f64) -> Result<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    const TOL: f64 = 1e-9;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::invalid(format!(
            "bracket must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let eval = |x: f64| -> Result<f64> {
        let y = objective(x);
        if !y.is_finite() {
            return Err(Error::OracleFailure(format!(
                "objective returned {y} at {x}"
            )));
        }
        Ok(y)
    };
    let mut a = lo;
    let mut b = hi;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Exact minimizer of the buyer's first-order cost by Gaussian elimination
/// on its stationarity system; an implementation path independent of the
/// closed-form purchase map.
pub fn numeric_mo_oracle(
    prices: &PriceProfile,
    coeffs: &MarketCoefficients,
    etas: &[f64],
) -> Result<PurchaseProfile> {
    let k = prices.ue_count();
    if etas.len() != k {
        return Err(Error::invalid("one eta per UE is required"));
    }
    let v = coeffs.substitutability;
    let mut m: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { 1.0 } else { v }).collect())
        .collect();
    let mut rhs: Vec<f64> = (0..k).map(|i| etas[i] * prices.total(i)).collect();
    // Gaussian elimination with partial pivoting.
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
            .unwrap();
        if m[pivot][col].abs() < 1e-14 {
            return Err(Error::OracleFailure("purchase system is singular".into()));
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        let pivot_row = m[col].clone();
        for row in (col + 1)..k {
            let factor = m[row][col] / pivot_row[col];
            if factor == 0.0 {
                continue;
            }
            for (entry, lead) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= factor * lead;
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut thetas = vec![0.0; k];
    for row in (0..k).rev() {
        let mut acc = rhs[row];
        for j in (row + 1)..k {
            acc -= m[row][j] * thetas[j];
        }
        thetas[row] = acc / m[row][row];
    }
    Ok(PurchaseProfile { thetas })
}
