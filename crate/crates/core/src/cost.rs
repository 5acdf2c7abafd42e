//! Iteration accounting and per-session energy estimation.
//!
//! A training round costs a UE twice: extra CPU cycles to squeeze the
//! federated workload in next to whatever background load the Markov
//! predictor expects, and transmit power to push the model update through
//! the predicted channel state. Everything here is a pure function of the
//! UE profile, the contract, and the forecast.

use crate::error::{Error, Result};
use crate::markov::{
    predict_channel_state, predict_load_sequence, Distribution, MarkovChain, SpaceKind,
};

/// How local-iteration counts enter energy and payment formulas.
///
/// `Taylor` is the first-order count the market's closed forms are built on;
/// `Exact` is the logarithmic bound. Both are exposed because reported costs
/// should be able to match either the game algebra or the tighter bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IterationRule {
    #[default]
    Taylor,
    Exact,
}

impl IterationRule {
    pub fn iterations(self, theta: f64, eta: f64) -> Result<f64> {
        match self {
            IterationRule::Taylor => local_iterations_taylor(theta, eta),
            IterationRule::Exact => local_iterations(theta, eta),
        }
    }
}

/// Iterations needed to reach local relative accuracy `theta`: eta * ln(1/theta).
pub fn local_iterations(theta: f64, eta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::invalid(format!(
            "local accuracy must lie in (0,1), got {theta}"
        )));
    }
    if eta < 0.0 {
        return Err(Error::invalid(format!(
            "eta must be nonnegative, got {eta}"
        )));
    }
    Ok(eta * (1.0 / theta).ln())
}

/// First-order iteration count eta * (1 - theta); the form all market
/// closed forms assume.
pub fn local_iterations_taylor(theta: f64, eta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid(format!(
            "local accuracy must lie in (0,1], got {theta}"
        )));
    }
    if eta < 0.0 {
        return Err(Error::invalid(format!(
            "eta must be nonnegative, got {eta}"
        )));
    }
    Ok(eta * (1.0 - theta))
}

/// Global rounds needed for global accuracy `epsilon` when the worst local
/// accuracy is `theta_max`: zeta * ln(1/epsilon) / (1 - theta_max).
pub fn global_iterations(epsilon: f64, zeta: f64, theta_max: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid(format!(
            "global accuracy must lie in (0,1], got {epsilon}"
        )));
    }
    if theta_max >= 1.0 {
        return Err(Error::invalid(format!(
            "worst local accuracy must be < 1, got {theta_max}"
        )));
    }
    Ok(zeta * (1.0 / epsilon).ln() / (1.0 - theta_max))
}

/// Largest admissible local accuracy given the session budget:
/// 1 - zeta * ln(1/epsilon) / sessions.
pub fn theta_max(epsilon: f64, zeta: f64, global_sessions: f64) -> Result<f64> {
    if global_sessions <= 0.0 {
        return Err(Error::invalid(format!(
            "session budget must be positive, got {global_sessions}"
        )));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid(format!(
            "global accuracy must lie in (0,1], got {epsilon}"
        )));
    }
    let value = 1.0 - zeta * (1.0 / epsilon).ln() / global_sessions;
    if value <= 0.0 {
        return Err(Error::InfeasibleContract(format!(
            "accuracy {epsilon} cannot be reached in {global_sessions} sessions (theta_max = {value})"
        )));
    }
    Ok(value)
}

/// Extra CPU frequency a UE must add to run `iterations` local passes over
/// its dataset within one training window.
pub fn required_extra_frequency(
    cycles_per_sample: f64,
    dataset_size: f64,
    iterations: f64,
    t_train: f64,
) -> f64 {
    cycles_per_sample * dataset_size * iterations / t_train
}

/// Marginal training energy of raising the CPU from `f_ex` to `f_ex + f_k`
/// for `t_train` seconds: nu * ((f_ex + f_k)^2 - f_ex^2) * t_train.
pub fn training_energy(nu: f64, f_ex: f64, f_k: f64, t_train: f64) -> f64 {
    nu * ((f_ex + f_k) * (f_ex + f_k) - f_ex * f_ex) * t_train
}

/// SNR penalty for a target bit error rate: 1.5 / (-ln(5 * ber)).
pub fn ber_gap(ber: f64) -> Result<f64> {
    let arg = 5.0 * ber;
    if !(arg > 0.0 && arg < 1.0) {
        return Err(Error::invalid(format!(
            "bit error rate must satisfy 0 < 5*ber < 1, got {ber}"
        )));
    }
    Ok(1.5 / (-arg.ln()))
}

/// One UE's physical and economic parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct UeProfile {
    pub id: u32,
    /// Effective switched capacitance of the CPU.
    pub nu: f64,
    /// CPU cycles to train one data sample.
    pub cycles_per_sample: f64,
    /// Local dataset size in samples.
    pub dataset_size: f64,
    /// Iteration-count scale factor.
    pub eta: f64,
    /// Maximum CPU frequency in Hz.
    pub f_max: f64,
    /// Forecast model for the background load.
    pub load_chain: MarkovChain,
    pub initial_load_state: usize,
}

impl UeProfile {
    pub fn validate(&self) -> Result<()> {
        if self.nu <= 0.0 {
            return Err(Error::invalid(format!(
                "UE {}: switched capacitance must be positive",
                self.id
            )));
        }
        if self.cycles_per_sample <= 0.0 {
            return Err(Error::invalid(format!(
                "UE {}: cycles per sample must be positive",
                self.id
            )));
        }
        if self.dataset_size <= 0.0 {
            return Err(Error::invalid(format!(
                "UE {}: dataset size must be positive",
                self.id
            )));
        }
        if self.eta < 0.0 {
            return Err(Error::invalid(format!(
                "UE {}: eta must be nonnegative",
                self.id
            )));
        }
        if self.f_max <= 0.0 {
            return Err(Error::invalid(format!(
                "UE {}: maximum frequency must be positive",
                self.id
            )));
        }
        if self.load_chain.space().kind() != SpaceKind::Load {
            return Err(Error::invalid(format!(
                "UE {}: load chain built over a gain space",
                self.id
            )));
        }
        if self.initial_load_state >= self.load_chain.state_count() {
            return Err(Error::invalid(format!(
                "UE {}: initial load state {} out of range",
                self.id, self.initial_load_state
            )));
        }
        Ok(())
    }
}

/// The task the model owner posts: performance metrics plus the market and
/// radio parameters every UE prices against.
#[derive(Debug, Clone, PartialEq)]
pub struct MoContract {
    /// Global relative accuracy target, in (0, 1].
    pub epsilon: f64,
    /// Global iteration-bound scale factor.
    pub zeta: f64,
    /// Number of training sessions bought per game cycle.
    pub global_sessions: u32,
    /// Seconds per local training round.
    pub t_train: f64,
    /// Seconds per parameter upload.
    pub t_comm: f64,
    /// Resource substitutability between UEs, in [0, 1).
    pub substitutability: f64,
    /// Upload bandwidth per UE in Hz.
    pub bandwidth: f64,
    /// Model update size in bits.
    pub payload_bits: f64,
    /// Noise power in W.
    pub noise_power: f64,
    /// Target bit error rate, in (0, 0.2).
    pub bit_error_rate: f64,
    /// Channel correlation time in seconds.
    pub correlation_time: f64,
}

impl MoContract {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::invalid(format!(
                "epsilon must lie in (0,1], got {}",
                self.epsilon
            )));
        }
        if self.zeta <= 0.0 {
            return Err(Error::invalid("zeta must be positive"));
        }
        if self.global_sessions == 0 {
            return Err(Error::invalid("at least one global session is required"));
        }
        for (name, v) in [
            ("t_train", self.t_train),
            ("t_comm", self.t_comm),
            ("bandwidth", self.bandwidth),
            ("payload_bits", self.payload_bits),
            ("noise_power", self.noise_power),
            ("correlation_time", self.correlation_time),
        ] {
            if v <= 0.0 {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.substitutability) {
            return Err(Error::invalid(format!(
                "substitutability must lie in [0,1), got {}",
                self.substitutability
            )));
        }
        if !(self.bit_error_rate > 0.0 && self.bit_error_rate < 0.2) {
            return Err(Error::invalid(format!(
                "bit error rate must lie in (0, 0.2), got {}",
                self.bit_error_rate
            )));
        }
        self.delta()?;
        Ok(())
    }

    /// Correlation slots per training round. Must be a whole number: the
    /// channel model advances in units of the correlation time.
    pub fn delta(&self) -> Result<u64> {
        let ratio = self.t_train / self.correlation_time;
        let rounded = ratio.round();
        if rounded < 1.0 || (ratio - rounded).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "t_train / correlation_time must be a positive integer, got {ratio}"
            )));
        }
        Ok(rounded as u64)
    }

    /// Largest admissible per-UE accuracy under this contract.
    pub fn theta_max(&self) -> Result<f64> {
        theta_max(self.epsilon, self.zeta, self.global_sessions as f64)
    }

    /// Minimum transmit power to deliver the payload through `gain`.
    pub fn min_transmit_power(&self, gain: f64) -> Result<f64> {
        if gain <= 0.0 {
            return Err(Error::invalid(format!(
                "channel gain must be positive, got {gain}"
            )));
        }
        let gap = ber_gap(self.bit_error_rate)?;
        let rate_factor = 2f64.powf(self.payload_bits / (self.bandwidth * self.t_comm)) - 1.0;
        Ok(rate_factor * self.noise_power / (gain * gap))
    }

    /// Energy to upload one model update through `gain`.
    pub fn transmission_energy(&self, gain: f64) -> Result<f64> {
        Ok(self.min_transmit_power(gain)? * self.t_comm)
    }
}

/// Convenience free function mirroring [`MoContract::transmission_energy`].
pub fn transmission_energy(contract: &MoContract, gain: f64) -> Result<f64> {
    contract.transmission_energy(gain)
}

/// Forecast costs for one UE over every session of a game cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionEstimates {
    pub ue: u32,
    /// Accuracy the estimates were computed at.
    pub theta: f64,
    pub rule: IterationRule,
    /// Local iterations per session at `theta`.
    pub iterations: f64,
    /// Extra CPU frequency the workload demands, in Hz.
    pub extra_frequency: f64,
    pub sessions: Vec<SessionEstimate>,
}

/// One session's forecast: predicted states and the resulting energies.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionEstimate {
    pub load_state: usize,
    /// Background CPU frequency implied by `load_state`, Hz.
    pub load_hz: f64,
    pub gain_state: usize,
    pub gain: f64,
    /// Marginal training energy, J.
    pub training_j: f64,
    /// Upload energy, J.
    pub transmission_j: f64,
    /// Stored sum of the two; never recomputed downstream.
    pub total_j: f64,
}

impl SessionEstimates {
    pub fn total_energy(&self) -> f64 {
        self.sessions.iter().map(|s| s.total_j).sum()
    }
}

/// Forecast every session's cost for `profile` at accuracy `theta`.
///
/// Fails with [`Error::FrequencyCap`] naming the first offending session if
/// the predicted background load leaves no room for the extra frequency.
pub fn estimate_sessions(
    profile: &UeProfile,
    contract: &MoContract,
    channel: &MarkovChain,
    initial_gain: &Distribution,
    theta: f64,
    rule: IterationRule,
) -> Result<SessionEstimates> {
    profile.validate()?;
    let sessions = contract.global_sessions as usize;
    let iterations = rule.iterations(theta, profile.eta)?;
    let f_k = required_extra_frequency(
        profile.cycles_per_sample,
        profile.dataset_size,
        iterations,
        contract.t_train,
    );
    let delta = contract.delta()?;
    let load_states =
        predict_load_sequence(&profile.load_chain, profile.initial_load_state, sessions)?;
    let mut out = Vec::with_capacity(sessions);
    for (t, &m) in load_states.iter().enumerate() {
        let f_ex = profile.load_chain.space().level(m);
        if f_ex + f_k > profile.f_max {
            return Err(Error::FrequencyCap {
                ue: profile.id,
                session: t + 1,
                required_hz: f_ex + f_k,
                cap_hz: profile.f_max,
            });
        }
        let n = predict_channel_state(channel, initial_gain, (t + 1) as u64, delta)?;
        let gain = channel.space().level(n);
        let training_j = training_energy(profile.nu, f_ex, f_k, contract.t_train);
        let transmission_j = contract.transmission_energy(gain)?;
        out.push(SessionEstimate {
            load_state: m,
            load_hz: f_ex,
            gain_state: n,
            gain,
            training_j,
            transmission_j,
            total_j: training_j + transmission_j,
        });
    }
    Ok(SessionEstimates {
        ue: profile.id,
        theta,
        rule,
        iterations,
        extra_frequency: f_k,
        sessions: out,
    })
}
