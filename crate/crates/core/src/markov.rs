//! Finite-state discrete-time Markov chains for task-load and channel-gain
//! forecasting.
//!
//! Two chains drive the simulator: a per-UE chain over quantized CPU
//! frequencies occupied by background work, and a shared chain over quantized
//! channel gains. Both use the same machinery: a [`StateSpace`] of ordered
//! levels, a row-stochastic transition matrix, frequency-count estimation
//! from observation traces, and argmax ("most probable next state")
//! prediction. Ties always resolve to the lowest state index so that every
//! prediction is deterministic.

use crate::error::{Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;

/// What a state space quantizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    /// CPU frequency occupied by background tasks, in Hz. Levels run from 0
    /// to the UE's maximum frequency.
    Load,
    /// Linear channel gain. Levels run between strictly positive bounds.
    Gain,
}

/// An ordered set of quantization levels.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    kind: SpaceKind,
    levels: Vec<f64>,
}

impl StateSpace {
    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn count(&self) -> usize {
        self.levels.len()
    }

    /// The physical value of state `index`.
    pub fn level(&self, index: usize) -> f64 {
        self.levels[index]
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }
}

/// Quantize `[bound_lo, bound_hi]` into `count` equal-width levels.
///
/// Load spaces must start at zero. Gain spaces must be strictly positive
/// throughout; a zero gain level would make transmission energy undefined.
pub fn discretize(
    kind: SpaceKind,
    bound_lo: f64,
    bound_hi: f64,
    count: usize,
) -> Result<StateSpace> {
    if count < 2 {
        return Err(Error::invalid(format!(
            "state count must be >= 2, got {count}"
        )));
    }
    if !bound_lo.is_finite() || !bound_hi.is_finite() || bound_hi <= bound_lo {
        return Err(Error::invalid(format!(
            "bounds must satisfy hi > lo, got lo={bound_lo}, hi={bound_hi}"
        )));
    }
    match kind {
        SpaceKind::Load => {
            if bound_lo != 0.0 {
                return Err(Error::invalid(format!(
                    "load spaces start at 0 Hz, got {bound_lo}"
                )));
            }
        }
        SpaceKind::Gain => {
            if bound_lo <= 0.0 {
                return Err(Error::invalid(format!(
                    "gain levels must be strictly positive, got lower bound {bound_lo}"
                )));
            }
        }
    }
    let span = bound_hi - bound_lo;
    let levels = (0..count)
        .map(|i| bound_lo + (i as f64 / (count - 1) as f64) * span)
        .collect();
    Ok(StateSpace { kind, levels })
}

/// A state space plus a row-stochastic transition matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    space: StateSpace,
    stp: Vec<Vec<f64>>,
}

impl MarkovChain {
    /// Build a chain, checking that every row of `stp` is a probability
    /// distribution (sum within 1e-12 of one, entries in [0, 1]).
    pub fn new(space: StateSpace, stp: Vec<Vec<f64>>) -> Result<Self> {
        let n = space.count();
        if stp.len() != n {
            return Err(Error::invalid(format!(
                "transition matrix has {} rows for {} states",
                stp.len(),
                n
            )));
        }
        for (i, row) in stp.iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "transition matrix row {i} has {} entries for {} states",
                    row.len(),
                    n
                )));
            }
            let mut sum = 0.0;
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::invalid(format!(
                        "transition probability out of [0,1] in row {i}: {p}"
                    )));
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::invalid(format!(
                    "transition matrix row {i} sums to {sum}"
                )));
            }
        }
        Ok(MarkovChain { space, stp })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn state_count(&self) -> usize {
        self.space.count()
    }

    pub fn row(&self, state: usize) -> &[f64] {
        &self.stp[state]
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.stp
    }
}

/// One observed state index per slot, plus the window the slots cover.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationTrace {
    pub slots: Vec<usize>,
    /// Length of the observation window in seconds. Metadata for ingestion;
    /// the estimator itself only consumes the slot sequence.
    pub observation_window: f64,
}

impl ObservationTrace {
    pub fn new(slots: Vec<usize>, observation_window: f64) -> Self {
        ObservationTrace {
            slots,
            observation_window,
        }
    }
}

/// A probability distribution over the states of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("distribution over an empty state space"));
        }
        let mut sum = 0.0;
        for &p in &probs {
            if p.is_nan() || p < 0.0 {
                return Err(Error::invalid(format!("negative probability {p}")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::invalid(format!("distribution sums to {sum}")));
        }
        Ok(Distribution { probs })
    }

    pub fn uniform(count: usize) -> Self {
        Distribution {
            probs: vec![1.0 / count as f64; count],
        }
    }

    /// All mass on a single state.
    pub fn delta(count: usize, state: usize) -> Self {
        let mut probs = vec![0.0; count];
        probs[state] = 1.0;
        Distribution { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub(crate) fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    let mut best_val = values[0];
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Estimate a transition matrix from consecutive slot pairs of `trace`.
///
/// Counts every transition, self-transitions included; the matrices this
/// estimator is meant to reproduce all carry nonzero diagonals. States that
/// are never a transition source get a uniform row so the result stays
/// row-stochastic.
pub fn estimate_stp(space: &StateSpace, trace: &ObservationTrace) -> Result<MarkovChain> {
    let n = space.count();
    for (i, &s) in trace.slots.iter().enumerate() {
        if s >= n {
            return Err(Error::invalid(format!(
                "trace slot {i} holds state {s}, but the space has {n} states"
            )));
        }
    }
    if trace.slots.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 slots to count transitions, got {}",
            trace.slots.len()
        )));
    }
    let mut counts = vec![vec![0u64; n]; n];
    let mut totals = vec![0u64; n];
    for pair in trace.slots.windows(2) {
        counts[pair[0]][pair[1]] += 1;
        totals[pair[0]] += 1;
    }
    let stp = (0..n)
        .map(|m| {
            if totals[m] == 0 {
                vec![1.0 / n as f64; n]
            } else {
                counts[m]
                    .iter()
                    .map(|&c| c as f64 / totals[m] as f64)
                    .collect()
            }
        })
        .collect();
    MarkovChain::new(space.clone(), stp)
}

/// Most probable successor of `current`.
pub fn predict_next_state(chain: &MarkovChain, current: usize) -> Result<usize> {
    if current >= chain.state_count() {
        return Err(Error::invalid(format!(
            "state {current} out of range for {} states",
            chain.state_count()
        )));
    }
    Ok(argmax_lowest(chain.row(current)))
}

/// Chain `predict_next_state` for `horizon` steps; element t seeds element t+1.
pub fn predict_load_sequence(
    chain: &MarkovChain,
    initial: usize,
    horizon: usize,
) -> Result<Vec<usize>> {
    if horizon == 0 {
        return Err(Error::invalid("prediction horizon must be >= 1"));
    }
    let mut out = Vec::with_capacity(horizon);
    let mut state = initial;
    for _ in 0..horizon {
        state = predict_next_state(chain, state)?;
        out.push(state);
    }
    Ok(out)
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    // Rounding slowly bleeds mass out of the rows; pull each one back onto
    // the simplex whenever the drift is measurable.
    for row in &mut out {
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL && sum > 0.0 {
            for v in row.iter_mut() {
                *v /= sum;
            }
        }
    }
    out
}

fn mat_pow(m: &[Vec<f64>], mut exp: u64) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut result: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let mut base = m.to_vec();
    while exp > 0 {
        if exp & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        exp >>= 1;
        if exp > 0 {
            base = mat_mul(&base, &base);
        }
    }
    result
}

/// Push `initial` through `steps` transitions: returns `initial * stp^steps`.
///
/// The matrix power uses binary exponentiation, so long horizons stay cheap.
pub fn evolve_distribution(
    chain: &MarkovChain,
    initial: &Distribution,
    steps: u64,
) -> Result<Distribution> {
    if initial.len() != chain.state_count() {
        return Err(Error::invalid(format!(
            "distribution over {} states fed to a chain with {}",
            initial.len(),
            chain.state_count()
        )));
    }
    if steps == 0 {
        return Ok(initial.clone());
    }
    let power = mat_pow(chain.matrix(), steps);
    let n = chain.state_count();
    let mut probs = vec![0.0; n];
    for (row, &pi) in power.iter().zip(initial.probs()) {
        if pi == 0.0 {
            continue;
        }
        for (acc, &w) in probs.iter_mut().zip(row) {
            *acc += pi * w;
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > ROW_SUM_TOL && sum > 0.0 {
        for v in &mut probs {
            *v /= sum;
        }
    }
    Ok(Distribution { probs })
}

/// Most probable gain state during parameter upload `t`.
///
/// The channel is observed once per correlation slot; a whole training round
/// plus its upload spans `delta + 1` slots, so the distribution is advanced
/// `t * (delta + 1)` transitions from `initial` before taking the argmax.
pub fn predict_channel_state(
    chain: &MarkovChain,
    initial: &Distribution,
    session: u64,
    delta: u64,
) -> Result<usize> {
    if session == 0 {
        return Err(Error::invalid("session index starts at 1"));
    }
    let evolved = evolve_distribution(chain, initial, session * (delta + 1))?;
    Ok(argmax_lowest(evolved.probs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdata;

    fn identity_chain(n: usize) -> MarkovChain {
        let space = discretize(SpaceKind::Load, 0.0, 1.0, n).unwrap();
        let stp = (0..n)
            .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        MarkovChain::new(space, stp).unwrap()
    }

    #[test]
    fn discretize_load_five_levels() {
        let space = discretize(SpaceKind::Load, 0.0, 2e9, 5).unwrap();
        assert_eq!(space.levels(), &[0.0, 0.5e9, 1.0e9, 1.5e9, 2.0e9]);
    }

    #[test]
    fn discretize_two_point_endpoints() {
        let space = discretize(SpaceKind::Load, 0.0, 1.0, 2).unwrap();
        assert_eq!(space.levels(), &[0.0, 1.0]);
    }

    #[test]
    fn discretize_gain_levels_keep_offset() {
        // Direct evaluation of the affine map at the reference gain bounds.
        let lo = 2f64.powf(0.4) - 1.0;
        let hi = 2f64.powf(3.1) - 1.0;
        let space = discretize(SpaceKind::Gain, lo, hi, 10).unwrap();
        assert!((space.level(0) - 0.3195079107728942).abs() < 1e-15);
        assert!((space.level(9) - 7.574187700290345).abs() < 1e-12);
        assert!(space.levels().iter().all(|&l| l > 0.0));
    }

    #[test]
    fn discretize_rejects_bad_arguments() {
        assert!(discretize(SpaceKind::Load, 0.0, 1.0, 1).is_err());
        assert!(discretize(SpaceKind::Load, 0.0, 0.0, 3).is_err());
        assert!(discretize(SpaceKind::Gain, 0.0, 1.0, 3).is_err());
        assert!(discretize(SpaceKind::Load, 0.5, 1.0, 3).is_err());
    }

    #[test]
    fn estimate_counts_consecutive_pairs() {
        let space = discretize(SpaceKind::Load, 0.0, 1.0, 2).unwrap();
        let chain = estimate_stp(&space, &ObservationTrace::new(vec![0, 0, 1, 0], 1.0)).unwrap();
        assert_eq!(chain.row(0), &[0.5, 0.5]);
        assert_eq!(chain.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn estimate_defaults_unvisited_rows_to_uniform() {
        let space = discretize(SpaceKind::Load, 0.0, 1.0, 2).unwrap();
        let chain = estimate_stp(&space, &ObservationTrace::new(vec![0, 0, 0], 1.0)).unwrap();
        assert_eq!(chain.row(0), &[1.0, 0.0]);
        assert_eq!(chain.row(1), &[0.5, 0.5]);
    }

    #[test]
    fn estimate_perfect_alternation() {
        let space = discretize(SpaceKind::Load, 0.0, 1.0, 2).unwrap();
        let chain = estimate_stp(&space, &ObservationTrace::new(vec![0, 1, 0, 1, 0], 1.0)).unwrap();
        assert_eq!(chain.row(0), &[0.0, 1.0]);
        assert_eq!(chain.row(1), &[1.0, 0.0]);
    }

    #[test]
    fn estimate_needs_two_slots() {
        let space = discretize(SpaceKind::Load, 0.0, 1.0, 2).unwrap();
        let err = estimate_stp(&space, &ObservationTrace::new(vec![0], 1.0)).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn predict_breaks_ties_low() {
        let chain = testdata::load_chain(1); // row 0: tie 0.3 at indices 1 and 4
        assert_eq!(predict_next_state(&chain, 0).unwrap(), 1);
        let chain4 = testdata::load_chain(3); // row 2: tie 0.3 at indices 0 and 4
        assert_eq!(predict_next_state(&chain4, 2).unwrap(), 0);
    }

    #[test]
    fn predict_rejects_out_of_range_states() {
        let chain = identity_chain(3);
        assert!(predict_next_state(&chain, 3).is_err());
    }

    #[test]
    fn predict_identity_self_loop() {
        let chain = identity_chain(5);
        for k in 0..5 {
            assert_eq!(predict_next_state(&chain, k).unwrap(), k);
        }
    }

    #[test]
    fn load_sequences_match_golden_forecasts() {
        let ghz: Vec<f64> = vec![0.0, 0.5, 1.0, 1.5, 2.0];
        let expect = [
            (1usize, vec![0.5, 1.0, 1.0]),
            (2, vec![1.0, 1.5, 1.0]),
            (3, vec![1.0, 0.0, 1.0]),
        ];
        for (idx, seq_ghz) in expect {
            let chain = testdata::load_chain(idx);
            let states = predict_load_sequence(&chain, 0, 3).unwrap();
            let got: Vec<f64> = states.iter().map(|&m| ghz[m]).collect();
            assert_eq!(got, seq_ghz, "UE {}", idx + 1);
        }
        // The first chain is absorbed by its zero-load state.
        let states = predict_load_sequence(&testdata::load_chain(0), 0, 3).unwrap();
        assert_eq!(states, vec![0, 0, 0]);
    }

    #[test]
    fn identity_sequence_is_constant() {
        let chain = identity_chain(5);
        assert_eq!(predict_load_sequence(&chain, 3, 5).unwrap(), vec![3; 5]);
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let chain = testdata::gain_chain();
        let d = Distribution::delta(10, 4);
        assert_eq!(evolve_distribution(&chain, &d, 0).unwrap(), d);
    }

    #[test]
    fn evolve_identity_chain_fixes_everything() {
        let chain = identity_chain(4);
        let d = Distribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let out = evolve_distribution(&chain, &d, 100).unwrap();
        for (a, b) in out.probs().iter().zip(d.probs()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn evolve_matches_iterated_multiplication() {
        let chain = testdata::gain_chain();
        let mut naive = vec![0.1; 10];
        for _ in 0..11 {
            let mut next = vec![0.0; 10];
            for (i, &pi) in naive.iter().enumerate() {
                for (acc, &w) in next.iter_mut().zip(chain.row(i)) {
                    *acc += pi * w;
                }
            }
            naive = next;
        }
        let fast = evolve_distribution(&chain, &Distribution::uniform(10), 11).unwrap();
        for (a, b) in fast.probs().iter().zip(&naive) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn channel_prediction_matches_brute_force() {
        let chain = testdata::gain_chain();
        let init = Distribution::delta(10, 0);
        let mut naive = init.probs().to_vec();
        for _ in 0..11 {
            let mut next = vec![0.0; 10];
            for (i, &pi) in naive.iter().enumerate() {
                for (acc, &w) in next.iter_mut().zip(chain.row(i)) {
                    *acc += pi * w;
                }
            }
            naive = next;
        }
        let expected = argmax_lowest(&naive);
        assert_eq!(
            predict_channel_state(&chain, &init, 1, 10).unwrap(),
            expected
        );
    }

    #[test]
    fn channel_prediction_identity_keeps_state() {
        let chain = identity_chain(6);
        for n in 0..6 {
            let init = Distribution::delta(6, n);
            assert_eq!(predict_channel_state(&chain, &init, 3, 7).unwrap(), n);
        }
    }

    #[test]
    fn channel_prediction_delta_zero_is_one_step() {
        let chain = testdata::gain_chain();
        let init = Distribution::uniform(10);
        let one = evolve_distribution(&chain, &init, 1).unwrap();
        assert_eq!(
            predict_channel_state(&chain, &init, 1, 0).unwrap(),
            argmax_lowest(one.probs())
        );
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        let space = discretize(SpaceKind::Load, 0.0, 1.0, 2).unwrap();
        let err = MarkovChain::new(space, vec![vec![0.6, 0.5], vec![0.5, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }
}
