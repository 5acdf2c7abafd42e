//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its runtime. Run with
//! `cargo test -p fedmarket --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use fedmarket::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SCENARIO: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/paper_s5.scenario");

fn pass(id: u32, name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "criterion {id} exceeded its runtime budget: {elapsed:?} >= {budget:?}"
    );
    println!("acceptance {id:2} ({name}): PASS in {elapsed:?}");
}

fn bundled() -> Scenario {
    load_scenario(SCENARIO).expect("bundled scenario loads")
}

/// Criterion 1: the forecast load sequences of the bundled scenario match
/// the golden three-session trajectories for UEs 2-4. The first UE's chain
/// is absorbed by its zero-load state, so no nonzero trajectory is
/// reachable by argmax forecasting; the absorbed sequence is asserted
/// instead.
#[test]
fn c01_load_sequence_reproduction() {
    let started = Instant::now();
    let scenario = bundled();
    let ghz = [0.0, 0.5, 1.0, 1.5, 2.0];
    let expected: [&[f64]; 4] = [
        &[0.0, 0.0, 0.0],
        &[0.5, 1.0, 1.0],
        &[1.0, 1.5, 1.0],
        &[1.0, 0.0, 1.0],
    ];
    for (ue, want) in scenario.ues.iter().zip(expected) {
        let states = predict_load_sequence(&ue.load_chain, 0, 3).unwrap();
        let got: Vec<f64> = states.iter().map(|&m| ghz[m]).collect();
        assert_eq!(got.as_slice(), want, "UE {}", ue.id);
    }
    pass(
        1,
        "load sequence reproduction",
        started,
        Duration::from_secs(1),
    );
}

/// Criterion 2: the market constants for four sellers at substitutability
/// one half are exactly -8/5 and 2/5.
#[test]
fn c02_market_constants_exact() {
    let started = Instant::now();
    let c = market_coefficients(4, 0.5).unwrap();
    // Rational evaluation: numerator -(1 - 2v + Kv) = -2, denominator
    // (1 - v)(Kv + 1 - v) = 5/4, so A = -8/5 and B = (1/2)/(5/4) = 2/5.
    let (a_num, a_den) = (-8i64, 5i64);
    let (b_num, b_den) = (2i64, 5i64);
    assert_eq!(c.a, a_num as f64 / a_den as f64);
    assert_eq!(c.b, b_num as f64 / b_den as f64);
    assert_eq!(c.a, -1.6);
    assert_eq!(c.b, 0.4);
    pass(2, "market constants exact", started, Duration::from_secs(1));
}

/// Criterion 3: over randomized single-session markets, the closed-form
/// session response (pre-clamp) matches a golden-section argmax of the
/// session utility to 1e-6 relative.
#[test]
fn c03_session_response_matches_search_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..120 {
        let coeffs = MarketCoefficients {
            a: rng.gen_range(-5.0..-0.1),
            b: rng.gen_range(0.0..1.0),
            players: 4,
            substitutability: 0.5,
        };
        let consts = SessionGameConstants {
            load_cost: rng.gen_range(0.0..1e-9),
            quad_cost: rng.gen_range(0.0..1e-9),
            rival_prices: rng.gen_range(0.0..10.0),
            transmission_j: rng.gen_range(0.0..1e-9),
        };
        let closed = ue_best_response_session_raw(&consts, &coeffs, 0.0).unwrap();
        let numeric = numeric_price_oracle(
            |rho| ue_session_utility(rho, rho, &consts, &coeffs),
            -60.0,
            60.0,
        )
        .unwrap();
        let err = (closed - numeric).abs() / closed.abs().max(1.0);
        assert!(
            err <= 1e-6,
            "trial {trial}: closed {closed} vs search {numeric}"
        );
    }
    pass(
        3,
        "session response vs search oracle",
        started,
        Duration::from_secs(5),
    );
}

/// Criterion 4: the derived purchase map satisfies its stationarity system
/// to 1e-9, matches the elimination oracle to 1e-10, and the printed map is
/// its componentwise negation to 1e-12.
#[test]
fn c04_purchase_map_equivalences() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for trial in 0..120 {
        let k = rng.gen_range(1..=8usize);
        let sessions = rng.gen_range(1..=4usize);
        let v = rng.gen_range(0.0..0.9);
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|_| (0..sessions).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let prices = PriceProfile::new(rows).unwrap();
        let coeffs = market_coefficients(k, v).unwrap();
        let etas = vec![1.0; k];
        let derived = mo_best_response(&prices, &coeffs, &etas, ResponseMode::Derived).unwrap();
        for i in 0..k {
            let rivals: f64 = (0..k).filter(|&j| j != i).map(|j| derived.thetas[j]).sum();
            let resid = derived.thetas[i] + v * rivals - prices.total(i);
            assert!(resid.abs() <= 1e-9, "trial {trial}: residual {resid}");
        }
        let oracle = numeric_mo_oracle(&prices, &coeffs, &etas).unwrap();
        let printed = mo_best_response(&prices, &coeffs, &etas, ResponseMode::Printed).unwrap();
        for i in 0..k {
            assert!(
                (derived.thetas[i] - oracle.thetas[i]).abs() <= 1e-10,
                "trial {trial}"
            );
            assert!(
                (printed.thetas[i] + derived.thetas[i]).abs() <= 1e-12,
                "trial {trial}"
            );
        }
    }
    pass(
        4,
        "purchase map equivalences",
        started,
        Duration::from_secs(5),
    );
}

/// Criterion 5: the analytic price gradient matches central finite
/// differences to 1e-5 relative on randomized states.
#[test]
fn c05_gradient_matches_finite_differences() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..120 {
        let sessions = rng.gen_range(1..=5usize);
        let coeffs = MarketCoefficients {
            a: rng.gen_range(-5.0..-0.1),
            b: rng.gen_range(0.0..1.0),
            players: 4,
            substitutability: 0.5,
        };
        let consts: Vec<SessionGameConstants> = (0..sessions)
            .map(|_| SessionGameConstants {
                load_cost: rng.gen_range(0.0..0.5),
                quad_cost: rng.gen_range(0.0..0.5),
                rival_prices: rng.gen_range(0.0..5.0),
                transmission_j: rng.gen_range(0.0..0.5),
            })
            .collect();
        let prices: Vec<f64> = (0..sessions).map(|_| rng.gen_range(0.0..2.0)).collect();
        let grad = gradient_ue(&prices, &consts, &coeffs);
        let utility = |p: &[f64]| -> f64 {
            let s: f64 = p.iter().sum();
            p.iter()
                .zip(&consts)
                .map(|(&rho, c)| ue_session_utility(rho, s, c, &coeffs))
                .sum()
        };
        for tau in 0..sessions {
            let h = 1e-6 * prices[tau].abs().max(1.0);
            let mut up = prices.clone();
            up[tau] += h;
            let mut down = prices.clone();
            down[tau] -= h;
            let fd = (utility(&up) - utility(&down)) / (2.0 * h);
            let err = (grad[tau] - fd).abs() / fd.abs().max(1.0);
            assert!(
                err <= 1e-5,
                "trial {trial} component {tau}: {} vs {fd}",
                grad[tau]
            );
        }
    }
    pass(
        5,
        "gradient vs finite differences",
        started,
        Duration::from_secs(5),
    );
}

/// Criterion 6: the bundled scenario converges under the ratio rule within
/// the iteration cap, deterministically, and the recorded trajectory
/// witnesses the stop-rule inequality at the declared iteration.
#[test]
fn c06_bundled_scenario_converges() {
    let started = Instant::now();
    let scenario = bundled();
    assert_eq!(scenario.solver.xi, 0.01);
    let run = || {
        find_ne(
            &scenario.ues,
            &scenario.contract,
            &scenario.channel.chain,
            &scenario.channel.initial,
            &scenario.solver,
        )
        .unwrap()
    };
    let outcome = run();
    assert!(
        outcome.converged,
        "cap hit after {} iterations",
        outcome.iterations
    );
    assert!(outcome.iterations <= 500);
    assert_eq!(outcome, run(), "solver must be deterministic");
    let n = outcome.trajectory.len();
    assert!(n >= 2);
    let last = &outcome.trajectory[n - 1];
    let prev = &outcome.trajectory[n - 2];
    assert_eq!(last.index, outcome.iterations);
    for (k, (now, before)) in last.grad_norms.iter().zip(&prev.grad_norms).enumerate() {
        assert!(
            *now <= scenario.solver.xi * *before,
            "stop rule violated for seller {k}: {now} vs {before}"
        );
    }
    // The direct-map buyer walks the same price path.
    let printed = SolverConfig {
        mode: ResponseMode::Printed,
        ..scenario.solver.clone()
    };
    let printed_outcome = find_ne(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &printed,
    )
    .unwrap();
    assert!(printed_outcome.converged);
    for (a, b) in printed_outcome.ues.iter().zip(&outcome.ues) {
        assert_eq!(a.prices, b.prices);
    }
    pass(
        6,
        "bundled scenario converges",
        started,
        Duration::from_secs(10),
    );
}

/// Criterion 7: tightening the convergence ratio tenfold costs at most a
/// cap-plus-five budget consistent with logarithmic growth.
#[test]
fn c07_iteration_scaling_in_xi() {
    let started = Instant::now();
    let scenario = bundled();
    let iters = |xi: f64| {
        let config = SolverConfig {
            xi,
            ..scenario.solver.clone()
        };
        let outcome = find_ne(
            &scenario.ues,
            &scenario.contract,
            &scenario.channel.chain,
            &scenario.channel.initial,
            &config,
        )
        .unwrap();
        assert!(outcome.converged, "xi={xi} hit the cap");
        outcome.iterations as i64
    };
    let coarse = iters(1e-2);
    let fine = iters(1e-3);
    assert!(
        fine - coarse <= coarse + 5,
        "iterations grew too fast: {fine} vs {coarse}"
    );
    pass(
        7,
        "iteration scaling in xi",
        started,
        Duration::from_secs(20),
    );
}

/// Criterion 8: on the bundled scenario every surviving seller earns at
/// least as much under load-aware pricing as under load-blind pricing, and
/// at least as much under either game as under independent cost-plus
/// quoting.
#[test]
fn c08_scheme_profit_ordering() {
    let started = Instant::now();
    let scenario = bundled();
    let reports = compare_schemes(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
        0.1,
        &scenario.id,
    )
    .unwrap();
    assert_eq!(reports.len(), 3);
    let tla = &reports[0];
    let pure = &reports[1];
    let ilps = &reports[2];
    assert_eq!(tla.scheme, SchemeId::TlaGts);
    let survivors: Vec<usize> = (0..tla.entries.len())
        .filter(|&i| !tla.entries[i].eliminated)
        .collect();
    assert_eq!(
        survivors.len(),
        4,
        "the bundled market must admit every seller"
    );
    for &i in &survivors {
        let (t, p, l) = (
            tla.entries[i].profit,
            pure.entries[i].profit,
            ilps.entries[i].profit,
        );
        assert!(
            t >= p,
            "UE {}: load-aware {t} < load-blind {p}",
            tla.entries[i].ue
        );
        assert!(
            p >= l,
            "UE {}: load-blind {p} < cost-plus {l}",
            tla.entries[i].ue
        );
    }
    pass(
        8,
        "scheme profit ordering",
        started,
        Duration::from_secs(30),
    );
}

fn random_chain(rng: &mut ChaCha8Rng, kind: SpaceKind, lo: f64, hi: f64, n: usize) -> MarkovChain {
    let space = discretize(kind, lo, hi, n).unwrap();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
            let sum: f64 = raw.iter().sum();
            raw.into_iter().map(|x| x / sum).collect()
        })
        .collect();
    MarkovChain::new(space, rows).unwrap()
}

/// Criterion 9: across randomized markets the selection loop always lands
/// in a clean terminal state: either a nonempty surviving set whose
/// purchases all fit the accuracy window, or an empty set flagged
/// infeasible. Never a mixture.
#[test]
fn c09_selection_never_leaves_a_mixed_state() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for trial in 0..200 {
        let k = rng.gen_range(1..=5usize);
        let sessions = rng.gen_range(1..=4u32);
        let contract = MoContract {
            epsilon: rng.gen_range(0.4..0.9),
            zeta: 1.0,
            global_sessions: sessions,
            t_train: 2.0,
            t_comm: 0.2,
            substitutability: rng.gen_range(0.0..0.8),
            bandwidth: 1e6,
            payload_bits: rng.gen_range(1e4..5e5),
            noise_power: 1e-9,
            bit_error_rate: 1e-3,
            correlation_time: 0.2,
        };
        let gain_levels = rng.gen_range(2..=6usize);
        let channel = random_chain(&mut rng, SpaceKind::Gain, 0.32, 7.57, gain_levels);
        let pi0 = Distribution::uniform(gain_levels);
        let ues: Vec<UeProfile> = (0..k)
            .map(|i| {
                let load_levels = rng.gen_range(2..=5usize);
                UeProfile {
                    id: i as u32 + 1,
                    nu: 1e-28,
                    cycles_per_sample: rng.gen_range(5.0..30.0),
                    dataset_size: rng.gen_range(2e7..9e7),
                    eta: 1.0,
                    f_max: 2e9,
                    load_chain: random_chain(&mut rng, SpaceKind::Load, 0.0, 2e9, load_levels),
                    initial_load_state: rng.gen_range(0..load_levels),
                }
            })
            .collect();
        let config = SolverConfig {
            mode: if trial % 2 == 0 {
                ResponseMode::Derived
            } else {
                ResponseMode::Printed
            },
            ..SolverConfig::default()
        };
        let outcome = tla_gts(&ues, &contract, &channel, &pi0, &config).unwrap();

        let mut seen: Vec<u32> = outcome.eliminated.clone();
        seen.extend(outcome.ues.iter().map(|u| u.id));
        seen.sort_unstable();
        let mut input: Vec<u32> = ues.iter().map(|u| u.id).collect();
        input.sort_unstable();
        assert_eq!(seen, input, "trial {trial}: sellers lost or duplicated");

        if outcome.infeasible {
            assert!(
                outcome.ues.is_empty(),
                "trial {trial}: infeasible but sellers remain"
            );
        } else {
            assert!(!outcome.ues.is_empty(), "trial {trial}: feasible but empty");
            for ue in &outcome.ues {
                assert!(
                    ue.theta > 0.0 && ue.theta <= outcome.theta_max,
                    "trial {trial}: UE {} survived with theta {}",
                    ue.id,
                    ue.theta
                );
            }
        }
    }
    pass(
        9,
        "selection terminal states",
        started,
        Duration::from_secs(60),
    );
}

/// Criterion 10: cross-cutting invariants — estimation stochasticity,
/// evolution semigroup, energy monotonicity, the payment identity, scheme
/// coincidence without background load, quote independence, and
/// deterministic byte-identical emission. The full property suites live in
/// the `properties` test target and the module unit tests; this criterion
/// re-runs one randomized pass of each family end to end.
#[test]
fn c10_invariant_suites() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);

    // Estimation returns a stochastic matrix for arbitrary traces.
    for _ in 0..200 {
        let n = rng.gen_range(2..=6usize);
        let len = rng.gen_range(2..=40usize);
        let slots: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
        let space = discretize(SpaceKind::Load, 0.0, 1.0, n).unwrap();
        let chain = estimate_stp(&space, &ObservationTrace::new(slots, 1.0)).unwrap();
        for row in chain.matrix() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }
    }

    // Evolution composes.
    for _ in 0..50 {
        let n = rng.gen_range(2..=5usize);
        let chain = random_chain(&mut rng, SpaceKind::Load, 0.0, 1.0, n);
        let d = Distribution::uniform(n);
        let (a, b) = (rng.gen_range(0..30u64), rng.gen_range(0..30u64));
        let joint = evolve_distribution(&chain, &d, a + b).unwrap();
        let staged =
            evolve_distribution(&chain, &evolve_distribution(&chain, &d, a).unwrap(), b).unwrap();
        for (x, y) in joint.probs().iter().zip(staged.probs()) {
            assert!((x - y).abs() <= 1e-10);
        }
    }

    // Training energy grows with background load; payments decompose.
    for _ in 0..200 {
        let f_ex = rng.gen_range(0.0..1.5e9);
        let f_k = rng.gen_range(1e3..5e8);
        let bump = rng.gen_range(1e3..4e8);
        assert!(
            training_energy(1e-28, f_ex + bump, f_k, 2.0) > training_energy(1e-28, f_ex, f_k, 2.0)
        );
        let prices: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
        let psi: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
        let iters = rng.gen_range(0.1..2.0);
        let p = ue_utility(&prices, &psi, iters);
        assert_eq!(p.profit, p.payment - p.energy);
    }

    // Load-blind and load-aware games coincide without background load.
    let scenario = bundled();
    let zero_space = discretize(SpaceKind::Load, 0.0, 2e9, 5).unwrap();
    let zero_rows: Vec<Vec<f64>> = (0..5).map(|_| vec![1.0, 0.0, 0.0, 0.0, 0.0]).collect();
    let zero_ues: Vec<UeProfile> = scenario
        .ues
        .iter()
        .map(|u| UeProfile {
            load_chain: MarkovChain::new(zero_space.clone(), zero_rows.clone()).unwrap(),
            initial_load_state: 0,
            ..u.clone()
        })
        .collect();
    let aware = tla_gts(
        &zero_ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
    )
    .unwrap();
    let blind = pure_gts(
        &zero_ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
    )
    .unwrap();
    assert_eq!(
        aware, blind,
        "schemes must coincide at zero background load"
    );

    // Cost-plus quotes ignore rivals.
    let mut perturbed = scenario.ues.clone();
    perturbed[3].dataset_size *= 1.1;
    let q1 = ilps(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
        0.1,
    )
    .unwrap();
    let q2 = ilps(
        &perturbed,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
        0.1,
    )
    .unwrap();
    for k in [0usize, 1, 2] {
        assert_eq!(q1.prices(k), q2.prices(k));
    }
    assert_ne!(q1.prices(3), q2.prices(3));

    // Emission is deterministic and the JSON round-trips bytes.
    let outcome = tla_gts(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
    )
    .unwrap();
    let reports = compare_schemes(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
        scenario.ilps_markup,
        &scenario.id,
    )
    .unwrap();
    let theta_ref = scenario.contract.theta_max().unwrap() / 2.0;
    let predictions: Vec<SessionEstimates> = scenario
        .ues
        .iter()
        .map(|u| {
            estimate_sessions(
                u,
                &scenario.contract,
                &scenario.channel.chain,
                &scenario.channel.initial,
                theta_ref,
                scenario.solver.iteration_rule,
            )
            .unwrap()
        })
        .collect();
    let bundle = ResultBundle {
        scenario_id: scenario.id.clone(),
        outcome,
        reports,
        predictions,
    };
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    emit_results(&bundle, dir1.path()).unwrap();
    emit_results(&bundle, dir2.path()).unwrap();
    for name in [
        "prices.csv",
        "profits.csv",
        "predictions.csv",
        "outcome.json",
    ] {
        let a = std::fs::read(dir1.path().join(name)).unwrap();
        let b = std::fs::read(dir2.path().join(name)).unwrap();
        assert_eq!(a, b, "{name} must be byte-identical across runs");
    }
    let (id, reloaded) = read_outcome(dir1.path().join("outcome.json")).unwrap();
    assert_eq!(id, bundle.scenario_id);
    assert_eq!(reloaded, bundle.outcome);
    let re_emitted = fedmarket::emit::outcome_json(&id, &reloaded);
    assert_eq!(
        re_emitted.into_bytes(),
        std::fs::read(dir1.path().join("outcome.json")).unwrap()
    );

    // Scenario files round-trip exactly.
    let text = fedmarket::scenario::scenario_to_toml(&scenario).unwrap();
    let again = load_scenario_str("roundtrip.scenario", &text).unwrap();
    assert_eq!(scenario, again);

    pass(10, "invariant suites", started, Duration::from_secs(60));
}
