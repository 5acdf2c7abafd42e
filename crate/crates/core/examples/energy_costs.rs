//! Per-session energy forecasts: training energy next to the predicted
//! background load, transmission energy through the predicted channel
//! state, and their sum, at the contract's reference accuracy.
//!
//!     cargo run --example energy_costs

use fedmarket::{estimate_sessions, load_scenario};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/paper_s5.scenario");
    let scenario = load_scenario(path).expect("bundled scenario");
    let theta_ref = scenario.contract.theta_max().unwrap() / 2.0;
    println!(
        "reference accuracy {:.4}; extra CPU frequency scales with eta * (1 - theta)\n",
        theta_ref
    );
    println!(
        "{:>3} {:>8} {:>12} {:>10} {:>12} {:>12} {:>12}",
        "ue", "session", "load (GHz)", "gain", "E_train (J)", "E_tx (J)", "total (J)"
    );
    for ue in &scenario.ues {
        let est = estimate_sessions(
            ue,
            &scenario.contract,
            &scenario.channel.chain,
            &scenario.channel.initial,
            theta_ref,
            scenario.solver.iteration_rule,
        )
        .unwrap();
        for (t, s) in est.sessions.iter().enumerate() {
            println!(
                "{:>3} {:>8} {:>12.2} {:>10.3} {:>12.3e} {:>12.3e} {:>12.3e}",
                ue.id,
                t + 1,
                s.load_hz / 1e9,
                s.gain,
                s.training_j,
                s.transmission_j,
                s.total_j
            );
        }
    }
}
