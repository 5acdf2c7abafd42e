//! The selection loop: sellers whose purchases fall outside the contract's
//! accuracy window, or whose CPUs cannot absorb the workload, are removed
//! one at a time and the game reruns on the remainder.
//!
//!     cargo run --example ue_selection

use fedmarket::{discretize, load_scenario, tla_gts, MarkovChain, SpaceKind, UeProfile};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/paper_s5.scenario");
    let scenario = load_scenario(path).expect("bundled scenario");

    // Add a fifth seller pinned permanently at its maximum CPU frequency;
    // it cannot host any extra workload and is removed before the game.
    let space = discretize(SpaceKind::Load, 0.0, 2e9, 5).unwrap();
    let pinned_rows: Vec<Vec<f64>> = (0..5).map(|_| vec![0.0, 0.0, 0.0, 0.0, 1.0]).collect();
    let overloaded = UeProfile {
        id: 5,
        load_chain: MarkovChain::new(space, pinned_rows).unwrap(),
        initial_load_state: 4,
        ..scenario.ues[0].clone()
    };
    let mut candidates = scenario.ues.clone();
    candidates.push(overloaded);

    let outcome = tla_gts(
        &candidates,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
    )
    .unwrap();

    println!(
        "candidates: {:?}",
        candidates.iter().map(|u| u.id).collect::<Vec<_>>()
    );
    println!("eliminated (in order): {:?}", outcome.eliminated);
    println!("infeasible contract: {}", outcome.infeasible);
    println!(
        "\nsurvivors with their purchases (window (0, {:.4}]):",
        outcome.theta_max
    );
    for ue in &outcome.ues {
        println!(
            "  UE {}: theta {:.6}, asked total {:.6}, profit {:.6}",
            ue.id,
            ue.theta,
            ue.prices.iter().sum::<f64>(),
            ue.profit
        );
    }
}
