//! Forecast each seller's background CPU load over the next few training
//! sessions with its own Markov chain.
//!
//!     cargo run --example predict_load

use fedmarket::{load_scenario, predict_load_sequence};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/paper_s5.scenario");
    let scenario = load_scenario(path).expect("bundled scenario");
    println!("forecast background load, three sessions ahead, starting idle\n");
    for ue in &scenario.ues {
        let states = predict_load_sequence(&ue.load_chain, 0, 3).unwrap();
        let ghz: Vec<String> = states
            .iter()
            .map(|&m| format!("{:.1}", ue.load_chain.space().level(m) / 1e9))
            .collect();
        println!("UE {}: {{{}}} GHz", ue.id, ghz.join(", "));
    }
}
