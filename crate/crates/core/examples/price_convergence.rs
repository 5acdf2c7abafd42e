//! Watch the per-session prices settle as sellers best-respond in rounds,
//! on a three-session variant of the bundled scenario. Sellers forecasting
//! heavier background load ask more in the affected sessions.
//!
//!     cargo run --example price_convergence

use fedmarket::{find_ne, load_scenario};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/paper_s5.scenario");
    let mut scenario = load_scenario(path).expect("bundled scenario");
    scenario.contract.global_sessions = 3;

    let outcome = find_ne(
        &scenario.ues,
        &scenario.contract,
        &scenario.channel.chain,
        &scenario.channel.initial,
        &scenario.solver,
    )
    .unwrap();
    println!(
        "converged = {} after {} iterations (ratio {})\n",
        outcome.converged, outcome.iterations, scenario.solver.xi
    );

    println!("price of session 1, per seller, selected iterations:");
    println!(
        "{:>5} {:>14} {:>14} {:>14} {:>14}",
        "iter", "UE 1", "UE 2", "UE 3", "UE 4"
    );
    for rec in &outcome.trajectory {
        if rec.index <= 6 || rec.index == outcome.iterations || rec.index % 10 == 0 {
            print!("{:>5}", rec.index);
            for prices in &rec.prices {
                print!(" {:>14.9}", prices[0]);
            }
            println!();
        }
    }

    println!("\nfinal prices by session (higher forecast load, higher ask):");
    for (t, _) in outcome.ues[0].prices.iter().enumerate() {
        let row: Vec<String> = outcome
            .ues
            .iter()
            .map(|u| format!("{:.12}", u.prices[t]))
            .collect();
        println!("  session {}: [{}]", t + 1, row.join(", "));
    }
    println!("\nper-seller gradient norms at the last two iterations:");
    let n = outcome.trajectory.len();
    for rec in &outcome.trajectory[n - 2..] {
        println!("  iter {:>3}: {:?}", rec.index, rec.grad_norms);
    }
}
