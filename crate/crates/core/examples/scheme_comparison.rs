//! Compare seller profits under the three pricing schemes, all graded with
//! the true load-aware energy model on shared forecasts.
//!
//!     cargo run --example scheme_comparison

use fedmarket::{compare_schemes, load_scenario};

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/paper_s5.scenario");
    let scenario = load_scenario(path).expect("bundled scenario");
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

    println!(
        "true-cost profit per seller (markup {}):\n",
        scenario.ilps_markup
    );
    println!(
        "{:>10} {:>22} {:>22} {:>22}",
        "ue", "tla-gts", "pure-gts", "ilps"
    );
    let per_ue = reports[0].entries.len();
    for i in 0..per_ue {
        print!("{:>10}", reports[0].entries[i].ue);
        for report in &reports {
            let e = &report.entries[i];
            if e.eliminated {
                print!(" {:>22}", "eliminated");
            } else {
                print!(" {:>22.15}", e.profit);
            }
        }
        println!();
    }
    println!("\nbuyer payment per scheme:");
    for report in &reports {
        println!(
            "  {:>9}: {:.6e}",
            report.scheme.as_str(),
            report.mo_total_payment
        );
    }
    println!("\nload-aware pricing dominates load-blind pricing per seller,");
    println!("and both dominate rival-independent cost-plus quoting.");
}
