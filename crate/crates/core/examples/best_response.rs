//! The closed-form responses on both sides of the market, cross-checked
//! against derivative-free numeric oracles.
//!
//!     cargo run --example best_response

use fedmarket::{
    market_coefficients, mo_best_response, numeric_mo_oracle, numeric_price_oracle,
    ue_best_response_session_raw, ue_session_utility, PriceProfile, ResponseMode,
    SessionGameConstants,
};

fn main() {
    let coeffs = market_coefficients(4, 0.5).unwrap();
    println!(
        "market constants for four sellers at v = 0.5: A = {}, B = {}\n",
        coeffs.a, coeffs.b
    );

    // Seller side: closed-form session price vs golden-section argmax.
    let consts = SessionGameConstants {
        load_cost: 2.4e-10,
        quad_cost: 7.2e-11,
        rival_prices: 1.0,
        transmission_j: 2.9e-10,
    };
    let closed = ue_best_response_session_raw(&consts, &coeffs, 0.0).unwrap();
    let searched = numeric_price_oracle(
        |rho| ue_session_utility(rho, rho, &consts, &coeffs),
        0.0,
        10.0,
    )
    .unwrap();
    println!("seller session price: closed form {closed:.12}");
    println!("                      golden section {searched:.12}");
    println!(
        "                      difference {:.3e}\n",
        (closed - searched).abs()
    );

    // Buyer side: the direct linear map against the solved system.
    let prices = PriceProfile::new(vec![
        vec![0.4, 0.6],
        vec![0.2, 0.2],
        vec![0.5, 0.1],
        vec![0.3, 0.3],
    ])
    .unwrap();
    let etas = [1.0; 4];
    let printed = mo_best_response(&prices, &coeffs, &etas, ResponseMode::Printed).unwrap();
    let derived = mo_best_response(&prices, &coeffs, &etas, ResponseMode::Derived).unwrap();
    let oracle = numeric_mo_oracle(&prices, &coeffs, &etas).unwrap();
    println!(
        "buyer purchases for price totals {:?}:",
        (0..4).map(|k| prices.total(k)).collect::<Vec<_>>()
    );
    println!("  printed map : {:?}", printed.thetas);
    println!("  derived map : {:?}", derived.thetas);
    println!("  linear solve: {:?}", oracle.thetas);
    println!("\nthe printed map is the negation of the solved first-order system;");
    println!("scenario files pick which one the buyer plays.");
}
