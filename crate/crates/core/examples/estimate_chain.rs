//! Estimate a transition matrix from an observation trace by transition
//! counting, then check the estimate recovers the generator as the trace
//! grows.
//!
//!     cargo run --example estimate_chain

use fedmarket::{discretize, estimate_stp, MarkovChain, ObservationTrace, SpaceKind};

/// A deterministic little congruential stream, good enough to sample paths.
struct Lcg(u64);

impl Lcg {
    fn next_f64(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn sample_path(chain: &MarkovChain, start: usize, len: usize, rng: &mut Lcg) -> Vec<usize> {
    let mut state = start;
    let mut out = vec![start];
    for _ in 1..len {
        let u = rng.next_f64();
        let row = chain.row(state);
        let mut acc = 0.0;
        state = row.len() - 1;
        for (j, &p) in row.iter().enumerate() {
            acc += p;
            if u < acc {
                state = j;
                break;
            }
        }
        out.push(state);
    }
    out
}

fn main() {
    let space = discretize(SpaceKind::Load, 0.0, 2e9, 3).unwrap();
    let generator = MarkovChain::new(
        space.clone(),
        vec![
            vec![0.6, 0.3, 0.1],
            vec![0.2, 0.5, 0.3],
            vec![0.1, 0.2, 0.7],
        ],
    )
    .unwrap();
    let mut rng = Lcg(42);

    for len in [50usize, 500, 50_000] {
        let slots = sample_path(&generator, 0, len, &mut rng);
        let estimated = estimate_stp(&space, &ObservationTrace::new(slots, 1.0)).unwrap();
        let worst = generator
            .matrix()
            .iter()
            .flatten()
            .zip(estimated.matrix().iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        println!("trace length {len:>6}: worst entry error {worst:.4}");
        if len == 50_000 {
            println!("\nestimated matrix at length {len}:");
            for row in estimated.matrix() {
                let cells: Vec<String> = row.iter().map(|p| format!("{p:.3}")).collect();
                println!("  [{}]", cells.join(", "));
            }
        }
    }
}
