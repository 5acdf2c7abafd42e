//! Reference chains shared by unit tests: the four load matrices and the
//! channel matrix from the bundled scenario.

use crate::markov::{discretize, MarkovChain, SpaceKind};

pub(crate) const LOAD_STPS: [[[f64; 5]; 5]; 4] = [
    [
        [0.3, 0.15, 0.25, 0.1, 0.2],
        [0.2, 0.1, 0.1, 0.4, 0.2],
        // Source row carried total mass 0.9; renormalized to keep it stochastic.
        [
            0.11111111111111112,
            0.4444444444444445,
            0.11111111111111112,
            0.11111111111111112,
            0.22222222222222224,
        ],
        [0.4, 0.1, 0.1, 0.2, 0.2],
        [0.1, 0.3, 0.1, 0.3, 0.2],
    ],
    [
        [0.2, 0.3, 0.1, 0.1, 0.3],
        [0.3, 0.1, 0.4, 0.1, 0.1],
        [0.2, 0.2, 0.3, 0.1, 0.2],
        [0.1, 0.3, 0.4, 0.1, 0.1],
        [0.1, 0.2, 0.4, 0.2, 0.1],
    ],
    [
        // Source row carried total mass 0.9; renormalized to keep it stochastic.
        [
            0.22222222222222224,
            0.11111111111111112,
            0.38888888888888884,
            0.16666666666666666,
            0.11111111111111112,
        ],
        [0.1, 0.15, 0.3, 0.25, 0.2],
        [0.1, 0.1, 0.1, 0.4, 0.3],
        [0.1, 0.1, 0.4, 0.1, 0.3],
        [0.1, 0.1, 0.4, 0.3, 0.1],
    ],
    [
        [0.2, 0.1, 0.3, 0.2, 0.2],
        [0.2, 0.15, 0.3, 0.25, 0.1],
        [0.3, 0.1, 0.2, 0.1, 0.3],
        [0.2, 0.4, 0.2, 0.1, 0.1],
        [0.2, 0.4, 0.1, 0.2, 0.1],
    ],
];

pub(crate) const GAIN_STP: [[f64; 10]; 10] = [
    [
        0.489, 0.256, 0.128, 0.064, 0.032, 0.016, 0.008, 0.004, 0.002, 0.001,
    ],
    [
        0.001, 0.489, 0.256, 0.128, 0.064, 0.032, 0.016, 0.008, 0.004, 0.002,
    ],
    [
        0.002, 0.001, 0.489, 0.256, 0.128, 0.064, 0.032, 0.016, 0.008, 0.004,
    ],
    [
        0.004, 0.002, 0.001, 0.489, 0.256, 0.128, 0.064, 0.032, 0.016, 0.008,
    ],
    [
        0.008, 0.004, 0.002, 0.001, 0.489, 0.256, 0.128, 0.064, 0.032, 0.016,
    ],
    [
        0.016, 0.008, 0.004, 0.002, 0.001, 0.489, 0.256, 0.128, 0.064, 0.032,
    ],
    [
        0.032, 0.016, 0.008, 0.004, 0.002, 0.001, 0.489, 0.256, 0.128, 0.064,
    ],
    [
        0.064, 0.032, 0.016, 0.008, 0.004, 0.002, 0.001, 0.489, 0.256, 0.128,
    ],
    [
        0.128, 0.064, 0.032, 0.016, 0.008, 0.004, 0.002, 0.001, 0.489, 0.256,
    ],
    [
        0.256, 0.128, 0.064, 0.032, 0.016, 0.008, 0.004, 0.002, 0.001, 0.489,
    ],
];

pub(crate) const GAIN_LO: f64 = 0.3195079107728942; // 2^0.4 - 1
pub(crate) const GAIN_HI: f64 = 7.574187700290345; // 2^3.1 - 1

/// Load chain for UE `idx` (0-based), 5 levels over 0..2 GHz.
pub(crate) fn load_chain(idx: usize) -> MarkovChain {
    let space = discretize(SpaceKind::Load, 0.0, 2e9, 5).unwrap();
    let stp = LOAD_STPS[idx].iter().map(|r| r.to_vec()).collect();
    MarkovChain::new(space, stp).unwrap()
}

/// The shared 10-level gain chain.
pub(crate) fn gain_chain() -> MarkovChain {
    let space = discretize(SpaceKind::Gain, GAIN_LO, GAIN_HI, 10).unwrap();
    let stp = GAIN_STP.iter().map(|r| r.to_vec()).collect();
    MarkovChain::new(space, stp).unwrap()
}
