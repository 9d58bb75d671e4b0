#![allow(dead_code)]

use memflow::{EquationKind, MapParams, QubitState};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const RATIOS: [f64; 4] = [0.05, 0.1, 0.2, 0.24];
pub const OCCUPATIONS: [f64; 3] = [0.5, 1.0, 10.0];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform sample from the Bloch ball.
pub fn random_state(rng: &mut ChaCha8Rng) -> QubitState<f64> {
    loop {
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        if v[0] * v[0] + v[1] * v[1] + v[2] * v[2] <= 1.0 {
            return QubitState::from_bloch(v).unwrap();
        }
    }
}

pub fn random_pure(rng: &mut ChaCha8Rng) -> QubitState<f64> {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).sqrt();
    QubitState::raw((1.0 + z) / 2.0, Complex::new(s * phi.cos() / 2.0, s * phi.sin() / 2.0))
}

/// Every (kind, R, N) point of the standard physical grid.
pub fn physical_grid() -> Vec<(EquationKind, MapParams<f64>)> {
    let mut out = Vec::new();
    for kind in EquationKind::ALL {
        for r in RATIOS {
            for n in OCCUPATIONS {
                out.push((kind, MapParams::from_ratio(r, n).unwrap()));
            }
        }
    }
    out
}
