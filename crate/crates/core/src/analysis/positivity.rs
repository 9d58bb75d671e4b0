//! Positivity of affine Bloch maps: the image of the Bloch ball must stay
//! inside the ball. Since the image of a convex set under an affine map is
//! convex, it suffices to maximise the output norm over pure inputs.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::MapSnapshot;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::QubitState;

/// Slack on the output Bloch norm.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Minimum number of sphere samples.
pub const MIN_SAMPLES: usize = 1000;

const RESTARTS: usize = 8;
const PROBE_SEED: u64 = 0x5eed_b10c;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityVerdict<T> {
    pub positive: bool,
    /// Largest output Bloch norm over pure inputs.
    pub max_norm: T,
    /// Pure input attaining `max_norm`.
    pub witness: QubitState<T>,
}

/// Unit vectors of a subdivided icosahedron.
pub fn icosphere<T: Real>(subdivisions: usize) -> Vec<[T; 3]> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                verts.push([(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, (p[2] + q[2]) / 2.0]);
                verts.len() - 1
            })
        };
        for [a, b, c] in faces {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    verts
        .into_iter()
        .map(|v| {
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [T::lit(v[0] / n), T::lit(v[1] / n), T::lit(v[2] / n)]
        })
        .collect()
}

/// Reusable search state: the sphere grid and seeded restart directions.
#[derive(Debug, Clone)]
pub struct PositivityProbe<T> {
    grid: Vec<[T; 3]>,
    restarts: Vec<(T, T)>,
}

impl<T: Real> PositivityProbe<T> {
    pub fn new(samples: usize) -> Result<Self> {
        if samples < MIN_SAMPLES {
            return Err(Error::InvalidArgument(format!(
                "positivity search needs at least {MIN_SAMPLES} samples, got {samples}"
            )));
        }
        let mut level = 0;
        while 10 * 4usize.pow(level as u32) + 2 < samples {
            level += 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        let restarts = (0..RESTARTS)
            .map(|_| {
                let z: f64 = rng.random_range(-1.0..1.0);
                let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                (T::lit(z.acos()), T::lit(phi))
            })
            .collect();
        Ok(Self {
            grid: icosphere(level),
            restarts,
        })
    }

    pub fn grid_len(&self) -> usize {
        self.grid.len()
    }

    pub fn check(&self, snap: &MapSnapshot<T>) -> PositivityVerdict<T> {
        let norm = |n: [T; 3]| {
            let r = snap.apply_bloch(n);
            (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
        };
        let mut best = self.grid[0];
        let mut best_norm = norm(best);
        for &n in &self.grid[1..] {
            let v = norm(n);
            if v > best_norm {
                best = n;
                best_norm = v;
            }
        }
        let start = (best[2].max(-T::one()).min(T::one()).acos(), best[1].atan2(best[0]));
        let mut starts = vec![start];
        starts.extend(self.restarts.iter().copied());
        for (theta, phi) in starts {
            let (n, v) = refine(&norm, theta, phi);
            if v > best_norm {
                best = n;
                best_norm = v;
            }
        }
        PositivityVerdict {
            positive: best_norm <= T::one() + T::lit(POSITIVITY_TOL),
            max_norm: best_norm,
            witness: pure_state(best),
        }
    }
}

fn direction<T: Real>(theta: T, phi: T) -> [T; 3] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

fn pure_state<T: Real>(n: [T; 3]) -> QubitState<T> {
    let half = T::lit(0.5);
    QubitState::raw(
        half * (T::one() + n[2]),
        num_complex::Complex::new(half * n[0], half * n[1]),
    )
}

/// Coordinate ascent on `(theta, phi)` with step halving.
fn refine<T: Real, F: Fn([T; 3]) -> T>(f: &F, mut theta: T, mut phi: T) -> ([T; 3], T) {
    let mut value = f(direction(theta, phi));
    let mut step = T::lit(0.1);
    while step > T::lit(1e-10) {
        let mut moved = false;
        for (dt, dp) in [(step, T::zero()), (-step, T::zero()), (T::zero(), step), (T::zero(), -step)] {
            let v = f(direction(theta + dt, phi + dp));
            if v > value {
                value = v;
                theta += dt;
                phi += dp;
                moved = true;
            }
        }
        if !moved {
            step /= T::lit(2.0);
        }
    }
    (direction(theta, phi), value)
}

/// Checks that the snapshot maps the Bloch ball into itself.
pub fn is_positive<T: Real>(snap: &MapSnapshot<T>, samples: usize) -> Result<PositivityVerdict<T>> {
    Ok(PositivityProbe::new(samples)?.check(snap))
}
