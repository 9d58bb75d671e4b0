//! Affine Bloch maps, their action on states and the time-local rates.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::dynamics::params::{EquationKind, MapParams};
use crate::dynamics::profile::DecayProfile;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::QubitState;

/// The dynamical map frozen at one time, as a damping matrix
/// `diag(lambda1, lambda1, lambda3)` plus translation `(0, 0, t3)` acting on
/// Bloch vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapSnapshot<T> {
    pub lambda1: T,
    pub lambda3: T,
    pub t3: T,
}

/// Image of a state under a snapshot, with its validity flag. Images are
/// never clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapImage<T> {
    pub state: QubitState<T>,
    pub is_valid: bool,
}

impl<T: Real> MapSnapshot<T> {
    pub fn new(lambda1: T, lambda3: T, t3: T) -> Self {
        Self {
            lambda1,
            lambda3,
            t3,
        }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::one(), T::zero())
    }

    /// Weight of the initial excited population in the final one.
    #[inline]
    pub fn u(&self) -> T {
        (T::one() + self.t3 + self.lambda3) / T::lit(2.0)
    }

    /// Weight of the initial ground population in the final excited one.
    #[inline]
    pub fn v(&self) -> T {
        (T::one() + self.t3 - self.lambda3) / T::lit(2.0)
    }

    /// Coherence multiplier.
    #[inline]
    pub fn z(&self) -> T {
        self.lambda1
    }

    /// `rho11' = u rho11 + v rho00`, `rho10' = z rho10`.
    pub fn apply(&self, s: &QubitState<T>) -> MapImage<T> {
        let pe = self.u() * s.population_e() + self.v() * s.population_g();
        let state = QubitState::raw(pe, s.coherence() * self.z());
        MapImage {
            is_valid: state.is_valid(),
            state,
        }
    }

    /// Action on an arbitrary (not necessarily Hermitian) 2x2 operator in the
    /// `{|0>, |1>}` basis, by linear extension.
    pub fn apply_operator(&self, m: &[[Complex<T>; 2]; 2]) -> [[Complex<T>; 2]; 2] {
        let (u, v, z) = (self.u(), self.v(), self.z());
        let one = T::one();
        [
            [m[1][1] * (one - u) + m[0][0] * (one - v), m[0][1] * z],
            [m[1][0] * z, m[1][1] * u + m[0][0] * v],
        ]
    }

    /// Affine action on a Bloch vector.
    pub fn apply_bloch(&self, r: [T; 3]) -> [T; 3] {
        [
            self.lambda1 * r[0],
            self.lambda1 * r[1],
            self.lambda3 * r[2] + self.t3,
        ]
    }
}

/// The map of `kind` at dimensionless time `tau`:
/// `lambda1 = xi(R/2)`, `lambda3 = xi(R)`, `t3 = (xi(R) - 1)/(2N + 1)`.
pub fn snapshot<T: Real>(kind: EquationKind, p: &MapParams<T>, tau: T) -> Result<MapSnapshot<T>> {
    if !(tau.is_finite() && tau >= T::zero()) {
        return Err(Error::InvalidTime(tau.as_f64()));
    }
    Ok(SnapshotSource::new(kind, p).at(tau))
}

pub fn apply<T: Real>(snap: &MapSnapshot<T>, s: &QubitState<T>) -> MapImage<T> {
    snap.apply(s)
}

/// Resolved profiles for repeated snapshot evaluation at one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct SnapshotSource<T> {
    pub kind: EquationKind,
    pub params: MapParams<T>,
    pub population: DecayProfile<T>,
    pub coherence: DecayProfile<T>,
}

impl<T: Real> SnapshotSource<T> {
    pub fn new(kind: EquationKind, p: &MapParams<T>) -> Self {
        let r = p.r();
        Self {
            kind,
            params: *p,
            population: DecayProfile::new(kind, r),
            coherence: DecayProfile::new(kind, r / T::lit(2.0)),
        }
    }

    /// Caller guarantees `tau >= 0`.
    pub fn at(&self, tau: T) -> MapSnapshot<T> {
        let l3 = self.population.eval(tau).0;
        let l1 = self.coherence.eval(tau).0;
        MapSnapshot::new(l1, l3, (l3 - T::one()) / self.params.thermal_factor())
    }

    /// Earliest zero of either profile.
    pub fn first_singularity(&self) -> Option<T> {
        match (self.population.first_zero(), self.coherence.first_zero()) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    /// Rates of the time-local form at `tau`, in physical inverse time.
    pub fn rates(&self, tau: T) -> Result<TclRates<T>> {
        if let Some(z) = self.first_singularity() {
            if z <= tau {
                return Err(Error::SingularRate { tau: z.as_f64() });
            }
        }
        let (x, dx) = self.population.eval(tau);
        let (y, dy) = self.coherence.eval(tau);
        let g = self.params.gamma();
        let n = self.params.n_occ();
        let nf = self.params.thermal_factor();
        let log_pop = g * dx / x;
        let log_coh = g * dy / y;
        Ok(TclRates {
            gamma1: -(n + T::one()) / nf * log_pop,
            gamma2: -n / nf * log_pop,
            gamma3: (log_pop / T::lit(2.0) - log_coh) / T::lit(2.0),
        })
    }
}

/// Emission, absorption and dephasing rates of the equivalent time-local
/// equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TclRates<T> {
    pub gamma1: T,
    pub gamma2: T,
    pub gamma3: T,
}

impl<T: Real> TclRates<T> {
    /// Right-hand side of the time-local equation on `(pe, Re b, Im b)`:
    /// `pe' = -gamma1 pe + gamma2 (1 - pe)`,
    /// `b' = -((gamma1 + gamma2)/2 + 2 gamma3) b`.
    pub fn generate(&self, pe: T, b: Complex<T>) -> (T, Complex<T>) {
        let dpe = -self.gamma1 * pe + self.gamma2 * (T::one() - pe);
        let k = (self.gamma1 + self.gamma2) / T::lit(2.0) + T::lit(2.0) * self.gamma3;
        (dpe, -b * k)
    }
}

/// Time-local rates at dimensionless time `tau`.
pub fn tcl_rates<T: Real>(kind: EquationKind, p: &MapParams<T>, tau: T) -> Result<TclRates<T>> {
    if !(tau.is_finite() && tau >= T::zero()) {
        return Err(Error::InvalidTime(tau.as_f64()));
    }
    SnapshotSource::new(kind, p).rates(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::profile::xi;
    use EquationKind::*;

    fn params(r: f64, n: f64) -> MapParams<f64> {
        MapParams::from_ratio(r, n).unwrap()
    }

    #[test]
    fn identity_at_origin() {
        for kind in EquationKind::ALL {
            let s = snapshot(kind, &params(0.2, 1.0), 0.0).unwrap();
            assert_eq!(s, MapSnapshot::identity());
        }
    }

    #[test]
    fn thermal_stationary_state() {
        let p = params(0.24, 1.0);
        let far = snapshot(MemoryKernel, &p, 500.0).unwrap();
        assert!(far.lambda1.abs() < 1e-12 && far.lambda3.abs() < 1e-12);
        assert!((far.t3 + 1.0 / 3.0).abs() < 1e-12);
        assert!((far.u() - 1.0 / 3.0).abs() < 1e-12 && (far.v() - 1.0 / 3.0).abs() < 1e-12);
        let mid = snapshot(MemoryKernel, &p, 50.0).unwrap();
        assert!(mid.lambda1.abs() < 1e-2 && mid.lambda3.abs() < 1e-6);
    }

    #[test]
    fn translation_vanishes_at_high_temperature() {
        let p = params(0.2, 1e12);
        for tau in [0.5, 5.0, 50.0] {
            assert!(snapshot(PostMarkovian, &p, tau).unwrap().t3.abs() < 1e-12);
        }
    }

    #[test]
    fn apply_identity_and_forgetful_maps() {
        let s = QubitState::<f64>::new(0.3, Complex::new(0.1, -0.2)).unwrap();
        let img = MapSnapshot::identity().apply(&s);
        assert_eq!(img.state, s);
        assert!(img.is_valid);
        // u = v: populations forget the initial condition
        let snap = MapSnapshot::new(0.37, 0.0, -0.2);
        let out = snap.apply(&s).state;
        assert!((out.population_e() - snap.u()).abs() < 1e-15);
        assert!((out.coherence() - s.coherence() * 0.37).norm() < 1e-15);
    }

    #[test]
    fn mixed_input_gets_translation_only() {
        let p = params(0.1, 1.0);
        let snap = snapshot(MemoryKernel, &p, 1.0).unwrap();
        let out = snap.apply(&QubitState::maximally_mixed()).state;
        assert!((out.population_e() - (snap.u() + snap.v()) / 2.0).abs() < 1e-15);
        let x = xi(MemoryKernel, 0.1, 1.0).unwrap();
        assert!((out.population_e() - (1.0 + (x - 1.0) / 3.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn apply_does_not_clamp_unphysical_images() {
        let p = params(1.0, 0.0);
        let mut seen_invalid = false;
        for i in 0..200 {
            let snap = snapshot(MemoryKernel, &p, i as f64 * 0.1).unwrap();
            let img = snap.apply(&QubitState::excited());
            seen_invalid |= !img.is_valid;
        }
        assert!(seen_invalid);
    }

    #[test]
    fn operator_action_matches_state_action() {
        let snap = MapSnapshot::new(0.6, 0.4, -0.1);
        let s = QubitState::new(0.7, Complex::new(0.2, 0.1)).unwrap();
        let m = snap.apply_operator(&s.matrix());
        let img = snap.apply(&s).state.matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j] - img[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rates_vanish_at_origin() {
        for kind in EquationKind::ALL {
            let r = tcl_rates(kind, &params(0.2, 1.0), 0.0).unwrap();
            assert_eq!((r.gamma1, r.gamma2, r.gamma3), (0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn emission_absorption_ratio() {
        for kind in EquationKind::ALL {
            for tau in [0.3, 2.0, 9.0] {
                let r = tcl_rates(kind, &params(0.2, 1.0), tau).unwrap();
                assert!((r.gamma1 / r.gamma2 - 2.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn dephasing_rate_negative_for_memory_kernel() {
        for tau in [0.5, 1.0, 5.0] {
            let r = tcl_rates(MemoryKernel, &params(0.2, 1.0), tau).unwrap();
            assert!(r.gamma3 < 0.0, "tau={tau} gamma3={}", r.gamma3);
        }
    }

    #[test]
    fn rates_are_physical_units() {
        let p1 = MapParams::<f64>::new(0.1, 1.0, 1.0).unwrap();
        let p2 = MapParams::new(0.2, 2.0, 1.0).unwrap();
        let a = tcl_rates(MemoryKernel, &p1, 1.5).unwrap();
        let b = tcl_rates(MemoryKernel, &p2, 1.5).unwrap();
        assert!((b.gamma1 - 2.0 * a.gamma1).abs() < 1e-15);
        assert!((b.gamma3 - 2.0 * a.gamma3).abs() < 1e-15);
    }

    #[test]
    fn singular_rate_reports_crossing() {
        let p = params(0.5, 1.0);
        match tcl_rates(MemoryKernel, &p, 30.0) {
            Err(Error::SingularRate { tau }) => {
                assert!(xi(MemoryKernel, 0.5, tau).unwrap().abs() < 1e-12);
            }
            other => panic!("expected singular rate, got {other:?}"),
        }
        assert!(tcl_rates(MemoryKernel, &p, 1.0).is_ok());
    }
}
