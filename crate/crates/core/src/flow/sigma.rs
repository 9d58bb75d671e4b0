use crate::dynamics::{EquationKind, MapParams, SnapshotSource};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::StatePair;

/// Pair-independent part of the trace-distance dynamics at one parameter
/// point. The distance of a pair at time `tau` is
/// `sqrt(a0^2 xi(R)^2 + |b0|^2 xi(R/2)^2)`; the translation `t3` is common to
/// both states and drops out of every difference.
#[derive(Debug, Clone, Copy)]
pub struct FlowKernel<T> {
    pub source: SnapshotSource<T>,
}

/// `(D, dD/dt)` of a pair characterised by `pop = a0^2`, `coh = |b0|^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSample<T> {
    pub distance: T,
    pub sigma: T,
}

impl<T: Real> FlowKernel<T> {
    pub fn new(kind: EquationKind, p: &MapParams<T>) -> Self {
        Self {
            source: SnapshotSource::new(kind, p),
        }
    }

    /// Profile values `(xi(R), xi'(R), xi(R/2), xi'(R/2))` in dimensionless time.
    #[inline]
    pub fn profiles(&self, tau: T) -> [T; 4] {
        let (x, dx) = self.source.population.eval(tau);
        let (y, dy) = self.source.coherence.eval(tau);
        [x, dx, y, dy]
    }

    /// Distance and its rate of change in physical time. Where the distance
    /// vanishes the rate is reported as zero.
    #[inline]
    pub fn sample(&self, pop: T, coh: T, prof: &[T; 4]) -> FlowSample<T> {
        let [x, dx, y, dy] = *prof;
        let d2 = pop * x * x + coh * y * y;
        let distance = d2.sqrt();
        let sigma = if distance > T::zero() {
            self.source.params.gamma() * (pop * x * dx + coh * y * dy) / distance
        } else {
            T::zero()
        };
        FlowSample { distance, sigma }
    }
}

/// Rate of change of the trace distance of `pair` at dimensionless time
/// `tau`, in physical inverse time:
/// `sigma = [a0^2 xi xi' + |b0|^2 xi_h xi_h'] / sqrt(a0^2 xi^2 + |b0|^2 xi_h^2)`
/// with `xi = xi(R)`, `xi_h = xi(R/2)`.
pub fn sigma_analytic<T: Real>(
    kind: EquationKind,
    p: &MapParams<T>,
    pair: &StatePair<T>,
    tau: T,
) -> Result<T> {
    if !(tau.is_finite() && tau >= T::zero()) {
        return Err(Error::InvalidTime(tau.as_f64()));
    }
    if pair.is_degenerate() {
        return Err(Error::DegeneratePair);
    }
    let k = FlowKernel::new(kind, p);
    let a0 = pair.a0();
    Ok(k.sample(a0 * a0, pair.b0().norm_sqr(), &k.profiles(tau)).sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::QubitState;
    use num_complex::Complex;

    fn params(r: f64, n: f64) -> MapParams<f64> {
        MapParams::from_ratio(r, n).unwrap()
    }

    fn orthogonal() -> StatePair<f64> {
        StatePair::new(QubitState::excited(), QubitState::ground())
    }

    #[test]
    fn physical_regime_contracts() {
        let s = sigma_analytic(EquationKind::MemoryKernel, &params(0.1, 1.0), &orthogonal(), 1.0).unwrap();
        assert!(s < 0.0);
    }

    #[test]
    fn population_only_pair_collapses_to_single_term() {
        let p = params(0.2, 1.0);
        for kind in EquationKind::ALL {
            for tau in [0.5, 3.0] {
                let s = sigma_analytic(kind, &p, &orthogonal(), tau).unwrap();
                let d = crate::dynamics::xi_derivative(kind, 0.2, tau).unwrap();
                assert!((s - d).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn trigonometric_regime_has_backflow() {
        let p = params(0.5, 1.0);
        let positive = (1..400)
            .map(|i| i as f64 * 0.05)
            .any(|tau| sigma_analytic(EquationKind::MemoryKernel, &p, &orthogonal(), tau).unwrap() > 0.0);
        assert!(positive);
    }

    #[test]
    fn identical_pair_rejected() {
        let s = QubitState::new(0.4, Complex::new(0.1, 0.1)).unwrap();
        let res = sigma_analytic(EquationKind::PostMarkovian, &params(0.2, 1.0), &StatePair::new(s, s), 1.0);
        assert_eq!(res, Err(Error::DegeneratePair));
    }
}
