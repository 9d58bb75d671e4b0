//! Spin-1/2 density matrices, their validity and trace-distance geometry.
//!
//! Basis convention: `|0>` is the ground level and `|1>` the excited level,
//! so the raising operator maps `|0>` to `|1>`. A state stores the excited
//! population `<1|rho|1>` and the coherence `<1|rho|0>`; the ground population
//! and the conjugate coherence are implied.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance of the positivity (determinant) test.
pub const STATE_TOL: f64 = 1e-12;

/// A 2x2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState<T> {
    population_e: T,
    coherence: Complex<T>,
}

impl<T: Real> QubitState<T> {
    /// Builds a state and checks trace-one positivity within [`STATE_TOL`].
    pub fn new(population_e: T, coherence: Complex<T>) -> Result<Self> {
        let s = Self::raw(population_e, coherence);
        s.check()?;
        Ok(s)
    }

    /// Builds the matrix without validation. Used for affine images of maps
    /// outside their positivity regime, which must not be clamped.
    pub fn raw(population_e: T, coherence: Complex<T>) -> Self {
        Self {
            population_e,
            coherence,
        }
    }

    pub fn excited() -> Self {
        Self::raw(T::one(), Complex::new(T::zero(), T::zero()))
    }

    pub fn ground() -> Self {
        Self::raw(T::zero(), Complex::new(T::zero(), T::zero()))
    }

    pub fn maximally_mixed() -> Self {
        Self::raw(T::lit(0.5), Complex::new(T::zero(), T::zero()))
    }

    /// Inverse of [`bloch_of`]: `pe = (1 + z)/2`, `b = (x + iy)/2`.
    pub fn from_bloch(v: [T; 3]) -> Result<Self> {
        let half = T::lit(0.5);
        Self::new(
            half * (T::one() + v[2]),
            Complex::new(half * v[0], half * v[1]),
        )
    }

    #[inline]
    pub fn population_e(&self) -> T {
        self.population_e
    }

    #[inline]
    pub fn population_g(&self) -> T {
        T::one() - self.population_e
    }

    #[inline]
    pub fn coherence(&self) -> Complex<T> {
        self.coherence
    }

    /// Dense matrix in the `{|0>, |1>}` basis, `m[row][col]`.
    pub fn matrix(&self) -> [[Complex<T>; 2]; 2] {
        let pg = Complex::new(self.population_g(), T::zero());
        let pe = Complex::new(self.population_e, T::zero());
        [[pg, self.coherence.conj()], [self.coherence, pe]]
    }

    /// `pe (1 - pe) - |b|^2`, the determinant; non-negative for valid states.
    pub fn determinant(&self) -> T {
        self.population_e * self.population_g() - self.coherence.norm_sqr()
    }

    pub fn is_valid(&self) -> bool {
        validate_state(self)
    }

    fn check(&self) -> Result<()> {
        let pe = self.population_e;
        if !pe.is_finite() || !self.coherence.re.is_finite() || !self.coherence.im.is_finite() {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let tol = T::tol(STATE_TOL);
        if pe < -tol || pe > T::one() + tol {
            return Err(Error::InvalidState(format!(
                "excited population {} outside [0, 1]",
                pe
            )));
        }
        if self.determinant() < -tol {
            return Err(Error::InvalidState(format!(
                "|b|^2 = {} exceeds pe(1 - pe) = {}",
                self.coherence.norm_sqr(),
                pe * self.population_g()
            )));
        }
        Ok(())
    }
}

/// True iff the state is a trace-one positive semidefinite matrix within
/// [`STATE_TOL`]. Hermiticity and unit trace hold structurally.
pub fn validate_state<T: Real>(s: &QubitState<T>) -> bool {
    s.check().is_ok()
}

/// Bloch vector `(2 Re b, 2 Im b, 2 pe - 1)`.
pub fn bloch_of<T: Real>(s: &QubitState<T>) -> [T; 3] {
    let two = T::lit(2.0);
    [
        two * s.coherence.re,
        two * s.coherence.im,
        two * s.population_e - T::one(),
    ]
}

/// Trace distance `(1/2) Tr|rho1 - rho2|`.
///
/// For a qubit the difference matrix has eigenvalues `±sqrt(a^2 + |b|^2)`,
/// where `a` and `b` are the population and coherence differences.
pub fn trace_distance<T: Real>(s1: &QubitState<T>, s2: &QubitState<T>) -> Result<T> {
    s1.check()?;
    s2.check()?;
    Ok(raw_trace_distance(s1, s2))
}

/// Trace distance without validating the inputs; used on raw map images.
#[inline]
pub fn raw_trace_distance<T: Real>(s1: &QubitState<T>, s2: &QubitState<T>) -> T {
    let a = s1.population_e - s2.population_e;
    let b = s1.coherence - s2.coherence;
    a.hypot(b.norm())
}

/// An ordered pair of initial states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatePair<T> {
    pub first: QubitState<T>,
    pub second: QubitState<T>,
}

impl<T: Real> StatePair<T> {
    pub fn new(first: QubitState<T>, second: QubitState<T>) -> Self {
        Self { first, second }
    }

    /// Pure states at `n` and `-n` on the Bloch sphere. `n` is normalised.
    pub fn antipodal(n: [T; 3]) -> Self {
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let u = [n[0] / norm, n[1] / norm, n[2] / norm];
        let half = T::lit(0.5);
        let mk = |s: T| {
            QubitState::raw(
                half * (T::one() + s * u[2]),
                Complex::new(half * s * u[0], half * s * u[1]),
            )
        };
        Self::new(mk(T::one()), mk(-T::one()))
    }

    /// Excited-population difference.
    #[inline]
    pub fn a0(&self) -> T {
        self.first.population_e - self.second.population_e
    }

    /// Coherence difference.
    #[inline]
    pub fn b0(&self) -> Complex<T> {
        self.first.coherence - self.second.coherence
    }

    pub fn is_degenerate(&self) -> bool {
        self.a0() == T::zero() && self.b0().norm_sqr() == T::zero()
    }

    pub fn swapped(&self) -> Self {
        Self::new(self.second, self.first)
    }

    pub fn initial_distance(&self) -> T {
        raw_trace_distance(&self.first, &self.second)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(pe: f64, re: f64, im: f64) -> QubitState<f64> {
        QubitState::new(pe, Complex::new(re, im)).unwrap()
    }

    #[test]
    fn orthogonal_pure_states_are_maximally_distant() {
        let d = trace_distance(&QubitState::<f64>::excited(), &QubitState::ground()).unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn distance_to_self_is_zero() {
        let s = st(0.3, 0.1, -0.2);
        assert_eq!(trace_distance(&s, &s).unwrap(), 0.0);
    }

    #[test]
    fn distance_of_diagonal_and_coherent_state() {
        // Oracle: the 2x2 Hermitian difference [[-a, -b*],[ -b, a]] has
        // eigenvalues ±sqrt(a^2+|b|^2); computed here via the characteristic
        // polynomial, independent of the hypot route.
        let s1 = st(0.8, 0.0, 0.0);
        let s2 = st(0.3, 0.1, 0.0);
        let m1 = s1.matrix();
        let m2 = s2.matrix();
        let d00 = (m1[0][0] - m2[0][0]).re;
        let d11 = (m1[1][1] - m2[1][1]).re;
        let off = (m1[1][0] - m2[1][0]).norm_sqr();
        let tr = d00 + d11;
        let det = d00 * d11 - off;
        let disc = (tr * tr / 4.0 - det).sqrt();
        let e1 = tr / 2.0 + disc;
        let e2 = tr / 2.0 - disc;
        let oracle = 0.5 * (e1.abs() + e2.abs());
        let d = trace_distance(&s1, &s2).unwrap();
        assert!((d - oracle).abs() < 1e-15);
        assert!((d - 0.509_901_951_359_278_5).abs() < 1e-15);
    }

    #[test]
    fn validity_predicate() {
        assert!(validate_state(&QubitState::raw(0.5, Complex::new(0.5, 0.0))));
        assert!(!validate_state(&QubitState::raw(0.1, Complex::new(0.5, 0.0))));
        assert!(validate_state(&QubitState::raw(1.0, Complex::new(0.0, 0.0))));
        assert!(!validate_state(&QubitState::raw(1.2, Complex::new(0.0, 0.0))));
        assert!(!validate_state(&QubitState::raw(f64::NAN, Complex::new(0.0, 0.0))));
    }

    #[test]
    fn invalid_state_is_rejected_by_distance() {
        let bad = QubitState::raw(0.1, Complex::new(0.5, 0.0));
        assert!(matches!(
            trace_distance(&bad, &QubitState::ground()),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn bloch_vectors() {
        assert_eq!(bloch_of(&QubitState::<f64>::maximally_mixed()), [0.0, 0.0, 0.0]);
        assert_eq!(bloch_of(&QubitState::<f64>::excited()), [0.0, 0.0, 1.0]);
        let v = bloch_of(&st(0.25, 0.3, -0.1));
        assert!((v[0] - 0.6).abs() < 1e-15);
        assert!((v[1] + 0.2).abs() < 1e-15);
        assert!((v[2] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn antipodal_pair_has_unit_distance() {
        let p = StatePair::<f64>::antipodal([1.0, 2.0, -0.5]);
        assert!(p.first.is_valid() && p.second.is_valid());
        assert!((p.initial_distance() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn works_in_single_precision() {
        let s = QubitState::<f32>::from_bloch([0.6, 0.0, 0.8]).unwrap();
        assert!(s.is_valid());
        let d = trace_distance(&s, &QubitState::maximally_mixed()).unwrap();
        assert!((d - 0.5).abs() < 1e-6);
    }
}
