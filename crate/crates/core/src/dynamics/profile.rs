//! The scalar decay profile `xi(R, tau)` of both equations.
//!
//! Each damping-basis component of either equation obeys
//! `xi'' + 2a xi' + R xi = 0` with `xi(0) = 1`, `xi'(0) = 0`, where the
//! damping constant is `a = 1/2` for the memory-kernel equation and
//! `a = (R + 1)/2` for the post-Markovian one. Writing `w = a^2 - R`:
//!
//! ```text
//! xi(tau)  = exp(-a tau) [C(w, tau) + a S(w, tau)]
//! xi'(tau) = -R exp(-a tau) S(w, tau)
//! ```
//!
//! with `C = cosh(sqrt(w) tau)`, `S = sinh(sqrt(w) tau)/sqrt(w)` (their
//! trigonometric continuations for `w < 0`, and `C = 1`, `S = tau` at
//! `w = 0`). For the memory kernel `w = 1/4 - R`, which reproduces the
//! hyperbolic, critical and trigonometric branches at `4R < 1`, `4R = 1`,
//! `4R > 1`. For the post-Markovian equation `w = (R - 1)^2 / 4 >= 0`, so it
//! never oscillates; `R = 1` is its critical point.

use crate::dynamics::params::EquationKind;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Distance from a branch point below which the critical form is used.
pub const BRANCH_TOL: f64 = 1e-12;

/// `|w| tau^2` below which `C` and `S` are evaluated by truncated series.
const SERIES_LIMIT: f64 = 1e-4;

/// Qualitative shape of `xi` for a given ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Hyperbolic,
    Critical,
    Trigonometric,
}

/// Pre-resolved coefficients of `xi(kind, R, ·)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayProfile<T> {
    r: T,
    damping: T,
    disc: T,
    branch: Branch,
}

impl<T: Real> DecayProfile<T> {
    /// Caller guarantees `r >= 0` and finite.
    pub fn new(kind: EquationKind, r: T) -> Self {
        let half = T::lit(0.5);
        let quarter = T::lit(0.25);
        let (damping, disc, critical) = match kind {
            EquationKind::MemoryKernel => {
                let crit = (T::lit(4.0) * r - T::one()).abs() <= T::lit(BRANCH_TOL);
                (half, quarter - r, crit)
            }
            EquationKind::PostMarkovian => {
                let d = r - T::one();
                let crit = d.abs() <= T::lit(BRANCH_TOL);
                (half * (r + T::one()), quarter * d * d, crit)
            }
        };
        let (disc, branch) = if critical || disc == T::zero() {
            (T::zero(), Branch::Critical)
        } else if disc > T::zero() {
            (disc, Branch::Hyperbolic)
        } else {
            (disc, Branch::Trigonometric)
        };
        Self {
            r,
            damping,
            disc,
            branch,
        }
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn ratio(&self) -> T {
        self.r
    }

    /// Damping constant `a` and `sqrt(|w|)`.
    pub fn damping_and_frequency(&self) -> (T, T) {
        (self.damping, self.disc.abs().sqrt())
    }

    /// `(xi, dxi/dtau)` at `tau >= 0`.
    pub fn eval(&self, tau: T) -> (T, T) {
        let a = self.damping;
        let w = self.disc;
        let (ec, es) = if (w * tau * tau).abs() < T::lit(SERIES_LIMIT) {
            // exp(-a tau) C and exp(-a tau) S by series in y = w tau^2
            let y = w * tau * tau;
            let e = (-a * tau).exp();
            let c = T::one() + y / T::lit(2.0) + y * y / T::lit(24.0);
            let s = tau * (T::one() + y / T::lit(6.0) + y * y / T::lit(120.0));
            (e * c, e * s)
        } else if w > T::zero() {
            // Written in terms of exp(-(a - k) tau) and expm1(-2k tau) so
            // neither overflows nor cancels; a - k = min(R, 1) or 1/2 - k >= 0.
            let k = w.sqrt();
            let slow = (-(a - k) * tau).exp();
            let m = (-(k + k) * tau).exp_m1();
            let ec = slow * (T::lit(2.0) + m) / T::lit(2.0);
            let es = -slow * m / (k + k);
            (ec, es)
        } else {
            let q = (-w).sqrt();
            let e = (-a * tau).exp();
            let (sin, cos) = (q * tau).sin_cos();
            (e * cos, e * sin / q)
        };
        (ec + a * es, -self.r * es)
    }

    /// First positive zero of `xi`, if any. Only the trigonometric branch
    /// has one: `q tau = pi - atan(q / a)`.
    pub fn first_zero(&self) -> Option<T> {
        match self.branch {
            Branch::Trigonometric => {
                let q = (-self.disc).sqrt();
                Some((T::PI() - (q / self.damping).atan()) / q)
            }
            _ => None,
        }
    }
}

fn check_inputs<T: Real>(r: T, tau: T) -> Result<()> {
    if !(r.is_finite() && r >= T::zero()) {
        return Err(Error::InvalidParameter {
            name: "R",
            value: r.as_f64(),
        });
    }
    if !(tau.is_finite() && tau >= T::zero()) {
        return Err(Error::InvalidTime(tau.as_f64()));
    }
    Ok(())
}

/// `xi(R, tau)` for either equation.
pub fn xi<T: Real>(kind: EquationKind, r: T, tau: T) -> Result<T> {
    check_inputs(r, tau)?;
    Ok(DecayProfile::new(kind, r).eval(tau).0)
}

/// `d xi / d tau` in closed form.
pub fn xi_derivative<T: Real>(kind: EquationKind, r: T, tau: T) -> Result<T> {
    check_inputs(r, tau)?;
    Ok(DecayProfile::new(kind, r).eval(tau).1)
}
