use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which integro-differential equation generates the dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EquationKind {
    /// `drho/dt = int_0^t k(t') L rho(t - t') dt'`.
    MemoryKernel,
    /// `drho/dt = L int_0^t k(t') exp(L t') rho(t - t') dt'`.
    PostMarkovian,
}

impl EquationKind {
    pub const ALL: [EquationKind; 2] = [EquationKind::MemoryKernel, EquationKind::PostMarkovian];

    pub fn tag(self) -> &'static str {
        match self {
            EquationKind::MemoryKernel => "mem",
            EquationKind::PostMarkovian => "post",
        }
    }
}

impl fmt::Display for EquationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for EquationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mem" | "memory" | "memory-kernel" | "memorykernel" => Ok(EquationKind::MemoryKernel),
            "post" | "post-markovian" | "postmarkovian" | "pm" => Ok(EquationKind::PostMarkovian),
            other => Err(Error::InvalidArgument(format!(
                "unknown equation kind '{other}' (expected mem or post)"
            ))),
        }
    }
}

/// Physical parameters: dissipation constant `gamma0`, kernel decay rate
/// `gamma` and mean reservoir occupation `n_occ`.
///
/// Time is measured internally as `tau = gamma * t`; every closed-form
/// quantity depends only on `R = gamma0 (2N + 1) / gamma`, `N` and `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapParams<T> {
    gamma0: T,
    gamma: T,
    n_occ: T,
}

impl<T: Real> MapParams<T> {
    /// From physical rates. `gamma0 = 0` is accepted (frozen dynamics).
    pub fn new(gamma0: T, gamma: T, n_occ: T) -> Result<Self> {
        check(gamma0 >= T::zero() && gamma0.is_finite(), "gamma0", gamma0)?;
        check(gamma > T::zero() && gamma.is_finite(), "gamma", gamma)?;
        check(n_occ >= T::zero() && n_occ.is_finite(), "n_occ", n_occ)?;
        Ok(Self {
            gamma0,
            gamma,
            n_occ,
        })
    }

    /// From the dimensionless ratio with `gamma = 1` as the time unit.
    pub fn from_ratio(r: T, n_occ: T) -> Result<Self> {
        check(r >= T::zero() && r.is_finite(), "R", r)?;
        check(n_occ >= T::zero() && n_occ.is_finite(), "n_occ", n_occ)?;
        let gamma0 = r / (T::lit(2.0) * n_occ + T::one());
        Self::new(gamma0, T::one(), n_occ)
    }

    #[inline]
    pub fn gamma0(&self) -> T {
        self.gamma0
    }

    #[inline]
    pub fn gamma(&self) -> T {
        self.gamma
    }

    #[inline]
    pub fn n_occ(&self) -> T {
        self.n_occ
    }

    /// `2N + 1`.
    #[inline]
    pub fn thermal_factor(&self) -> T {
        T::lit(2.0) * self.n_occ + T::one()
    }

    /// `R = gamma0 (2N + 1) / gamma`.
    #[inline]
    pub fn r(&self) -> T {
        self.gamma0 * self.thermal_factor() / self.gamma
    }

    /// Stationary excited population `N / (2N + 1)`.
    #[inline]
    pub fn stationary_population(&self) -> T {
        self.n_occ / self.thermal_factor()
    }

    /// Dimensionless time for a physical time.
    #[inline]
    pub fn tau_of(&self, t: T) -> T {
        self.gamma * t
    }

    /// Whether the map lies in the regime where the equation is known to
    /// generate a positive map: `4R <= 1` for the memory-kernel equation,
    /// unrestricted for the post-Markovian one.
    pub fn in_validity_regime(&self, kind: EquationKind) -> bool {
        match kind {
            EquationKind::MemoryKernel => {
                T::lit(4.0) * self.r() <= T::one() + T::lit(super::profile::BRANCH_TOL)
            }
            EquationKind::PostMarkovian => true,
        }
    }
}

fn check<T: Real>(ok: bool, name: &'static str, value: T) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: value.as_f64(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_round_trips() {
        let p = MapParams::<f64>::from_ratio(0.2, 1.0).unwrap();
        assert!((p.r() - 0.2).abs() < 1e-15);
        assert_eq!(p.gamma(), 1.0);
        let q = MapParams::<f64>::new(0.05, 2.0, 3.0).unwrap();
        assert!((q.r() - 0.05 * 7.0 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(MapParams::<f64>::new(0.1, 0.0, 1.0).is_err());
        assert!(MapParams::<f64>::new(-0.1, 1.0, 1.0).is_err());
        assert!(MapParams::<f64>::new(0.1, 1.0, -1.0).is_err());
        assert!(MapParams::<f64>::from_ratio(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn validity_regime() {
        let k = EquationKind::MemoryKernel;
        assert!(MapParams::<f64>::from_ratio(0.25, 1.0).unwrap().in_validity_regime(k));
        assert!(!MapParams::<f64>::from_ratio(0.26, 1.0).unwrap().in_validity_regime(k));
        assert!(MapParams::<f64>::from_ratio(50.0, 1.0)
            .unwrap()
            .in_validity_regime(EquationKind::PostMarkovian));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("mem".parse::<EquationKind>().unwrap(), EquationKind::MemoryKernel);
        assert_eq!("post".parse::<EquationKind>().unwrap(), EquationKind::PostMarkovian);
        assert!("both".parse::<EquationKind>().is_err());
    }
}
