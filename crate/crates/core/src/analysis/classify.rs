//! Regime classification combining all structural checks with the flow
//! measure.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::divisibility::{divisibility_scan, DivisibilityReport};
use crate::analysis::scan::{cp_scan, positivity_scan, tau_grid, CpScan, PositivityScan};
use crate::dynamics::{EquationKind, MapParams, SnapshotSource};
use crate::error::Result;
use crate::flow::{measure_with, MeasureOptions, MeasureResult};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions<T> {
    pub tau_end: T,
    /// Times for the positivity, CP and rate scans.
    pub tau_points: usize,
    pub positivity_samples: usize,
    pub divisibility_grid: usize,
    pub measure_budget: usize,
    pub cp_tol: T,
    pub divisibility_tol: T,
    /// Measure values above this count as backflow.
    pub measure_tol: T,
    pub seed: u64,
}

impl<T: Real> Default for ClassifyOptions<T> {
    fn default() -> Self {
        Self {
            tau_end: T::lit(20.0),
            tau_points: 201,
            positivity_samples: 1000,
            divisibility_grid: 200,
            measure_budget: 1000,
            cp_tol: T::lit(1e-10),
            divisibility_tol: T::lit(1e-9),
            measure_tol: T::lit(1e-8),
            seed: 0x0b1f_10a7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnphysicalReason {
    /// The equation is only derived for parameters where it preserves
    /// positivity (`4R <= 1` for the memory kernel).
    OutsideValidityRegime,
    PositivityBroken,
    NotCompletelyPositive,
}

/// Serialises as its display label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    TimeDependentMarkovianDivisible,
    TimeDependentMarkovianNondivisible,
    NonMarkovian,
    Unphysical(UnphysicalReason),
}

impl Serialize for Verdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Verdict {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let label = String::deserialize(d)?;
        Verdict::ALL
            .into_iter()
            .find(|v| v.to_string() == label)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown verdict '{label}'")))
    }
}

impl Verdict {
    pub const ALL: [Verdict; 6] = [
        Verdict::TimeDependentMarkovianDivisible,
        Verdict::TimeDependentMarkovianNondivisible,
        Verdict::NonMarkovian,
        Verdict::Unphysical(UnphysicalReason::OutsideValidityRegime),
        Verdict::Unphysical(UnphysicalReason::PositivityBroken),
        Verdict::Unphysical(UnphysicalReason::NotCompletelyPositive),
    ];
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::TimeDependentMarkovianDivisible => f.write_str("TimeDependentMarkovian-Divisible"),
            Verdict::TimeDependentMarkovianNondivisible => f.write_str("TimeDependentMarkovian-Nondivisible"),
            Verdict::NonMarkovian => f.write_str("NonMarkovian"),
            Verdict::Unphysical(UnphysicalReason::OutsideValidityRegime) => {
                f.write_str("Unphysical(outside validity regime)")
            }
            Verdict::Unphysical(UnphysicalReason::PositivityBroken) => f.write_str("Unphysical(positivity broken)"),
            Verdict::Unphysical(UnphysicalReason::NotCompletelyPositive) => {
                f.write_str("Unphysical(not completely positive)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport<T> {
    pub kind: EquationKind,
    pub r: T,
    pub n_occ: T,
    pub verdict: Verdict,
    pub in_validity_regime: bool,
    pub positivity: PositivityScan<T>,
    pub cp: CpScan<T>,
    pub divisibility: DivisibilityReport<T>,
    pub measure: MeasureResult<T>,
    /// Some pair gains distance at some time. Reported in every regime,
    /// including unphysical ones, as a diagnostic.
    pub backflow: bool,
    /// Extremes of the coherence-channel rate over the scan times where the
    /// rates exist, in physical inverse time.
    pub gamma3_min: T,
    pub gamma3_max: T,
}

/// Classifies one parameter point. Precedence: validity regime, positivity,
/// complete positivity, backflow, divisibility.
pub fn classify<T: Real>(kind: EquationKind, p: &MapParams<T>, opts: &ClassifyOptions<T>) -> Result<RegimeReport<T>> {
    let taus = tau_grid(opts.tau_end, opts.tau_points)?;
    let positivity = positivity_scan(kind, p, &taus, opts.positivity_samples)?;
    let cp = cp_scan(kind, p, &taus, opts.cp_tol);
    let divisibility = divisibility_scan(kind, p, opts.tau_end, opts.divisibility_grid, opts.divisibility_tol)?;
    let mut mo = MeasureOptions::new(opts.tau_end, opts.measure_budget);
    mo.seed = opts.seed;
    let measure = measure_with(kind, p, &mo)?;

    let src = SnapshotSource::new(kind, p);
    let (mut g3_min, mut g3_max) = (T::infinity(), T::neg_infinity());
    for &t in &taus {
        if let Ok(rates) = src.rates(t) {
            g3_min = g3_min.min(rates.gamma3);
            g3_max = g3_max.max(rates.gamma3);
        }
    }

    let in_regime = p.in_validity_regime(kind);
    let backflow = measure.value > opts.measure_tol;
    let verdict = if !in_regime {
        Verdict::Unphysical(UnphysicalReason::OutsideValidityRegime)
    } else if !positivity.positive {
        Verdict::Unphysical(UnphysicalReason::PositivityBroken)
    } else if !cp.completely_positive {
        Verdict::Unphysical(UnphysicalReason::NotCompletelyPositive)
    } else if backflow {
        Verdict::NonMarkovian
    } else if divisibility.divisible {
        Verdict::TimeDependentMarkovianDivisible
    } else {
        Verdict::TimeDependentMarkovianNondivisible
    };

    Ok(RegimeReport {
        kind,
        r: p.r(),
        n_occ: p.n_occ(),
        verdict,
        in_validity_regime: in_regime,
        positivity,
        cp,
        divisibility,
        measure,
        backflow,
        gamma3_min: g3_min,
        gamma3_max: g3_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> ClassifyOptions<f64> {
        ClassifyOptions {
            divisibility_grid: 60,
            measure_budget: 200,
            tau_points: 81,
            ..ClassifyOptions::default()
        }
    }

    #[test]
    fn physical_memory_kernel_is_nondivisible() {
        let p = MapParams::from_ratio(0.2, 1.0).unwrap();
        let r = classify(EquationKind::MemoryKernel, &p, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::TimeDependentMarkovianNondivisible);
        assert!(!r.backflow);
        assert!(r.gamma3_min < 0.0);
    }

    #[test]
    fn oscillating_memory_kernel_is_unphysical_with_backflow() {
        let p = MapParams::from_ratio(0.5, 10.0).unwrap();
        let r = classify(EquationKind::MemoryKernel, &p, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Unphysical(UnphysicalReason::OutsideValidityRegime));
        assert!(r.backflow);
    }

    #[test]
    fn post_markovian_is_cp_without_backflow() {
        let p = MapParams::from_ratio(0.5, 1.0).unwrap();
        let r = classify(EquationKind::PostMarkovian, &p, &quick()).unwrap();
        assert!(r.cp.completely_positive);
        assert!(!r.backflow);
        // the coherence channel rate stays positive, so no intermediate map
        // fails complete positivity
        assert!(r.gamma3_min >= 0.0);
        assert_eq!(r.verdict, Verdict::TimeDependentMarkovianDivisible);
    }

    #[test]
    fn cold_memory_kernel_fails_cp() {
        let p = MapParams::from_ratio(0.2, 0.1).unwrap();
        let r = classify(EquationKind::MemoryKernel, &p, &quick()).unwrap();
        assert_eq!(r.verdict, Verdict::Unphysical(UnphysicalReason::NotCompletelyPositive));
    }

    #[test]
    fn verdict_labels() {
        assert_eq!(
            Verdict::TimeDependentMarkovianNondivisible.to_string(),
            "TimeDependentMarkovian-Nondivisible"
        );
        assert_eq!(
            Verdict::Unphysical(UnphysicalReason::PositivityBroken).to_string(),
            "Unphysical(positivity broken)"
        );
    }
}
