//! Dormand-Prince 5(4) with local error control, stepping exactly onto the
//! requested output times.

use crate::error::{Error, Result};
use crate::scalar::Real;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const MAX_STEPS: usize = 5_000_000;

/// Step bookkeeping of an adaptive run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest accepted local error estimate, in units of the tolerance.
    pub max_error_ratio: f64,
}

/// Integrates `y' = f(t, y)` from `times[0]` and returns `y` at every entry
/// of `times` (which must be non-decreasing). Local error per step is held
/// below `tol * max(1, |y|)` componentwise.
pub fn integrate<T, F, const D: usize>(
    mut f: F,
    y0: [T; D],
    times: &[T],
    tol: T,
) -> Result<(Vec<[T; D]>, StepStats)>
where
    T: Real,
    F: FnMut(T, &[T; D]) -> [T; D],
{
    let mut out = Vec::with_capacity(times.len());
    let mut stats = StepStats::default();
    let Some(&t0) = times.first() else {
        return Ok((out, stats));
    };
    out.push(y0);
    let span = *times.last().unwrap() - t0;
    let mut t = t0;
    let mut y = y0;
    let mut k0 = f(t, &y);
    let mut h = (tol.powf(T::lit(0.2)) * T::lit(0.1)).min(span.max(T::epsilon()));
    let c: [T; 7] = C.map(T::lit);
    let e: [T; 7] = E.map(T::lit);
    let a: [[T; 6]; 7] = A.map(|row| row.map(T::lit));

    for &target in &times[1..] {
        while t < target {
            if stats.accepted + stats.rejected > MAX_STEPS {
                return Err(Error::StepUnderflow {
                    t: t.as_f64(),
                    step: h.as_f64(),
                });
            }
            let remaining = target - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            if step < T::epsilon() * T::lit(16.0) * t.abs().max(T::one()) && !clipped {
                return Err(Error::StepUnderflow {
                    t: t.as_f64(),
                    step: step.as_f64(),
                });
            }

            let mut k = [[T::zero(); D]; 7];
            k[0] = k0;
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let w = a[s][j];
                    if w != T::zero() {
                        for i in 0..D {
                            ys[i] += step * w * kj[i];
                        }
                    }
                }
                if s == 6 {
                    // stage 7 is evaluated at the fifth-order solution (FSAL)
                    k[6] = f(t + step, &ys);
                    break;
                }
                k[s] = f(t + c[s] * step, &ys);
            }
            let mut y_new = y;
            for (j, kj) in k.iter().enumerate().take(6) {
                let w = a[6][j];
                for i in 0..D {
                    y_new[i] += step * w * kj[i];
                }
            }
            let mut err = T::zero();
            for i in 0..D {
                let mut ei = T::zero();
                for (j, kj) in k.iter().enumerate() {
                    ei += e[j] * kj[i];
                }
                let scale = tol * T::one().max(y[i].abs()).max(y_new[i].abs());
                err = err.max((step * ei).abs() / scale);
            }
            if !err.is_finite() {
                h = step / T::lit(10.0);
                stats.rejected += 1;
                continue;
            }
            let factor = if err == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
            };
            if err <= T::one() {
                t = if clipped { target } else { t + step };
                y = y_new;
                k0 = k[6];
                stats.accepted += 1;
                stats.max_error_ratio = stats.max_error_ratio.max(err.as_f64());
                if !clipped {
                    h = step * factor;
                } else {
                    h = h.max(step * factor);
                }
            } else {
                h = step * factor.min(T::one());
                stats.rejected += 1;
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}
