//! Direct Volterra integration with trapezoidal quadrature.
//!
//! Works on the integro-differential form itself, with no use of the
//! exponential-kernel reduction: the memory integral is re-summed over the
//! whole history at every step, and the outer time step is the implicit
//! trapezoidal rule. Both parts are second order.

use crate::dynamics::{EquationKind, MapParams};
use crate::error::{Error, Result};
use crate::oracle::generator::{mat_vec, GeneratorMatrix, Mat4};
use crate::oracle::trajectory::{state_from_vec, vec_from_state, AugmentedTrajectory, IntegratorStats};
use crate::scalar::Real;
use crate::state::QubitState;

/// Minimum number of quadrature steps.
pub const MIN_STEPS: usize = 100;

enum Kernel<T> {
    /// `k(m h)` times the identity.
    Scalar(Vec<T>),
    /// `k(m h) exp(L m h)`.
    Matrix(Vec<Mat4<T>>),
}

impl<T: Real> Kernel<T> {
    #[inline]
    fn accumulate(&self, lag: usize, weight: T, x: &[T; 4], acc: &mut [T; 4]) {
        match self {
            Kernel::Scalar(k) => {
                let w = weight * k[lag];
                for i in 0..4 {
                    acc[i] += w * x[i];
                }
            }
            Kernel::Matrix(k) => {
                let y = mat_vec(&k[lag], x);
                for i in 0..4 {
                    acc[i] += weight * y[i];
                }
            }
        }
    }
}

/// Integrates `kind` on a uniform grid of `steps` intervals over `[0, t_end]`
/// (physical time).
pub fn integrate_quadrature<T: Real>(
    kind: EquationKind,
    g: &GeneratorMatrix<T>,
    p: &MapParams<T>,
    s0: &QubitState<T>,
    t_end: T,
    steps: usize,
) -> Result<AugmentedTrajectory<T>> {
    if steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!(
            "quadrature needs at least {MIN_STEPS} steps, got {steps}"
        )));
    }
    if !(t_end.is_finite() && t_end > T::zero()) {
        return Err(Error::InvalidTime(t_end.as_f64()));
    }
    let gamma = p.gamma();
    let h = t_end / T::from_usize_lossy(steps);
    let half = T::lit(0.5);

    let decay: Vec<T> = (0..=steps)
        .map(|m| gamma * (-gamma * h * T::from_usize_lossy(m)).exp())
        .collect();
    let kernel = match kind {
        EquationKind::MemoryKernel => Kernel::Scalar(decay),
        EquationKind::PostMarkovian => {
            let step = g.exp(h);
            let mut power = crate::oracle::generator::identity();
            let mut table = Vec::with_capacity(steps + 1);
            for k in decay {
                let mut m = power;
                for row in m.iter_mut() {
                    for x in row.iter_mut() {
                        *x *= k;
                    }
                }
                table.push(m);
                power = crate::oracle::generator::mat_mul(&power, &step);
            }
            Kernel::Matrix(table)
        }
    };
    // The kernel's lag-zero weight is gamma times the identity for both kinds.
    let k0 = gamma;

    let mut rho: Vec<[T; 4]> = Vec::with_capacity(steps + 1);
    let mut aux: Vec<[T; 4]> = Vec::with_capacity(steps + 1);
    rho.push(vec_from_state(s0));
    aux.push([T::zero(); 4]);
    // drho/dt at the current node
    let mut deriv = [T::zero(); 4];
    let mut max_residual = T::zero();

    // (I - beta L) x = rhs on the first three components, with x[3] = 1
    let beta = h * h * k0 / T::lit(4.0);
    let system = {
        let mut a = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] = if i == j { T::one() } else { T::zero() } - beta * g.m[i][j];
            }
        }
        a
    };

    for n in 1..=steps {
        // history part of the memory integral at t_n, excluding the new node
        let mut hist = [T::zero(); 4];
        kernel.accumulate(n, half * h, &rho[0], &mut hist);
        for (j, x) in rho.iter().enumerate().skip(1) {
            kernel.accumulate(n - j, h, x, &mut hist);
        }
        let prev = rho[n - 1];
        let l_hist = g.apply(&hist);
        let mut rhs = [T::zero(); 3];
        for i in 0..3 {
            rhs[i] = prev[i] + half * h * (deriv[i] + l_hist[i]) + beta * g.m[i][3];
        }
        let x = solve3(&system, &rhs);
        let next = [x[0], x[1], x[2], T::one()];

        let mut memory = hist;
        for i in 0..4 {
            memory[i] += half * h * k0 * next[i];
        }
        let new_deriv = g.apply(&memory);
        for i in 0..3 {
            let r = next[i] - prev[i] - half * h * (deriv[i] + new_deriv[i]);
            max_residual = max_residual.max(r.abs());
        }
        deriv = new_deriv;
        rho.push(next);
        aux.push(match kind {
            EquationKind::MemoryKernel => new_deriv,
            EquationKind::PostMarkovian => memory,
        });
    }

    let times = (0..=steps).map(|i| h * T::from_usize_lossy(i)).collect::<Vec<_>>();
    Ok(AugmentedTrajectory {
        times,
        states: rho.iter().map(|x| state_from_vec(x)).collect(),
        aux,
        stats: IntegratorStats {
            steps,
            rejected: 0,
            max_residual: max_residual.as_f64(),
        },
    })
}

fn solve3<T: Real>(a: &[[T; 3]; 3], b: &[T; 3]) -> [T; 3] {
    // Gaussian elimination with partial pivoting.
    let mut m = [[T::zero(); 4]; 3];
    for i in 0..3 {
        m[i][..3].copy_from_slice(&a[i]);
        m[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                let v = m[col][k];
                m[row][k] -= f * v;
            }
        }
    }
    let mut x = [T::zero(); 3];
    for i in (0..3).rev() {
        let mut acc = m[i][3];
        for j in i + 1..3 {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    x
}
