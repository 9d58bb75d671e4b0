use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::analysis::eigen::hermitian_eigenvalues4;
use crate::dynamics::MapSnapshot;
use crate::scalar::Real;

/// `C = sum_{i,j} |i><j| ⊗ Phi(|i><j|)`, input index on the first factor,
/// row/column index `2 i + k`. Unnormalised: `Tr C = 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiMatrix<T> {
    pub m: [[Complex<T>; 4]; 4],
}

/// Outcome of a complete-positivity test; the eigenvalue is the witness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CpVerdict<T> {
    pub completely_positive: bool,
    pub min_eigenvalue: T,
}

impl<T: Real> ChoiMatrix<T> {
    pub fn eigenvalues(&self) -> [T; 4] {
        hermitian_eigenvalues4(&self.m)
    }

    /// Largest `|C - C^dagger|` entry.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.m[i][j] - self.m[j][i].conj()).norm());
            }
        }
        worst
    }

    /// Partial trace over the output factor; the identity iff the map
    /// preserves trace.
    pub fn partial_trace_output(&self) -> [[Complex<T>; 2]; 2] {
        let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = self.m[2 * i][2 * j] + self.m[2 * i + 1][2 * j + 1];
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..4).map(|i| self.m[i][i].re).sum()
    }
}

/// Builds the Choi matrix by applying the snapshot to each matrix unit.
pub fn choi_of<T: Real>(snap: &MapSnapshot<T>) -> ChoiMatrix<T> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut m = [[zero; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = [[zero; 2]; 2];
            unit[i][j] = one;
            let image = snap.apply_operator(&unit);
            for k in 0..2 {
                for l in 0..2 {
                    m[2 * i + k][2 * j + l] = image[k][l];
                }
            }
        }
    }
    ChoiMatrix { m }
}

/// CP iff the smallest Choi eigenvalue is at least `-tol`.
pub fn is_completely_positive<T: Real>(c: &ChoiMatrix<T>, tol: T) -> CpVerdict<T> {
    let min = c.eigenvalues()[0];
    CpVerdict {
        completely_positive: min >= -tol,
        min_eigenvalue: min,
    }
}
