use crate::dynamics::MapParams;
use crate::scalar::Real;

/// Real 4x4 matrix.
pub type Mat4<T> = [[T; 4]; 4];

/// Markovian thermal generator acting on the coherence vector
/// `(pe, Re b, Im b, 1)`.
///
/// Emission at rate `gamma0 (N + 1)` and absorption at rate `gamma0 N` give
/// `pe' = -gamma0 (2N + 1) pe + gamma0 N` and `b' = -gamma0 (2N + 1)/2 b`.
/// The last row is zero: the trace component never changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorMatrix<T> {
    pub m: Mat4<T>,
}

impl<T: Real> GeneratorMatrix<T> {
    pub fn thermal(p: &MapParams<T>) -> Self {
        let z = T::zero();
        let emission = p.gamma0() * (p.n_occ() + T::one());
        let absorption = p.gamma0() * p.n_occ();
        let total = emission + absorption;
        let half = total / T::lit(2.0);
        Self {
            m: [
                [-total, z, z, absorption],
                [z, -half, z, z],
                [z, z, -half, z],
                [z, z, z, z],
            ],
        }
    }

    #[inline]
    pub fn apply(&self, x: &[T; 4]) -> [T; 4] {
        mat_vec(&self.m, x)
    }

    /// `exp(L h)` by scaling and squaring of a truncated Taylor series.
    pub fn exp(&self, h: T) -> Mat4<T> {
        let mut a = self.m;
        for row in a.iter_mut() {
            for x in row.iter_mut() {
                *x *= h;
            }
        }
        let norm = a
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<T>())
            .fold(T::zero(), T::max);
        let mut squarings = 0;
        let mut scale = T::one();
        while norm * scale > T::lit(0.25) {
            scale /= T::lit(2.0);
            squarings += 1;
        }
        for row in a.iter_mut() {
            for x in row.iter_mut() {
                *x *= scale;
            }
        }
        let mut result = identity();
        let mut term = identity();
        for k in 1..=18 {
            term = mat_mul(&term, &a);
            let inv = T::one() / T::from_usize_lossy(k);
            for row in term.iter_mut() {
                for x in row.iter_mut() {
                    *x *= inv;
                }
            }
            for i in 0..4 {
                for j in 0..4 {
                    result[i][j] += term[i][j];
                }
            }
        }
        for _ in 0..squarings {
            result = mat_mul(&result, &result);
        }
        result
    }
}

pub fn identity<T: Real>() -> Mat4<T> {
    let mut m = [[T::zero(); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = T::one();
    }
    m
}

#[inline]
pub fn mat_vec<T: Real>(m: &Mat4<T>, x: &[T; 4]) -> [T; 4] {
    let mut out = [T::zero(); 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
    }
    out
}

pub fn mat_mul<T: Real>(a: &Mat4<T>, b: &Mat4<T>) -> Mat4<T> {
    let mut out = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = T::zero();
            for k in 0..4 {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}
