//! Eigenvalues of small Hermitian matrices.
//!
//! A complex Hermitian `H = A + iB` is embedded as the real symmetric
//! `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
//! doubled; the embedding is diagonalised by cyclic Jacobi rotations.

use num_complex::Complex;

use crate::scalar::Real;

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues<T: Real, const N: usize>(mut a: [[T; N]; N]) -> [T; N] {
    for _sweep in 0..64 {
        let mut off = T::zero();
        let mut diag = T::zero();
        for i in 0..N {
            diag += a[i][i] * a[i][i];
            for j in i + 1..N {
                off += a[i][j] * a[i][j];
            }
        }
        if off <= T::epsilon() * T::epsilon() * diag.max(T::min_positive_value()) || off == T::zero() {
            break;
        }
        for p in 0..N {
            for q in p + 1..N {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (T::lit(2.0) * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev = [T::zero(); N];
    for i in 0..N {
        ev[i] = a[i][i];
    }
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev
}

/// Eigenvalues of a 4x4 Hermitian matrix, ascending. Only the lower
/// triangle's Hermitian part is assumed; the input is symmetrised first.
pub fn hermitian_eigenvalues4<T: Real>(h: &[[Complex<T>; 4]; 4]) -> [T; 4] {
    let half = T::lit(0.5);
    let mut big = [[T::zero(); 8]; 8];
    for i in 0..4 {
        for j in 0..4 {
            let x = (h[i][j] + h[j][i].conj()) * half;
            big[i][j] = x.re;
            big[i + 4][j + 4] = x.re;
            big[i][j + 4] = -x.im;
            big[i + 4][j] = x.im;
        }
    }
    let ev = symmetric_eigenvalues(big);
    [
        half * (ev[0] + ev[1]),
        half * (ev[2] + ev[3]),
        half * (ev[4] + ev[5]),
        half * (ev[6] + ev[7]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_rotated() {
        let ev = symmetric_eigenvalues([[2.0f64, 1.0], [1.0, 2.0]]);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn hermitian_with_complex_entries() {
        // diag(1, -1) ⊕ [[0, -i],[i, 0]] has spectrum {-1, -1, 1, 1}
        let z = Complex::new(0.0f64, 0.0);
        let o = Complex::new(1.0, 0.0);
        let i = Complex::new(0.0, 1.0);
        let h = [[o, z, z, z], [z, -o, z, z], [z, z, z, -i], [z, z, i, z]];
        let ev = hermitian_eigenvalues4(&h);
        for (e, want) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((e - want).abs() < 1e-13);
        }
    }

    #[test]
    fn trace_and_determinant_are_preserved() {
        let c = |re: f64, im: f64| Complex::new(re, im);
        let h = [
            [c(2.0, 0.0), c(0.3, 0.1), c(0.0, -0.4), c(0.2, 0.0)],
            [c(0.3, -0.1), c(1.0, 0.0), c(0.5, 0.5), c(0.0, 0.0)],
            [c(0.0, 0.4), c(0.5, -0.5), c(-1.0, 0.0), c(0.1, 0.2)],
            [c(0.2, 0.0), c(0.0, 0.0), c(0.1, -0.2), c(0.5, 0.0)],
        ];
        let ev = hermitian_eigenvalues4(&h);
        let tr: f64 = ev.iter().sum();
        assert!((tr - 2.5).abs() < 1e-13);
        // Tr H^2 = sum |h_ij|^2
        let fro: f64 = h.iter().flatten().map(|x| x.norm_sqr()).sum();
        let sq: f64 = ev.iter().map(|x| x * x).sum();
        assert!((fro - sq).abs() < 1e-12);
    }
}
