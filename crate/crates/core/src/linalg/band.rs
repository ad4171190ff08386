//! Band-to-tridiagonal reduction for narrow-banded Hermitian matrices.
//!
//! Givens rotations annihilate the band column by column; each rotation
//! spawns one bulge `b + 1` below the diagonal which is chased off the end.
//! Cost is `O(n² b)` instead of the `O(n³)` of dense Householder.

use alloc::vec::Vec;

use num_complex::Complex64;

use super::{tridiagonal_eigenvalues, CMatrix};
use crate::error::Result;

/// Largest `|i - j|` with a nonzero entry.
pub fn bandwidth(a: &CMatrix) -> usize {
    let n = a.size();
    let mut b = 0;
    for i in 0..n {
        for j in 0..n {
            if a[(i, j)] != Complex64::new(0.0, 0.0) {
                b = b.max(i.abs_diff(j));
            }
        }
    }
    b
}

/// Eigenvalues of a Hermitian matrix whose entries vanish outside
/// `|i - j| <= b`, ascending.
pub fn banded_hermitian_eigenvalues(a: &CMatrix, b: usize) -> Result<Vec<f64>> {
    let n = a.size();
    if b <= 1 || n <= 2 {
        return finish(a);
    }
    let mut m = a.clone();
    for k in 0..n - 2 {
        let top = (k + b).min(n - 1);
        for j in (k + 2..=top).rev() {
            rotate_out(&mut m, j, k, b);
            // Bulge at (j + b, j - 1), then every b rows further down.
            let (mut r, mut c) = (j + b, j - 1);
            while r < n {
                rotate_out(&mut m, r, c, b);
                c = r - 1;
                r += b;
            }
        }
    }
    finish(&m)
}

/// Zeroes `A[r][c]` with a rotation in the plane `(r - 1, r)`, applied as a
/// similarity to rows and columns.
fn rotate_out(m: &mut CMatrix, r: usize, c: usize, b: usize) {
    let zero = Complex64::new(0.0, 0.0);
    let x = m[(r - 1, c)];
    let y = m[(r, c)];
    if y == zero {
        return;
    }
    let (cs, sbar) = if x == zero {
        (0.0, Complex64::new(1.0, 0.0))
    } else {
        let rho = libm::hypot(x.norm(), y.norm());
        let cs = x.norm() / rho;
        (cs, y / x * cs)
    };
    let s = sbar.conj();
    let n = m.size();
    let lo = (r - 1).saturating_sub(b + 2);
    let hi = (r + b + 2).min(n - 1);
    for j in lo..=hi {
        let u = m[(r - 1, j)];
        let v = m[(r, j)];
        m[(r - 1, j)] = u * cs + s * v;
        m[(r, j)] = -sbar * u + v * cs;
    }
    for i in lo..=hi {
        let u = m[(i, r - 1)];
        let v = m[(i, r)];
        m[(i, r - 1)] = u * cs + sbar * v;
        m[(i, r)] = -s * u + v * cs;
    }
    m[(r, c)] = zero;
    m[(c, r)] = zero;
}

fn finish(m: &CMatrix) -> Result<Vec<f64>> {
    let n = m.size();
    let d: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let e: Vec<f64> = (0..n.saturating_sub(1)).map(|i| m[(i + 1, i)].norm()).collect();
    tridiagonal_eigenvalues(&d, &e)
}
