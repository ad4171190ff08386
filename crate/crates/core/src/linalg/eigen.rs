//! Householder tridiagonalization of complex Hermitian matrices followed by
//! implicit QL iterations on the real symmetric tridiagonal.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

const MAX_QL_SWEEPS: usize = 60;

/// Eigenvalues (ascending) with orthonormal eigenvectors stored as columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let n = self.vectors.size();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// All eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Result<Vec<f64>> {
    let (mut d, mut e, _) = tridiagonalize(a, false);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Eigenvalues and eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &CMatrix) -> Result<Eigen> {
    let n = a.size();
    let (mut d, mut e, q) = tridiagonalize(a, true);
    let q = q.expect("requested");
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    ql_implicit(&mut d, &mut e, Some(&mut z))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let mut vectors = CMatrix::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for m in 0..n {
                s += q[(i, m)] * z[m * n + k];
            }
            vectors[(i, col)] = s;
        }
    }
    Ok(Eigen {
        values: order.iter().map(|&k| d[k]).collect(),
        vectors,
    })
}

/// Eigenvalues of the real symmetric tridiagonal with diagonal `diag` and
/// off-diagonal `off` (`off.len() == diag.len() - 1`), ascending.
pub fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let mut d = diag.to_vec();
    let mut e = vec![0.0; d.len()];
    e[..off.len()].copy_from_slice(off);
    ql_implicit(&mut d, &mut e, None)?;
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Reduces `a` to a real symmetric tridiagonal `(d, e)` by unitary
/// similarity. With `want_q`, also returns the unitary `V` such that the
/// real tridiagonal equals `V* A V`.
fn tridiagonalize(a: &CMatrix, want_q: bool) -> (Vec<f64>, Vec<f64>, Option<CMatrix>) {
    let n = a.size();
    let mut m = a.clone();
    let mut q = want_q.then(|| CMatrix::identity(n));
    let zero = Complex64::new(0.0, 0.0);
    let mut u = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let x0 = m[(k + 1, k)];
        let tail: f64 = (k + 2..n).map(|i| m[(i, k)].norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let xnorm = libm::sqrt(x0.norm_sqr() + tail);
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        // u = x + e^{i arg x0} |x| e1 maps x to -e^{i arg x0} |x| e1.
        for i in 0..len {
            u[i] = m[(k + 1 + i, k)];
        }
        u[0] += phase * xnorm;
        let unorm2: f64 = u[..len].iter().map(|z| z.norm_sqr()).sum();
        let w = 2.0 / unorm2;

        // p = w A22 u
        for i in 0..len {
            let row = (k + 1 + i) * n + k + 1;
            let mut s = zero;
            for j in 0..len {
                s += m.data[row + j] * u[j];
            }
            p[i] = s * w;
        }
        // q = p - (w/2)(u* p) u, K real up to rounding.
        let upk: Complex64 = u[..len].iter().zip(&p[..len]).map(|(a, b)| a.conj() * b).sum();
        let kk = 0.5 * w * upk.re;
        for i in 0..len {
            p[i] -= u[i] * kk;
        }
        // A22 -= u q* + q u*
        for i in 0..len {
            let row = (k + 1 + i) * n + k + 1;
            let (ui, qi) = (u[i], p[i]);
            for j in 0..len {
                m.data[row + j] -= ui * p[j].conj() + qi * u[j].conj();
            }
        }
        let beta = -phase * xnorm;
        m[(k + 1, k)] = beta;
        m[(k, k + 1)] = beta.conj();
        for i in k + 2..n {
            m[(i, k)] = zero;
            m[(k, i)] = zero;
        }
        if let Some(q) = q.as_mut() {
            // Q <- Q P with P = I - w u u*.
            for r in 0..n {
                let row = r * n + k + 1;
                let mut s = zero;
                for j in 0..len {
                    s += q.data[row + j] * u[j];
                }
                let s = s * w;
                for j in 0..len {
                    q.data[row + j] -= s * u[j].conj();
                }
            }
        }
    }

    let d: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    // Phase gauge D with D* T D real: s_{k+1} = s_k t_k / |t_k|.
    let mut s = Complex64::new(1.0, 0.0);
    let mut gauge = vec![s; n];
    for k in 0..n.saturating_sub(1) {
        let t = m[(k + 1, k)];
        let r = t.norm();
        e[k] = r;
        if r > 0.0 {
            s *= t / r;
        }
        gauge[k + 1] = s;
    }
    if let Some(q) = q.as_mut() {
        for r in 0..n {
            for c in 0..n {
                q.data[r * n + c] *= gauge[c];
            }
        }
    }
    (d, e, q)
}

/// Implicit QL with Wilkinson-type shifts on a real symmetric tridiagonal.
/// `e[i]` couples `i` and `i + 1`; `e[n-1]` is ignored. When `z` is given
/// (row-major `n x n`), rotations are accumulated into its columns.
fn ql_implicit(d: &mut [f64], e: &mut [f64], mut z: Option<&mut [f64]>) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(Error::NoConvergence { theta: None });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
