//! Dense complex matrices and the Hermitian eigensolvers used by the
//! spectral code.

mod band;
mod eigen;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;

pub use band::{banded_hermitian_eigenvalues, bandwidth};
pub use eigen::{hermitian_eigen, hermitian_eigenvalues, tridiagonal_eigenvalues, Eigen};

use crate::error::{Error, Result};

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn scalar(z: Complex64) -> Self {
        CMatrix { n: 1, data: vec![z] }
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(CMatrix { n, data })
    }

    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_rows(n, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Result<Self> {
        self.check_same(other)?;
        Ok(CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &CMatrix) -> Result<Self> {
        self.check_same(other)?;
        Ok(CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn mul(&self, other: &CMatrix) -> Result<Self> {
        self.check_same(other)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |A_ij - conj(A_ji)|`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.n;
        let mut r: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                r = r.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        r
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermitian_residual() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Spectral norm (largest singular value).
    pub fn operator_norm(&self) -> Result<f64> {
        if self.n == 1 {
            return Ok(self.data[0].norm());
        }
        if self.hermitian_residual() == 0.0 {
            let ev = hermitian_eigenvalues(self)?;
            return Ok(ev.iter().map(|x| x.abs()).fold(0.0, f64::max));
        }
        let gram = self.adjoint().mul(self)?;
        let ev = hermitian_eigenvalues(&gram)?;
        Ok(libm::sqrt(ev.last().copied().unwrap_or(0.0).max(0.0)))
    }

    /// Symmetric permutation `P A Pᵀ` with `out[(i, j)] = A[(order[i], order[j])]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for (i, &oi) in order.iter().enumerate() {
            for (j, &oj) in order.iter().enumerate() {
                out.data[i * n + j] = self.data[oi * n + oj];
            }
        }
        out
    }

    fn check_same(&self, other: &CMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues of any Hermitian matrix, dispatching to the band reduction
/// when the matrix is narrow-banded.
pub fn hermitian_eigenvalues_auto(a: &CMatrix) -> Result<Vec<f64>> {
    let b = bandwidth(a);
    if a.size() > 16 && 4 * b < a.size() {
        banded_hermitian_eigenvalues(a, b)
    } else {
        hermitian_eigenvalues(a)
    }
}
