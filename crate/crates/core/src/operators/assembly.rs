//! Finite matrix sections: Dirichlet windows and Bloch (twisted periodic)
//! reductions.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::linalg::{banded_hermitian_eigenvalues, hermitian_eigenvalues, CMatrix};
use crate::symbolic::Configuration;

/// Relative Hermiticity tolerance for assembled matrices.
const HERMITIAN_TOL: f64 = 1e-12;

/// An axis-aligned box `lo <= x <= hi` in integer coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    lo: LatticePoint,
    hi: LatticePoint,
}

impl Window {
    pub fn new(lo: LatticePoint, hi: LatticePoint) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() || lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::domain("window bounds must satisfy lo <= hi"));
        }
        Ok(Window { lo, hi })
    }

    /// `Q_shell ∩ Z^d`.
    pub fn cube(dim: usize, shell: u32) -> Self {
        let s = shell as i64;
        Window {
            lo: vec![-s; dim],
            hi: vec![s; dim],
        }
    }

    pub fn interval(lo: i64, hi: i64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[i64] {
        &self.lo
    }

    pub fn hi(&self) -> &[i64] {
        &self.hi
    }

    pub fn len(&self) -> usize {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a + 1) as usize).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of `x` in the canonical order (first coordinate slowest).
    pub fn index(&self, x: &[i64]) -> Option<usize> {
        let mut idx = 0usize;
        for ((&v, &a), &b) in x.iter().zip(&self.lo).zip(&self.hi) {
            if v < a || v > b {
                return None;
            }
            idx = idx * (b - a + 1) as usize + (v - a) as usize;
        }
        Some(idx)
    }

    pub fn points(&self) -> Vec<LatticePoint> {
        let mut out = Vec::with_capacity(self.len());
        let mut cur = self.lo.clone();
        loop {
            out.push(cur.clone());
            let mut j = cur.len();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                if cur[j] < self.hi[j] {
                    cur[j] += 1;
                    break;
                }
                cur[j] = self.lo[j];
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixMeta {
    Window { lo: LatticePoint, hi: LatticePoint, internal_dim: usize },
    Bloch { period: u64, theta: f64, internal_dim: usize },
}

/// A finite Hermitian section of `H_ξ` and how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOperatorMatrix {
    pub matrix: CMatrix,
    pub meta: MatrixMeta,
}

impl FiniteOperatorMatrix {
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        crate::linalg::hermitian_eigenvalues_auto(&self.matrix)
    }
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let residual = m.hermitian_residual();
    if residual > HERMITIAN_TOL * m.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

fn add_block(m: &mut CMatrix, n: usize, i: usize, j: usize, block: &CMatrix, phase: Complex64) {
    for a in 0..n {
        for b in 0..n {
            m[(i * n + a, j * n + b)] += block[(a, b)] * phase;
        }
    }
}

/// `P_Λ H_ξ P_Λ` on a box, with sites in canonical order and the `N`
/// internal components of a site contiguous.
pub fn assemble_dirichlet(h: &Hamiltonian, xi: &Configuration, window: &Window) -> Result<FiniteOperatorMatrix> {
    let d = h.lattice().dim();
    if xi.dim() != d || window.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: if xi.dim() != d { xi.dim() } else { window.dim() },
        });
    }
    let n = h.internal_dim();
    let mut m = CMatrix::zeros(window.len() * n);
    let one = Complex64::new(1.0, 0.0);
    let mut y = vec![0i64; d];
    for (i, x) in window.points().iter().enumerate() {
        for term in h.terms() {
            for k in 0..d {
                y[k] = x[k] - term.h[k];
            }
            if let Some(j) = window.index(&y) {
                let t = h.hop_at(term, xi, x)?;
                add_block(&mut m, n, i, j, t, one);
            }
        }
    }
    check_hermitian(&m)?;
    Ok(FiniteOperatorMatrix {
        matrix: m,
        meta: MatrixMeta::Window {
            lo: window.lo().to_vec(),
            hi: window.hi().to_vec(),
            internal_dim: n,
        },
    })
}

/// The Bloch reduction of a periodic one-dimensional operator.
///
/// Coefficients are evaluated once; each quasi-momentum only re-phases the
/// wrapped entries. Sites are stored in the interleaved order
/// `0, p-1, 1, p-2, …`, which keeps the periodic wrap-around inside a narrow
/// band so the banded eigensolver applies.
#[derive(Debug, Clone)]
pub struct BlochOperator {
    period: u64,
    n: usize,
    /// `(row site, column site, winding m, block)` in interleaved positions.
    entries: Vec<(usize, usize, i64, CMatrix)>,
    bandwidth: usize,
}

impl BlochOperator {
    pub fn new(h: &Hamiltonian, xi: &Configuration) -> Result<Self> {
        let d = h.lattice().dim();
        if d != 1 || xi.dim() != 1 {
            return Err(Error::UnsupportedDimension(d.max(xi.dim())));
        }
        let period = xi
            .periods()
            .ok_or_else(|| Error::domain("Bloch reduction needs a periodic configuration"))?[0];
        let p = period as i64;
        let pos = interleaved_positions(period as usize);
        let n = h.internal_dim();
        let mut entries = Vec::new();
        let mut spread = 0usize;
        for x in 0..p {
            for term in h.terms() {
                let target = x - term.h[0];
                let m = target.div_euclid(p);
                let y = target - m * p;
                let t = h.hop_at(term, xi, &[x])?;
                let (px, py) = (pos[x as usize], pos[y as usize]);
                spread = spread.max(px.abs_diff(py));
                entries.push((px, py, m, t.clone()));
            }
        }
        let op = BlochOperator {
            period,
            n,
            entries,
            bandwidth: (spread + 1) * n - 1,
        };
        check_hermitian(&op.interleaved(1.0))?;
        Ok(op)
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    /// Size `p N` of the reduced matrix.
    pub fn size(&self) -> usize {
        self.period as usize * self.n
    }

    /// Matrix in interleaved site order.
    fn interleaved(&self, theta: f64) -> CMatrix {
        let mut m = CMatrix::zeros(self.size());
        for (x, y, w, t) in &self.entries {
            let phase = Complex64::from_polar(1.0, -(*w as f64) * theta);
            add_block(&mut m, self.n, *x, *y, t, phase);
        }
        m
    }

    /// `H(θ)` in natural site order `0, …, p-1`.
    pub fn matrix(&self, theta: f64) -> FiniteOperatorMatrix {
        let p = self.period as usize;
        let pos = interleaved_positions(p);
        let n = self.n;
        let order: Vec<usize> = (0..p).flat_map(|x| { let px = pos[x]; (0..n).map(move |a| px * n + a) }).collect();
        FiniteOperatorMatrix {
            matrix: self.interleaved(theta).permuted(&order),
            meta: MatrixMeta::Bloch {
                period: self.period,
                theta,
                internal_dim: n,
            },
        }
    }

    /// Ascending eigenvalues of `H(θ)`.
    pub fn eigenvalues(&self, theta: f64) -> Result<Vec<f64>> {
        let m = self.interleaved(theta);
        let size = m.size();
        let out = if size > 16 && 4 * self.bandwidth < size {
            banded_hermitian_eigenvalues(&m, self.bandwidth)
        } else {
            hermitian_eigenvalues(&m)
        };
        out.map_err(|e| match e {
            Error::NoConvergence { .. } => Error::NoConvergence { theta: Some(theta) },
            e => e,
        })
    }
}

/// `pos[x]` for the order `0, p-1, 1, p-2, …`.
fn interleaved_positions(p: usize) -> Vec<usize> {
    let mut pos = vec![0; p];
    let (mut lo, mut hi) = (0usize, p);
    let mut k = 0;
    while lo < hi {
        pos[lo] = k;
        k += 1;
        lo += 1;
        if lo < hi {
            hi -= 1;
            pos[hi] = k;
            k += 1;
        }
    }
    pos
}

/// `H(θ)` for a periodic configuration in dimension one.
pub fn assemble_bloch(h: &Hamiltonian, xi: &Configuration, theta: f64) -> Result<FiniteOperatorMatrix> {
    Ok(BlochOperator::new(h, xi)?.matrix(theta))
}
