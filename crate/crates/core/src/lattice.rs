//! The lattice `L = M Z^d`, deformed cubes `Q_r` and the max-norm operator
//! norms that enter every constant.
//!
//! Points are always stored in integer coordinates `n`; the physical point is
//! `M n`. Membership in `Q_r` is `|n|_max <= r`, so cube logic never touches
//! floating-point geometry.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// A lattice point in integer coordinates.
pub type LatticePoint = Vec<i64>;

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    dim: usize,
    basis: Vec<f64>,
    inverse: Vec<f64>,
    norm_max: f64,
    inverse_norm_max: f64,
}

impl Lattice {
    /// Builds `M Z^d` from a row-major `d x d` basis matrix.
    pub fn new(dim: usize, basis: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("lattice dimension must be positive"));
        }
        if basis.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: basis.len(),
            });
        }
        if basis.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain("lattice basis has non-finite entries"));
        }
        let (inverse, det) = invert(dim, &basis)?;
        if det.abs() <= 1e-12 {
            return Err(Error::domain("lattice basis is singular (|det M| <= 1e-12)"));
        }
        let norm_max = max_operator_norm(dim, &basis);
        let inverse_norm_max = max_operator_norm(dim, &inverse);
        Ok(Lattice {
            dim,
            basis,
            inverse,
            norm_max,
            inverse_norm_max,
        })
    }

    /// `Z^d` with `M = I`.
    pub fn cubic(dim: usize) -> Self {
        let mut basis = vec![0.0; dim * dim];
        for i in 0..dim {
            basis[i * dim + i] = 1.0;
        }
        Lattice::new(dim, basis).expect("identity basis is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[f64] {
        &self.basis
    }

    pub fn inverse(&self) -> &[f64] {
        &self.inverse
    }

    /// `‖M‖_max`.
    pub fn norm_max(&self) -> f64 {
        self.norm_max
    }

    /// `‖M⁻¹‖_max`.
    pub fn inverse_norm_max(&self) -> f64 {
        self.inverse_norm_max
    }

    /// `‖M⁻¹‖_max ‖M‖_max`, always `>= 1`.
    pub fn condition_max(&self) -> f64 {
        self.norm_max * self.inverse_norm_max
    }

    pub fn is_identity(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| self.basis[i * self.dim + j] == if i == j { 1.0 } else { 0.0 })
        })
    }

    /// Physical position `M n`.
    pub fn embed(&self, n: &[i64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.basis[i * self.dim + j] * n[j] as f64)
                    .sum()
            })
            .collect()
    }

    /// Euclidean length `|M n|`.
    pub fn euclidean_length(&self, n: &[i64]) -> f64 {
        libm::sqrt(self.embed(n).iter().map(|x| x * x).sum())
    }

    /// Cube points `Q_r ∩ L`, in canonical order (see [`cube_offsets`]).
    pub fn cube_points(&self, r: f64) -> Result<Vec<LatticePoint>> {
        if !(r > 0.0) {
            return Err(Error::domain("cube radius must be positive"));
        }
        Ok(cube_offsets(self.dim, shell_of(r)))
    }

    /// Radii in `[1, r_max]` where `Q_r ∩ L` changes: the integers `1..=⌊r_max⌋`.
    pub fn cube_breakpoints(&self, r_max: f64) -> Vec<f64> {
        if !(r_max >= 1.0) {
            return Vec::new();
        }
        (1..=shell_of(r_max)).map(f64::from).collect()
    }
}

/// Integer shell `⌊r⌋` of a radius.
pub fn shell_of(r: f64) -> u32 {
    if r >= u32::MAX as f64 {
        u32::MAX
    } else {
        libm::floor(r) as u32
    }
}

/// `|n|_max`.
pub fn max_norm(n: &[i64]) -> u64 {
    n.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0)
}

/// Maximum absolute row sum, the operator norm induced by `|·|_max`.
pub fn max_operator_norm(dim: usize, m: &[f64]) -> f64 {
    (0..dim)
        .map(|i| m[i * dim..(i + 1) * dim].iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// All `n` with `|n|_max <= shell`, first coordinate slowest, each coordinate
/// running from `-shell` to `shell`.
pub fn cube_offsets(dim: usize, shell: u32) -> Vec<LatticePoint> {
    let k = shell as i64;
    let side = (2 * k + 1) as usize;
    let count = side.pow(dim as u32);
    let mut out = Vec::with_capacity(count);
    let mut cur = vec![-k; dim];
    for _ in 0..count {
        out.push(cur.clone());
        for j in (0..dim).rev() {
            if cur[j] < k {
                cur[j] += 1;
                break;
            }
            cur[j] = -k;
        }
    }
    out
}

/// Position of `n` inside [`cube_offsets`]`(dim, shell)`.
pub fn cube_index(shell: u32, n: &[i64]) -> Option<usize> {
    let k = shell as i64;
    let side = 2 * k + 1;
    let mut idx = 0i64;
    for &x in n {
        if x < -k || x > k {
            return None;
        }
        idx = idx * side + (x + k);
    }
    Some(idx as usize)
}

fn invert(dim: usize, m: &[f64]) -> Result<(Vec<f64>, f64)> {
    let mut a = m.to_vec();
    let mut inv = vec![0.0; dim * dim];
    for i in 0..dim {
        inv[i * dim + i] = 1.0;
    }
    let mut det = 1.0;
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&x, &y| a[x * dim + col].abs().total_cmp(&a[y * dim + col].abs()))
            .unwrap();
        let p = a[pivot * dim + col];
        if p == 0.0 {
            return Err(Error::domain("lattice basis is singular"));
        }
        if pivot != col {
            for j in 0..dim {
                a.swap(pivot * dim + j, col * dim + j);
                inv.swap(pivot * dim + j, col * dim + j);
            }
            det = -det;
        }
        det *= p;
        for j in 0..dim {
            a[col * dim + j] /= p;
            inv[col * dim + j] /= p;
        }
        for row in 0..dim {
            if row != col {
                let f = a[row * dim + col];
                if f != 0.0 {
                    for j in 0..dim {
                        a[row * dim + j] -= f * a[col * dim + j];
                        inv[row * dim + j] -= f * inv[col * dim + j];
                    }
                }
            }
        }
    }
    Ok((inv, det))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_points_1d() {
        let lat = Lattice::cubic(1);
        let pts = lat.cube_points(2.5).unwrap();
        assert_eq!(pts, vec![vec![-2], vec![-1], vec![0], vec![1], vec![2]]);
        assert_eq!(lat.cube_points(0.5).unwrap(), vec![vec![0]]);
        assert!(lat.cube_points(0.0).is_err());
        assert!(lat.cube_points(-1.0).is_err());
    }

    #[test]
    fn cube_points_2d_brute_force() {
        let lat = Lattice::cubic(2);
        let pts = lat.cube_points(1.0).unwrap();
        let mut brute = Vec::new();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                if a.abs().max(b.abs()) <= 1 {
                    brute.push(vec![a, b]);
                }
            }
        }
        assert_eq!(pts.len(), 9);
        assert_eq!(pts, brute);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(cube_index(1, p), Some(i));
        }
    }

    #[test]
    fn operator_norms() {
        assert_eq!(max_operator_norm(2, &[1.0, 0.0, 0.0, 1.0]), 1.0);
        assert_eq!(max_operator_norm(2, &[2.0, 0.0, 0.0, 1.0]), 2.0);
        assert_eq!(max_operator_norm(2, &[1.0, -1.0, 0.0, 3.0]), 3.0);
        let lat = Lattice::new(2, vec![1.0, -1.0, 0.0, 3.0]).unwrap();
        assert!(lat.condition_max() >= 1.0);
    }

    #[test]
    fn breakpoints_are_integer_shells() {
        assert_eq!(Lattice::cubic(1).cube_breakpoints(3.0), vec![1.0, 2.0, 3.0]);
        assert_eq!(Lattice::cubic(2).cube_breakpoints(2.0), vec![1.0, 2.0]);
        let scaled = Lattice::new(1, vec![2.0]).unwrap();
        assert_eq!(scaled.cube_breakpoints(3.0), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn singular_basis_rejected() {
        assert!(Lattice::new(2, vec![1.0, 2.0, 2.0, 4.0]).is_err());
        assert!(Lattice::new(2, vec![1.0]).is_err());
    }

    #[test]
    fn inverse_is_inverse() {
        let lat = Lattice::new(2, vec![2.0, 1.0, 1.0, 3.0]).unwrap();
        let (m, inv) = (lat.basis(), lat.inverse());
        for i in 0..2 {
            for j in 0..2 {
                let s: f64 = (0..2).map(|k| m[i * 2 + k] * inv[k * 2 + j]).sum();
                assert!((s - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
        assert!((lat.inverse_norm_max() - 4.0 / 5.0).abs() < 1e-14);
    }
}
