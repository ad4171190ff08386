//! Ready-made Hamiltonians: the discrete Schrödinger operator with a
//! letter-valued potential, and a synthetic long-range model.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{Coefficient, Hamiltonian, Term};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::CMatrix;
use crate::symbolic::{Alphabet, Letter};

/// `v(ξ) = scale · value(ξ(0))`, keyed on the origin letter alone, with the
/// minimal Hölder constant for the discrete metric.
pub fn potential(alphabet: &Alphabet, scale: f64) -> Result<Coefficient> {
    let vals: Vec<Complex64> = alphabet.values().iter().map(|v| v * scale).collect();
    if vals.iter().any(|v| v.im != 0.0 || !v.re.is_finite()) {
        return Err(Error::domain("potential values must be real and finite"));
    }
    let table: BTreeMap<Vec<Letter>, CMatrix> = vals
        .iter()
        .enumerate()
        .map(|(a, v)| (vec![a as Letter], CMatrix::scalar(*v)))
        .collect();
    let mut osc = 0.0f64;
    for a in &vals {
        for b in &vals {
            osc = osc.max((a - b).norm());
        }
    }
    Coefficient::lookup(0, table, 1, osc.max(1.0))
}

/// `(Hψ)(x) = Σ_{|e| = 1} ψ(x + e) + λ v(ξ(x)) ψ(x)` on `Z^dim`.
pub fn schrodinger(dim: usize, alphabet: Arc<Alphabet>, lambda: f64, beta: f64) -> Result<Hamiltonian> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let mut terms = vec![Term {
        h: vec![0; dim],
        coef: potential(&alphabet, lambda)?,
    }];
    for j in 0..dim {
        for s in [1, -1] {
            let mut h = vec![0; dim];
            h[j] = s;
            terms.push(Term {
                h,
                coef: Coefficient::scalar(1.0),
            });
        }
    }
    Hamiltonian::new(Lattice::cubic(dim), 1, beta, terms)
}

/// Scalar hops `t_h = |h|^{-(β+2)}` for `1 <= |h| <= max_h` on `Z`, each
/// declared with radius of influence `|h|` so the range grows linearly.
pub fn long_range_model(beta: f64, max_h: u32) -> Result<Hamiltonian> {
    let mut terms = Vec::with_capacity(2 * max_h as usize);
    for k in 1..=max_h {
        let v = libm::pow(k as f64, -(beta + 2.0));
        for s in [1i64, -1] {
            terms.push(Term {
                h: vec![s * k as i64],
                coef: Coefficient::scalar(v).with_radius(k)?,
            });
        }
    }
    Hamiltonian::new(Lattice::cubic(1), 1, beta, terms)
}
