//! Pattern-equivariant Hamiltonians
//! `(H_ξ ψ)(x) = Σ_h t_h(τ^{-x} ξ) ψ(x - h)` and the operations on them that
//! feed the certificates: Schur-β norms, range truncation, comparison
//! operators and finite matrix sections.

mod assembly;
mod check;
mod models;

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

pub use assembly::{assemble_bloch, assemble_dirichlet, BlochOperator, FiniteOperatorMatrix, MatrixMeta, Window};
pub use check::{minimal_hoelder_constant, verify_self_adjoint, R2Violation, SelfAdjointReport};
pub use models::{long_range_model, potential, schrodinger};

use crate::error::{Error, Result};
use crate::lattice::{cube_offsets, max_norm, Lattice, LatticePoint};
use crate::linalg::CMatrix;
use crate::symbolic::{Configuration, Letter, Pattern};

/// Anything that can report the letter at a lattice point: configurations,
/// or finite patterns (which return `None` outside their cube).
pub trait LetterSource {
    fn dim(&self) -> usize;
    fn letter(&self, x: &[i64]) -> Option<Letter>;
}

impl LetterSource for Configuration {
    fn dim(&self) -> usize {
        Configuration::dim(self)
    }

    fn letter(&self, x: &[i64]) -> Option<Letter> {
        Some(self.letter_at(x))
    }
}

impl LetterSource for Pattern {
    fn dim(&self) -> usize {
        Pattern::dim(self)
    }

    fn letter(&self, x: &[i64]) -> Option<Letter> {
        self.get(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientKind {
    Constant(CMatrix),
    /// Value determined by the letters on `x + Q_{key_radius}`, keyed in
    /// canonical cube order.
    Lookup {
        key_radius: u32,
        table: BTreeMap<Vec<Letter>, CMatrix>,
    },
}

/// A hopping coefficient `t_h` with its declared radius of influence `R_t`
/// and Hölder constant `C_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficient {
    kind: CoefficientKind,
    radius: u32,
    hoelder: f64,
}

impl Coefficient {
    pub fn constant(m: CMatrix) -> Self {
        Coefficient {
            kind: CoefficientKind::Constant(m),
            radius: 1,
            hoelder: 1.0,
        }
    }

    pub fn scalar(x: f64) -> Self {
        Self::constant(CMatrix::scalar(Complex64::new(x, 0.0)))
    }

    /// A lookup table. Keys must all have the same length and values the
    /// same size; `radius >= max(1, key_radius)` and `hoelder >= 1`.
    pub fn lookup(key_radius: u32, table: BTreeMap<Vec<Letter>, CMatrix>, radius: u32, hoelder: f64) -> Result<Self> {
        let mut sizes = table.values().map(CMatrix::size);
        let n = sizes.next().ok_or_else(|| Error::domain("lookup table is empty"))?;
        if sizes.any(|m| m != n) {
            return Err(Error::domain("lookup table mixes matrix sizes"));
        }
        let mut lens = table.keys().map(Vec::len);
        let l = lens.next().unwrap_or(0);
        if lens.any(|m| m != l) {
            return Err(Error::domain("lookup table mixes key lengths"));
        }
        Coefficient {
            kind: CoefficientKind::Lookup { key_radius, table },
            radius: 1,
            hoelder: 1.0,
        }
        .with_radius(radius)?
        .with_hoelder(hoelder)
    }

    /// Declares the radius of influence `R_t`.
    pub fn with_radius(mut self, radius: u32) -> Result<Self> {
        if radius < 1 || radius < self.key_radius() {
            return Err(Error::domain("radius of influence must be >= max(1, key radius)"));
        }
        self.radius = radius;
        Ok(self)
    }

    /// Declares the Hölder constant `C_t`.
    pub fn with_hoelder(mut self, c: f64) -> Result<Self> {
        if !(c >= 1.0) || !c.is_finite() {
            return Err(Error::domain("Hölder constant must be finite and >= 1"));
        }
        self.hoelder = c;
        Ok(self)
    }

    pub fn kind(&self) -> &CoefficientKind {
        &self.kind
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn hoelder(&self) -> f64 {
        self.hoelder
    }

    pub fn key_radius(&self) -> u32 {
        match &self.kind {
            CoefficientKind::Constant(_) => 0,
            CoefficientKind::Lookup { key_radius, .. } => *key_radius,
        }
    }

    /// Internal dimension `N`.
    pub fn size(&self) -> usize {
        match &self.kind {
            CoefficientKind::Constant(m) => m.size(),
            CoefficientKind::Lookup { table, .. } => table.values().next().map_or(0, CMatrix::size),
        }
    }

    /// All values the coefficient can take.
    pub fn values(&self) -> Vec<&CMatrix> {
        match &self.kind {
            CoefficientKind::Constant(m) => alloc::vec![m],
            CoefficientKind::Lookup { table, .. } => table.values().collect(),
        }
    }

    /// `‖t‖_∞`: the largest operator norm over all table values.
    pub fn sup_norm(&self) -> Result<f64> {
        self.values().into_iter().try_fold(0.0f64, |acc, m| Ok(acc.max(m.operator_norm()?)))
    }

    /// The lookup key of `src` around `x`.
    pub fn key<S: LetterSource + ?Sized>(&self, src: &S, x: &[i64]) -> Option<Vec<Letter>> {
        let kr = self.key_radius();
        if src.dim() == 1 {
            let (c, k) = (x[0], kr as i64);
            return (c - k..=c + k).map(|y| src.letter(&[y])).collect();
        }
        cube_offsets(src.dim(), kr)
            .iter()
            .map(|n| {
                let y: Vec<i64> = n.iter().zip(x).map(|(a, b)| a + b).collect();
                src.letter(&y)
            })
            .collect()
    }

    /// `t(τ^{-x} ξ)`: the value at site `x` of the letter source.
    pub fn evaluate<S: LetterSource + ?Sized>(&self, src: &S, x: &[i64]) -> Result<&CMatrix> {
        match &self.kind {
            CoefficientKind::Constant(m) => Ok(m),
            CoefficientKind::Lookup { table, .. } => {
                let key = self
                    .key(src, x)
                    .ok_or_else(|| Error::domain("letter source does not cover the coefficient key"))?;
                table.get(&key).ok_or(Error::UncoveredPattern {
                    hop: Vec::new(),
                    pattern: key,
                })
            }
        }
    }

    fn map_values(&self, f: impl Fn(&CMatrix) -> Result<CMatrix>) -> Result<CoefficientKind> {
        Ok(match &self.kind {
            CoefficientKind::Constant(m) => CoefficientKind::Constant(f(m)?),
            CoefficientKind::Lookup { key_radius, table } => CoefficientKind::Lookup {
                key_radius: *key_radius,
                table: table
                    .iter()
                    .map(|(k, v)| Ok((k.clone(), f(v)?)))
                    .collect::<Result<_>>()?,
            },
        })
    }
}

/// One term `t_h` of a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub h: LatticePoint,
    pub coef: Coefficient,
}

/// A strongly pattern-equivariant Hamiltonian with finite range.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    lattice: Lattice,
    n: usize,
    beta: f64,
    terms: Vec<Term>,
}

impl Hamiltonian {
    /// Validates shapes only. Self-adjointness is checked separately by
    /// [`verify_self_adjoint`] and enforced when matrices are assembled.
    pub fn new(lattice: Lattice, n: usize, beta: f64, terms: Vec<Term>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("internal dimension N must be positive"));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::domain("Hölder exponent must lie in (0, 1]"));
        }
        let d = lattice.dim();
        for (i, t) in terms.iter().enumerate() {
            if t.h.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: t.h.len(),
                });
            }
            if t.coef.size() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: t.coef.size(),
                });
            }
            if let CoefficientKind::Lookup { key_radius, table } = &t.coef.kind {
                let expected = (2 * *key_radius as usize + 1).pow(d as u32);
                if let Some(k) = table.keys().find(|k| k.len() != expected) {
                    return Err(Error::DimensionMismatch {
                        expected,
                        got: k.len(),
                    });
                }
            }
            if terms[..i].iter().any(|u| u.h == t.h) {
                return Err(Error::domain(alloc::format!("hop {:?} appears twice", t.h)));
            }
        }
        Ok(Hamiltonian { lattice, n, beta, terms })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn internal_dim(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn coefficient(&self, h: &[i64]) -> Option<&Coefficient> {
        self.terms.iter().find(|t| t.h == h).map(|t| &t.coef)
    }

    /// `R_H = max R_t`, at least 1.
    pub fn range_radius(&self) -> u32 {
        self.terms.iter().map(|t| t.coef.radius).max().unwrap_or(1).max(1)
    }

    /// `C_hop = max C_t`, at least 1.
    pub fn c_hop(&self) -> f64 {
        self.terms.iter().map(|t| t.coef.hoelder).fold(1.0, f64::max)
    }

    /// Largest `|h|_max` over the range.
    pub fn hop_shell(&self) -> u32 {
        self.terms.iter().map(|t| max_norm(&t.h) as u32).max().unwrap_or(0)
    }

    /// (R1): the range is symmetric, `ℛ = -ℛ`.
    pub fn has_symmetric_range(&self) -> bool {
        self.missing_partners().is_empty()
    }

    /// Hops `h` whose partner `-h` is absent.
    pub fn missing_partners(&self) -> Vec<LatticePoint> {
        self.terms
            .iter()
            .filter(|t| {
                let neg: Vec<i64> = t.h.iter().map(|x| -x).collect();
                self.coefficient(&neg).is_none()
            })
            .map(|t| t.h.clone())
            .collect()
    }

    /// `‖H‖_β = Σ_h ‖t_h‖_∞ (1 + |h|²)^{β/2}`.
    pub fn schur_norm(&self) -> Result<f64> {
        self.schur_norm_with(self.beta)
    }

    /// The Schur norm with an arbitrary exponent (`0` gives `Σ ‖t_h‖_∞`).
    pub fn schur_norm_with(&self, beta: f64) -> Result<f64> {
        self.terms.iter().try_fold(0.0, |acc, t| {
            Ok(acc + t.coef.sup_norm()? * self.weight(&t.h, beta))
        })
    }

    fn weight(&self, h: &[i64], beta: f64) -> f64 {
        let len = self.lattice.euclidean_length(h);
        libm::pow(1.0 + len * len, beta / 2.0)
    }

    /// `H|_s`: only hops with `|h|_max <= s` survive.
    pub fn truncate_range(&self, s: f64) -> Result<Hamiltonian> {
        if !(s >= 1.0) {
            return Err(Error::domain("truncation radius must be >= 1"));
        }
        let terms = self.terms.iter().filter(|t| (max_norm(&t.h) as f64) <= s).cloned().collect();
        Ok(Hamiltonian {
            lattice: self.lattice.clone(),
            n: self.n,
            beta: self.beta,
            terms,
        })
    }

    /// `H^β`: scalar, with `t_{h,β}(ξ) = (1 + |h|²)^{β/2} ‖t_h(ξ)‖`.
    pub fn comparison_beta(&self) -> Result<Hamiltonian> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let w = self.weight(&t.h, self.beta);
                let kind = t.coef.map_values(|m| Ok(CMatrix::scalar(Complex64::new(w * m.operator_norm()?, 0.0))))?;
                Ok(Term {
                    h: t.h.clone(),
                    coef: Coefficient {
                        kind,
                        radius: t.coef.radius,
                        hoelder: (t.coef.hoelder * w).max(1.0),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Hamiltonian::new(self.lattice.clone(), 1, self.beta, terms)
    }

    /// `H^∞ = Σ_h ‖t_h‖_∞ U_h`, scalar with constant coefficients.
    pub fn comparison_infty(&self) -> Result<Hamiltonian> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(Term {
                    h: t.h.clone(),
                    coef: Coefficient::scalar(t.coef.sup_norm()?).with_radius(t.coef.radius)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Hamiltonian::new(self.lattice.clone(), 1, self.beta, terms)
    }

    /// Value of `t_h` at site `x`, with uncovered patterns naming the hop.
    pub fn hop_at<'a, S: LetterSource + ?Sized>(&'a self, term: &'a Term, src: &S, x: &[i64]) -> Result<&'a CMatrix> {
        term.coef.evaluate(src, x).map_err(|e| match e {
            Error::UncoveredPattern { pattern, .. } => Error::UncoveredPattern {
                hop: term.h.clone(),
                pattern,
            },
            e => e,
        })
    }
}

/// Free function forms, matching the operator names used elsewhere.
pub fn schur_norm(h: &Hamiltonian) -> Result<f64> {
    h.schur_norm()
}

pub fn truncate_range(h: &Hamiltonian, s: f64) -> Result<Hamiltonian> {
    h.truncate_range(s)
}

pub fn comparison_operator_beta(h: &Hamiltonian) -> Result<Hamiltonian> {
    h.comparison_beta()
}

pub fn comparison_operator_infty(h: &Hamiltonian) -> Result<Hamiltonian> {
    h.comparison_infty()
}

pub fn evaluate_coefficient<'a>(c: &'a Coefficient, xi: &Configuration, x: &[i64]) -> Result<&'a CMatrix> {
    c.evaluate(xi, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::Alphabet;
    use alloc::sync::Arc;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::discrete(&["a", "b"]).unwrap())
    }

    #[test]
    fn schur_of_single_onsite() {
        let h = Hamiltonian::new(
            Lattice::cubic(1),
            1,
            1.0,
            alloc::vec![Term {
                h: alloc::vec![0],
                coef: Coefficient::scalar(-2.5),
            }],
        )
        .unwrap();
        assert_eq!(h.schur_norm().unwrap(), 2.5);
    }

    #[test]
    fn schrodinger_schur_norms() {
        let sq2 = libm::sqrt(2.0);
        let h = schrodinger(1, ab(), 1.0, 1.0).unwrap();
        assert!((h.schur_norm().unwrap() - (2.0 * sq2 + 1.0)).abs() < 1e-14);
        let h0 = schrodinger(1, ab(), 0.0, 1.0).unwrap();
        assert!((h0.schur_norm().unwrap() - 2.0 * sq2).abs() < 1e-14);
        assert_eq!(h.range_radius(), 1);
        assert_eq!(h.c_hop(), 1.0);
        assert!(h.has_symmetric_range());
    }

    #[test]
    fn potential_reads_origin_letter() {
        let h = schrodinger(1, ab(), 1.0, 1.0).unwrap();
        let fib = Configuration::word(ab(), crate::symbolic::fibonacci_word(8).unwrap()).unwrap();
        let v = h.coefficient(&[0]).unwrap();
        for x in -10..10 {
            let val = v.evaluate(&fib, &[x]).unwrap()[(0, 0)].re;
            assert_eq!(val, fib.letter_at(&[x]) as f64);
        }
        assert_eq!(h.coefficient(&[1]).unwrap().evaluate(&fib, &[3]).unwrap()[(0, 0)].re, 1.0);
    }

    #[test]
    fn comparison_operators_for_schrodinger() {
        let h = schrodinger(1, ab(), 1.0, 1.0).unwrap();
        let hb = h.comparison_beta().unwrap();
        let sq2 = libm::sqrt(2.0);
        assert!((hb.coefficient(&[1]).unwrap().values()[0][(0, 0)].re - sq2).abs() < 1e-15);
        let onsite: Vec<f64> = hb.coefficient(&[0]).unwrap().values().iter().map(|m| m[(0, 0)].re).collect();
        assert_eq!(onsite, alloc::vec![0.0, 1.0]);
        assert!((hb.schur_norm_with(0.0).unwrap() - h.schur_norm().unwrap()).abs() < 1e-14);

        let hi = h.comparison_infty().unwrap();
        assert_eq!(hi.coefficient(&[1]).unwrap().values()[0][(0, 0)].re, 1.0);
        assert_eq!(hi.coefficient(&[0]).unwrap().values()[0][(0, 0)].re, 1.0);
    }

    #[test]
    fn truncation() {
        let h = long_range_model(1.0, 20).unwrap();
        let t = h.truncate_range(4.0).unwrap();
        assert!(t.terms().iter().all(|u| max_norm(&u.h) <= 4));
        assert_eq!(t.terms().len(), 8);
        assert!(t.has_symmetric_range());
        assert_eq!(t.range_radius(), 4);
        assert_eq!(h.truncate_range(100.0).unwrap(), h);
        assert!(h.truncate_range(0.5).is_err());
    }

    #[test]
    fn validation() {
        let bad_beta = Hamiltonian::new(Lattice::cubic(1), 1, 1.5, alloc::vec![]);
        assert!(bad_beta.is_err());
        let dup = Hamiltonian::new(
            Lattice::cubic(1),
            1,
            1.0,
            alloc::vec![
                Term { h: alloc::vec![1], coef: Coefficient::scalar(1.0) },
                Term { h: alloc::vec![1], coef: Coefficient::scalar(1.0) },
            ],
        );
        assert!(dup.is_err());
        assert!(Coefficient::scalar(1.0).with_hoelder(0.5).is_err());
        assert!(Coefficient::scalar(1.0).with_radius(0).is_err());
    }
}
