//! Self-adjointness and Hölder-constant diagnostics.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::Rng;

use super::{Coefficient, Hamiltonian};
use crate::error::{Error, Result};
use crate::lattice::LatticePoint;
use crate::linalg::CMatrix;
use crate::symbolic::{Alphabet, Letter, Pattern, PatternDictionary, Subshift};

/// Relative tolerance for `t_{-h}(ξ) = t_h(τ^{-h}ξ)*`.
const R2_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct R2Violation {
    pub h: LatticePoint,
    /// The witnessing pattern, centred at the site where `t_{-h}` is read.
    pub pattern: Vec<Letter>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfAdjointReport {
    /// Hops whose negative is missing from the range; empty iff (R1) holds.
    pub missing_partners: Vec<LatticePoint>,
    /// Shell of the patterns the (R2) check was run on.
    pub shell: u32,
    /// Number of (pattern, hop) pairs checked.
    pub checked: usize,
    pub violations: Vec<R2Violation>,
    /// Patterns a lookup table did not cover, with the hop that needed them.
    pub uncovered: Vec<(LatticePoint, Vec<Letter>)>,
}

impl SelfAdjointReport {
    pub fn r1(&self) -> bool {
        self.missing_partners.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.r1() && self.violations.is_empty() && self.uncovered.is_empty()
    }
}

/// Checks (R1) exactly and (R2) on dictionary patterns of `s`.
///
/// Patterns are taken at shell `max key radius + max |h|`, so both
/// `t_{-h}` at the centre and `t_h` at `h` can be read from one pattern.
/// All (pattern, hop) pairs are checked when there are at most `n_samples`
/// of them; otherwise `n_samples` pairs are drawn uniformly.
pub fn verify_self_adjoint<R: Rng + ?Sized>(h: &Hamiltonian, s: &Subshift, n_samples: usize, rng: &mut R) -> Result<SelfAdjointReport> {
    if s.lattice() != h.lattice() {
        return Err(Error::domain("subshift and Hamiltonian live on different lattices"));
    }
    let missing_partners = h.missing_partners();
    let key = h.terms().iter().map(|t| t.coef.key_radius()).max().unwrap_or(0);
    let shell = key + h.hop_shell();
    let dict = s.dictionary(shell)?;
    let patterns: Vec<Pattern> = dict.patterns().collect();
    let hops: Vec<usize> = (0..h.terms().len())
        .filter(|&i| {
            let neg: Vec<i64> = h.terms()[i].h.iter().map(|x| -x).collect();
            h.coefficient(&neg).is_some()
        })
        .collect();

    let mut report = SelfAdjointReport {
        missing_partners,
        shell,
        checked: 0,
        violations: Vec::new(),
        uncovered: Vec::new(),
    };
    let total = patterns.len() * hops.len();
    if total == 0 {
        return Ok(report);
    }
    let picks: Vec<usize> = if total <= n_samples {
        (0..total).collect()
    } else {
        (0..n_samples).map(|_| rng.gen_range(0..total)).collect()
    };
    let mut seen_uncovered = BTreeSet::new();
    let origin = alloc::vec![0i64; h.lattice().dim()];
    for k in picks {
        let p = &patterns[k / hops.len()];
        let term = &h.terms()[hops[k % hops.len()]];
        let neg: Vec<i64> = term.h.iter().map(|x| -x).collect();
        let partner = h.coefficient(&neg).expect("partner exists");
        report.checked += 1;
        let lhs = partner.evaluate(p, &origin);
        let rhs = term.coef.evaluate(p, &term.h);
        let (lhs, rhs) = match (lhs, rhs) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                if let Error::UncoveredPattern { pattern, .. } = e {
                    let hop = if lhs_uncovered(partner, p, &origin) { neg } else { term.h.clone() };
                    if seen_uncovered.insert((hop.clone(), pattern.clone())) {
                        report.uncovered.push((hop, pattern));
                    }
                    continue;
                }
                return Err(e);
            }
        };
        let residual = lhs.sub(&rhs.adjoint())?.max_abs();
        let scale = lhs.max_abs().max(rhs.max_abs()).max(1.0);
        if residual > R2_TOL * scale {
            report.violations.push(R2Violation {
                h: neg,
                pattern: p.letters().to_vec(),
                residual,
            });
        }
    }
    Ok(report)
}

fn lhs_uncovered(c: &Coefficient, p: &Pattern, x: &[i64]) -> bool {
    matches!(c.evaluate(p, x), Err(Error::UncoveredPattern { .. }))
}

/// Smallest admissible Hölder constant of `c` on the patterns of `dict`.
///
/// Discrete metric: `max(1, max ‖t(p) - t(p')‖)`. General metric: the
/// oscillation is divided by `(max_y d(p(y), p'(y)))^β`.
pub fn minimal_hoelder_constant(c: &Coefficient, alphabet: &Alphabet, dict: &PatternDictionary, beta: f64) -> Result<f64> {
    if dict.is_empty() {
        return Err(Error::domain("dictionary is empty"));
    }
    let kr = c.key_radius();
    if dict.shell() < kr {
        return Err(Error::domain("dictionary shell is smaller than the coefficient key radius"));
    }
    let keys: BTreeSet<Vec<Letter>> = dict
        .patterns()
        .map(|p| p.restrict(kr).expect("shell checked").letters().to_vec())
        .collect();
    let origin = alloc::vec![0i64; dict.dim()];
    let mut values: Vec<(Vec<Letter>, &CMatrix)> = Vec::with_capacity(keys.len());
    for k in keys {
        let p = Pattern::new(dict.dim(), kr, k.clone())?;
        values.push((k, c.evaluate(&p, &origin)?));
    }
    let mut best = 1.0f64;
    for (i, (p, a)) in values.iter().enumerate() {
        for (q, b) in &values[i + 1..] {
            let osc = a.sub(b)?.operator_norm()?;
            if osc == 0.0 {
                continue;
            }
            let ratio = if alphabet.is_discrete() {
                osc
            } else {
                let dmax = p.iter().zip(q).map(|(&x, &y)| alphabet.distance(x, y)).fold(0.0, f64::max);
                osc / libm::pow(dmax, beta)
            };
            best = best.max(ratio);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{schrodinger, Term};
    use crate::symbolic::Configuration;
    use crate::Lattice;
    use alloc::sync::Arc;
    use alloc::vec;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::discrete(&["a", "b"]).unwrap())
    }

    fn fib_subshift() -> Subshift {
        Subshift::orbit_closure(
            Configuration::substitution(ab(), crate::symbolic::SubstitutionFixedPoint::fibonacci()).unwrap(),
        )
    }

    #[test]
    fn schrodinger_passes() {
        let h = schrodinger(1, ab(), 1.0, 1.0).unwrap();
        let r = verify_self_adjoint(&h, &fib_subshift(), 1000, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.checked > 0);
    }

    #[test]
    fn asymmetric_hops_fail() {
        let h = Hamiltonian::new(
            Lattice::cubic(1),
            1,
            1.0,
            vec![
                Term { h: vec![1], coef: Coefficient::scalar(2.0) },
                Term { h: vec![-1], coef: Coefficient::scalar(1.0) },
            ],
        )
        .unwrap();
        let r = verify_self_adjoint(&h, &fib_subshift(), 100, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(r.r1());
        assert!(!r.violations.is_empty());
    }

    #[test]
    fn matrix_valued_adjoint_pair_passes() {
        let z = |re: f64, im: f64| Complex64::new(re, im);
        let t = CMatrix::from_rows(2, vec![z(1.0, 0.0), z(0.0, 2.0), z(3.0, 0.0), z(0.5, -1.0)]).unwrap();
        let h = Hamiltonian::new(
            Lattice::cubic(1),
            2,
            1.0,
            vec![
                Term { h: vec![1], coef: Coefficient::constant(t.clone()) },
                Term { h: vec![-1], coef: Coefficient::constant(t.adjoint()) },
            ],
        )
        .unwrap();
        let r = verify_self_adjoint(&h, &fib_subshift(), 100, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn missing_partner_breaks_r1() {
        let h = Hamiltonian::new(
            Lattice::cubic(1),
            1,
            1.0,
            vec![Term { h: vec![1], coef: Coefficient::scalar(1.0) }],
        )
        .unwrap();
        let r = verify_self_adjoint(&h, &fib_subshift(), 100, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(!r.r1());
        assert_eq!(r.missing_partners, vec![vec![1]]);
    }

    #[test]
    fn hoelder_constants() {
        let dict = fib_subshift().dictionary(2).unwrap();
        let alpha = ab();
        assert_eq!(minimal_hoelder_constant(&Coefficient::scalar(5.0), &alpha, &dict, 1.0).unwrap(), 1.0);
        let two = Arc::new(Alphabet::discrete(&["a", "b"]).unwrap().with_values(vec![0.0.into(), 2.0.into()]).unwrap());
        let v = crate::operators::potential(&two, 1.0).unwrap();
        assert_eq!(minimal_hoelder_constant(&v, &two, &dict, 1.0).unwrap(), 2.0);
        let half = Arc::new(Alphabet::discrete(&["a", "b"]).unwrap().with_values(vec![0.0.into(), 0.5.into()]).unwrap());
        let v = crate::operators::potential(&half, 1.0).unwrap();
        assert_eq!(minimal_hoelder_constant(&v, &half, &dict, 1.0).unwrap(), 1.0);
    }
}
