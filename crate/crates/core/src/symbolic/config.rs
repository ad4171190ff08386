use alloc::sync::Arc;
use alloc::vec::Vec;

use super::rotation::RotationCoding;
use super::slope::Slope;
use super::substitution::SubstitutionFixedPoint;
use super::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::lattice::{cube_offsets, Lattice};

/// A `d`-periodic block of letters, stored in canonical order (first
/// coordinate slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicBlock {
    periods: Vec<u64>,
    block: Vec<Letter>,
}

impl PeriodicBlock {
    pub fn periods(&self) -> &[u64] {
        &self.periods
    }

    pub fn block(&self) -> &[Letter] {
        &self.block
    }

    fn letter_at(&self, x: &[i64]) -> Letter {
        let mut idx = 0usize;
        for (&xi, &p) in x.iter().zip(&self.periods) {
            idx = idx * p as usize + xi.rem_euclid(p as i64) as usize;
        }
        self.block[idx]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Periodic(PeriodicBlock),
    Substitution(Arc<SubstitutionFixedPoint>),
    Rotation(Arc<RotationCoding>),
}

/// A configuration `ξ : ℒ → 𝒜`, total and deterministic on every lattice
/// point.
///
/// Shifts are stored as an offset, so `shift` never copies the underlying
/// source.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    lattice: Lattice,
    alphabet: Arc<Alphabet>,
    source: Source,
    offset: Vec<i64>,
}

impl Configuration {
    pub fn periodic(lattice: Lattice, alphabet: Arc<Alphabet>, periods: Vec<u64>, block: Vec<Letter>) -> Result<Self> {
        let d = lattice.dim();
        if periods.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: periods.len(),
            });
        }
        if periods.iter().any(|&p| p == 0) {
            return Err(Error::domain("periods must be positive"));
        }
        let size = periods
            .iter()
            .try_fold(1usize, |acc, &p| acc.checked_mul(p as usize))
            .ok_or_else(|| Error::domain("periodic block too large"))?;
        if block.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                got: block.len(),
            });
        }
        alphabet.check_letters(&block)?;
        Ok(Configuration {
            offset: alloc::vec![0; d],
            lattice,
            alphabet,
            source: Source::Periodic(PeriodicBlock { periods, block }),
        })
    }

    /// One-dimensional periodic word on `ℤ`.
    pub fn word(alphabet: Arc<Alphabet>, word: Vec<Letter>) -> Result<Self> {
        let p = word.len() as u64;
        Self::periodic(Lattice::cubic(1), alphabet, alloc::vec![p], word)
    }

    pub fn substitution(alphabet: Arc<Alphabet>, fixed_point: SubstitutionFixedPoint) -> Result<Self> {
        if fixed_point.rules().len() > alphabet.len() {
            return Err(Error::domain("substitution uses more letters than the alphabet has"));
        }
        Ok(Configuration {
            lattice: Lattice::cubic(1),
            alphabet,
            source: Source::Substitution(Arc::new(fixed_point)),
            offset: alloc::vec![0],
        })
    }

    pub fn rotation(alphabet: Arc<Alphabet>, coding: RotationCoding) -> Result<Self> {
        alphabet.check_letters(coding.letters())?;
        Ok(Configuration {
            lattice: Lattice::cubic(1),
            alphabet,
            source: Source::Rotation(Arc::new(coding)),
            offset: alloc::vec![0],
        })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.dim()
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn source(&self) -> &Source {
        &self.source
    }

    pub fn offset(&self) -> &[i64] {
        &self.offset
    }

    pub fn letter_at(&self, x: &[i64]) -> Letter {
        debug_assert_eq!(x.len(), self.dim());
        match &self.source {
            Source::Periodic(b) => {
                let y: Vec<i64> = x.iter().zip(&self.offset).map(|(a, o)| a - o).collect();
                b.letter_at(&y)
            }
            Source::Substitution(s) => s.letter_at(x[0] - self.offset[0]),
            Source::Rotation(r) => r.letter_at(x[0] - self.offset[0]),
        }
    }

    /// Letters on `center + Q_shell`, in canonical cube order.
    pub fn window(&self, center: &[i64], shell: u32) -> Vec<Letter> {
        if self.dim() == 1 {
            let (c, k) = (center[0], shell as i64);
            return (c - k..=c + k).map(|x| self.letter_at(&[x])).collect();
        }
        cube_offsets(self.dim(), shell)
            .iter()
            .map(|n| {
                let x: Vec<i64> = n.iter().zip(center).map(|(a, b)| a + b).collect();
                self.letter_at(&x)
            })
            .collect()
    }

    /// Periods along each axis, if the configuration is periodic.
    pub fn periods(&self) -> Option<Vec<u64>> {
        match &self.source {
            Source::Periodic(b) => Some(b.periods.clone()),
            Source::Rotation(r) => r.period().map(|q| alloc::vec![q]),
            Source::Substitution(_) => None,
        }
    }

    /// Whether `letter_at` mismatches are impossible between this and `other`
    /// on common ground: same lattice and alphabet.
    pub fn compatible(&self, other: &Configuration) -> bool {
        self.lattice == other.lattice && (Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet)
    }
}

/// `τ^h ξ`, with `(τ^h ξ)(x) = ξ(x - h)`.
pub fn shift(xi: &Configuration, h: &[i64]) -> Result<Configuration> {
    if h.len() != xi.dim() {
        return Err(Error::DimensionMismatch {
            expected: xi.dim(),
            got: h.len(),
        });
    }
    let mut out = xi.clone();
    for (o, s) in out.offset.iter_mut().zip(h) {
        *o += s;
    }
    Ok(out)
}

/// The Kohmoto configuration `n ↦ labels[χ_{[1-α, 1)}(nα + φ mod 1)]`.
pub fn kohmoto_configuration(alpha: Slope, phase: f64, alphabet: Arc<Alphabet>, labels: [Letter; 2]) -> Result<Configuration> {
    Configuration::rotation(alphabet, RotationCoding::kohmoto(alpha, phase, labels)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Arc<Alphabet> {
        Arc::new(Alphabet::discrete(&["a", "b"]).unwrap())
    }

    #[test]
    fn shift_of_ab_is_ba() {
        let xi = Configuration::word(ab(), alloc::vec![0, 1]).unwrap();
        let s = shift(&xi, &[1]).unwrap();
        assert_eq!(s.window(&[0], 0), alloc::vec![1]);
        assert_eq!([s.letter_at(&[0]), s.letter_at(&[1])], [1, 0]);
        let z = shift(&xi, &[0]).unwrap();
        assert_eq!(z.window(&[0], 10), xi.window(&[0], 10));
    }

    #[test]
    fn shift_roundtrip() {
        let xi = Configuration::word(ab(), alloc::vec![0, 1, 1, 0, 1]).unwrap();
        let back = shift(&shift(&xi, &[7]).unwrap(), &[-7]).unwrap();
        assert_eq!(back.window(&[0], 20), xi.window(&[0], 20));
    }

    #[test]
    fn periodic_2d_block() {
        let lat = Lattice::cubic(2);
        let xi = Configuration::periodic(lat, ab(), alloc::vec![2, 3], alloc::vec![0, 0, 1, 1, 0, 0]).unwrap();
        assert_eq!(xi.letter_at(&[0, 2]), 1);
        assert_eq!(xi.letter_at(&[1, 0]), 1);
        assert_eq!(xi.letter_at(&[-1, 3]), 1);
        assert_eq!(xi.letter_at(&[2, -1]), 1);
        assert_eq!(xi.window(&[0, 0], 1).len(), 9);
        assert!(Configuration::periodic(Lattice::cubic(2), ab(), alloc::vec![2, 2], alloc::vec![0; 3]).is_err());
    }

    #[test]
    fn kohmoto_rational_and_range() {
        let half = kohmoto_configuration(Slope::rational(1, 2).unwrap(), 0.0, ab(), [0, 1]).unwrap();
        assert_eq!(half.periods(), Some(alloc::vec![2]));
        assert!(Slope::rational(0, 2).is_err());
    }
}
