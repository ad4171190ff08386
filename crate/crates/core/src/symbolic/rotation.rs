//! Codings of circle rotations `n ↦ nα + φ mod 1` by a labelled interval
//! partition.
//!
//! Rational slopes are coded with exact integer arithmetic modulo `q`;
//! everything else uses 128-bit wrapping fixed point, where the circle is
//! `ℤ / 2^128`.

use alloc::vec::Vec;

use super::slope::{f64_fraction_bits, Slope};
use super::Letter;
use crate::error::{Error, Result};

/// A partition point `int + alpha · α` of the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cut {
    pub int: i64,
    pub alpha: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotationCoding {
    slope: Slope,
    phase: f64,
    cuts: Vec<Cut>,
    letters: Vec<Letter>,
    repr: Repr,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Rational { p: u64, q: u64, phase: u64, bounds: Vec<u64> },
    Fixed { alpha: u128, phase: u128, bounds: Vec<u128> },
}

impl RotationCoding {
    /// Intervals `[0, c_1), [c_1, c_2), …, [c_k, 1)` labelled by `letters`
    /// (`letters.len() == cuts.len() + 1`); cuts must be strictly increasing
    /// inside `(0, 1)`.
    pub fn new(slope: Slope, phase: f64, cuts: Vec<Cut>, letters: Vec<Letter>) -> Result<Self> {
        if letters.len() != cuts.len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: cuts.len() + 1,
                got: letters.len(),
            });
        }
        if !phase.is_finite() {
            return Err(Error::domain("rotation phase must be finite"));
        }
        let phase = phase - libm::floor(phase);
        let phase = if phase >= 1.0 { 0.0 } else { phase };
        let repr = match slope {
            Slope::Rational { p, q } => {
                let mut bounds = Vec::with_capacity(cuts.len());
                for c in &cuts {
                    let v = c.int as i128 * q as i128 + c.alpha as i128 * p as i128;
                    if v <= 0 || v >= q as i128 {
                        return Err(Error::domain("rotation cut outside (0, 1)"));
                    }
                    bounds.push(v as u64);
                }
                if bounds.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::domain("rotation cuts must be strictly increasing"));
                }
                // ⌊φ q⌋ exactly: φ = m 2^e with m < 2^53.
                let shifted = f64_fraction_bits(phase);
                let phase_floor = ((shifted >> 64) * q as u128 + (((shifted as u64) as u128 * q as u128) >> 64)) >> 64;
                Repr::Rational {
                    p,
                    q,
                    phase: phase_floor as u64,
                    bounds,
                }
            }
            _ => {
                let a = slope.to_f64();
                let alpha = slope.fixed();
                let mut bounds = Vec::with_capacity(cuts.len());
                let mut prev = 0.0;
                for c in &cuts {
                    let v = c.int as f64 + c.alpha as f64 * a;
                    if !(v > prev && v < 1.0) {
                        return Err(Error::domain("rotation cuts must be strictly increasing inside (0, 1)"));
                    }
                    prev = v;
                    bounds.push((c.alpha as i128 as u128).wrapping_mul(alpha));
                }
                if bounds.windows(2).any(|w| w[0] >= w[1]) || bounds.first() == Some(&0) {
                    return Err(Error::domain("rotation cuts too close to resolve"));
                }
                Repr::Fixed {
                    alpha,
                    phase: f64_fraction_bits(phase),
                    bounds,
                }
            }
        };
        Ok(RotationCoding {
            slope,
            phase,
            cuts,
            letters,
            repr,
        })
    }

    /// The Kohmoto partition `[0, 1-α) ↦ labels[0]`, `[1-α, 1) ↦ labels[1]`.
    pub fn kohmoto(alpha: Slope, phase: f64, labels: [Letter; 2]) -> Result<Self> {
        Self::new(alpha, phase, alloc::vec![Cut { int: 1, alpha: -1 }], labels.to_vec())
    }

    pub fn slope(&self) -> Slope {
        self.slope
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn cuts(&self) -> &[Cut] {
        &self.cuts
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Period for rational slopes.
    pub fn period(&self) -> Option<u64> {
        match self.repr {
            Repr::Rational { q, .. } => Some(q),
            Repr::Fixed { .. } => None,
        }
    }

    /// True for two-interval partitions whose cut is `int ± α`: the coding is
    /// then Sturmian and has exactly `n + 1` factors of length `n`.
    pub fn is_sturmian(&self) -> bool {
        self.cuts.len() == 1 && self.cuts[0].alpha.abs() == 1 && self.letters[0] != self.letters[1]
    }

    pub fn letter_at(&self, n: i64) -> Letter {
        let idx = match &self.repr {
            Repr::Rational { p, q, phase, bounds } => {
                let q = *q as i128;
                let m = ((n as i128 * *p as i128).rem_euclid(q) + *phase as i128) % q;
                bounds.partition_point(|&b| b as i128 <= m)
            }
            Repr::Fixed { alpha, phase, bounds } => {
                let x = (n as i128 as u128).wrapping_mul(*alpha).wrapping_add(*phase);
                bounds.partition_point(|&b| b <= x)
            }
        };
        self.letters[idx]
    }
}
