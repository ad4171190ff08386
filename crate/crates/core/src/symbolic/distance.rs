//! The configuration metric and the Hausdorff metric on subshifts, in exact
//! rational arithmetic.

use core::fmt;

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};

use super::alphabet::exact_ratio;
use super::config::Configuration;
use super::dictionary::Subshift;
use crate::error::{Error, Result};
use crate::lattice::{cube_offsets, max_norm, shell_of};

/// A distance value together with its provenance.
///
/// When `lower_bound` is set the scan ran out of radius before the
/// configurations (or dictionaries) disagreed: `value` is `1/r_max`, which
/// only bounds the true distance from above. Every theorem consuming a
/// distance is monotone in it, so using `value` stays valid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Distance {
    pub value: Ratio<i128>,
    pub lower_bound: bool,
}

impl Distance {
    pub fn to_f64(&self) -> f64 {
        self.value.numer().to_f64().unwrap_or(f64::NAN) / self.value.denom().to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_exact(&self) -> bool {
        !self.lower_bound
    }

    fn truncated(r_max: f64) -> Result<Self> {
        let r = exact_ratio(r_max).ok_or_else(|| Error::domain("r_max not representable"))?;
        Ok(Distance {
            value: r.recip(),
            lower_bound: true,
        })
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        if self.lower_bound {
            write!(f, " (radius-limited)")?;
        }
        Ok(())
    }
}

fn check_r_max(r_max: f64) -> Result<u32> {
    if !(r_max >= 1.0) || !r_max.is_finite() {
        return Err(Error::domain("r_max must be a finite number >= 1"));
    }
    Ok(shell_of(r_max))
}

/// `min{inf{1/r : d_𝒜(ξ(x), η(x)) <= 1/r on Q_r ∩ ℒ}, 1}`, scanned exactly up
/// to radius `r_max`.
///
/// With `f_k` the largest letter distance on shell `<= k`, the first `k` with
/// `f_k > 1/(k+1)` gives the value `min(f_k, 1/k)` (or `1` at `k = 0`).
pub fn config_distance(xi: &Configuration, eta: &Configuration, r_max: f64) -> Result<Distance> {
    if !xi.compatible(eta) {
        return Err(Error::domain("configurations live on different lattices or alphabets"));
    }
    let k_max = check_r_max(r_max)?;
    let alphabet = xi.alphabet();
    let dim = xi.dim();
    let one = Ratio::<i128>::one();
    let mut f = Ratio::<i128>::zero();
    for k in 0..=k_max {
        let mut shell_max = |x: &[i64]| {
            let d = alphabet.distance_exact(xi.letter_at(x), eta.letter_at(x));
            if d > f {
                f = d;
            }
        };
        if dim == 1 {
            let k = k as i64;
            shell_max(&[k]);
            if k > 0 {
                shell_max(&[-k]);
            }
        } else {
            for n in cube_offsets(dim, k) {
                if max_norm(&n) == k as u64 {
                    shell_max(&n);
                }
            }
        }
        if f > Ratio::new(1, k as i128 + 1) {
            let value = if k == 0 { one } else { f.min(Ratio::new(1, k as i128)).min(one) };
            return Ok(Distance {
                value,
                lower_bound: false,
            });
        }
    }
    Distance::truncated(r_max)
}

/// Hausdorff distance between subshifts over a discretely metrized alphabet.
///
/// Two subshifts are within `1/k` exactly when their dictionaries agree on
/// every shell below `k`; the first shell `k` where they differ gives `1/k`
/// (and `1` when they already differ at `k = 0`). Dictionary equality is
/// monotone under restriction, so the scan is a binary search.
pub fn subshift_distance(a: &Subshift, b: &Subshift, r_max: f64) -> Result<Distance> {
    if !a.compatible(b) {
        return Err(Error::domain("subshifts live on different lattices or alphabets"));
    }
    if !a.alphabet().is_discrete() {
        return Err(Error::domain(
            "subshift distance is only implemented for the discrete alphabet metric",
        ));
    }
    let k_max = check_r_max(r_max)?;
    let equal = |k: u32| -> Result<bool> { Ok(a.dictionary(k)?.same_patterns(&b.dictionary(k)?)) };
    if !equal(0)? {
        return Ok(Distance {
            value: Ratio::one(),
            lower_bound: false,
        });
    }
    // Largest shell known equal, smallest known different.
    let (mut lo, mut hi) = (0u32, None);
    let mut step = 1u32;
    while hi.is_none() {
        let probe = lo.saturating_add(step).min(k_max);
        if probe == lo {
            break;
        }
        if equal(probe)? {
            lo = probe;
            step = step.saturating_mul(2);
        } else {
            hi = Some(probe);
        }
    }
    let Some(mut hi) = hi else {
        return Distance::truncated(r_max);
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if equal(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Distance {
        value: Ratio::new(1, hi as i128),
        lower_bound: false,
    })
}
