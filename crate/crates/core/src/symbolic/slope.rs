//! Rotation slopes in exact form and their continued-fraction convergents.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_traits::float::FloatCore;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A slope `α ∈ (0, 1)`.
///
/// Quadratic irrationals are kept symbolically so their expansions are exact;
/// `Fixed` is a 128-bit binary fraction `f / 2^128`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slope {
    Rational { p: u64, q: u64 },
    /// `(a + √b) / c`.
    Quadratic { a: i64, b: u64, c: i64 },
    Fixed(u128),
}

impl Slope {
    pub fn rational(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p == 0 || p >= q {
            return Err(Error::domain("slope must lie strictly between 0 and 1"));
        }
        let g = gcd(p, q);
        Ok(Slope::Rational { p: p / g, q: q / g })
    }

    pub fn quadratic(a: i64, b: u64, c: i64) -> Result<Self> {
        if c <= 0 {
            return Err(Error::domain("quadratic slope needs a positive denominator"));
        }
        let s = Slope::Quadratic { a, b, c };
        let num = quadratic_scaled(a, b, c);
        if num <= BigInt::zero() || num >= BigInt::one() << 128 {
            return Err(Error::domain("slope must lie strictly between 0 and 1"));
        }
        Ok(s)
    }

    /// `(√5 - 1) / 2`.
    pub fn golden_mean_minus_one() -> Self {
        Slope::Quadratic { a: -1, b: 5, c: 2 }
    }

    /// `√2 - 1`.
    pub fn sqrt2_minus_one() -> Self {
        Slope::Quadratic { a: -1, b: 2, c: 1 }
    }

    /// Interprets a double. If `x` is the correctly rounded value of some
    /// `p/q` with `q <= 2^20`, the slope is that rational; otherwise the exact
    /// binary value of `x` is used.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::domain("slope must lie strictly between 0 and 1"));
        }
        let f = f64_fraction_bits(x);
        let pq = partial_quotients_fixed(f, 64);
        for (p, q) in convergents_from(&pq) {
            if q > 1 << 20 {
                break;
            }
            if p as f64 / q as f64 == x {
                return Slope::rational(p, q);
            }
        }
        Ok(Slope::Fixed(f))
    }

    pub fn to_f64(&self) -> f64 {
        match *self {
            Slope::Rational { p, q } => p as f64 / q as f64,
            Slope::Quadratic { a, b, c } => (a as f64 + libm::sqrt(b as f64)) / c as f64,
            Slope::Fixed(f) => f as f64 / 2f64.powi(128),
        }
    }

    pub fn as_rational(&self) -> Option<(u64, u64)> {
        match *self {
            Slope::Rational { p, q } => Some((p, q)),
            _ => None,
        }
    }

    /// `⌊α · 2^128⌋`.
    pub fn fixed(&self) -> u128 {
        match *self {
            Slope::Rational { p, q } => {
                let v: BigUint = (BigUint::from(p) << 128u32) / BigUint::from(q);
                v.to_u128().unwrap_or(u128::MAX)
            }
            Slope::Quadratic { a, b, c } => quadratic_scaled(a, b, c).to_u128().unwrap_or(u128::MAX),
            Slope::Fixed(f) => f,
        }
    }

    /// Partial quotients `a_1, a_2, …` of `α = [0; a_1, a_2, …]`, at most
    /// `k_max` of them; finite for rational slopes.
    pub fn partial_quotients(&self, k_max: usize) -> Vec<u64> {
        match *self {
            Slope::Rational { p, q } => {
                let (mut num, mut den) = (q, p);
                let mut out = Vec::new();
                while den != 0 && out.len() < k_max {
                    out.push(num / den);
                    let r = num % den;
                    num = den;
                    den = r;
                }
                out
            }
            Slope::Quadratic { a, b, c } => partial_quotients_quadratic(a, b, c, k_max),
            Slope::Fixed(f) => partial_quotients_fixed(f, k_max),
        }
    }

    /// The first `k_max` convergents `p/q` (excluding the trivial `0/1`).
    pub fn convergents(&self, k_max: usize) -> Vec<(u64, u64)> {
        convergents_from(&self.partial_quotients(k_max))
    }
}

/// Convergents of `[0; a_1, a_2, …]`, stopping early on overflow.
pub fn convergents_from(pq: &[u64]) -> Vec<(u64, u64)> {
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, 0u64, 1u64);
    let mut out = Vec::with_capacity(pq.len());
    for &a in pq {
        let p = a.checked_mul(p1).and_then(|x| x.checked_add(p0));
        let q = a.checked_mul(q1).and_then(|x| x.checked_add(q0));
        let (Some(p), Some(q)) = (p, q) else { break };
        out.push((p, q));
        (p0, q0, p1, q1) = (p1, q1, p, q);
    }
    out
}

/// Continued-fraction convergents of a slope; see [`Slope::convergents`].
pub fn convergents(alpha: &Slope, k_max: usize) -> Vec<(u64, u64)> {
    alpha.convergents(k_max)
}

fn quadratic_scaled(a: i64, b: u64, c: i64) -> BigInt {
    let root = (BigUint::from(b) << 256u32).sqrt();
    let num = (BigInt::from(a) << 128u32) + BigInt::from(root);
    num.div_floor_euclid(c)
}

trait DivFloor {
    fn div_floor_euclid(&self, c: i64) -> BigInt;
}

impl DivFloor for BigInt {
    fn div_floor_euclid(&self, c: i64) -> BigInt {
        let c = BigInt::from(c);
        let q = self / &c;
        if (&q * &c) != *self && (self.is_negative() != c.is_negative()) {
            q - 1
        } else {
            q
        }
    }
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

/// Complete quotients `(P + √D) / Q` with `Q | D - P²`.
fn partial_quotients_quadratic(a: i64, b: u64, c: i64, k_max: usize) -> Vec<u64> {
    let (mut p, mut d, mut q) = (a as i128, b as i128, c as i128);
    if (d - p * p) % q != 0 {
        p *= q.abs();
        d *= q * q;
        q *= q.abs();
    }
    let s = isqrt(d as u128) as i128;
    let square = s * s == d;
    let floor_quot = |p: i128, q: i128| -> i128 {
        if q > 0 {
            floor_div(p + s, q)
        } else if square {
            floor_div(-p - s, -q)
        } else {
            floor_div(-p - s - 1, -q)
        }
    };
    let mut out = Vec::new();
    // Integer part is zero for slopes in (0, 1); step past it.
    let a0 = floor_quot(p, q);
    let mut pn = a0 * q - p;
    if d - pn * pn == 0 {
        return out;
    }
    let mut qn = (d - pn * pn) / q;
    (p, q) = (pn, qn);
    while out.len() < k_max {
        let ak = floor_quot(p, q);
        if ak < 0 || ak > u64::MAX as i128 {
            break;
        }
        out.push(ak as u64);
        pn = ak * q - p;
        if d - pn * pn == 0 {
            break;
        }
        qn = (d - pn * pn) / q;
        (p, q) = (pn, qn);
    }
    out
}

fn partial_quotients_fixed(f: u128, k_max: usize) -> Vec<u64> {
    let mut num = BigUint::one() << 128u32;
    let mut den = BigUint::from(f);
    let mut out = Vec::new();
    while !den.is_zero() && out.len() < k_max {
        let a = &num / &den;
        let Some(a) = a.to_u64() else { break };
        out.push(a);
        let r = &num % &den;
        num = den;
        den = r;
    }
    out
}

/// `⌊x · 2^128⌋` for `x ∈ [0, 1)`, exact.
pub(crate) fn f64_fraction_bits(x: f64) -> u128 {
    let (mant, exp, _) = FloatCore::integer_decode(x);
    let shift = 128 + exp as i32;
    if shift <= -64 {
        0
    } else if shift < 0 {
        (mant >> (-shift) as u32) as u128
    } else {
        (mant as u128) << shift as u32
    }
}

pub(crate) fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = libm::sqrt(n as f64) as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|y| y <= n) {
        x += 1;
    }
    x
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
