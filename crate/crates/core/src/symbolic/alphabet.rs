use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::float::FloatCore;

use crate::error::{Error, Result};

/// Index of a label inside its [`Alphabet`].
pub type Letter = u16;

/// A finite alphabet with a metric and optional scalar values per letter.
///
/// Metric entries are mirrored as exact rationals so distances between
/// configurations can be compared without rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    labels: Vec<String>,
    metric: Vec<f64>,
    exact: Vec<Ratio<i128>>,
    values: Vec<Complex64>,
    discrete: bool,
}

impl Alphabet {
    /// Alphabet with the discrete metric and values `0, 1, 2, …`.
    pub fn discrete<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let n = labels.len();
        let mut metric = alloc::vec![1.0; n * n];
        for i in 0..n {
            metric[i * n + i] = 0.0;
        }
        Self::with_metric(labels, metric)
    }

    /// Alphabet with an explicit row-major metric matrix, validated
    /// exhaustively (symmetry, zero diagonal, positivity, triangle
    /// inequality in exact arithmetic).
    pub fn with_metric<S: AsRef<str>>(labels: &[S], metric: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::domain("alphabet must have at least one label"));
        }
        if n > Letter::MAX as usize {
            return Err(Error::domain("alphabet too large"));
        }
        let labels: Vec<String> = labels.iter().map(|s| s.as_ref().to_string()).collect();
        for i in 0..n {
            for j in 0..i {
                if labels[i] == labels[j] {
                    return Err(Error::domain(alloc::format!("duplicate label {:?}", labels[i])));
                }
            }
        }
        if metric.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: metric.len(),
            });
        }
        let exact = validate_metric(n, &metric)?;
        let discrete = (0..n).all(|i| (0..n).all(|j| metric[i * n + j] == if i == j { 0.0 } else { 1.0 }));
        Ok(Alphabet {
            labels,
            metric,
            exact,
            values: (0..n).map(|i| Complex64::new(i as f64, 0.0)).collect(),
            discrete,
        })
    }

    /// Replaces the per-letter scalar values (used by potentials).
    pub fn with_values(mut self, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.labels.len(),
                got: values.len(),
            });
        }
        self.values = values;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, a: Letter) -> &str {
        &self.labels[a as usize]
    }

    pub fn letter(&self, label: &str) -> Option<Letter> {
        self.labels.iter().position(|l| l == label).map(|i| i as Letter)
    }

    pub fn is_discrete(&self) -> bool {
        self.discrete
    }

    pub fn metric(&self) -> &[f64] {
        &self.metric
    }

    pub fn distance(&self, a: Letter, b: Letter) -> f64 {
        self.metric[a as usize * self.len() + b as usize]
    }

    pub fn distance_exact(&self, a: Letter, b: Letter) -> Ratio<i128> {
        self.exact[a as usize * self.len() + b as usize]
    }

    pub fn value(&self, a: Letter) -> Complex64 {
        self.values[a as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Checks that every letter of `word` belongs to this alphabet.
    pub fn check_letters(&self, word: &[Letter]) -> Result<()> {
        match word.iter().find(|&&a| a as usize >= self.len()) {
            Some(a) => Err(Error::domain(alloc::format!("letter {a} outside alphabet of size {}", self.len()))),
            None => Ok(()),
        }
    }
}

fn validate_metric(n: usize, m: &[f64]) -> Result<Vec<Ratio<i128>>> {
    let bad = |invariant, a, b| Error::InvalidMetric { invariant, a, b };
    let mut exact = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = m[i * n + j];
            if !x.is_finite() {
                return Err(bad("finite entries", i, j));
            }
            exact.push(exact_ratio(x).ok_or(bad("exactly representable entries", i, j))?);
        }
    }
    for i in 0..n {
        if m[i * n + i] != 0.0 {
            return Err(bad("zero diagonal", i, i));
        }
        for j in 0..n {
            if m[i * n + j] != m[j * n + i] {
                return Err(bad("symmetry", i, j));
            }
            if i != j && !(m[i * n + j] > 0.0) {
                return Err(bad("positivity", i, j));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if exact[i * n + k] > exact[i * n + j] + exact[j * n + k] {
                    return Err(bad("triangle inequality", i, k));
                }
            }
        }
    }
    Ok(exact)
}

/// The exact rational value of a finite double, if numerator and
/// denominator fit comfortably in `i128`.
pub fn exact_ratio(x: f64) -> Option<Ratio<i128>> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(Ratio::from_integer(0));
    }
    let (mut mant, mut exp, sign) = FloatCore::integer_decode(x);
    let tz = mant.trailing_zeros();
    mant >>= tz;
    exp += tz as i16;
    let m = sign as i128 * mant as i128;
    if exp >= 0 {
        if exp > 60 {
            return None;
        }
        Some(Ratio::from_integer(m << exp))
    } else {
        if -exp > 100 {
            return None;
        }
        Some(Ratio::new(m, 1i128 << (-exp)))
    }
}
