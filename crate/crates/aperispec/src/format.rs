//! JSON input formats: lattices, alphabets, configurations and models.
//!
//! Letters are always referred to by label. Models are resolved against the
//! alphabet of the configuration they will act on.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use aperispec_core::linalg::CMatrix;
use aperispec_core::operators::{potential, Coefficient, Hamiltonian, Term};
use aperispec_core::symbolic::{
    fibonacci_word, kohmoto_configuration, shift, Alphabet, Configuration, Cut, Letter, RotationCoding, Slope, Subshift,
    SubstitutionFixedPoint,
};
use aperispec_core::Lattice;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub d: usize,
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<Vec<f64>>>,
}

impl LatticeSpec {
    pub fn build(&self) -> Result<Lattice> {
        match &self.m {
            None => Ok(Lattice::cubic(self.d)),
            Some(rows) => {
                if rows.len() != self.d || rows.iter().any(|r| r.len() != self.d) {
                    return Err(CliError::domain(format!("lattice basis must be {0}x{0}", self.d)));
                }
                Ok(Lattice::new(self.d, rows.concat())?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphabetSpec {
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
    /// Real scalar per label, read by potentials. Defaults to the label index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl Default for AlphabetSpec {
    fn default() -> Self {
        AlphabetSpec {
            labels: vec!["a".into(), "b".into()],
            metric: None,
            values: None,
        }
    }
}

impl AlphabetSpec {
    pub fn build(&self) -> Result<Arc<Alphabet>> {
        let mut a = match &self.metric {
            None => Alphabet::discrete(&self.labels)?,
            Some(rows) => {
                let n = self.labels.len();
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::domain(format!("alphabet metric must be {n}x{n}")));
                }
                Alphabet::with_metric(&self.labels, rows.concat())?
            }
        };
        if let Some(v) = &self.values {
            a = a.with_values(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())?;
        }
        Ok(Arc::new(a))
    }
}

/// A slope in `(0, 1)`: a number, `"golden"`, `"sqrt2-1"`, `{"p", "q"}` or
/// `{"a", "b", "c"}` for `(a + √b) / c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SlopeSpec {
    Named(String),
    Rational { p: u64, q: u64 },
    Quadratic { a: i64, b: u64, c: i64 },
    Number(f64),
}

impl SlopeSpec {
    pub fn build(&self) -> Result<Slope> {
        Ok(match self {
            SlopeSpec::Named(s) => match s.as_str() {
                "golden" | "golden-1" => Slope::golden_mean_minus_one(),
                "sqrt2-1" => Slope::sqrt2_minus_one(),
                other => return Err(CliError::domain(format!("unknown slope name {other:?}"))),
            },
            SlopeSpec::Rational { p, q } => Slope::rational(*p, *q)?,
            SlopeSpec::Quadratic { a, b, c } => Slope::quadratic(*a, *b, *c)?,
            SlopeSpec::Number(x) => Slope::from_f64(*x)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutSpec {
    pub int: i64,
    pub alpha: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConfigurationKind {
    /// `block` is row-major over the period box; `periods` defaults to the
    /// block length in 1D.
    Periodic {
        #[serde(default)]
        periods: Option<Vec<u64>>,
        block: Vec<String>,
    },
    /// The length-`F_k` Fibonacci word, repeated.
    Fibonacci { k: u32 },
    Substitution {
        rules: BTreeMap<String, Vec<String>>,
        seed: [String; 2],
    },
    Rotation {
        alpha: SlopeSpec,
        #[serde(default)]
        phase: f64,
        cuts: Vec<CutSpec>,
        letters: Vec<String>,
    },
    Kohmoto {
        alpha: SlopeSpec,
        #[serde(default)]
        phase: f64,
    },
}

/// `{"alphabet", "lattice", "configuration", "shift"}`; everything but
/// `configuration` is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationSpec {
    #[serde(default)]
    pub alphabet: AlphabetSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    pub configuration: ConfigurationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<i64>>,
}

fn letter(alphabet: &Alphabet, label: &str) -> Result<Letter> {
    alphabet
        .letter(label)
        .ok_or_else(|| CliError::domain(format!("label {label:?} is not in the alphabet")))
}

fn letters(alphabet: &Alphabet, labels: &[String]) -> Result<Vec<Letter>> {
    labels.iter().map(|l| letter(alphabet, l)).collect()
}

impl ConfigurationSpec {
    pub fn build(&self) -> Result<Configuration> {
        let alphabet = self.alphabet.build()?;
        let lattice = self.lattice.as_ref().map(LatticeSpec::build).transpose()?;
        let one_dim = |what: &str| -> Result<()> {
            match &lattice {
                Some(l) if l.dim() != 1 => Err(CliError::domain(format!("{what} configurations live on Z"))),
                _ => Ok(()),
            }
        };
        let x = match &self.configuration {
            ConfigurationKind::Periodic { periods, block } => {
                let block = letters(&alphabet, block)?;
                let lattice = lattice.clone().unwrap_or_else(|| Lattice::cubic(1));
                let periods = periods.clone().unwrap_or_else(|| vec![block.len() as u64]);
                Configuration::periodic(lattice, alphabet, periods, block)?
            }
            ConfigurationKind::Fibonacci { k } => {
                one_dim("fibonacci")?;
                if alphabet.len() < 2 {
                    return Err(CliError::domain("fibonacci words need two letters"));
                }
                Configuration::word(alphabet, fibonacci_word(*k)?)?
            }
            ConfigurationKind::Substitution { rules, seed } => {
                one_dim("substitution")?;
                let mut table = vec![None; alphabet.len()];
                for (from, to) in rules {
                    table[letter(&alphabet, from)? as usize] = Some(letters(&alphabet, to)?);
                }
                let table = table
                    .into_iter()
                    .enumerate()
                    .map(|(i, r)| r.ok_or_else(|| CliError::domain(format!("no rule for {:?}", alphabet.label(i as Letter)))))
                    .collect::<Result<Vec<_>>>()?;
                let seed = (letter(&alphabet, &seed[0])?, letter(&alphabet, &seed[1])?);
                Configuration::substitution(alphabet, SubstitutionFixedPoint::new(table, seed)?)?
            }
            ConfigurationKind::Rotation { alpha, phase, cuts, letters: ls } => {
                one_dim("rotation")?;
                let cuts = cuts.iter().map(|c| Cut { int: c.int, alpha: c.alpha }).collect();
                let ls = letters(&alphabet, ls)?;
                Configuration::rotation(alphabet, RotationCoding::new(alpha.build()?, *phase, cuts, ls)?)?
            }
            ConfigurationKind::Kohmoto { alpha, phase } => {
                one_dim("kohmoto")?;
                if alphabet.len() < 2 {
                    return Err(CliError::domain("kohmoto configurations need two letters"));
                }
                kohmoto_configuration(alpha.build()?, *phase, alphabet, [0, 1])?
            }
        };
        match &self.shift {
            Some(h) => Ok(shift(&x, h)?),
            None => Ok(x),
        }
    }

    /// The orbit (periodic input) or orbit closure of the configuration.
    pub fn subshift(&self) -> Result<(Configuration, Subshift)> {
        let x = self.build()?;
        let s = Subshift::orbit_closure(x.clone());
        Ok((x, s))
    }
}

/// A matrix entry: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// A scalar or an `N x N` matrix of entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValueSpec {
    Scalar(Entry),
    Matrix(Vec<Vec<Entry>>),
}

impl ValueSpec {
    fn build(&self, n: usize) -> Result<CMatrix> {
        match self {
            ValueSpec::Scalar(e) if n == 1 => Ok(CMatrix::scalar(e.value())),
            ValueSpec::Scalar(e) => {
                let z = e.value();
                Ok(CMatrix::from_rows(n, (0..n * n).map(|k| if k % (n + 1) == 0 { z } else { Complex64::new(0.0, 0.0) }).collect())?)
            }
            ValueSpec::Matrix(rows) => {
                if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                    return Err(CliError::domain(format!("coefficient matrices must be {n}x{n}")));
                }
                Ok(CMatrix::from_rows(n, rows.iter().flatten().map(|e| e.value()).collect())?)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub pattern: Vec<String>,
    pub value: ValueSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefSpec {
    Constant {
        value: ValueSpec,
        #[serde(default)]
        radius: Option<u32>,
        #[serde(default)]
        hoelder: Option<f64>,
    },
    /// Keyed by the pattern on `Q_{key_radius}` around the evaluation site,
    /// listed in canonical cube order.
    Lookup {
        key_radius: u32,
        table: Vec<TableEntry>,
        #[serde(default)]
        radius: Option<u32>,
        hoelder: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub h: Vec<i64>,
    pub coef: CoefSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerSpec {
    pub lambda: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one_usize")]
    pub dim: usize,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

/// `{"N", "beta", "terms"}` or the shorthand `{"schrodinger": {"lambda"}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSpec {
    Schrodinger { schrodinger: SchrodingerSpec },
    General {
        #[serde(rename = "N")]
        n: usize,
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lattice: Option<LatticeSpec>,
        terms: Vec<TermSpec>,
    },
}

impl ModelSpec {
    /// Resolves labels against `alphabet`.
    pub fn build(&self, alphabet: &Alphabet) -> Result<Hamiltonian> {
        match self {
            ModelSpec::Schrodinger { schrodinger: s } => {
                let d = s.dim;
                if d == 0 {
                    return Err(CliError::domain("dimension must be positive"));
                }
                let mut terms = vec![Term {
                    h: vec![0; d],
                    coef: potential(alphabet, s.lambda)?,
                }];
                for j in 0..d {
                    for sign in [1, -1] {
                        let mut h = vec![0; d];
                        h[j] = sign;
                        terms.push(Term { h, coef: Coefficient::scalar(1.0) });
                    }
                }
                Ok(Hamiltonian::new(Lattice::cubic(d), 1, s.beta, terms)?)
            }
            ModelSpec::General { n, beta, lattice, terms } => {
                let lattice = match lattice {
                    Some(l) => l.build()?,
                    None => Lattice::cubic(terms.first().map_or(1, |t| t.h.len())),
                };
                let terms = terms
                    .iter()
                    .map(|t| {
                        let coef = match &t.coef {
                            CoefSpec::Constant { value, radius, hoelder } => {
                                let mut c = Coefficient::constant(value.build(*n)?);
                                if let Some(r) = radius {
                                    c = c.with_radius(*r)?;
                                }
                                if let Some(k) = hoelder {
                                    c = c.with_hoelder(*k)?;
                                }
                                c
                            }
                            CoefSpec::Lookup { key_radius, table, radius, hoelder } => {
                                let mut map = BTreeMap::new();
                                for e in table {
                                    map.insert(letters(alphabet, &e.pattern)?, e.value.build(*n)?);
                                }
                                Coefficient::lookup(*key_radius, map, radius.unwrap_or((*key_radius).max(1)), *hoelder)?
                            }
                        };
                        Ok(Term { h: t.h.clone(), coef })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Hamiltonian::new(lattice, *n, *beta, terms)?)
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ModelSpec::Schrodinger { schrodinger: s } => format!("schrodinger(lambda={}, beta={}, d={})", s.lambda, s.beta, s.dim),
            ModelSpec::General { n, beta, terms, .. } => format!("general(N={n}, beta={beta}, {} terms)", terms.len()),
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::domain(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::domain(format!("{}: {e}", path.display())))
}
