//! Pattern dictionaries and the subshifts that produce them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;

use super::config::{Configuration, Source};
use super::{Alphabet, Letter};
use crate::error::{Error, Result};
use crate::lattice::{cube_index, cube_offsets, Lattice};

/// Default sample-length cap for irrational rotation dictionaries.
pub const DEFAULT_SAMPLE_LIMIT: u64 = 1 << 22;
const INITIAL_SAMPLE: u64 = 1 << 10;

/// The restriction of a configuration to `Q_shell`, in canonical cube order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    dim: usize,
    shell: u32,
    letters: Vec<Letter>,
}

impl Pattern {
    pub fn new(dim: usize, shell: u32, letters: Vec<Letter>) -> Result<Self> {
        let expected = ((2 * shell as usize) + 1).pow(dim as u32);
        if letters.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: letters.len(),
            });
        }
        Ok(Pattern { dim, shell, letters })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shell(&self) -> u32 {
        self.shell
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Letter at offset `n` from the centre, if inside the pattern.
    pub fn get(&self, n: &[i64]) -> Option<Letter> {
        cube_index(self.shell, n).map(|i| self.letters[i])
    }

    /// Sub-pattern on `center + Q_shell`.
    pub fn window(&self, center: &[i64], shell: u32) -> Option<Vec<Letter>> {
        cube_offsets(self.dim, shell)
            .iter()
            .map(|n| {
                let x: Vec<i64> = n.iter().zip(center).map(|(a, b)| a + b).collect();
                self.get(&x)
            })
            .collect()
    }

    pub fn restrict(&self, shell: u32) -> Option<Pattern> {
        if shell > self.shell {
            return None;
        }
        let centre = alloc::vec![0; self.dim];
        Some(Pattern {
            dim: self.dim,
            shell,
            letters: self.window(&centre, shell)?,
        })
    }
}

/// The set of all `Q_shell` patterns of a subshift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternDictionary {
    dim: usize,
    shell: u32,
    patterns: BTreeSet<Vec<Letter>>,
    sampled: bool,
}

impl PatternDictionary {
    pub fn shell(&self) -> u32 {
        self.shell
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// True when obtained from a finite orbit sample rather than exactly.
    pub fn sampled(&self) -> bool {
        self.sampled
    }

    pub fn contains(&self, letters: &[Letter]) -> bool {
        self.patterns.contains(letters)
    }

    pub fn words(&self) -> impl Iterator<Item = &Vec<Letter>> {
        self.patterns.iter()
    }

    pub fn patterns(&self) -> impl Iterator<Item = Pattern> + '_ {
        self.patterns.iter().map(|w| Pattern {
            dim: self.dim,
            shell: self.shell,
            letters: w.clone(),
        })
    }

    /// Same pattern set (ignores provenance).
    pub fn same_patterns(&self, other: &PatternDictionary) -> bool {
        self.shell == other.shell && self.patterns == other.patterns
    }

    pub fn restrict(&self, shell: u32) -> Option<PatternDictionary> {
        if shell > self.shell {
            return None;
        }
        let patterns = self
            .patterns()
            .map(|p| p.restrict(shell).map(|q| q.letters))
            .collect::<Option<BTreeSet<_>>>()?;
        Some(PatternDictionary {
            dim: self.dim,
            shell,
            patterns,
            sampled: self.sampled,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubshiftKind {
    PeriodicOrbit(Configuration),
    OrbitClosure(Configuration),
    ExplicitDictionary(BTreeMap<u32, BTreeSet<Vec<Letter>>>),
}

/// A closed shift-invariant set of configurations, accessed through its
/// pattern dictionaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Subshift {
    lattice: Lattice,
    alphabet: Arc<Alphabet>,
    kind: SubshiftKind,
    sample_limit: u64,
}

impl Subshift {
    /// Orbit of a periodic configuration.
    pub fn periodic_orbit(config: Configuration) -> Result<Self> {
        if config.periods().is_none() {
            return Err(Error::domain("periodic orbit needs a periodic configuration"));
        }
        Ok(Subshift {
            lattice: config.lattice().clone(),
            alphabet: config.alphabet().clone(),
            kind: SubshiftKind::PeriodicOrbit(config),
            sample_limit: DEFAULT_SAMPLE_LIMIT,
        })
    }

    /// Orbit closure of any configuration; periodic inputs become periodic
    /// orbits.
    pub fn orbit_closure(config: Configuration) -> Self {
        if config.periods().is_some() {
            return Self::periodic_orbit(config).expect("periodic");
        }
        Subshift {
            lattice: config.lattice().clone(),
            alphabet: config.alphabet().clone(),
            kind: SubshiftKind::OrbitClosure(config),
            sample_limit: DEFAULT_SAMPLE_LIMIT,
        }
    }

    /// A subshift given directly by dictionaries at some shells. Smaller
    /// shells are derived by restriction.
    pub fn explicit(lattice: Lattice, alphabet: Arc<Alphabet>, dictionaries: BTreeMap<u32, BTreeSet<Vec<Letter>>>) -> Result<Self> {
        if dictionaries.is_empty() {
            return Err(Error::domain("explicit subshift needs at least one dictionary"));
        }
        let dim = lattice.dim();
        for (&shell, set) in &dictionaries {
            if set.is_empty() {
                return Err(Error::domain("dictionaries must be nonempty"));
            }
            for w in set {
                Pattern::new(dim, shell, w.clone())?;
                alphabet.check_letters(w)?;
            }
        }
        let s = Subshift {
            lattice,
            alphabet,
            kind: SubshiftKind::ExplicitDictionary(dictionaries),
            sample_limit: DEFAULT_SAMPLE_LIMIT,
        };
        // Restriction consistency between every materialized pair.
        if let SubshiftKind::ExplicitDictionary(map) = &s.kind {
            let shells: Vec<u32> = map.keys().copied().collect();
            for (i, &hi) in shells.iter().enumerate() {
                let big = s.explicit_at(hi);
                for &lo in &shells[..i] {
                    let r = big.restrict(lo).expect("smaller shell");
                    if !r.patterns.is_subset(&s.explicit_at(lo).patterns) {
                        return Err(Error::domain("explicit dictionaries are not restriction-consistent"));
                    }
                }
            }
        }
        Ok(s)
    }

    /// Caps the orbit sample length for sampled dictionaries.
    pub fn with_sample_limit(mut self, limit: u64) -> Self {
        self.sample_limit = limit;
        self
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn kind(&self) -> &SubshiftKind {
        &self.kind
    }

    pub fn compatible(&self, other: &Subshift) -> bool {
        self.lattice == other.lattice && (Arc::ptr_eq(&self.alphabet, &other.alphabet) || self.alphabet == other.alphabet)
    }

    /// A representative configuration, when the subshift has one.
    pub fn representative(&self) -> Option<&Configuration> {
        match &self.kind {
            SubshiftKind::PeriodicOrbit(c) | SubshiftKind::OrbitClosure(c) => Some(c),
            SubshiftKind::ExplicitDictionary(_) => None,
        }
    }

    fn explicit_at(&self, shell: u32) -> PatternDictionary {
        let SubshiftKind::ExplicitDictionary(map) = &self.kind else {
            unreachable!()
        };
        PatternDictionary {
            dim: self.lattice.dim(),
            shell,
            patterns: map[&shell].clone(),
            sampled: false,
        }
    }

    /// All patterns of the subshift on `Q_shell`.
    pub fn dictionary(&self, shell: u32) -> Result<PatternDictionary> {
        let dim = self.lattice.dim();
        match &self.kind {
            SubshiftKind::PeriodicOrbit(c) => Ok(periodic_dictionary(c, shell)),
            SubshiftKind::OrbitClosure(c) => match c.source() {
                Source::Substitution(s) => Ok(PatternDictionary {
                    dim,
                    shell,
                    patterns: s.factors(2 * shell as usize + 1),
                    sampled: false,
                }),
                Source::Rotation(r) => sampled_dictionary(c, shell, self.sample_limit, r.is_sturmian()),
                Source::Periodic(_) => Ok(periodic_dictionary(c, shell)),
            },
            SubshiftKind::ExplicitDictionary(map) => {
                let (&have, _) = map.range(shell..).next().ok_or(Error::DictionaryUnavailable(shell))?;
                Ok(self.explicit_at(have).restrict(shell).expect("larger shell"))
            }
        }
    }
}

/// Windows of a periodic configuration read at every offset of one period.
fn periodic_dictionary(c: &Configuration, shell: u32) -> PatternDictionary {
    let periods = c.periods().expect("periodic");
    let dim = c.dim();
    let mut patterns = BTreeSet::new();
    let count: u64 = periods.iter().product();
    let mut cur = alloc::vec![0i64; dim];
    for _ in 0..count {
        patterns.insert(c.window(&cur, shell));
        for j in (0..dim).rev() {
            cur[j] += 1;
            if (cur[j] as u64) < periods[j] {
                break;
            }
            cur[j] = 0;
        }
    }
    PatternDictionary {
        dim,
        shell,
        patterns,
        sampled: false,
    }
}

/// Orbit-sampled dictionary: the sample length doubles until the window set
/// is unchanged twice in a row. Sturmian codings are cross-checked against
/// the `n + 1` factor count.
fn sampled_dictionary(c: &Configuration, shell: u32, limit: u64, sturmian: bool) -> Result<PatternDictionary> {
    let n = 2 * shell as usize + 1;
    let mut patterns: BTreeSet<Vec<Letter>> = BTreeSet::new();
    let mut len = 0u64;
    let mut target = INITIAL_SAMPLE.min(limit.max(1));
    let mut stable = 0;
    let mut word: Vec<Letter> = Vec::new();
    loop {
        let before = patterns.len();
        // Extend the sample from `len` to `target`, with the n - 1 letters of
        // overlap needed for windows that straddle the old end.
        let from = (len as i64 - n as i64 + 1).max(0);
        word.clear();
        word.extend((from..target as i64 + n as i64 - 1).map(|x| c.letter_at(&[x])));
        for w in word.windows(n) {
            patterns.insert(w.to_vec());
        }
        len = target;
        if patterns.len() == before && before > 0 {
            stable += 1;
            if stable >= 2 {
                break;
            }
        } else {
            stable = 0;
        }
        if target >= limit {
            return Err(Error::DictionaryNotCertified { shell, limit });
        }
        target = (target * 2).min(limit);
    }
    if sturmian && patterns.len() != n + 1 {
        return Err(Error::DictionaryNotCertified { shell, limit });
    }
    Ok(PatternDictionary {
        dim: 1,
        shell,
        patterns,
        sampled: true,
    })
}
