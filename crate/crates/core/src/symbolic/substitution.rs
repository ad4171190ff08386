//! Primitive substitutions and their two-sided fixed points.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::Letter;
use crate::error::{Error, Result};

/// Stop tabulating image lengths once every letter's image exceeds this.
const LEN_CAP: u128 = 1 << 66;

/// The bi-infinite fixed point `… σ^∞(a) . σ^∞(b) …` of a primitive
/// substitution, with position `0` holding the first letter of the right
/// half.
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionFixedPoint {
    rules: Vec<Vec<Letter>>,
    seed: (Letter, Letter),
    power: u32,
    /// `lens[m][c] = |σ^m(c)|`, saturating.
    lens: Vec<Vec<u128>>,
    legal_pairs: BTreeSet<(Letter, Letter)>,
}

impl SubstitutionFixedPoint {
    pub fn new(rules: Vec<Vec<Letter>>, seed: (Letter, Letter)) -> Result<Self> {
        let k = rules.len();
        if k == 0 {
            return Err(Error::domain("substitution needs at least one rule"));
        }
        if rules.iter().flatten().any(|&c| c as usize >= k) || seed.0 as usize >= k || seed.1 as usize >= k {
            return Err(Error::domain("substitution refers to a letter without a rule"));
        }
        if rules.iter().any(|w| w.is_empty()) {
            return Err(Error::domain("substitution must be non-erasing"));
        }
        if !is_primitive(&rules) {
            return Err(Error::NotPrimitive);
        }
        if rules.iter().all(|w| w.len() == 1) {
            return Err(Error::domain("substitution must be expanding"));
        }
        let pa = cycle_length(seed.0, |c| *rules[c as usize].last().unwrap())
            .ok_or_else(|| Error::domain("left seed letter is not a suffix fixed point of any power"))?;
        let pb = cycle_length(seed.1, |c| rules[c as usize][0])
            .ok_or_else(|| Error::domain("right seed letter is not a prefix fixed point of any power"))?;
        let power = lcm(pa, pb);
        let mut lens = vec![vec![1u128; k]];
        while lens.last().unwrap().iter().any(|&l| l < LEN_CAP) {
            let prev = lens.last().unwrap();
            let next: Vec<u128> = rules
                .iter()
                .map(|w| w.iter().fold(0u128, |acc, &c| acc.saturating_add(prev[c as usize]).min(LEN_CAP * 4)))
                .collect();
            lens.push(next);
        }
        let legal_pairs = legal_pairs(&rules);
        if !legal_pairs.contains(&seed) {
            return Err(Error::domain("seed pair is not a legal two-letter factor"));
        }
        Ok(SubstitutionFixedPoint {
            rules,
            seed,
            power,
            lens,
            legal_pairs,
        })
    }

    /// The Fibonacci substitution `a ↦ ab, b ↦ a` with seed `a.a` under `σ²`.
    pub fn fibonacci() -> Self {
        Self::new(vec![vec![0, 1], vec![0]], (0, 0)).expect("Fibonacci substitution is valid")
    }

    pub fn rules(&self) -> &[Vec<Letter>] {
        &self.rules
    }

    pub fn seed(&self) -> (Letter, Letter) {
        self.seed
    }

    /// Smallest `k` with `σ^k(a)` ending in `a` and `σ^k(b)` starting with `b`.
    pub fn power(&self) -> u32 {
        self.power
    }

    /// `σ^m(c)`.
    pub fn iterate(&self, c: Letter, m: u32) -> Vec<Letter> {
        let mut w = vec![c];
        for _ in 0..m {
            w = apply(&self.rules, &w);
        }
        w
    }

    pub fn letter_at(&self, n: i64) -> Letter {
        if n >= 0 {
            self.descend(self.seed.1, n as u128, false)
        } else {
            self.descend(self.seed.0, (-(n + 1)) as u128, true)
        }
    }

    /// Letter at offset `pos` of `σ^{jk}(c)` for large `j`, counted from the
    /// right end when `from_right`.
    fn descend(&self, c: Letter, pos: u128, from_right: bool) -> Letter {
        let k = self.power as usize;
        let mut level = k;
        while self.lens[level.min(self.lens.len() - 1)][c as usize] <= pos {
            level += k;
        }
        let mut cur = c;
        let mut pos = pos;
        while level > 0 {
            let below = &self.lens[(level - 1).min(self.lens.len() - 1)];
            let img = &self.rules[cur as usize];
            let mut next = None;
            if from_right {
                for &x in img.iter().rev() {
                    if pos < below[x as usize] {
                        next = Some(x);
                        break;
                    }
                    pos -= below[x as usize];
                }
            } else {
                for &x in img {
                    if pos < below[x as usize] {
                        next = Some(x);
                        break;
                    }
                    pos -= below[x as usize];
                }
            }
            cur = next.expect("position inside image");
            level -= 1;
        }
        cur
    }

    /// All factors of length `n` of the substitution language, which is the
    /// language of the fixed point's orbit closure.
    pub fn factors(&self, n: usize) -> BTreeSet<Vec<Letter>> {
        let mut out = BTreeSet::new();
        if n == 0 {
            out.insert(Vec::new());
            return out;
        }
        if n == 1 {
            for &(x, y) in &self.legal_pairs {
                out.insert(vec![x]);
                out.insert(vec![y]);
            }
            return out;
        }
        // Every factor of length n sits inside σ^m(xy) for a legal pair xy
        // once all images σ^m(c) have length >= n - 1.
        let need = (n - 1) as u128;
        let m = self
            .lens
            .iter()
            .position(|l| l.iter().all(|&x| x >= need))
            .unwrap_or(self.lens.len() - 1) as u32;
        for &(x, y) in &self.legal_pairs {
            let mut w = self.iterate(x, m);
            w.extend(self.iterate(y, m));
            for win in w.windows(n) {
                out.insert(win.to_vec());
            }
        }
        out
    }
}

fn apply(rules: &[Vec<Letter>], w: &[Letter]) -> Vec<Letter> {
    w.iter().flat_map(|&c| rules[c as usize].iter().copied()).collect()
}

/// Two-letter factors of the language, closed under the substitution.
fn legal_pairs(rules: &[Vec<Letter>]) -> BTreeSet<(Letter, Letter)> {
    let mut set = BTreeSet::new();
    let mut todo = Vec::new();
    let push = |w: &[Letter], set: &mut BTreeSet<(Letter, Letter)>, todo: &mut Vec<(Letter, Letter)>| {
        for p in w.windows(2) {
            if set.insert((p[0], p[1])) {
                todo.push((p[0], p[1]));
            }
        }
    };
    for c in 0..rules.len() as Letter {
        // σ^j(c) for j up to the alphabet size reaches length >= 2.
        let mut w = vec![c];
        for _ in 0..=rules.len() {
            w = apply(rules, &w);
            if w.len() >= 2 {
                break;
            }
        }
        push(&w, &mut set, &mut todo);
    }
    while let Some((x, y)) = todo.pop() {
        let w = apply(rules, &[x, y]);
        push(&w, &mut set, &mut todo);
    }
    set
}

fn is_primitive(rules: &[Vec<Letter>]) -> bool {
    let k = rules.len();
    let mut base = vec![false; k * k];
    for (i, w) in rules.iter().enumerate() {
        for &c in w {
            base[i * k + c as usize] = true;
        }
    }
    // Wielandt: a primitive k×k matrix has A^m > 0 for m = (k-1)² + 1.
    let bound = (k - 1) * (k - 1) + 1;
    let mut pow = base.clone();
    for _ in 1..bound {
        if pow.iter().all(|&x| x) {
            return true;
        }
        let mut next = vec![false; k * k];
        for i in 0..k {
            for j in 0..k {
                if pow[i * k + j] {
                    for l in 0..k {
                        next[i * k + l] |= base[j * k + l];
                    }
                }
            }
        }
        pow = next;
    }
    pow.iter().all(|&x| x)
}

/// Length of the cycle through `start` under `f`, if `start` is periodic.
fn cycle_length(start: Letter, f: impl Fn(Letter) -> Letter) -> Option<u32> {
    let mut c = f(start);
    for len in 1..=u16::MAX as u32 + 1 {
        if c == start {
            return Some(len);
        }
        c = f(c);
    }
    None
}

fn lcm(a: u32, b: u32) -> u32 {
    let g = super::slope::gcd(a as u64, b as u64) as u32;
    a / g * b
}

/// The Fibonacci word `σ^{k-2}(a)` of length `F_k` (`F_1 = F_2 = 1`), `k >= 2`.
pub fn fibonacci_word(k: u32) -> Result<Vec<Letter>> {
    if k < 2 {
        return Err(Error::domain("Fibonacci word index must be at least 2"));
    }
    let rules = vec![vec![0, 1], vec![0]];
    let mut w = vec![0];
    for _ in 0..k - 2 {
        w = apply(&rules, &w);
    }
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_fixed_point() {
        let s = SubstitutionFixedPoint::fibonacci();
        assert_eq!(s.power(), 2);
        // σ^{2j}(a) is a prefix of the right half.
        let right: Vec<Letter> = (0..21).map(|n| s.letter_at(n)).collect();
        assert_eq!(right, s.iterate(0, 6)[..21].to_vec());
        // σ^{2j}(a) is a suffix of the left half.
        let w = s.iterate(0, 8);
        let left: Vec<Letter> = (-34..0).map(|n| s.letter_at(n)).collect();
        assert_eq!(left, w[w.len() - 34..].to_vec());
    }

    #[test]
    fn fibonacci_factors_brute_force() {
        let s = SubstitutionFixedPoint::fibonacci();
        let long = s.iterate(0, 20);
        for n in 1..=12 {
            let brute: BTreeSet<Vec<Letter>> = long.windows(n).map(|w| w.to_vec()).collect();
            assert_eq!(s.factors(n), brute, "n = {n}");
            assert_eq!(brute.len(), n + 1);
        }
        let two: BTreeSet<Vec<Letter>> = [vec![0, 0], vec![0, 1], vec![1, 0]].into_iter().collect();
        assert_eq!(s.factors(2), two);
    }

    #[test]
    fn word_lengths_are_fibonacci() {
        let mut f = (1usize, 1usize);
        for k in 2..=14 {
            assert_eq!(fibonacci_word(k).unwrap().len(), f.1);
            f = (f.1, f.0 + f.1);
        }
        assert_eq!(fibonacci_word(14).unwrap().len(), 377);
    }

    #[test]
    fn validation() {
        assert!(matches!(
            SubstitutionFixedPoint::new(vec![vec![0, 0], vec![1, 1]], (0, 0)),
            Err(Error::NotPrimitive)
        ));
        // b.b: "bb" never occurs in the Fibonacci language.
        assert!(SubstitutionFixedPoint::new(vec![vec![0, 1], vec![0]], (1, 1)).is_err());
        // Thue–Morse: a→ab, b→ba; seed a.a needs σ².
        let tm = SubstitutionFixedPoint::new(vec![vec![0, 1], vec![1, 0]], (0, 0)).unwrap();
        assert_eq!(tm.power(), 2);
    }
}
