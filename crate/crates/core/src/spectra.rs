//! Band spectra of periodic operators, Hausdorff distances between compact
//! subsets of the line, and the norm-distance spectral bound.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::operators::{BlochOperator, FiniteOperatorMatrix, Hamiltonian};
use crate::symbolic::Configuration;

/// Bands closer than this are merged.
pub const MERGE_GAP: f64 = 1e-12;
const MAX_REFINE_ROUNDS: usize = 40;

/// Provenance of a computed spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMeta {
    pub grid: usize,
    pub tol: f64,
    pub period: u64,
    pub model: String,
    /// Per-band intervals before merging.
    pub raw_bands: Vec<(f64, f64)>,
    /// Distinct quasi-momenta at which the Bloch matrix was diagonalized.
    pub evaluations: usize,
}

/// A nonempty finite union of disjoint closed intervals, sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSet {
    bands: Vec<(f64, f64)>,
    pub meta: Option<SpectrumMeta>,
}

impl SpectrumSet {
    /// Sorts and merges the given intervals (gaps below [`MERGE_GAP`] close).
    pub fn from_intervals(intervals: &[(f64, f64)]) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::domain("spectrum must be nonempty"));
        }
        if intervals.iter().any(|&(a, b)| !(a <= b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::domain("intervals must be finite with a <= b"));
        }
        Ok(SpectrumSet {
            bands: merge(intervals.to_vec()),
            meta: None,
        })
    }

    /// Finite point set, e.g. the eigenvalues of a matrix.
    pub fn from_points(points: &[f64]) -> Result<Self> {
        let iv: Vec<(f64, f64)> = points.iter().map(|&x| (x, x)).collect();
        Self::from_intervals(&iv)
    }

    pub fn bands(&self) -> &[(f64, f64)] {
        &self.bands
    }

    pub fn min(&self) -> f64 {
        self.bands[0].0
    }

    pub fn max(&self) -> f64 {
        self.bands[self.bands.len() - 1].1
    }

    /// Total length of the bands.
    pub fn measure(&self) -> f64 {
        self.bands.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        self.distance_to(x) <= slack
    }

    /// `dist(x, S)`.
    pub fn distance_to(&self, x: f64) -> f64 {
        dist_to_union(&self.bands, x)
    }
}

fn merge(mut iv: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    iv.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(iv.len());
    for (a, b) in iv {
        match out.last_mut() {
            Some(last) if a <= last.1 + MERGE_GAP => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Distance from `x` to a sorted disjoint interval union.
fn dist_to_union(bands: &[(f64, f64)], x: f64) -> f64 {
    let i = bands.partition_point(|&(a, _)| a <= x);
    let mut d = f64::INFINITY;
    if i > 0 {
        let (a, b) = bands[i - 1];
        d = if x <= b { 0.0 } else { x - b };
        debug_assert!(x >= a);
    }
    if i < bands.len() {
        d = d.min(bands[i].0 - x);
    }
    d
}

/// `sup_{x ∈ A} dist(x, B)`: `dist(·, B)` is piecewise linear with maxima at
/// the midpoints of B's gaps, so it suffices to test A's endpoints and the
/// gap midpoints that fall inside A.
fn directed(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let mut best: f64 = 0.0;
    for &(lo, hi) in a {
        best = best.max(dist_to_union(b, lo)).max(dist_to_union(b, hi));
    }
    for w in b.windows(2) {
        let mid = 0.5 * (w[0].1 + w[1].0);
        if dist_to_union(a, mid) == 0.0 {
            best = best.max(dist_to_union(b, mid));
        }
    }
    best
}

/// Hausdorff distance between two interval unions.
pub fn hausdorff_distance_sets(s1: &SpectrumSet, s2: &SpectrumSet) -> f64 {
    directed(&s1.bands, &s2.bands).max(directed(&s2.bands, &s1.bands))
}

/// Ascending eigenvalues of a finite section, after checking Hermiticity.
pub fn hermitian_eigenvalues(a: &FiniteOperatorMatrix) -> Result<Vec<f64>> {
    let residual = a.matrix.hermitian_residual();
    if residual > 1e-12 * a.matrix.max_abs().max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { residual });
    }
    a.eigenvalues()
}

/// Both sides of `d_H(σ(A), σ(B)) <= ‖A - B‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormDistanceBound {
    pub dh: f64,
    pub normdiff: f64,
    pub holds: bool,
}

pub fn norm_distance_spectral_bound(a: &FiniteOperatorMatrix, b: &FiniteOperatorMatrix) -> Result<NormDistanceBound> {
    if a.matrix.size() != b.matrix.size() {
        return Err(Error::domain("matrices differ in size"));
    }
    let sa = SpectrumSet::from_points(&hermitian_eigenvalues(a)?)?;
    let sb = SpectrumSet::from_points(&hermitian_eigenvalues(b)?)?;
    let dh = hausdorff_distance_sets(&sa, &sb);
    let normdiff = a.matrix.sub(&b.matrix)?.operator_norm()?;
    Ok(NormDistanceBound {
        dh,
        normdiff,
        holds: dh <= normdiff + 1e-10,
    })
}

/// Eigenvalues on the uniform quasi-momentum grid, for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct BandSamples {
    pub theta: Vec<f64>,
    /// `energies[i]` holds the ascending eigenvalues at `theta[i]`.
    pub energies: Vec<Vec<f64>>,
}

/// The spectrum of a periodic one-dimensional operator.
///
/// The Bloch matrix is diagonalized on `grid` equally spaced quasi-momenta
/// (in parallel through `exec`); each band edge is then polished by
/// three-point parabolic steps until the predicted improvement drops below
/// `tol`. All refinement requests of a round are batched.
pub fn periodic_spectrum<E: Executor>(h: &Hamiltonian, xi: &Configuration, grid: usize, tol: f64, exec: &E) -> Result<SpectrumSet> {
    periodic_spectrum_with_samples(h, xi, grid, tol, exec).map(|(s, _)| s)
}

pub fn periodic_spectrum_with_samples<E: Executor>(
    h: &Hamiltonian,
    xi: &Configuration,
    grid: usize,
    tol: f64,
    exec: &E,
) -> Result<(SpectrumSet, BandSamples)> {
    if grid < 16 {
        return Err(Error::domain("theta grid must have at least 16 points"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("refinement tolerance must be positive"));
    }
    let op = BlochOperator::new(h, xi)?;
    let mut memo = Memo::default();
    let thetas: Vec<f64> = (0..grid).map(|i| 2.0 * PI * i as f64 / grid as f64).collect();
    memo.fill(&op, &thetas, exec)?;
    let energies: Vec<Vec<f64>> = thetas.iter().map(|t| memo.get(*t).clone()).collect();
    let n = op.size();

    let step = 2.0 * PI / grid as f64;
    let mut edges: Vec<Edge> = Vec::with_capacity(2 * n);
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let g = |i: usize| sign * energies[i][j];
            let c = (0..grid).fold(0, |best, i| if g(i) < g(best) { i } else { best });
            let (l, r) = ((c + grid - 1) % grid, (c + 1) % grid);
            edges.push(Edge {
                band: j,
                sign,
                x: [thetas[c] - step, thetas[c], thetas[c] + step],
                y: [g(l), g(c), g(r)],
                active: true,
            });
        }
    }

    for _ in 0..MAX_REFINE_ROUNDS {
        let proposals: Vec<(usize, f64)> = edges
            .iter_mut()
            .enumerate()
            .filter_map(|(k, e)| e.propose(tol).map(|t| (k, t)))
            .collect();
        if proposals.is_empty() {
            break;
        }
        let fresh: Vec<f64> = proposals.iter().map(|p| p.1).collect();
        memo.fill(&op, &fresh, exec)?;
        for (k, t) in proposals {
            let e = &mut edges[k];
            let v = e.sign * memo.get(t)[e.band];
            e.accept(t, v);
        }
    }

    let raw: Vec<(f64, f64)> = (0..n).map(|j| (edges[2 * j].y[1], -edges[2 * j + 1].y[1])).collect();
    let mut set = SpectrumSet::from_intervals(&raw)?;
    set.meta = Some(SpectrumMeta {
        grid,
        tol,
        period: op.period(),
        model: String::new(),
        raw_bands: raw,
        evaluations: memo.values.len(),
    });
    Ok((set, BandSamples { theta: thetas, energies }))
}

/// Eigenvalues keyed by the bit pattern of `θ mod 2π`.
#[derive(Default)]
struct Memo {
    values: BTreeMap<u64, Vec<f64>>,
}

impl Memo {
    fn key(t: f64) -> u64 {
        t.rem_euclid(2.0 * PI).to_bits()
    }

    fn get(&self, t: f64) -> &Vec<f64> {
        &self.values[&Self::key(t)]
    }

    fn fill<E: Executor>(&mut self, op: &BlochOperator, thetas: &[f64], exec: &E) -> Result<()> {
        let mut todo: Vec<f64> = Vec::new();
        let mut keys = alloc::collections::BTreeSet::new();
        for &t in thetas {
            let k = Self::key(t);
            if !self.values.contains_key(&k) && keys.insert(k) {
                todo.push(t.rem_euclid(2.0 * PI));
            }
        }
        let out = exec.map(todo.len(), |i| op.eigenvalues(todo[i]));
        for (t, ev) in todo.iter().zip(out) {
            self.values.insert(Self::key(*t), ev?);
        }
        Ok(())
    }
}

/// Minimization state for one edge: `g = sign · E_band`, bracketed by three
/// points with the smallest value in the middle.
struct Edge {
    band: usize,
    sign: f64,
    x: [f64; 3],
    y: [f64; 3],
    active: bool,
}

impl Edge {
    fn propose(&mut self, tol: f64) -> Option<f64> {
        if !self.active {
            return None;
        }
        let (u0, u2) = (self.x[0] - self.x[1], self.x[2] - self.x[1]);
        let (d0, d2) = (self.y[0] - self.y[1], self.y[2] - self.y[1]);
        let a = (d0 / u0 - d2 / u2) / (u0 - u2);
        let b = d0 / u0 - a * u0;
        let u = -b / (2.0 * a);
        let gain = b * b / (4.0 * a);
        if !(a > 0.0) || !(gain >= tol) || !(u > u0 && u < u2) || u.abs() < 1e-15 || u2 - u0 < 1e-14 {
            self.active = false;
            return None;
        }
        Some(self.x[1] + u)
    }

    fn accept(&mut self, t: f64, v: f64) {
        let [x0, x1, x2] = self.x;
        let [y0, y1, y2] = self.y;
        if v < y1 {
            if t < x1 {
                (self.x, self.y) = ([x0, t, x1], [y0, v, y1]);
            } else {
                (self.x, self.y) = ([x1, t, x2], [y1, v, y2]);
            }
        } else if t < x1 {
            (self.x, self.y) = ([t, x1, x2], [v, y1, y2]);
        } else {
            (self.x, self.y) = ([x0, x1, t], [y0, y1, v]);
        }
    }
}
