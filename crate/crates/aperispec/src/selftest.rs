//! Seeded invariant suites over every module, reported per group.

use std::sync::Arc;

use aperispec_core::bounds::{finite_range_bound, normalized_trapezoid, overlap_count, partition_constants, sampled_lipschitz};
use aperispec_core::lattice::{cube_offsets, max_operator_norm};
use aperispec_core::linalg::{hermitian_eigenvalues, CMatrix};
use aperispec_core::operators::{assemble_dirichlet, long_range_model, schrodinger, FiniteOperatorMatrix, MatrixMeta, Window};
use aperispec_core::spectra::{norm_distance_spectral_bound, periodic_spectrum};
use aperispec_core::symbolic::{config_distance, shift, subshift_distance, Alphabet, Configuration, Letter, Subshift};
use aperispec_core::{Lattice, Sequential};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::sweep::SCHEMA;

#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestOptions {
    pub seed: u64,
    /// Fault injection: feed a metric violating the triangle inequality to
    /// the alphabet group.
    pub corrupt_metric: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupReport {
    pub name: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub schema: u32,
    pub seed: u64,
    pub passed: bool,
    pub groups: Vec<GroupReport>,
}

struct Group {
    name: &'static str,
    checks: usize,
    failures: Vec<String>,
}

impl Group {
    fn new(name: &'static str) -> Self {
        Group { name, checks: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) -> GroupReport {
        GroupReport { name: self.name, passed: self.failures.is_empty(), checks: self.checks, failures: self.failures }
    }
}

pub fn selftest(opts: SelftestOptions) -> SelftestReport {
    // Each group gets its own stream so that groups are independent of order.
    let rng = |i: u64| ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i.wrapping_mul(0x9e37_79b9_7f4a_7c15)));
    let groups = vec![
        lattice_group(&mut rng(1)),
        alphabet_group(&mut rng(2), opts.corrupt_metric),
        configuration_group(&mut rng(3)),
        subshift_group(),
        spectra_group(),
        norm_bound_group(&mut rng(6)),
        truncation_group(),
        positivity_group(&mut rng(8)),
        partition_group(&mut rng(9)),
        certificate_group(),
    ];
    SelftestReport { schema: SCHEMA, seed: opts.seed, passed: groups.iter().all(|g| g.passed), groups }
}

fn lattice_group(rng: &mut ChaCha8Rng) -> GroupReport {
    let mut g = Group::new("lattice");
    for d in 1..=3 {
        for r in 0..=3 {
            let q = cube_offsets(d, r);
            let neg: std::collections::BTreeSet<Vec<i64>> = q.iter().map(|p| p.iter().map(|x| -x).collect()).collect();
            let set: std::collections::BTreeSet<Vec<i64>> = q.iter().cloned().collect();
            g.check(set == neg, || format!("Q_{r} in d = {d} is not symmetric"));
            let big: std::collections::BTreeSet<Vec<i64>> = cube_offsets(d, r + 1).into_iter().collect();
            g.check(set.is_subset(&big), || format!("Q_{r} not inside Q_{} in d = {d}", r + 1));
        }
    }
    for _ in 0..50 {
        let m: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let norm = max_operator_norm(2, &m);
        // The max-norm unit ball is the square; the sup is attained at a corner.
        let corners = [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]];
        let sampled = corners
            .iter()
            .map(|x| (m[0] * x[0] + m[1] * x[1]).abs().max((m[2] * x[0] + m[3] * x[1]).abs()))
            .fold(0.0, f64::max);
        g.check((norm - sampled).abs() <= 1e-12 * sampled.max(1.0), || format!("max-norm of {m:?}: {norm} vs {sampled}"));
    }
    g.finish()
}

fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..i {
            let v = rng.gen_range(4..=8) as f64 / 8.0;
            m[i * n + j] = v;
            m[j * n + i] = v;
        }
    }
    m
}

fn alphabet_group(rng: &mut ChaCha8Rng, corrupt: bool) -> GroupReport {
    let mut g = Group::new("alphabet");
    let labels = ["a", "b", "c", "d"];
    for _ in 0..20 {
        let n = rng.gen_range(2..=4);
        let m = random_metric(rng, n);
        let r = Alphabet::with_metric(&labels[..n], m);
        g.check(r.is_ok(), || format!("valid metric rejected: {}", r.unwrap_err()));
    }
    if corrupt {
        let m = vec![0.0, 0.25, 1.0, 0.25, 0.0, 0.25, 1.0, 0.25, 0.0];
        let r = Alphabet::with_metric(&labels[..3], m);
        g.check(r.is_ok(), || format!("corrupted metric: {}", r.unwrap_err()));
    }
    for bad in [vec![0.0, 0.5, 0.25, 0.0], vec![0.0, 0.0, 0.0, 0.0], vec![0.1, 0.5, 0.5, 0.0]] {
        g.check(Alphabet::with_metric(&labels[..2], bad.clone()).is_err(), || format!("invalid metric {bad:?} accepted"));
    }
    g.finish()
}

fn configuration_group(rng: &mut ChaCha8Rng) -> GroupReport {
    let mut g = Group::new("configuration-metric");
    for _ in 0..200 {
        let alpha = Arc::new(Alphabet::with_metric(&["a", "b", "c"], random_metric(rng, 3)).expect("valid"));
        let mut word = || -> Configuration {
            let len = rng.gen_range(1..=6);
            Configuration::word(alpha.clone(), (0..len).map(|_| rng.gen_range(0..3) as Letter).collect()).expect("word")
        };
        let (x, y, z) = (word(), word(), word());
        let (Ok(dxy), Ok(dyx), Ok(dxz), Ok(dyz)) =
            (config_distance(&x, &y, 32.0), config_distance(&y, &x, 32.0), config_distance(&x, &z, 32.0), config_distance(&y, &z, 32.0))
        else {
            g.check(false, || "distance computation failed".into());
            continue;
        };
        g.check(dxy == dyx, || "symmetry".into());
        if !(dxy.lower_bound || dyz.lower_bound || dxz.lower_bound) {
            g.check(dxz.value <= dxy.value + dyz.value, || "triangle inequality".into());
        }
        let agree = (-32i64..=32).all(|n| x.letter_at(&[n]) == y.letter_at(&[n]));
        g.check(dxy.lower_bound == agree, || "zero distance iff agreement on Q_r_max".into());
    }
    g.finish()
}

fn subshift_group() -> GroupReport {
    let mut g = Group::new("subshift-distance");
    let ab = Arc::new(Alphabet::discrete(&["a", "b"]).expect("alphabet"));
    let mut words = Vec::new();
    for len in 1..=3u32 {
        for bits in 0..(1u32 << len) {
            words.push((0..len).map(|i| ((bits >> i) & 1) as Letter).collect::<Vec<_>>());
        }
    }
    let orbit = |w: &Vec<Letter>| -> Vec<Configuration> {
        let x = Configuration::word(ab.clone(), w.clone()).expect("word");
        (0..w.len() as i64).map(|s| shift(&x, &[s]).expect("shift")).collect()
    };
    for u in &words {
        for v in &words {
            let a = Subshift::periodic_orbit(Configuration::word(ab.clone(), u.clone()).expect("word")).expect("orbit");
            let b = Subshift::periodic_orbit(Configuration::word(ab.clone(), v.clone()).expect("word")).expect("orbit");
            let d = subshift_distance(&a, &b, 16.0).expect("distance");
            let directed = |p: &[Configuration], q: &[Configuration]| {
                p.iter()
                    .map(|x| q.iter().map(|y| config_distance(x, y, 16.0).expect("d").value).min().expect("nonempty"))
                    .max()
                    .expect("nonempty")
            };
            let (ou, ov) = (orbit(u), orbit(v));
            let brute = directed(&ou, &ov).max(directed(&ov, &ou));
            g.check(d.value == brute, || format!("{u:?} vs {v:?}: {} != {brute}", d.value));
        }
    }
    g.finish()
}

fn spectra_group() -> GroupReport {
    let mut g = Group::new("spectra");
    let ab = Arc::new(Alphabet::discrete(&["a", "b"]).expect("alphabet"));
    let cases: [(f64, Vec<Letter>, Vec<(f64, f64)>); 2] = [
        (0.0, vec![0], vec![(-2.0, 2.0)]),
        (2.0, vec![0, 1], vec![(1.0 - 5f64.sqrt(), 0.0), (2.0, 1.0 + 5f64.sqrt())]),
    ];
    for (lambda, w, expected) in cases {
        let h = schrodinger(1, ab.clone(), lambda, 1.0).expect("model");
        let x = Configuration::word(ab.clone(), w).expect("word");
        match periodic_spectrum(&h, &x, 256, 1e-10, &Sequential) {
            Ok(s) => {
                let ok = s.bands().len() == expected.len()
                    && s.bands().iter().zip(&expected).all(|(a, b)| (a.0 - b.0).abs() < 1e-8 && (a.1 - b.1).abs() < 1e-8);
                g.check(ok, || format!("lambda = {lambda}: {:?} vs {expected:?}", s.bands()));
            }
            Err(e) => g.check(false, || e.to_string()),
        }
    }
    g.finish()
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> FiniteOperatorMatrix {
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in 0..i {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    FiniteOperatorMatrix { matrix: m, meta: MatrixMeta::Window { lo: vec![0], hi: vec![n as i64 - 1], internal_dim: 1 } }
}

fn norm_bound_group(rng: &mut ChaCha8Rng) -> GroupReport {
    let mut g = Group::new("norm-bound");
    for _ in 0..50 {
        let n = rng.gen_range(1..=24);
        let (a, b) = (random_hermitian(rng, n), random_hermitian(rng, n));
        match norm_distance_spectral_bound(&a, &b) {
            Ok(r) => g.check(r.holds, || format!("d_H = {} > {}", r.dh, r.normdiff)),
            Err(e) => g.check(false, || e.to_string()),
        }
    }
    g.finish()
}

fn window_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).map_or(f64::NAN, |ev| ev.iter().fold(0.0, |a: f64, x| a.max(x.abs())))
}

fn truncation_group() -> GroupReport {
    let mut g = Group::new("truncation");
    let ab = Arc::new(Alphabet::discrete(&["a"]).expect("alphabet"));
    let x = Configuration::word(ab, vec![0]).expect("word");
    let w = Window::interval(0, 127).expect("window");
    for beta in [0.5, 1.0] {
        let h = long_range_model(beta, 127).expect("model");
        let schur = h.schur_norm().expect("norm");
        let full = assemble_dirichlet(&h, &x, &w).expect("assembly").matrix;
        for s in [2.0, 4.0, 8.0] {
            let t = assemble_dirichlet(&h.truncate_range(s).expect("truncate"), &x, &w).expect("assembly").matrix;
            let diff = window_norm(&full.sub(&t).expect("sizes"));
            let cap = schur * s.powf(-beta) * (1.0 + 1e-9);
            g.check(diff <= cap, || format!("beta = {beta}, s = {s}: {diff} > {cap}"));
        }
    }
    g.finish()
}

fn positivity_group(rng: &mut ChaCha8Rng) -> GroupReport {
    let mut g = Group::new("positivity");
    let ab = Arc::new(Alphabet::discrete(&["a", "b"]).expect("alphabet"));
    let x = Configuration::word(ab.clone(), vec![0, 1, 0, 0, 1]).expect("word");
    let w = Window::interval(-10, 10).expect("window");
    for _ in 0..10 {
        let h = schrodinger(1, ab.clone(), rng.gen_range(-3.0..3.0), rng.gen_range(0.1..=1.0)).expect("model");
        let schur = h.schur_norm().expect("norm");
        for cmp in [h.comparison_beta(), h.comparison_infty()] {
            let Ok(cmp) = cmp else {
                g.check(false, || "comparison operator failed".into());
                continue;
            };
            let m = assemble_dirichlet(&cmp, &x, &w).expect("assembly").matrix;
            for _ in 0..10 {
                let v: Vec<Complex64> = (0..m.size()).map(|_| Complex64::new(rng.gen_range(0.0..1.0), 0.0)).collect();
                g.check(m.mul_vec(&v).iter().all(|z| z.re >= -1e-14), || "negative entry".into());
            }
            let n = window_norm(&m);
            g.check(n <= schur + 1e-9, || format!("window norm {n} > {schur}"));
        }
    }
    g.finish()
}

fn partition_group(rng: &mut ChaCha8Rng) -> GroupReport {
    let mut g = Group::new("partition");
    let pc = partition_constants(&Lattice::cubic(1));
    g.check(pc.n_overlap == 3 && pc.c_l == 6.0, || format!("d = 1 constants {pc:?}"));
    let (raw, _) = sampled_lipschitz(&Lattice::cubic(1));
    g.check((raw - 6.0).abs() < 1e-6, || format!("sampled C_L = {raw}"));
    g.check(overlap_count(2) == 9, || "overlap count in d = 2".into());
    for _ in 0..1000 {
        let t: f64 = rng.gen_range(-20.0..20.0);
        let s: f64 = (-2..=2).map(|k| normalized_trapezoid(t - (t.floor() + k as f64))).sum();
        g.check((s - 1.0).abs() < 1e-10, || format!("partition sum {s} at {t}"));
    }
    g.finish()
}

fn certificate_group() -> GroupReport {
    let mut g = Group::new("certificates");
    let ab = Arc::new(Alphabet::discrete(&["a", "b"]).expect("alphabet"));
    let h = schrodinger(1, ab, 1.0, 1.0).expect("model");
    let pc = partition_constants(&Lattice::cubic(1));
    let expected = 288.0 * (1.0 + 2.0 * 2f64.sqrt());
    match finite_range_bound(&h, 1.0, &pc) {
        Ok(c) => g.check((c.bound - expected).abs() < 1e-9 * expected, || format!("bound {} vs {expected}", c.bound)),
        Err(e) => g.check(false, || e.to_string()),
    }
    let mut last = 0.0;
    for i in 0..=20 {
        let d = i as f64 / 20.0;
        let b = finite_range_bound(&h, d, &pc).map(|c| c.bound).unwrap_or(f64::NAN);
        g.check(b >= last, || format!("bound not monotone at d = {d}"));
        last = b;
    }
    g.finish()
}
