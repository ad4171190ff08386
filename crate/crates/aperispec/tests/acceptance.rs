//! Acceptance suite: one line per criterion, `PASS` or `FAIL`, with the
//! measured quantity and the runtime. Run with `--nocapture` to see them.
//!
//! Spectral norms and eigenvalues on the check side come from nalgebra,
//! independent of the crate's own eigensolvers.

use std::sync::Arc;
use std::time::{Duration, Instant};

use aperispec::cli;
use aperispec::sweep::{sweep_convergents, ExperimentSpec, SweepResult};
use aperispec::Parallel;
use aperispec_core::bounds::{bump, normalized_trapezoid, partition_constants, sampled_lipschitz};
use aperispec_core::linalg::CMatrix;
use aperispec_core::operators::{assemble_dirichlet, long_range_model, Coefficient, Hamiltonian, Term, Window};
use aperispec_core::spectra::{norm_distance_spectral_bound, periodic_spectrum};
use aperispec_core::symbolic::{config_distance, shift, subshift_distance, Alphabet, Configuration, Letter, Subshift};
use aperispec_core::{Lattice, Sequential};
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Q = Ratio<i128>;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn ab() -> Arc<Alphabet> {
    Arc::new(Alphabet::discrete(&["a", "b"]).unwrap())
}

fn to_nalgebra(m: &CMatrix) -> DMatrix<Complex64> {
    let n = m.size();
    DMatrix::from_fn(n, n, |i, j| m[(i, j)])
}

fn oracle_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = to_nalgebra(m).symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn oracle_norm(m: &CMatrix) -> f64 {
    oracle_eigenvalues(m).iter().fold(0.0, |a: f64, x| a.max(x.abs()))
}

fn random_metric(rng: &mut ChaCha8Rng) -> Vec<f64> {
    // Off-diagonal entries in [1/2, 1] always satisfy the triangle inequality.
    let mut m = vec![0.0; 9];
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let v = rng.gen_range(8..=16) as f64 / 16.0;
        m[i * 3 + j] = v;
        m[j * 3 + i] = v;
    }
    m
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = Vec::new();
    for t in 0..1000 {
        let alpha = Arc::new(Alphabet::with_metric(&["a", "b", "c"], random_metric(&mut rng)).unwrap());
        let mut word = || {
            let len = rng.gen_range(1..=6);
            Configuration::word(alpha.clone(), (0..len).map(|_| rng.gen_range(0..3) as Letter).collect()).unwrap()
        };
        let (x, y, z) = (word(), word(), word());
        let d = |a: &Configuration, b: &Configuration| config_distance(a, b, 32.0).unwrap();
        let (xy, yx, yz, xz) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z));
        if xy != yx {
            bad.push(format!("#{t}: symmetry"));
        }
        if !(xy.lower_bound || yz.lower_bound || xz.lower_bound) && xz.value > xy.value + yz.value {
            bad.push(format!("#{t}: triangle"));
        }
        let agree = (-32i64..=32).all(|n| x.letter_at(&[n]) == y.letter_at(&[n]));
        if xy.lower_bound != agree {
            bad.push(format!("#{t}: zero iff agreement"));
        }
    }
    outcome(bad.is_empty(), format!("1000 triples, {} violations {:?}", bad.len(), bad.first()))
}

fn criterion_2() -> Outcome {
    let mut words = Vec::new();
    for len in 1..=4u32 {
        for bits in 0..(1u32 << len) {
            words.push((0..len).map(|i| ((bits >> i) & 1) as Letter).collect::<Vec<_>>());
        }
    }
    let orbit = |w: &Vec<Letter>| -> Vec<Configuration> {
        let x = Configuration::word(ab(), w.clone()).unwrap();
        (0..w.len() as i64).map(|s| shift(&x, &[s]).unwrap()).collect()
    };
    let r_max = 16.0;
    let mut mismatches = 0;
    for u in &words {
        for v in &words {
            let a = Subshift::periodic_orbit(Configuration::word(ab(), u.clone()).unwrap()).unwrap();
            let b = Subshift::periodic_orbit(Configuration::word(ab(), v.clone()).unwrap()).unwrap();
            let d = subshift_distance(&a, &b, r_max).unwrap();
            let (ou, ov) = (orbit(u), orbit(v));
            let directed = |p: &[Configuration], q: &[Configuration]| -> Q {
                p.iter()
                    .map(|x| q.iter().map(|y| config_distance(x, y, r_max).unwrap().value).min().unwrap())
                    .max()
                    .unwrap()
            };
            if d.value != directed(&ou, &ov).max(directed(&ov, &ou)) {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("{} pairs, {mismatches} mismatches", words.len() * words.len()))
}

fn criterion_3() -> Outcome {
    let r5 = 5f64.sqrt();
    let cases: [(f64, Vec<Letter>, Vec<(f64, f64)>); 2] =
        [(0.0, vec![0], vec![(-2.0, 2.0)]), (2.0, vec![0, 1], vec![(1.0 - r5, 0.0), (2.0, 1.0 + r5)])];
    let mut worst = 0.0f64;
    let mut ok = true;
    for (lambda, w, expected) in cases {
        let h = aperispec_core::operators::schrodinger(1, ab(), lambda, 1.0).unwrap();
        let s = periodic_spectrum(&h, &Configuration::word(ab(), w).unwrap(), 256, 1e-10, &Sequential).unwrap();
        ok &= s.bands().len() == expected.len();
        for (b, e) in s.bands().iter().zip(&expected) {
            worst = worst.max((b.0 - e.0).abs()).max((b.1 - e.1).abs());
        }
    }
    outcome(ok && worst < 1e-8, format!("max edge error {worst:.2e}"))
}

fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in 0..i {
            let z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn finite_hausdorff(a: &[f64], b: &[f64]) -> f64 {
    let directed = |p: &[f64], q: &[f64]| p.iter().map(|x| q.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    directed(a, b).max(directed(b, a))
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = f64::NEG_INFINITY;
    let mut disagreements = 0;
    for _ in 0..500 {
        let n = rng.gen_range(1..=64);
        let (a, b) = (random_hermitian(&mut rng, n), random_hermitian(&mut rng, n));
        let wrap = |m: CMatrix| aperispec_core::operators::FiniteOperatorMatrix {
            matrix: m,
            meta: aperispec_core::operators::MatrixMeta::Window { lo: vec![0], hi: vec![n as i64 - 1], internal_dim: 1 },
        };
        let r = norm_distance_spectral_bound(&wrap(a.clone()), &wrap(b.clone())).unwrap();
        let dh = finite_hausdorff(&oracle_eigenvalues(&a), &oracle_eigenvalues(&b));
        let nd = oracle_norm(&a.sub(&b).unwrap());
        if (r.dh - dh).abs() > 1e-9 || (r.normdiff - nd).abs() > 1e-9 {
            disagreements += 1;
        }
        worst = worst.max(dh - nd);
    }
    outcome(
        worst <= 1e-10 && disagreements == 0,
        format!("max d_H - |A-B| = {worst:.3e}, {disagreements} disagreements with oracle"),
    )
}

fn criterion_5() -> Outcome {
    let x = Configuration::word(ab(), vec![0]).unwrap();
    let w = Window::interval(0, 511).unwrap();
    let mut worst = 0.0f64;
    for beta in [0.5, 1.0] {
        let h = long_range_model(beta, 511).unwrap();
        let schur = h.schur_norm().unwrap();
        let full = assemble_dirichlet(&h, &x, &w).unwrap().matrix;
        for s in [2.0f64, 4.0, 8.0, 16.0] {
            let t = assemble_dirichlet(&h.truncate_range(s).unwrap(), &x, &w).unwrap().matrix;
            let diff = oracle_norm(&full.sub(&t).unwrap());
            worst = worst.max(diff / (schur * s.powf(-beta)));
        }
    }
    outcome(worst <= 1.0 + 1e-9, format!("max |H - H_s| / (|H|_β s^-β) = {worst:.4}"))
}

fn random_model(rng: &mut ChaCha8Rng) -> Hamiltonian {
    let mut table = std::collections::BTreeMap::new();
    for a in 0..2 as Letter {
        table.insert(vec![a], CMatrix::scalar(Complex64::new(rng.gen_range(-2.0..2.0), 0.0)));
    }
    let mut terms = vec![Term { h: vec![0], coef: Coefficient::lookup(0, table, 1, 4.0).unwrap() }];
    for k in 1..=rng.gen_range(1..=4i64) {
        let v = rng.gen_range(-1.0..1.0);
        for s in [1, -1] {
            terms.push(Term { h: vec![s * k], coef: Coefficient::scalar(v).with_radius(k as u32).unwrap() });
        }
    }
    Hamiltonian::new(Lattice::cubic(1), 1, rng.gen_range(0.1..=1.0), terms).unwrap()
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = Configuration::word(ab(), aperispec_core::symbolic::fibonacci_word(10).unwrap()).unwrap();
    let w = Window::interval(-20, 20).unwrap();
    let (mut min_entry, mut norm_excess) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..100 {
        let h = random_model(&mut rng);
        let schur = h.schur_norm().unwrap();
        for cmp in [h.comparison_beta().unwrap(), h.comparison_infty().unwrap()] {
            let m = assemble_dirichlet(&cmp, &x, &w).unwrap().matrix;
            for _ in 0..100 {
                let v: Vec<Complex64> = (0..m.size()).map(|_| Complex64::new(rng.gen_range(0.0..1.0), 0.0)).collect();
                for z in m.mul_vec(&v) {
                    min_entry = min_entry.min(z.re);
                }
            }
            norm_excess = norm_excess.max(oracle_norm(&m) - schur);
        }
    }
    outcome(
        min_entry >= -1e-14 && norm_excess <= 1e-9,
        format!("min entry {min_entry:.3e}, max window norm - |H|_β = {norm_excess:.3e}"),
    )
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let one = Lattice::cubic(1);
    let pc1 = partition_constants(&one);
    let (raw, _) = sampled_lipschitz(&one);
    let pc2 = partition_constants(&Lattice::cubic(2));
    let mut ok = pc1.n_overlap == 3 && pc1.c_l == 6.0 && (raw - 6.0).abs() < 1e-6 && pc2.n_overlap == 9;
    let mut worst_sum = 0.0f64;
    for _ in 0..10_000 {
        let t: f64 = rng.gen_range(-100.0..100.0);
        let s: f64 = (-2..=2).map(|k| normalized_trapezoid(t - (t.floor() + k as f64))).sum();
        worst_sum = worst_sum.max((s - 1.0).abs());
    }
    ok &= worst_sum < 1e-10;
    let mut worst_lip = 0.0f64;
    for r in [2.0, 5.0, 10.0] {
        for _ in 0..20_000 {
            let x: f64 = rng.gen_range(-3.0 * r..3.0 * r);
            let y = x + rng.gen_range(-1e-3..1e-3);
            let q = (bump(&one, &[x / r]) - bump(&one, &[y / r])).abs() / (x - y).abs();
            worst_lip = worst_lip.max(q / (pc1.c_l / r));
        }
    }
    ok &= worst_lip <= 1.001;
    outcome(
        ok,
        format!(
            "N = {}/{}, C_L = {} (grid {raw:.9}), sum err {worst_sum:.1e}, rescaled Lipschitz ratio {worst_lip:.5}",
            pc1.n_overlap, pc2.n_overlap, pc1.c_l
        ),
    )
}

fn experiment(json: &str) -> ExperimentSpec {
    serde_json::from_str(json).unwrap()
}

fn criterion_8() -> (Outcome, SweepResult) {
    let spec = experiment(
        r#"{"model": {"schrodinger": {"lambda": 1.0, "beta": 1.0}},
            "family": {"kind": "fibonacci_convergents", "k_min": 4, "k_max": 12, "k_ref": 14},
            "spectrum": {"grid": 256, "tol": 1e-10}, "r_max": 1024, "seed": 8}"#,
    );
    let res = sweep_convergents(&spec, &Parallel::new(4)).unwrap();
    let h = spec.model.build(&spec.alphabet.build().unwrap()).unwrap();
    let cap = 288.0 * h.c_hop() * (2.0 * 2f64.sqrt() + 1.0);
    let mut ok = res.reference == "F_14=377" && res.rows.len() == 9;
    for r in &res.rows {
        match &r.outcome {
            Ok(v) => ok &= v.d_spectral <= cap * v.d_subshift,
            Err(_) => ok = false,
        }
    }
    let slope = res.summary.slope.unwrap_or(f64::NAN);
    ok &= slope >= 0.9;
    (outcome(ok, format!("9 rows vs F_14 = 377, slope {slope:.4}, max ratio {:.4}", res.summary.max_ratio.unwrap_or(f64::NAN))), res)
}

fn criterion_9() -> Outcome {
    let spec = experiment(
        r#"{"model": {"schrodinger": {"lambda": 1.0, "beta": 1.0}},
            "family": {"kind": "kohmoto_convergents", "alpha": "sqrt2-1", "k_min": 1, "k_max": 6, "k_ref": 7, "phase": 0.0},
            "spectrum": {"grid": 256, "tol": 1e-10}, "r_max": 2048, "seed": 9}"#,
    );
    let res = sweep_convergents(&spec, &Parallel::new(4)).unwrap();
    let labels: Vec<&str> = res.rows.iter().map(|r| r.label.as_str()).collect();
    let mut ok = labels == ["2/5", "5/12", "12/29", "29/70", "70/169", "169/408"];
    for r in &res.rows {
        ok &= matches!(&r.outcome, Ok(v) if v.pass && !v.sampled);
    }
    outcome(ok, format!("rows {labels:?} vs {}, passed {}/{}", res.reference, res.summary.passed, res.rows.len()))
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let exp = dir.path().join("exp.json");
    std::fs::write(
        &exp,
        r#"{"model": {"schrodinger": {"lambda": 1.0}},
            "family": {"kind": "fibonacci_convergents", "k_min": 4, "k_max": 10, "k_ref": 12},
            "spectrum": {"grid": 64, "tol": 1e-10}, "r_max": 256, "seed": 42}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for i in 0..3 {
        let out = dir.path().join(format!("run{i}.csv"));
        let code = cli::run(
            ["aperispec", "sweep", exp.to_str().unwrap(), "--out", out.to_str().unwrap()],
            &mut Vec::new(),
            &mut Vec::new(),
        );
        assert_eq!(code, 0);
        outputs.push(std::fs::read(out).unwrap());
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
    outcome(same, format!("3 runs, {} bytes each, identical = {same}", outputs[0].len()))
}

fn report(results: &mut Vec<bool>, n: u32, name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let in_time = limit.map_or(true, |l| took <= l);
    let ok = o.ok && in_time;
    let budget = limit.map_or(String::new(), |l| format!(" / {}s", l.as_secs()));
    println!(
        "criterion {n:>2} {:<4} {name}: {} [{:.2}s{budget}]",
        if ok { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64()
    );
    results.push(ok);
}

#[test]
fn acceptance() {
    let s = |x| Some(Duration::from_secs(x));
    let mut results = Vec::new();
    report(&mut results, 1, "metric axioms", s(10), criterion_1);
    report(&mut results, 2, "subshift distance vs orbit oracle", s(5), criterion_2);
    report(&mut results, 3, "closed-form spectra", s(1), criterion_3);
    report(&mut results, 4, "spectral distance below norm distance", s(20), criterion_4);
    report(&mut results, 5, "truncation tail bound", s(10), criterion_5);
    report(&mut results, 6, "positivity of comparison operators", None, criterion_6);
    report(&mut results, 7, "partition constants", None, criterion_7);
    report(&mut results, 8, "Fibonacci convergent sweep", s(180), || criterion_8().0);
    report(&mut results, 9, "Kohmoto convergent sweep", s(180), criterion_9);
    report(&mut results, 10, "deterministic sweep CSV", None, criterion_10);
    let passed = results.iter().filter(|&&b| b).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    assert_eq!(passed, results.len(), "acceptance criteria failed");
}
