//! Convergent sweeps: periodic approximants against a high reference
//! approximant, with the measured spectral distance set against the
//! certified bound on every row.

use std::io::Write;
use std::time::Instant;

use aperispec_core::bounds::{finite_range_bound, infinite_range_bound, partition_constants, BoundCertificate, PartitionConstants};
use aperispec_core::operators::{verify_self_adjoint, Hamiltonian};
use aperispec_core::spectra::{hausdorff_distance_sets, periodic_spectrum, SpectrumSet};
use aperispec_core::symbolic::{
    convergents, fibonacci_word, kohmoto_configuration, subshift_distance, Alphabet, Configuration, Slope, Subshift,
};
use aperispec_core::Executor;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::error::CliError;
use crate::format::{AlphabetSpec, ModelSpec, Result, SlopeSpec};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// Periodized Fibonacci words of length `F_k`.
    FibonacciConvergents { k_min: u32, k_max: u32, k_ref: u32 },
    /// Kohmoto codings at the convergents `p_k / q_k` of `alpha`.
    KohmotoConvergents {
        alpha: SlopeSpec,
        k_min: u32,
        k_max: u32,
        k_ref: u32,
        #[serde(default)]
        phase: f64,
    },
}

impl Family {
    fn range(&self) -> (u32, u32, u32) {
        match *self {
            Family::FibonacciConvergents { k_min, k_max, k_ref } => (k_min, k_max, k_ref),
            Family::KohmotoConvergents { k_min, k_max, k_ref, .. } => (k_min, k_max, k_ref),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    pub grid: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub model: ModelSpec,
    #[serde(default)]
    pub alphabet: AlphabetSpec,
    pub family: Family,
    pub spectrum: SpectrumParams,
    pub r_max: f64,
    /// Seeds the sampled self-adjointness checks.
    #[serde(default)]
    pub seed: u64,
    /// Declared linear-growth constant; switches rows to the infinite-range
    /// certificate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth_constant: Option<f64>,
    #[serde(default = "default_samples")]
    pub self_adjoint_samples: usize,
}

fn default_samples() -> usize {
    2000
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let (k_min, k_max, k_ref) = self.family.range();
        if !(k_min < k_max && k_max < k_ref) {
            return Err(CliError::domain("experiment needs k_min < k_max < k_ref"));
        }
        if self.spectrum.grid < 64 {
            return Err(CliError::domain("experiment needs spectrum.grid >= 64"));
        }
        if !(self.spectrum.tol > 0.0) {
            return Err(CliError::domain("experiment needs spectrum.tol > 0"));
        }
        if !(self.r_max >= 8.0) || !self.r_max.is_finite() {
            return Err(CliError::domain("experiment needs a finite r_max >= 8"));
        }
        Ok(())
    }
}

/// One approximant of the family.
#[derive(Debug, Clone)]
struct Approximant {
    k: u32,
    label: String,
    config: Configuration,
}

fn approximant(family: &Family, alphabet: &Arc<Alphabet>, k: u32) -> Result<Approximant> {
    match family {
        Family::FibonacciConvergents { .. } => {
            let w = fibonacci_word(k)?;
            let label = format!("F_{k}={}", w.len());
            Ok(Approximant { k, label, config: Configuration::word(alphabet.clone(), w)? })
        }
        Family::KohmotoConvergents { alpha, phase, .. } => {
            let conv = convergents(&alpha.build()?, k as usize + 1);
            let &(p, q) = conv
                .get(k as usize)
                .ok_or_else(|| CliError::domain(format!("slope has no convergent of index {k}")))?;
            let config = kohmoto_configuration(Slope::rational(p, q)?, *phase, alphabet.clone(), [0, 1])?;
            Ok(Approximant { k, label: format!("{p}/{q}"), config })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowValues {
    pub d_subshift: f64,
    /// Exact rational value of the subshift distance.
    pub d_subshift_exact: String,
    pub lower_bound: bool,
    pub d_spectral: f64,
    pub bound: f64,
    pub fallback: f64,
    pub effective: f64,
    /// `d_spectral / d_subshift^β`.
    pub ratio: f64,
    pub sampled: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub k: u32,
    pub label: String,
    pub period: u64,
    /// `Err` carries the reason the row was aborted.
    pub outcome: std::result::Result<RowValues, String>,
    /// Excluded from CSV output so that repeated runs compare byte for byte.
    pub wall_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub rows: usize,
    pub passed: usize,
    pub failed: usize,
    pub aborted: usize,
    pub max_ratio: Option<f64>,
    /// Least-squares slope of `log d_spectral` against `log d_subshift`.
    pub slope: Option<f64>,
    pub slope_points: usize,
    pub all_pass: bool,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub summary: Summary,
    pub partition: PartitionConstants,
    pub reference: String,
}

struct Reference {
    subshift: Subshift,
    spectrum: SpectrumSet,
}

fn self_adjoint(h: &Hamiltonian, s: &Subshift, spec: &ExperimentSpec, k: u32) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let report = verify_self_adjoint(h, s, spec.self_adjoint_samples, &mut rng)?;
    if !report.passed() {
        return Err(CliError::domain(format!(
            "model is not self-adjoint on this subshift ({} missing partners, {} violations, {} uncovered)",
            report.missing_partners.len(),
            report.violations.len(),
            report.uncovered.len()
        )));
    }
    Ok(())
}

fn certificate(h: &Hamiltonian, spec: &ExperimentSpec, d: aperispec_core::symbolic::Distance, pc: &PartitionConstants) -> Result<BoundCertificate> {
    Ok(match spec.growth_constant {
        Some(c_h) => infinite_range_bound(h, c_h, d, pc)?,
        None => finite_range_bound(h, d, pc)?,
    })
}

fn row<E: Executor>(h: &Hamiltonian, spec: &ExperimentSpec, a: &Approximant, reference: &Reference, pc: &PartitionConstants, exec: &E) -> Result<RowValues> {
    let sub = Subshift::periodic_orbit(a.config.clone())?;
    self_adjoint(h, &sub, spec, a.k)?;
    let d = subshift_distance(&sub, &reference.subshift, spec.r_max)?;
    let sampled = sub.dictionary(1)?.sampled();
    let spectrum = periodic_spectrum(h, &a.config, spec.spectrum.grid, spec.spectrum.tol, exec)?;
    let d_spectral = hausdorff_distance_sets(&spectrum, &reference.spectrum);
    let cert = certificate(h, spec, d, pc)?;
    let d_sub = d.to_f64();
    let ratio = if d_sub > 0.0 { d_spectral / d_sub.powf(h.beta()) } else { f64::INFINITY };
    Ok(RowValues {
        d_subshift: d_sub,
        d_subshift_exact: d.value.to_string(),
        lower_bound: d.lower_bound,
        d_spectral,
        bound: cert.bound,
        fallback: cert.fallback,
        effective: cert.effective,
        ratio,
        sampled,
        pass: cert.admits(d_spectral),
    })
}

/// Runs every row of the experiment. Errors in building the model or the
/// reference abort the sweep; errors inside a row abort only that row.
pub fn sweep_convergents<E: Executor>(spec: &ExperimentSpec, exec: &E) -> Result<SweepResult> {
    spec.validate()?;
    let alphabet = spec.alphabet.build()?;
    let h = spec.model.build(&alphabet)?;
    if h.lattice().dim() != 1 {
        return Err(CliError::domain("convergent sweeps run on Z"));
    }
    let pc = partition_constants(h.lattice());
    let (k_min, k_max, k_ref) = spec.family.range();
    let r = approximant(&spec.family, &alphabet, k_ref)?;
    let ref_sub = Subshift::periodic_orbit(r.config.clone())?;
    self_adjoint(&h, &ref_sub, spec, k_ref)?;
    let reference = Reference {
        spectrum: periodic_spectrum(&h, &r.config, spec.spectrum.grid, spec.spectrum.tol, exec)?,
        subshift: ref_sub,
    };
    let ks: Vec<u32> = (k_min..=k_max).collect();
    let rows = exec.map(ks.len(), |i| {
        let start = Instant::now();
        let k = ks[i];
        let (label, period, outcome) = match approximant(&spec.family, &alphabet, k) {
            Ok(a) => {
                let period = a.config.periods().map_or(0, |p| p[0]);
                (a.label.clone(), period, row(&h, spec, &a, &reference, &pc, exec).map_err(|e| e.to_string()))
            }
            Err(e) => (String::new(), 0, Err(e.to_string())),
        };
        SweepRow { k, label, period, outcome, wall_seconds: start.elapsed().as_secs_f64() }
    });
    let summary = summarize(&rows);
    Ok(SweepResult { rows, summary, partition: pc, reference: r.label })
}

/// Ordinary least squares slope of `y` on `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn summarize(rows: &[SweepRow]) -> Summary {
    let ok: Vec<&RowValues> = rows.iter().filter_map(|r| r.outcome.as_ref().ok()).collect();
    let passed = ok.iter().filter(|v| v.pass).count();
    let max_ratio = ok.iter().map(|v| v.ratio).filter(|r| r.is_finite()).reduce(f64::max);
    let points: Vec<(f64, f64)> = ok
        .iter()
        .filter(|v| v.d_subshift > 0.0 && v.d_spectral > 0.0)
        .map(|v| (v.d_subshift.ln(), v.d_spectral.ln()))
        .collect();
    Summary {
        schema: SCHEMA,
        rows: rows.len(),
        passed,
        failed: ok.len() - passed,
        aborted: rows.len() - ok.len(),
        max_ratio,
        slope: least_squares_slope(&points),
        slope_points: points.len(),
        all_pass: passed == rows.len(),
    }
}

/// Flat CSV record; optional fields are empty on aborted rows.
#[derive(Serialize)]
struct CsvRecord<'a> {
    schema: u32,
    k: u32,
    label: &'a str,
    period: u64,
    d_subshift: Option<f64>,
    d_subshift_exact: Option<&'a str>,
    lower_bound: Option<bool>,
    d_spectral: Option<f64>,
    bound: Option<f64>,
    fallback: Option<f64>,
    effective: Option<f64>,
    ratio: Option<f64>,
    sampled: Option<bool>,
    status: &'static str,
    reason: &'a str,
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        let v = r.outcome.as_ref().ok();
        let rec = CsvRecord {
            schema: SCHEMA,
            k: r.k,
            label: &r.label,
            period: r.period,
            d_subshift: v.map(|v| v.d_subshift),
            d_subshift_exact: v.map(|v| v.d_subshift_exact.as_str()),
            lower_bound: v.map(|v| v.lower_bound),
            d_spectral: v.map(|v| v.d_spectral),
            bound: v.map(|v| v.bound),
            fallback: v.map(|v| v.fallback),
            effective: v.map(|v| v.effective),
            ratio: v.map(|v| v.ratio),
            sampled: v.map(|v| v.sampled),
            status: match &r.outcome {
                Ok(v) if v.pass => "pass",
                Ok(_) => "fail",
                Err(_) => "aborted",
            },
            reason: r.outcome.as_ref().err().map_or("", String::as_str),
        };
        w.serialize(rec).map_err(|e| CliError::domain(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
}

/// Whitespace-separated columns for gnuplot; aborted rows are commented out.
pub fn write_dat<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "# schema {SCHEMA}")?;
    writeln!(out, "# k period d_subshift d_spectral bound effective ratio")?;
    for r in rows {
        match &r.outcome {
            Ok(v) => writeln!(
                out,
                "{} {} {:e} {:e} {:e} {:e} {:e}",
                r.k, r.period, v.d_subshift, v.d_spectral, v.bound, v.effective, v.ratio
            )?,
            Err(e) => writeln!(out, "# k = {} aborted: {e}", r.k)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok_row(k: u32, d_sub: f64, d_spec: f64, pass: bool) -> SweepRow {
        SweepRow {
            k,
            label: format!("k{k}"),
            period: 1,
            outcome: Ok(RowValues {
                d_subshift: d_sub,
                d_subshift_exact: String::new(),
                lower_bound: false,
                d_spectral: d_spec,
                bound: 1.0,
                fallback: 1.0,
                effective: 1.0,
                ratio: d_spec / d_sub,
                sampled: false,
                pass,
            }),
            wall_seconds: 0.0,
        }
    }

    #[test]
    fn slope_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, 1.5 * i as f64 - 2.0)).collect();
        assert!((least_squares_slope(&pts).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(least_squares_slope(&pts[..1]), None);
        assert_eq!(least_squares_slope(&[(1.0, 2.0), (1.0, 3.0)]), None);
    }

    #[test]
    fn summary_counts_and_skips_zero_distances() {
        let rows = vec![
            ok_row(1, 0.5, 0.25, true),
            ok_row(2, 0.25, 0.0625, true),
            ok_row(3, 0.125, 0.0, true),
            ok_row(4, 0.1, 2.0, false),
            SweepRow { k: 5, label: String::new(), period: 0, outcome: Err("uncovered".into()), wall_seconds: 0.0 },
        ];
        let s = summarize(&rows);
        assert_eq!((s.rows, s.passed, s.failed, s.aborted), (5, 3, 1, 1));
        assert!(!s.all_pass);
        assert_eq!(s.max_ratio, Some(20.0));
        assert_eq!(s.slope_points, 3);
        let csv = csv_string(&rows).unwrap();
        assert!(csv.lines().last().unwrap().ends_with(",aborted,uncovered"));
        assert!(csv.lines().nth(4).unwrap().contains(",fail,"));
    }

    #[test]
    fn experiment_validation() {
        let spec: ExperimentSpec = serde_json::from_str(
            r#"{"model": {"schrodinger": {"lambda": 1.0}},
                "family": {"kind": "kohmoto_convergents", "alpha": "sqrt2-1", "k_min": 1, "k_max": 2, "k_ref": 3},
                "spectrum": {"grid": 64, "tol": 1e-10}, "r_max": 8}"#,
        )
        .unwrap();
        assert!(spec.validate().is_ok());
        assert_eq!(spec.self_adjoint_samples, 2000);
        let mut bad = spec.clone();
        bad.r_max = 7.5;
        assert!(bad.validate().is_err());
        let mut bad = spec;
        bad.spectrum.tol = 0.0;
        assert!(bad.validate().is_err());
    }
}
