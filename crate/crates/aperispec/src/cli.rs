//! Command-line front end. Exit codes: 0 success, 1 domain error,
//! 2 numerical failure, 64 usage error (including unknown subcommands).

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use aperispec_core::bounds::{finite_range_bound, infinite_range_bound, partition_constants, BoundCertificate};
use aperispec_core::spectra::periodic_spectrum_with_samples;
use aperispec_core::symbolic::subshift_distance;
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::exec::Parallel;
use crate::format::{read_json, ConfigurationSpec, ModelSpec, Result};
use crate::selftest::{selftest, SelftestOptions};
use crate::sweep::{sweep_convergents, write_csv, write_dat, ExperimentSpec, SCHEMA};

pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "aperispec", version, about = "Subshift distances, periodic-approximant spectra and spectral certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the pattern dictionary of a subshift, one pattern per line.
    Dict {
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        shell: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hausdorff distance between two subshifts.
    Dist {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 64.0)]
        rmax: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Band spectrum of a periodic configuration.
    Spectrum {
        model: PathBuf,
        config: PathBuf,
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write (theta, energy) samples here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Certificate bounding the spectral distance of two subshifts.
    Bound {
        model: PathBuf,
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 64.0)]
        rmax: f64,
        /// Declared linear-growth constant C_H; selects the infinite-range bound.
        #[arg(long)]
        growth: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergent sweep; CSV rows go to stdout or --out.
    Sweep {
        experiment: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a gnuplot-friendly table.
        #[arg(long)]
        dat: Option<PathBuf>,
        /// Write the summary JSON here (it always goes to stderr too).
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Run the invariant suites.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inject a metric that violates the triangle inequality.
        #[arg(long)]
        corrupt_metric: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let kind = match e {
                CliError::Domain(_) => "error",
                CliError::Numerical(_) => "numerical failure",
            };
            let _ = writeln!(stderr, "aperispec: {kind}: {e}");
            e.exit_code()
        }
    }
}

fn emit(out: &Option<PathBuf>, stdout: &mut dyn Write, body: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::domain(format!("{}: {e}", p.display()))),
        None => Ok(stdout.write_all(body)?),
    }
}

fn emit_json(out: &Option<PathBuf>, stdout: &mut dyn Write, v: &Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    emit(out, stdout, s.as_bytes())
}

fn create(p: &Path) -> Result<BufWriter<File>> {
    File::create(p)
        .map(BufWriter::new)
        .map_err(|e| CliError::domain(format!("{}: {e}", p.display())))
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Dict { config, shell, out } => {
            let spec: ConfigurationSpec = read_json(&config)?;
            let (x, s) = spec.subshift()?;
            let dict = s.dictionary(shell)?;
            let alphabet = x.alphabet();
            let sep = if alphabet.labels().iter().all(|l| l.chars().count() == 1) { "" } else { " " };
            let mut body = String::new();
            for w in dict.words() {
                let labels: Vec<&str> = w.iter().map(|&a| alphabet.label(a)).collect();
                body.push_str(&labels.join(sep));
                body.push('\n');
            }
            if dict.sampled() {
                writeln!(stderr, "aperispec: dictionary at shell {shell} is sampled, not certified")?;
            }
            emit(&out, stdout, body.as_bytes())?;
        }
        Command::Dist { a, b, rmax, out } => {
            let (_, sa) = read_json::<ConfigurationSpec>(&a)?.subshift()?;
            let (_, sb) = read_json::<ConfigurationSpec>(&b)?.subshift()?;
            let d = subshift_distance(&sa, &sb, rmax)?;
            let v = json!({
                "schema": SCHEMA,
                "d": d.to_f64(),
                "exact": d.value.to_string(),
                "lower_bound": d.lower_bound,
            });
            emit_json(&out, stdout, &v)?;
        }
        Command::Spectrum { model, config, grid, tol, out, csv } => {
            let (x, _) = read_json::<ConfigurationSpec>(&config)?.subshift()?;
            let m: ModelSpec = read_json(&model)?;
            let h = m.build(x.alphabet())?;
            let (mut s, samples) = periodic_spectrum_with_samples(&h, &x, grid, tol, &Parallel::from_env())?;
            let meta = s.meta.take().expect("periodic spectra carry metadata");
            let v = json!({
                "schema": SCHEMA,
                "bands": s.bands().iter().map(|b| [b.0, b.1]).collect::<Vec<_>>(),
                "meta": {
                    "grid": meta.grid,
                    "tol": meta.tol,
                    "period": meta.period,
                    "model": m.describe(),
                    "raw_bands": meta.raw_bands.iter().map(|b| [b.0, b.1]).collect::<Vec<_>>(),
                    "evaluations": meta.evaluations,
                },
            });
            emit_json(&out, stdout, &v)?;
            if let Some(p) = csv {
                let mut w = csv::Writer::from_writer(create(&p)?);
                w.write_record(["theta", "energy"]).map_err(|e| CliError::domain(e.to_string()))?;
                for (t, es) in samples.theta.iter().zip(&samples.energies) {
                    for e in es {
                        w.serialize((t, e)).map_err(|e| CliError::domain(e.to_string()))?;
                    }
                }
                w.flush()?;
            }
        }
        Command::Bound { model, a, b, rmax, growth, out } => {
            let (xa, sa) = read_json::<ConfigurationSpec>(&a)?.subshift()?;
            let (_, sb) = read_json::<ConfigurationSpec>(&b)?.subshift()?;
            let m: ModelSpec = read_json(&model)?;
            let h = m.build(xa.alphabet())?;
            let d = subshift_distance(&sa, &sb, rmax)?;
            let pc = partition_constants(h.lattice());
            let cert = match growth {
                Some(c_h) => infinite_range_bound(&h, c_h, d, &pc)?,
                None => finite_range_bound(&h, d, &pc)?,
            }
            .with_inputs(format!("model {} ({}); subshifts {} and {}", model.display(), m.describe(), a.display(), b.display()));
            let mut v = certificate_json(&cert);
            v["d_subshift"]["exact"] = json!(d.value.to_string());
            v["constants"]["c_l_sampled"] = json!(pc.c_l_sampled);
            emit_json(&out, stdout, &v)?;
        }
        Command::Sweep { experiment, out, dat, summary } => {
            let spec: ExperimentSpec = read_json(&experiment)?;
            let res = sweep_convergents(&spec, &Parallel::from_env())?;
            match &out {
                Some(p) => write_csv(&res.rows, create(p)?)?,
                None => write_csv(&res.rows, &mut *stdout)?,
            }
            if let Some(p) = dat {
                write_dat(&res.rows, create(&p)?)?;
            }
            let s = serde_json::to_string_pretty(&res.summary).expect("summary serializes");
            writeln!(stderr, "{s}")?;
            if let Some(p) = summary {
                std::fs::write(&p, s + "\n").map_err(|e| CliError::domain(format!("{}: {e}", p.display())))?;
            }
            if !res.summary.all_pass {
                return Ok(1);
            }
        }
        Command::Selftest { seed, corrupt_metric, out } => {
            let report = selftest(SelftestOptions { seed, corrupt_metric });
            emit_json(&out, stdout, &serde_json::to_value(&report).expect("report serializes"))?;
            if !report.passed {
                return Ok(1);
            }
        }
    }
    Ok(0)
}

/// Every constant of a certificate, itemized.
pub fn certificate_json(c: &BoundCertificate) -> Value {
    let k = &c.constants;
    json!({
        "schema": SCHEMA,
        "theorem": c.theorem.name(),
        "constants": {
            "C_L": k.c_l,
            "N_overlap": k.n_overlap,
            "C_dL": k.c_dl,
            "C_hop": k.c_hop,
            "schur_beta": k.schur_beta,
            "R_H": k.r_h,
            "beta": k.beta,
            "C_H": k.c_h,
        },
        "d_subshift": { "value": c.d_subshift.value, "lower_bound": c.d_subshift.lower_bound },
        "bound": c.bound,
        "fallback": c.fallback,
        "effective": c.effective,
        "partition": c.partition,
        "inputs": c.inputs,
    })
}
