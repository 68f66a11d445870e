//! Command-line front end.
//!
//! ```text
//! bregman gen      --family dopt --m 80 --n 200 --seed 1 --out inst.json
//! bregman run      --instance inst.json --algo abpg-g --iters 1000 --out trace.csv
//! bregman compare  --instance inst.json --algos bpg,bpg-ls,abpg,abpg-g --iters 1000 --out cmp.csv
//! bregman certify  --trace cmp.csv --algo abpg-g --summary cmp.summary.json --out cert.csv
//! ```
//!
//! Relative output paths are placed under `$BREGMAN_OUT_DIR` when it is set.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use bregman_core::instances::{default_poisson_reg, default_relentropy_reg, doptimal_from_features};
use bregman_core::{gen_doptimal, gen_poisson, gen_relentropy, load_libsvm, Algorithm, Family, Instance, Regularizer, SolverConfig, ThetaMode};
use clap::{Args, Parser, Subcommand};

use crate::certificate::{certificates, BoundKind, Certificate};
use crate::compare::{bound_scale, reference_optimum, run_all, summarize, CompareOptions, Summary};
use crate::trace_csv::{read_rows, trace_rows, write_merged, write_rows, write_trace_csv, CsvRow};

pub const OUT_DIR_ENV: &str = "BREGMAN_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "bregman", version, about = "Bregman proximal gradient experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Run one algorithm and write its trace.
    Run(RunArgs),
    /// Run several algorithms against a shared reference optimum.
    Compare(CompareArgs),
    /// Replay a trace into a certificate series.
    Certify(CertifyArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// dopt, poisson, relentropy or libsvm
    #[arg(long, value_parser = parse_family)]
    family: Family,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// zero, l1:<lambda> or l2:<lambda>; defaults follow the family
    #[arg(long, value_parser = parse_reg)]
    reg: Option<Regularizer>,
    /// LibSVM file for the libsvm family
    #[arg(long)]
    libsvm: Option<PathBuf>,
    /// Scale LibSVM samples to unit norm
    #[arg(long)]
    unit_norm: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    #[arg(long, default_value_t = 3.0)]
    gamma0: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma_min: f64,
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    #[arg(long, default_value_t = 1.5)]
    rho: f64,
    #[arg(long, default_value_t = 1e-3)]
    gain_min: f64,
    /// explicit, equality-root, gain-coupled or gain-coupled-explicit
    #[arg(long, value_parser = parse_theta_mode)]
    theta_mode: Option<ThetaMode>,
    #[arg(long)]
    restart: bool,
    #[arg(long, default_value_t = 60)]
    max_trials: usize,
}

impl SolverArgs {
    fn config(&self, alg: Algorithm) -> SolverConfig {
        let defaults = SolverConfig::new(alg, self.iters);
        SolverConfig {
            gamma: self.gamma,
            gamma0: self.gamma0,
            gamma_min: self.gamma_min,
            delta: self.delta,
            rho: self.rho,
            gain_min: self.gain_min,
            theta_mode: self.theta_mode.unwrap_or(defaults.theta_mode),
            restart: self.restart,
            max_trials: self.max_trials,
            ..defaults
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = parse_algo)]
    algo: Algorithm,
    #[command(flatten)]
    solver: SolverArgs,
    /// Known optimal value for the gap column
    #[arg(long, allow_negative_numbers = true)]
    fstar: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = parse_algo, default_value = "bpg,bpg-ls,abpg,abpg-g")]
    algos: Vec<Algorithm>,
    #[command(flatten)]
    solver: SolverArgs,
    /// Reference run length (default 10 x iters)
    #[arg(long)]
    ref_iters: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    fstar: Option<f64>,
    #[arg(long)]
    slope_lo: Option<usize>,
    #[arg(long)]
    slope_hi: Option<usize>,
    /// Merged CSV; per-algorithm traces and the summary go next to it
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, value_parser = parse_algo)]
    algo: Algorithm,
    /// Summary JSON written by `compare` (provides F*, bound scale and gamma)
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    fstar: Option<f64>,
    /// L * D_h(xhat, x0)
    #[arg(long, allow_negative_numbers = true)]
    bound_scale: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    slope_lo: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: bregman_core::Error| e.to_string())
}

fn parse_algo(s: &str) -> Result<Algorithm, String> {
    s.parse().map_err(|e: bregman_core::Error| e.to_string())
}

fn parse_reg(s: &str) -> Result<Regularizer, String> {
    s.parse().map_err(|e: bregman_core::Error| e.to_string())
}

fn parse_theta_mode(s: &str) -> Result<ThetaMode, String> {
    match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
        "explicit" => Ok(ThetaMode::Explicit),
        "equality-root" | "root" => Ok(ThetaMode::EqualityRoot),
        "gain-coupled" => Ok(ThetaMode::GainCoupled),
        "gain-coupled-explicit" => Ok(ThetaMode::GainCoupledExplicit),
        _ => Err(format!("unknown theta mode `{s}`")),
    }
}

fn output_path(out: Option<&Path>, default_name: &str) -> PathBuf {
    let p = out.map_or_else(|| PathBuf::from(default_name), Path::to_path_buf);
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p,
    }
}

fn ensure_parent(path: &Path) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(())
}

/// `cmp.csv` -> `cmp.<suffix>`
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn cmd_gen(a: &GenArgs) -> anyhow::Result<()> {
    let inst = match a.family {
        Family::DOptimal => gen_doptimal(a.m, a.n, a.seed)?,
        Family::Poisson => gen_poisson(a.m, a.n, a.seed, a.reg.unwrap_or(default_poisson_reg(a.m, a.n)))?,
        Family::RelEntropy => gen_relentropy(a.m, a.n, a.seed, a.reg.unwrap_or_else(default_relentropy_reg))?,
        Family::DOptimalLibsvm => {
            let path = a.libsvm.as_ref().ok_or_else(|| anyhow!("--libsvm <path> is required for the libsvm family"))?;
            doptimal_from_features(load_libsvm(path)?.features, a.unit_norm)?
        }
    };
    let name = format!("{}_{}x{}_s{}.json", inst.family, inst.m(), inst.n(), a.seed);
    let out = output_path(a.out.as_deref(), &name);
    ensure_parent(&out)?;
    inst.write(&out)?;
    log::info!("wrote {}", out.display());
    Ok(())
}

fn cmd_run(a: &RunArgs) -> anyhow::Result<()> {
    let inst = Instance::read(&a.instance)?;
    let cfg = a.solver.config(a.algo);
    let trace = bregman_core::run(&inst.problem, &cfg, &inst.x0).with_context(|| format!("running {}", a.algo))?;
    let out = output_path(a.out.as_deref(), &format!("{}.csv", a.algo));
    ensure_parent(&out)?;
    write_trace_csv(&out, &trace, a.fstar)?;
    log::info!("{}: F = {:.12e} after {} iterations", a.algo, trace.final_f, trace.rows.len());
    Ok(())
}

fn cmd_compare(a: &CompareArgs) -> anyhow::Result<()> {
    let inst = Instance::read(&a.instance)?;
    let window = match (a.slope_lo, a.slope_hi) {
        (None, None) => None,
        (lo, hi) => Some((lo.unwrap_or(a.solver.iters / 10), hi.unwrap_or(a.solver.iters))),
    };
    let opts = CompareOptions {
        algorithms: a.algos.clone(),
        base: a.solver.config(Algorithm::Bpg),
        ref_iters: a.ref_iters.unwrap_or(10 * a.solver.iters),
        f_star: a.fstar,
        slope_window: window,
    };
    let outcomes = run_all(&inst, &opts);
    let (f_star, scale) = match a.fstar {
        Some(f) => (f, None),
        None => {
            let (f, x_hat) = reference_optimum(&inst, opts.ref_iters, &outcomes)?;
            (f, Some(bound_scale(&inst, &x_hat)?))
        }
    };
    let summary = summarize(&inst, &opts, &outcomes, f_star, scale);

    let out = output_path(a.out.as_deref(), "compare.csv");
    ensure_parent(&out)?;
    let mut merged = Vec::new();
    for o in &outcomes {
        if let Ok(trace) = &o.result {
            let rows = trace_rows(trace, Some(f_star));
            let path = sibling(&out, &format!("{}.csv", o.algorithm));
            write_rows(File::create(&path).with_context(|| format!("creating {}", path.display()))?, &rows)?;
            merged.push((o.algorithm.to_string(), rows));
        }
    }
    write_merged(File::create(&out).with_context(|| format!("creating {}", out.display()))?, &merged)?;
    let summary_path = sibling(&out, "summary.json");
    serde_json::to_writer_pretty(BufWriter::new(File::create(&summary_path)?), &summary)?;

    let failed: Vec<String> = summary
        .algorithms
        .iter()
        .filter_map(|s| s.error.as_ref().map(|e| format!("{}: {e}", s.algorithm)))
        .collect();
    if !failed.is_empty() {
        bail!("{} run(s) failed: {}", failed.len(), failed.join("; "));
    }
    Ok(())
}

fn write_certificates(path: &Path, certs: &[Certificate]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["k", "geo_mean_gain", "theory_bound", "observed_gap", "slope"])?;
    let real = |v: f64| if v.is_nan() { String::new() } else { format!("{v:.16e}") };
    for c in certs {
        w.write_record([
            c.k.to_string(),
            real(c.geo_mean_gain),
            real(c.theory_bound),
            real(c.observed_gap),
            c.slope.map(real).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_certify(a: &CertifyArgs) -> anyhow::Result<()> {
    let summary: Option<Summary> = match &a.summary {
        Some(p) => Some(serde_json::from_reader(File::open(p).with_context(|| format!("opening {}", p.display()))?)?),
        None => None,
    };
    let f_star = a
        .fstar
        .or(summary.as_ref().map(|s| s.f_star))
        .ok_or_else(|| anyhow!("F* is unknown: pass --fstar or --summary"))?;
    let scale = a.bound_scale.or(summary.as_ref().and_then(|s| s.bound_scale)).unwrap_or(f64::NAN);
    let gamma = a.gamma.or(summary.as_ref().map(|s| s.gamma)).unwrap_or(2.0);

    let file = File::open(&a.trace).with_context(|| format!("opening {}", a.trace.display()))?;
    let all = read_rows(file)?;
    let label = a.algo.to_string();
    let rows: Vec<CsvRow> = all
        .into_iter()
        .filter(|(l, _)| l.is_empty() || *l == label)
        .map(|(_, r)| r)
        .collect();
    if rows.is_empty() {
        bail!("no rows for {} in {}", a.algo, a.trace.display());
    }
    let f_values: Vec<f64> = rows.iter().map(|r| r.f).collect();
    let gains: Vec<f64> = rows[..rows.len() - 1]
        .iter()
        .map(|r| r.gain.unwrap_or(f64::NAN))
        .collect();
    let k_max = rows.len() - 1;
    let slope_lo = a
        .slope_lo
        .or(summary.as_ref().map(|s| s.slope_window.0))
        .unwrap_or(k_max / 10);
    let certs = certificates(&f_values, &gains, BoundKind::for_algorithm(a.algo, gamma), f_star, scale, slope_lo)?;
    let out = output_path(a.out.as_deref(), &format!("{}.cert.csv", a.algo));
    ensure_parent(&out)?;
    write_certificates(&out, &certs)?;
    if let Some(bad) = certs.iter().find(|c| !c.holds(1e-8)) {
        log::warn!(
            "bound violated at k = {}: gap {:e} > bound {:e}",
            bad.k,
            bad.observed_gap,
            bad.theory_bound
        );
    }
    Ok(())
}

/// Parses `argv` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Run(a) => cmd_run(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Certify(a) => cmd_certify(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
