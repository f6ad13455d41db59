//! `omegacond`: ω-condition numbers, optimal low-rank preconditioners and the
//! benchmark pipeline from the command line.
//!
//! Exit codes: 0 on success, 1 on a domain error (bad matrix, infeasible γ,
//! I/O), 2 on a usage error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use omega_core::experiments::benchmark::{merge_profiles, solver_profiles, summarize, write_results_path, write_summary_path};
use omega_core::experiments::condest::{CondEstimateStudy, DEFAULT_EPSILON, DEFAULT_TRIALS};
use omega_core::experiments::random::gaussian_vector;
use omega_core::experiments::{estimate_cond, generate_problem, run_benchmark, Measure, RunConfig};
use omega_core::linalg::mm;
use omega_core::lowrank::{gamma_projected, gamma_rank_one, gamma_rank_one_box, gamma_rank_t, whiten};
use omega_core::{cond_report, omega_chol, omega_eig, omega_lu, CondReport, SymPDMatrix, UpdateSpec, WhiteningSource};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED_ENV: &str = "OMEGACOND_SEED";

#[derive(Parser)]
#[command(name = "omegacond", version, about = "Exact ω-condition numbers and ω-optimal preconditioners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Eig,
    Chol,
    Lu,
    All,
}

#[derive(Subcommand)]
enum Command {
    /// Print κ and ω of a symmetric positive definite matrix as CSV.
    Eval {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        method: Method,
    },
    /// Print the optimal γ for A + U Diag(γ) Uᵀ as JSON.
    Precond {
        #[arg(long = "A")]
        a: PathBuf,
        #[arg(long = "U")]
        u: PathBuf,
        /// Restrict γ to [0, 1]ᵗ.
        #[arg(long = "box")]
        boxed: bool,
        #[arg(long, default_value = "cholesky")]
        whitening: WhiteningSource,
    },
    /// Generate one random low-rank benchmark problem.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the solver/policy benchmark described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Performance profile of a results.csv.
    Profile {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, default_value = "time")]
        measure: Measure,
        /// Output CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Perturbation-based condition estimate of A x = b with a random b.
    Condest {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for condest.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_spd(path: &Path) -> Result<SymPDMatrix> {
    let m = mm::read_path(path).with_context(|| format!("reading {}", path.display()))?;
    SymPDMatrix::new(m).with_context(|| format!("{}", path.display()))
}

fn eval(matrix: &Path, method: Method) -> Result<()> {
    let a = read_spd(matrix)?;
    let (name, f): (&str, fn(&SymPDMatrix) -> omega_core::Result<f64>) = match method {
        Method::All => {
            let report = cond_report(&a)?;
            println!("{}\n{}", CondReport::CSV_HEADER, report.to_csv_row());
            return Ok(());
        }
        Method::Eig => ("eig", omega_eig),
        Method::Chol => ("chol", omega_chol),
        Method::Lu => ("lu", omega_lu),
    };
    let start = Instant::now();
    let omega = f(&a)?;
    let secs = start.elapsed().as_secs_f64();
    println!("n,method,omega,time\n{},{name},{omega:.17e},{secs:.17e}", a.order());
    Ok(())
}

fn precond(a: &Path, u: &Path, boxed: bool, source: WhiteningSource) -> Result<()> {
    let a = read_spd(a)?;
    let u = mm::read_path(u).with_context(|| format!("reading {}", u.display()))?;
    let spec = UpdateSpec::new(a, u)?;
    let wh = whiten(&spec, source)?;
    let result = match (spec.t(), boxed) {
        (1, false) => gamma_rank_one(&spec, &wh)?,
        (1, true) => gamma_rank_one_box(&spec, &wh)?,
        (_, false) => gamma_rank_t(&spec, &wh)?,
        (_, true) => gamma_projected(&spec, &wh)?,
    };
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

fn seed_override() -> Result<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(s) => Ok(Some(s.trim().parse().with_context(|| format!("{SEED_ENV}={s:?} is not an unsigned integer"))?)),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => bail!("{SEED_ENV}: {e}"),
    }
}

fn run(config: &Path, out: &Path, jobs: Option<usize>) -> Result<()> {
    let text = fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let mut config: RunConfig =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", config.display()))?;
    if let Some(seed) = seed_override()? {
        config.master_seed = seed;
    }
    let outcome = run_benchmark(&config, jobs)?;
    for f in &outcome.failures {
        let policy = f.policy.map_or_else(|| "-".to_string(), |p| p.to_string());
        eprintln!("warning: n={} instance={} policy={policy}: {}", f.n, f.instance, f.message);
    }
    fs::create_dir_all(out)?;
    write_results_path(out.join("results.csv"), &outcome.rows)?;
    write_summary_path(out.join("summary.csv"), &summarize(&outcome.rows))?;
    if !outcome.rows.is_empty() {
        let profile = merge_profiles(&solver_profiles(&outcome.rows, config.measure)?)?;
        profile.write_csv_path(out.join(format!("profile_{}.csv", config.measure.name())))?;
    }
    Ok(())
}

fn profile(results: &Path, measure: Measure, out: Option<&Path>) -> Result<()> {
    let rows = omega_core::experiments::benchmark::read_results_path(results)
        .with_context(|| format!("reading {}", results.display()))?;
    let table = merge_profiles(&solver_profiles(&rows, measure)?)?;
    match out {
        Some(path) => table.write_csv_path(path)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write_csv(&mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn condest(matrix: &Path, trials: usize, eps: f64, seed: u64, out: Option<&Path>) -> Result<()> {
    let a = read_spd(matrix)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = gaussian_vector(a.order(), &mut rng);
    let study = estimate_cond(&a, &b, trials, eps, &mut rng)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        CondEstimateStudy::write_csv_path(dir.join("condest.csv"), std::slice::from_ref(&study))?;
    }
    println!("{}", serde_json::to_string_pretty(&study)?);
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Eval { matrix, method } => eval(&matrix, method),
        Command::Precond { a, u, boxed, whitening } => precond(&a, &u, boxed, whitening),
        Command::Gen { n, seed, out } => {
            generate_problem(n, seed)?.write_dir(&out)?;
            Ok(())
        }
        Command::Run { config, out, jobs } => run(&config, &out, jobs),
        Command::Profile { results, measure, out } => profile(&results, measure, out.as_deref()),
        Command::Condest { matrix, trials, eps, seed, out } => condest(&matrix, trials, eps, seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
