//! Preconditioner benchmark: every (instance, policy, solver) cell solves
//! `A(γ) x = b` from the origin and records the exact κ, ω of `A(γ)`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::generate_problem;
use super::policy::{Policy, PolicyContext};
use super::profile::ProfileTable;
use super::random::instance_seed;
use crate::cond::{kappa_from_spectrum, omega_from_spectral};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eig;
use crate::solvers::{cgs, lsqr, LinearOperator, SolveConfig, SolveReport, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Lsqr,
    Cgs,
}

impl SolverKind {
    pub const ALL: [SolverKind; 2] = [SolverKind::Lsqr, SolverKind::Cgs];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Lsqr => "lsqr",
            SolverKind::Cgs => "cgs",
        }
    }

    pub fn solve<A: LinearOperator + ?Sized>(self, a: &A, b: &[f64], config: &SolveConfig) -> Result<SolveReport> {
        match self {
            SolverKind::Lsqr => lsqr(a, b, config),
            SolverKind::Cgs => cgs(a, b, config),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown solver '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "time")]
    Time,
    #[serde(rename = "iterations", alias = "iters")]
    Iterations,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Time => "time",
            Measure::Iterations => "iterations",
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "time" => Ok(Measure::Time),
            "iters" | "iterations" => Ok(Measure::Iterations),
            other => Err(Error::InvalidInput(format!("unknown measure '{other}'"))),
        }
    }
}

fn default_tol() -> f64 {
    SolveConfig::default().tol
}

fn default_max_iter() -> usize {
    SolveConfig::default().max_iter
}

fn default_solvers() -> Vec<SolverKind> {
    SolverKind::ALL.to_vec()
}

fn default_policies() -> Vec<Policy> {
    Policy::ALL.to_vec()
}

fn default_measure() -> Measure {
    Measure::Time
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunConfig {
    pub sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub master_seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverKind>,
    #[serde(default = "default_policies")]
    pub policies: Vec<Policy>,
    #[serde(default = "default_measure")]
    pub measure: Measure,
}

impl RunConfig {
    pub fn solve_config(&self) -> SolveConfig {
        SolveConfig { tol: self.tol, max_iter: self.max_iter }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() {
            return Err(Error::InvalidInput("sizes must not be empty".into()));
        }
        if let Some(n) = self.sizes.iter().find(|&&n| n < 8) {
            return Err(Error::InvalidInput(format!("problem size {n} is below the minimum of 8")));
        }
        if self.instances_per_size == 0 {
            return Err(Error::InvalidInput("instancesPerSize must be at least 1".into()));
        }
        if self.solvers.is_empty() || self.policies.is_empty() {
            return Err(Error::InvalidInput("solvers and policies must not be empty".into()));
        }
        self.solve_config().validate()
    }
}

/// Outcome of a cell; `Failed` marks a γ or setup error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunStatus {
    Converged,
    MaxIter,
    Stagnated,
    Failed,
}

impl From<SolveStatus> for RunStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Converged => RunStatus::Converged,
            SolveStatus::MaxIter => RunStatus::MaxIter,
            SolveStatus::Stagnated => RunStatus::Stagnated,
        }
    }
}

impl RunStatus {
    pub fn name(self) -> &'static str {
        match self {
            RunStatus::Converged => "Converged",
            RunStatus::MaxIter => "MaxIter",
            RunStatus::Stagnated => "Stagnated",
            RunStatus::Failed => "Failed",
        }
    }
}

pub const RESULTS_HEADER: &str =
    "n,r,t,policy,solver,kappa,omega,relResidual,iterations,wallTime,gammaTimeSpec,gammaTimeChol,instance,seed,status";

/// One line of `results.csv`. Gamma times are NaN except for `omegaProj`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultRow {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub policy: Policy,
    pub solver: SolverKind,
    pub kappa: f64,
    pub omega: f64,
    pub rel_residual: f64,
    pub iterations: usize,
    pub wall_time: f64,
    pub gamma_time_spec: f64,
    pub gamma_time_chol: f64,
    pub instance: usize,
    pub seed: u64,
    pub status: RunStatus,
}

impl ResultRow {
    fn sort_key(&self) -> (usize, usize, Policy, SolverKind) {
        (self.n, self.instance, self.policy, self.solver)
    }

    /// The profile measure, `None` unless the solve converged. For
    /// `omegaProj` the time includes computing γ along the spectral path.
    pub fn measure(&self, measure: Measure) -> Option<f64> {
        if self.status != RunStatus::Converged {
            return None;
        }
        Some(match measure {
            Measure::Iterations => self.iterations as f64,
            Measure::Time if self.policy == Policy::OmegaProj && self.gamma_time_spec.is_finite() => {
                self.wall_time + self.gamma_time_spec
            }
            Measure::Time => self.wall_time,
        })
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.17e},{:.17e},{:.17e},{},{:.17e},{:.17e},{:.17e},{},{},{}",
            self.n,
            self.r,
            self.t,
            self.policy,
            self.solver,
            self.kappa,
            self.omega,
            self.rel_residual,
            self.iterations,
            self.wall_time,
            self.gamma_time_spec,
            self.gamma_time_chol,
            self.instance,
            self.seed,
            self.status.name()
        )
    }
}

/// A cell that could not be run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFailure {
    pub n: usize,
    pub instance: usize,
    pub policy: Option<Policy>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<RunFailure>,
}

fn run_instance(config: &RunConfig, n: usize, instance: usize) -> (Vec<ResultRow>, Vec<RunFailure>) {
    let seed = instance_seed(config.master_seed, n, instance);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let fail = |policy: Option<Policy>, e: Error| RunFailure { n, instance, policy, message: e.to_string() };

    let problem = match generate_problem(n, seed) {
        Ok(p) => p,
        Err(e) => return (rows, vec![fail(None, e)]),
    };
    let spec = match problem.update_spec() {
        Ok(s) => s,
        Err(e) => return (rows, vec![fail(None, e)]),
    };
    let ctx = match PolicyContext::new(&spec) {
        Ok(c) => c,
        Err(e) => return (rows, vec![fail(None, e)]),
    };
    let solve_config = config.solve_config();

    for &policy in &config.policies {
        let base = ResultRow {
            n,
            r: problem.r,
            t: problem.t,
            policy,
            solver: SolverKind::Lsqr,
            kappa: f64::NAN,
            omega: f64::NAN,
            rel_residual: f64::NAN,
            iterations: 0,
            wall_time: f64::NAN,
            gamma_time_spec: f64::NAN,
            gamma_time_chol: f64::NAN,
            instance,
            seed,
            status: RunStatus::Failed,
        };
        let pg = match ctx.gamma(policy) {
            Ok(pg) => pg,
            Err(e) => {
                failures.push(fail(Some(policy), e));
                rows.extend(config.solvers.iter().map(|&solver| ResultRow { solver, ..base.clone() }));
                continue;
            }
        };
        let gamma = pg.result.gamma;
        let (kappa, omega) = match spec
            .updated_matrix(&gamma)
            .and_then(|m| symmetric_eig(&m))
            .and_then(|eig| Ok((kappa_from_spectrum(&eig)?, omega_from_spectral(&eig)?)))
        {
            Ok(v) => v,
            Err(e) => {
                failures.push(fail(Some(policy), e));
                (f64::NAN, f64::NAN)
            }
        };
        let op = problem.operator(&gamma);
        for &solver in &config.solvers {
            let mut row = ResultRow {
                solver,
                kappa,
                omega,
                gamma_time_spec: pg.gamma_time_spec.unwrap_or(f64::NAN),
                gamma_time_chol: pg.gamma_time_chol.unwrap_or(f64::NAN),
                ..base.clone()
            };
            match solver.solve(&op, &problem.b, &solve_config) {
                Ok(rep) => {
                    row.rel_residual = rep.rel_residual;
                    row.iterations = rep.iterations;
                    row.wall_time = rep.wall_time;
                    row.status = rep.status.into();
                }
                Err(e) => failures.push(fail(Some(policy), e)),
            }
            rows.push(row);
        }
    }
    (rows, failures)
}

/// Runs every cell of the sweep. `jobs = None` uses all cores; the output
/// order is canonical (by n, instance, policy, solver) for any job count.
pub fn run_benchmark(config: &RunConfig, jobs: Option<usize>) -> Result<BenchmarkOutcome> {
    config.validate()?;
    let tasks: Vec<(usize, usize)> = config
        .sizes
        .iter()
        .flat_map(|&n| (0..config.instances_per_size).map(move |i| (n, i)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let results: Vec<_> = pool.install(|| tasks.par_iter().map(|&(n, i)| run_instance(config, n, i)).collect());
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (r, f) in results {
        rows.extend(r);
        failures.extend(f);
    }
    rows.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(BenchmarkOutcome { rows, failures })
}

pub fn write_results_csv<W: Write>(mut w: W, rows: &[ResultRow]) -> Result<()> {
    writeln!(w, "{RESULTS_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", row.to_csv_row())?;
    }
    Ok(())
}

pub fn write_results_path(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    let mut buf = Vec::new();
    write_results_csv(&mut buf, rows)?;
    std::fs::write(path, buf)?;
    Ok(())
}

pub fn read_results_csv<R: std::io::Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    rdr.deserialize().map(|r| r.map_err(|e: csv::Error| Error::Parse(e.to_string()))).collect()
}

pub fn read_results_path(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let path = path.as_ref();
    let f = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_results_csv(f)
}

/// Per-(n, policy, solver) means over instances, the shape of a results table.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SummaryRow {
    pub n: usize,
    pub policy: Policy,
    pub solver: SolverKind,
    pub instances: usize,
    pub converged: usize,
    pub mean_rel_residual: f64,
    pub mean_iterations: f64,
    pub mean_wall_time: f64,
    pub mean_kappa: f64,
    pub mean_omega: f64,
    pub mean_gamma_time_spec: f64,
    pub mean_gamma_time_chol: f64,
}

pub const SUMMARY_HEADER: &str = "n,policy,solver,instances,converged,meanRelResidual,meanIterations,meanWallTime,meanKappa,meanOmega,meanGammaTimeSpec,meanGammaTimeChol";

impl SummaryRow {
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            self.n,
            self.policy,
            self.solver,
            self.instances,
            self.converged,
            self.mean_rel_residual,
            self.mean_iterations,
            self.mean_wall_time,
            self.mean_kappa,
            self.mean_omega,
            self.mean_gamma_time_spec,
            self.mean_gamma_time_chol
        )
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: BTreeMap<(usize, Policy, SolverKind), Vec<&ResultRow>> = BTreeMap::new();
    for row in rows {
        groups.entry((row.n, row.policy, row.solver)).or_default().push(row);
    }
    groups
        .into_iter()
        .map(|((n, policy, solver), g)| SummaryRow {
            n,
            policy,
            solver,
            instances: g.len(),
            converged: g.iter().filter(|r| r.status == RunStatus::Converged).count(),
            mean_rel_residual: mean(g.iter().map(|r| r.rel_residual)),
            mean_iterations: mean(g.iter().map(|r| r.iterations as f64)),
            mean_wall_time: mean(g.iter().map(|r| r.wall_time)),
            mean_kappa: mean(g.iter().map(|r| r.kappa)),
            mean_omega: mean(g.iter().map(|r| r.omega)),
            mean_gamma_time_spec: mean(g.iter().map(|r| r.gamma_time_spec)),
            mean_gamma_time_chol: mean(g.iter().map(|r| r.gamma_time_chol)),
        })
        .collect()
}

pub fn write_summary_path(path: impl AsRef<Path>, rows: &[SummaryRow]) -> Result<()> {
    let mut text = format!("{SUMMARY_HEADER}\n");
    for row in rows {
        text.push_str(&row.to_csv_row());
        text.push('\n');
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// One profile per solver; problems are `(n, instance)` pairs and the
/// competitors are the policies present for that solver.
pub fn solver_profiles(rows: &[ResultRow], measure: Measure) -> Result<Vec<(SolverKind, ProfileTable)>> {
    if rows.is_empty() {
        return Err(Error::EmptyRunSet("results contain no runs".into()));
    }
    let mut out = Vec::new();
    for solver in SolverKind::ALL {
        let mine: Vec<&ResultRow> = rows.iter().filter(|r| r.solver == solver).collect();
        if mine.is_empty() {
            continue;
        }
        let mut policies: Vec<Policy> = mine.iter().map(|r| r.policy).collect();
        policies.sort();
        policies.dedup();
        let mut problems: BTreeMap<(usize, usize), Vec<Option<f64>>> = BTreeMap::new();
        for r in &mine {
            let slot = policies.iter().position(|&p| p == r.policy).expect("collected above");
            problems.entry((r.n, r.instance)).or_insert_with(|| vec![None; policies.len()])[slot] = r.measure(measure);
        }
        let measures: Vec<Vec<Option<f64>>> = problems.into_values().collect();
        let columns = policies.iter().map(|p| format!("{solver}:{p}")).collect();
        out.push((solver, ProfileTable::new(columns, &measures)?));
    }
    Ok(out)
}

/// Merges per-solver profiles (same τ grid) into one table for CSV output.
pub fn merge_profiles(profiles: &[(SolverKind, ProfileTable)]) -> Result<ProfileTable> {
    let first = &profiles.first().ok_or_else(|| Error::EmptyRunSet("no profiles".into()))?.1;
    let mut merged = ProfileTable {
        columns: Vec::new(),
        ratios: Vec::new(),
        tau: first.tau.clone(),
        rho: Vec::new(),
    };
    for (_, p) in profiles {
        merged.columns.extend(p.columns.iter().cloned());
        merged.rho.extend(p.rho.iter().cloned());
    }
    Ok(merged)
}
