//! Performance profiles.
//!
//! For problem `p` and competitor `γ` with measure `t_{p,γ}`, the ratio is
//! `r_{p,γ} = t_{p,γ} / min_γ' t_{p,γ'}` (`+∞` if the run failed) and the
//! profile is `ρ_γ(τ) = |{p : r_{p,γ} ≤ τ}| / #problems`.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_POINTS: usize = 256;
pub const DEFAULT_MAX_LOG2: f64 = 10.0;

/// `points` values `2^{k·max_log2/(points−1)}`, from 1 to `2^max_log2`.
pub fn tau_grid(points: usize, max_log2: f64) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..points).map(|k| (k as f64 * max_log2 / (points - 1) as f64).exp2()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub columns: Vec<String>,
    /// `ratios[p][j]` for problem `p` and column `j`.
    pub ratios: Vec<Vec<f64>>,
    pub tau: Vec<f64>,
    /// `rho[j][k]` = ρ of column `j` at `tau[k]`.
    pub rho: Vec<Vec<f64>>,
}

impl ProfileTable {
    /// Builds the profile from `measures[p][j]`; `None` marks a failed run.
    pub fn new(columns: Vec<String>, measures: &[Vec<Option<f64>>]) -> Result<Self> {
        Self::with_grid(columns, measures, tau_grid(DEFAULT_POINTS, DEFAULT_MAX_LOG2))
    }

    pub fn with_grid(columns: Vec<String>, measures: &[Vec<Option<f64>>], tau: Vec<f64>) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::EmptyRunSet("no problems".into()));
        }
        if columns.is_empty() {
            return Err(Error::EmptyRunSet("no competitors".into()));
        }
        if let Some(p) = measures.iter().position(|row| row.len() != columns.len()) {
            return Err(Error::DimensionMismatch(format!(
                "problem {p} has {} measures for {} competitors",
                measures[p].len(),
                columns.len()
            )));
        }
        let ratios: Vec<Vec<f64>> = measures
            .iter()
            .map(|row| {
                let best = row.iter().flatten().copied().fold(f64::INFINITY, f64::min);
                row.iter()
                    .map(|m| match m {
                        Some(v) if best > 0.0 => v / best,
                        // a zero best measure: only the competitors that also hit zero tie
                        Some(v) if *v == 0.0 => 1.0,
                        Some(_) => f64::INFINITY,
                        None => f64::INFINITY,
                    })
                    .collect()
            })
            .collect();
        let mut table = ProfileTable { columns, ratios, tau, rho: Vec::new() };
        table.rho = (0..table.columns.len()).map(|j| table.tau.iter().map(|&t| table.rho_at(j, t)).collect()).collect();
        Ok(table)
    }

    pub fn num_problems(&self) -> usize {
        self.ratios.len()
    }

    /// ρ of `column` at an arbitrary `τ`.
    pub fn rho_at(&self, column: usize, tau: f64) -> f64 {
        let hits = self.ratios.iter().filter(|row| row[column] <= tau).count();
        hits as f64 / self.ratios.len() as f64
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// `tau,<col1>,<col2>,…` with one row per grid point.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "tau,{}", self.columns.join(","))?;
        for (k, tau) in self.tau.iter().enumerate() {
            write!(w, "{tau:.17e}")?;
            for col in &self.rho {
                write!(w, ",{:.17e}", col[k])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn write_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }
}
