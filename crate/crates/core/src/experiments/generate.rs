//! Random ill-conditioned low-rank-update problems.
//!
//! `A = A₀ᵀA₀` with a sparse Gaussian `A₀ ∈ ℝ^{r×n}`, `r < n`, so `A` is
//! singular and `A + εI` is very ill-conditioned. The system to solve is
//! `(A + εI + U Diag(γ) Uᵀ) x = b` with `b = A b¹ + U b²`.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::random::{gaussian_vector, sparse_normal};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, mm, DenseMatrix, SymPDMatrix};
use crate::lowrank::UpdateSpec;
use crate::solvers::LowRankUpdateOperator;

/// Densities are drawn uniformly from `(DENSITY_FLOOR, bound)`.
pub const DENSITY_FLOOR: f64 = 0.005;

const MAX_REDRAWS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GeneratorConfig {
    /// Density bound for `A₀` is `a0_density / log(n)`.
    pub a0_density: f64,
    /// Density bound for `U` is `u_density / log(n)`.
    pub u_density: f64,
    /// Base of the logarithm in the density bounds.
    pub log_base: f64,
    pub epsilon_min: f64,
    pub epsilon_max: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            a0_density: 0.5,
            u_density: 1.0,
            log_base: std::f64::consts::E,
            epsilon_min: 1e-9,
            epsilon_max: 1e-7,
        }
    }
}

impl GeneratorConfig {
    fn density_bound(&self, scale: f64, n: usize) -> f64 {
        (scale / (n as f64).log(self.log_base)).clamp(DENSITY_FLOOR, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowRankProblem {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    /// `A₀ᵀA₀`, without the `εI` shift.
    pub a: SymPDMatrix,
    pub epsilon: f64,
    pub u: DenseMatrix,
    pub b: Vec<f64>,
    pub seed: u64,
}

/// The scalar parameters of a problem, written next to its matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub n: usize,
    pub r: usize,
    pub t: usize,
    pub epsilon: f64,
    pub seed: u64,
}

impl LowRankProblem {
    /// `A + εI`.
    pub fn shifted(&self) -> SymPDMatrix {
        self.a.shifted(self.epsilon)
    }

    /// The update problem on `A + εI`.
    pub fn update_spec(&self) -> Result<UpdateSpec> {
        UpdateSpec::new(self.shifted(), self.u.clone())
    }

    /// Matrix-free `A + εI + U Diag(γ) Uᵀ`.
    pub fn operator<'a>(&'a self, gamma: &'a [f64]) -> LowRankUpdateOperator<'a> {
        LowRankUpdateOperator::new(self.a.as_matrix(), self.epsilon, &self.u, gamma)
    }

    pub fn meta(&self) -> ProblemMeta {
        ProblemMeta { n: self.n, r: self.r, t: self.t, epsilon: self.epsilon, seed: self.seed }
    }

    /// Writes `A.mtx`, `U.mtx`, `b.mtx` and `problem.json` into `dir`.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        mm::write_path(dir.join("A.mtx"), self.a.as_matrix())?;
        mm::write_path(dir.join("U.mtx"), &self.u)?;
        mm::write_vector_path(dir.join("b.mtx"), &self.b)?;
        let mut json = serde_json::to_string_pretty(&self.meta())?;
        json.push('\n');
        std::fs::write(dir.join("problem.json"), json)?;
        Ok(())
    }
}

pub fn generate_problem(n: usize, seed: u64) -> Result<LowRankProblem> {
    generate_problem_with(n, seed, &GeneratorConfig::default())
}

pub fn generate_problem_with(n: usize, seed: u64, config: &GeneratorConfig) -> Result<LowRankProblem> {
    if n < 8 {
        return Err(Error::InvalidInput(format!("problem size must be at least 8, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = rng.gen_range(n / 2 + 1..=n - 1);

    let a0_bound = config.density_bound(config.a0_density, n);
    let mut attempt = 0;
    let (a, epsilon) = loop {
        let density = rng.gen_range(DENSITY_FLOOR..=a0_bound);
        let a0 = sparse_normal(r, n, density, &mut rng);
        let a = SymPDMatrix::from_symmetrized(a0.gram());
        let epsilon = rng.gen_range(config.epsilon_min..=config.epsilon_max);
        if cholesky(&a.shifted(epsilon)).is_ok() {
            break (a, epsilon);
        }
        attempt += 1;
        if attempt == MAX_REDRAWS {
            return Err(Error::InternalConsistency("could not draw a positive definite A + eps I".into()));
        }
    };

    let t = rng.gen_range(2..=r / 2);
    let u_bound = config.density_bound(config.u_density, n);
    let density = rng.gen_range(DENSITY_FLOOR..=u_bound);
    let mut u = sparse_normal(n, t, density, &mut rng);
    for j in 0..t {
        while u.column(j).iter().all(|&v| v == 0.0) {
            let col = sparse_normal(n, 1, density, &mut rng);
            for i in 0..n {
                u.set(i, j, col.get(i, 0));
            }
        }
    }

    let b1 = gaussian_vector(n, &mut rng);
    let b2 = gaussian_vector(t, &mut rng);
    let mut b = a.as_matrix().matvec(&b1)?;
    let ub = u.matvec(&b2)?;
    b.iter_mut().zip(&ub).for_each(|(bi, ui)| *bi += ui);

    Ok(LowRankProblem { n, r, t, a, epsilon, u, b, seed })
}
