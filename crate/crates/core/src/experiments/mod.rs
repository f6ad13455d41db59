//! Random problem generation, the preconditioner benchmark, performance
//! profiles and the perturbation-based condition study.

pub mod benchmark;
pub mod condest;
pub mod generate;
pub mod policy;
pub mod profile;
pub mod random;

pub use benchmark::{run_benchmark, BenchmarkOutcome, Measure, ResultRow, RunConfig, RunStatus, SolverKind};
pub use condest::{estimate_cond, perturbation_ratio, CondEstimateStudy};
pub use generate::{generate_problem, generate_problem_with, GeneratorConfig, LowRankProblem};
pub use policy::{policy_gamma, Policy, PolicyContext, PolicyGamma};
pub use profile::ProfileTable;
