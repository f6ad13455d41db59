//! Seeded fixtures shared by the criterion benches.

use omega_core::experiments::random::{gaussian_vector, random_spd};
use omega_core::{DenseMatrix, SymPDMatrix, UpdateSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn spd_fixture(n: usize, kappa: f64, seed: u64) -> SymPDMatrix {
    random_spd(n, kappa, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `A` with condition `kappa` and `t` Gaussian update columns.
pub fn update_fixture(n: usize, t: usize, kappa: f64, seed: u64) -> UpdateSpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = random_spd(n, kappa, &mut rng);
    let cols: Vec<Vec<f64>> = (0..t).map(|_| gaussian_vector(n, &mut rng)).collect();
    UpdateSpec::new(a, DenseMatrix::from_columns(&cols).expect("equal lengths")).expect("generic columns")
}
