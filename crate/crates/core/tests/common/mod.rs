//! Property checks shared by the proptest suite and the acceptance runner.
#![allow(dead_code)]

use omega_core::cond::{omega_chol, omega_eig, omega_lu};
use omega_core::experiments::profile::ProfileTable;
use omega_core::experiments::random::{orthogonal_whitened_instance, spd_with_spectrum};
use omega_core::experiments::{generate_problem, Policy, PolicyContext};
use omega_core::linalg::{cholesky, SymPDMatrix};
use omega_core::lowrank::{omega_gradient, omega_gradient_exact, omega_of_update, whiten, UpdateSpec, WhiteningSource};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), TestCaseError>;

/// Spectrum with entries log-uniform in `[1, 10^decades]`.
pub fn log_uniform_spectrum(rng: &mut ChaCha8Rng, n: usize, decades: f64) -> Vec<f64> {
    (0..n).map(|_| 10f64.powf(rng.gen_range(0.0..=decades))).collect()
}

pub fn seeded_spd(seed: u64, n: usize, decades: f64) -> SymPDMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = log_uniform_spectrum(&mut rng, n, decades);
    spd_with_spectrum(&d, &mut rng)
}

pub fn am_gm_floor(seed: u64, n: usize, decades: f64) -> Check {
    let a = seeded_spd(seed, n, decades);
    for w in [omega_eig(&a).unwrap(), omega_chol(&a).unwrap(), omega_lu(&a).unwrap()] {
        prop_assert!(w >= 1.0 - 1e-12, "omega {w} below 1");
    }
    let c = 1.0 + seed as f64 % 7.0;
    prop_assert!((omega_chol(&SymPDMatrix::from_diag(&vec![c; n])).unwrap() - 1.0).abs() <= 1e-14);
    Ok(())
}

pub fn scale_invariance(seed: u64, n: usize, log_c: f64) -> Check {
    let a = seeded_spd(seed, n, 3.0);
    let c = 10f64.powf(log_c);
    let scaled = SymPDMatrix::from_symmetrized(a.as_matrix().scaled(c));
    let (w, wc) = (omega_chol(&a).unwrap(), omega_chol(&scaled).unwrap());
    prop_assert!((w - wc).abs() <= 1e-12 * w, "omega(A) = {w}, omega(cA) = {wc}");
    Ok(())
}

pub fn profile_monotone(measures: Vec<Vec<Option<f64>>>) -> Check {
    let cols = measures[0].len();
    let names = (0..cols).map(|j| format!("p{j}")).collect();
    let p = ProfileTable::new(names, &measures).unwrap();
    for curve in &p.rho {
        prop_assert!(curve.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(curve.iter().all(|r| (0.0..=1.0).contains(r)));
    }
    for (row, m) in p.ratios.iter().zip(&measures) {
        if m.iter().any(Option::is_some) {
            prop_assert_eq!(row.iter().copied().fold(f64::INFINITY, f64::min), 1.0);
        }
    }
    Ok(())
}

pub fn determinism(n: usize, seed: u64) -> Check {
    let a = generate_problem(n, seed).unwrap();
    let b = generate_problem(n, seed).unwrap();
    prop_assert_eq!(&a, &b);
    let (sa, sb) = (a.update_spec().unwrap(), b.update_spec().unwrap());
    let (ca, cb) = (PolicyContext::new(&sa).unwrap(), PolicyContext::new(&sb).unwrap());
    for p in Policy::ALL {
        let ga = ca.gamma(p).unwrap().result.gamma;
        let gb = cb.gamma(p).unwrap().result.gamma;
        prop_assert!(ga.iter().zip(&gb).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
    Ok(())
}

/// `A` and `U` with mutually orthogonal whitened columns, plus a γ inside Ω.
pub fn orthogonal_instance(seed: u64, n: usize, t: usize) -> (UpdateSpec, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = log_uniform_spectrum(&mut rng, n, 2.0);
    let scales: Vec<f64> = (0..t).map(|_| rng.gen_range(0.3..3.0)).collect();
    let (a, u) = orthogonal_whitened_instance(&d, &scales, &mut rng);
    let spec = UpdateSpec::new(a, u).unwrap();
    let gamma = scales
        .iter()
        .map(|s| {
            let lower = -1.0 / (s * s);
            // stay well inside the open lower bound
            lower * rng.gen_range(0.0..0.8) + rng.gen_range(0.0..2.0)
        })
        .collect();
    (spec, gamma)
}

pub fn gradient_matches_finite_differences(seed: u64, n: usize, t: usize) -> Check {
    let (spec, gamma) = orthogonal_instance(seed, n, t);
    let wh = whiten(&spec, WhiteningSource::Spectral).unwrap();
    let g = omega_gradient(&spec, &wh, &gamma).unwrap().gradient;
    let exact = omega_gradient_exact(&spec, &gamma).unwrap();
    let fd: Vec<f64> = (0..t)
        .map(|j| {
            let h = 1e-5 * (1.0 + gamma[j].abs());
            let mut plus = gamma.clone();
            let mut minus = gamma.clone();
            plus[j] += h;
            minus[j] -= h;
            (omega_of_update(&spec, &plus).unwrap() - omega_of_update(&spec, &minus).unwrap()) / (2.0 * h)
        })
        .collect();
    let scale = fd.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for (name, cand) in [("product form", &g), ("exact", &exact)] {
        let err = cand.iter().zip(&fd).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        prop_assert!(err <= 1e-4 * scale + 1e-9, "{name} gradient off by {err:e} (scale {scale:e})");
    }
    Ok(())
}

pub fn det_product_formula(seed: u64, n: usize, t: usize) -> Check {
    let (spec, gamma) = orthogonal_instance(seed, n, t);
    let wh = whiten(&spec, WhiteningSource::Cholesky).unwrap();
    let updated = spec.updated_matrix(&gamma).unwrap();
    let logdet: f64 = cholesky(&updated).unwrap().diag().iter().map(|l| 2.0 * l.ln()).sum();
    let product: f64 = n as f64 * wh.det_root.ln()
        + gamma.iter().zip(&wh.col_norms_sq_w).map(|(g, c)| (1.0 + g * c).ln()).sum::<f64>();
    prop_assert!((logdet - product).abs() <= 1e-8, "log det {logdet} vs product form {product}");
    Ok(())
}

pub fn measures_strategy() -> impl Strategy<Value = Vec<Vec<Option<f64>>>> {
    (1usize..5).prop_flat_map(|cols| {
        proptest::collection::vec(proptest::collection::vec(proptest::option::weighted(0.8, 1e-3f64..1e3), cols), 1..25)
    })
}

pub fn matrix_strategy() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 2usize..25)
}

pub fn update_strategy() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 3usize..20).prop_flat_map(|(seed, n)| (Just(seed), Just(n), 1usize..n.min(5)))
}
