//! Random test matrices and seed derivation.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{axpy, dot, norm2, DenseMatrix, SymPDMatrix};

/// Derives an independent per-instance seed; stable across platforms and
/// thread counts.
pub fn instance_seed(master: u64, n: usize, instance: usize) -> u64 {
    let mut h = splitmix64(master);
    h = splitmix64(h ^ n as u64);
    splitmix64(h ^ (instance as u64).rotate_left(32))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Each entry independently nonzero with probability `density`, nonzeros standard normal.
pub fn sparse_normal<R: Rng + ?Sized>(rows: usize, cols: usize, density: f64, rng: &mut R) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| if rng.gen_bool(density) { rng.sample(StandardNormal) } else { 0.0 })
}

/// Haar-like orthogonal matrix: Gram–Schmidt (applied twice) on a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DenseMatrix {
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(n);
    while q.len() < n {
        let mut v = gaussian_vector(n, rng);
        for _ in 0..2 {
            for qk in &q {
                let c = dot(qk, &v);
                axpy(-c, qk, &mut v);
            }
        }
        let nv = norm2(&v);
        if nv > 1e-8 {
            q.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    DenseMatrix::from_columns(&q).expect("square")
}

/// `κ^{i/(n-1)}`, `i = 0..n`: geometrically spaced from 1 to κ.
pub fn geometric_spectrum(n: usize, kappa: f64) -> Vec<f64> {
    if n == 1 {
        return vec![1.0];
    }
    (0..n).map(|i| kappa.powf(i as f64 / (n - 1) as f64)).collect()
}

/// `Q Diag(d) Qᵀ` for a given orthogonal `Q`, symmetrized.
pub fn spd_from_factors(q: &DenseMatrix, d: &[f64]) -> SymPDMatrix {
    let n = d.len();
    let qd = DenseMatrix::from_fn(n, n, |i, j| q.get(i, j) * d[j]);
    SymPDMatrix::from_symmetrized(qd.matmul(&q.transpose()).expect("square factors"))
}

/// Random orthogonal eigenbasis with the prescribed spectrum.
pub fn spd_with_spectrum<R: Rng + ?Sized>(d: &[f64], rng: &mut R) -> SymPDMatrix {
    spd_from_factors(&random_orthogonal(d.len(), rng), d)
}

/// Random SPD matrix with a geometric spectrum in `[1, κ]`.
pub fn random_spd<R: Rng + ?Sized>(n: usize, kappa: f64, rng: &mut R) -> SymPDMatrix {
    spd_with_spectrum(&geometric_spectrum(n, kappa), rng)
}

/// `A = Q D Qᵀ` and `U` whose whitened columns `D^{-1/2} Qᵀ uᵢ` are mutually
/// orthogonal: `uᵢ = Q D^{1/2} zᵢ` with orthogonal `zᵢ` scaled by `scales`.
pub fn orthogonal_whitened_instance<R: Rng + ?Sized>(
    d: &[f64],
    scales: &[f64],
    rng: &mut R,
) -> (SymPDMatrix, DenseMatrix) {
    let n = d.len();
    let q = random_orthogonal(n, rng);
    let z = random_orthogonal(n, rng);
    let a = spd_from_factors(&q, d);
    let cols: Vec<Vec<f64>> = scales
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let scaled: Vec<f64> = (0..n).map(|k| s * d[k].sqrt() * z.get(k, i)).collect();
            q.matvec(&scaled).expect("square")
        })
        .collect();
    (a, DenseMatrix::from_columns(&cols).expect("nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = random_orthogonal(12, &mut rng);
        let g = q.gram();
        assert!(g.sub(&DenseMatrix::identity(12)).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn seeds_differ() {
        let a = instance_seed(1, 100, 0);
        assert_ne!(a, instance_seed(1, 100, 1));
        assert_ne!(a, instance_seed(1, 200, 0));
        assert_ne!(a, instance_seed(2, 100, 0));
        assert_eq!(a, instance_seed(1, 100, 0));
    }

    #[test]
    fn spectrum_endpoints() {
        let d = geometric_spectrum(5, 1e4);
        assert_eq!(d[0], 1.0);
        assert!((d[4] - 1e4).abs() < 1e-9);
        assert!((d[2] - 100.0).abs() < 1e-11);
    }
}
