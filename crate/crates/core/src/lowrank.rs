//! ω-optimal low-rank updates `A(γ) = A + U Diag(γ) Uᵀ`.
//!
//! Everything here is driven by two vectors of squared column norms: those
//! of `U` and those of the whitened columns `wᵢ = A^{-1/2}`-action on `uᵢ`
//! (either `D^{-1/2} Qᵀ uᵢ` from `A = Q D Qᵀ` or `L⁻¹ uᵢ` from `A = L Lᵀ`;
//! both have the same norm `uᵢᵀ A⁻¹ uᵢ`).
//!
//! Reported ω values always come from [`omega_of_update`], which forms
//! `A(γ)` explicitly and factors it. The product form
//! `det A(γ) = det A · ∏(1 + γᵢ‖wᵢ‖²)` used by [`omega_gradient`] is only
//! exact when the whitened columns are mutually orthogonal.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cond::{omega_from_cholesky, rooted_product};
use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, lu_pivoted, solve_lower_triangular, symmetric_eig, CholeskyDecomp, DenseMatrix, SpectralDecomp,
    SymPDMatrix,
};

/// Whitened columns with `‖wᵢ‖² < DEGENERATE_TOL·‖uᵢ‖²` are rejected.
pub const DEGENERATE_TOL: f64 = 1e-14;

/// Relative agreement required between the closed form and a direct solve
/// of the `t x t` stationarity system.
pub const CROSS_CHECK_TOL: f64 = 1e-8;

/// A positive definite `A` (order `n`) together with `U` (`n x t`, `1 ≤ t < n`)
/// whose columns are all nonzero.
#[derive(Debug, Clone)]
pub struct UpdateSpec {
    a: SymPDMatrix,
    u: DenseMatrix,
    norms_sq_u: Vec<f64>,
}

impl UpdateSpec {
    pub fn new(a: SymPDMatrix, u: DenseMatrix) -> Result<Self> {
        let n = a.order();
        if u.rows() != n {
            return Err(Error::DimensionMismatch(format!("U has {} rows but A has order {n}", u.rows())));
        }
        let t = u.cols();
        if t >= n {
            return Err(Error::InvalidInput(format!("update rank t = {t} must be smaller than n = {n}")));
        }
        let norms_sq_u = u.column_norms_sq();
        if let Some(index) = norms_sq_u.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::DegenerateColumn { index });
        }
        Ok(UpdateSpec { a, u, norms_sq_u })
    }

    pub fn a(&self) -> &SymPDMatrix {
        &self.a
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn n(&self) -> usize {
        self.a.order()
    }

    pub fn t(&self) -> usize {
        self.u.cols()
    }

    pub fn col_norms_sq_u(&self) -> &[f64] {
        &self.norms_sq_u
    }

    fn check_gamma(&self, gamma: &[f64]) -> Result<()> {
        if gamma.len() != self.t() {
            return Err(Error::DimensionMismatch(format!(
                "gamma has length {} but U has {} columns",
                gamma.len(),
                self.t()
            )));
        }
        Ok(())
    }

    /// `A + Σ γᵢ uᵢ uᵢᵀ`, formed densely and exactly symmetric.
    pub fn updated_matrix(&self, gamma: &[f64]) -> Result<SymPDMatrix> {
        self.check_gamma(gamma)?;
        let n = self.n();
        let mut m = self.a.as_matrix().clone();
        let cols: Vec<Vec<f64>> = (0..self.t()).map(|j| self.u.column(j)).collect();
        for i in 0..n {
            for j in i..n {
                let delta: f64 = gamma.iter().zip(&cols).map(|(g, c)| g * c[i] * c[j]).sum();
                let v = m.get(i, j) + delta;
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        Ok(SymPDMatrix::from_symmetrized(m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WhiteningSource {
    Spectral,
    Cholesky,
}

impl fmt::Display for WhiteningSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WhiteningSource::Spectral => "spectral",
            WhiteningSource::Cholesky => "cholesky",
        })
    }
}

impl FromStr for WhiteningSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(WhiteningSource::Spectral),
            "cholesky" => Ok(WhiteningSource::Cholesky),
            other => Err(Error::InvalidInput(format!("unknown whitening '{other}'"))),
        }
    }
}

/// Whitened update columns and the norms the closed forms need.
#[derive(Debug, Clone)]
pub struct Whitening {
    pub w: DenseMatrix,
    pub source: WhiteningSource,
    pub col_norms_sq_u: Vec<f64>,
    pub col_norms_sq_w: Vec<f64>,
    /// `det(A)^{1/n}`, evaluated root-first from the same factorization.
    pub det_root: f64,
}

impl Whitening {
    pub fn t(&self) -> usize {
        self.col_norms_sq_w.len()
    }

    fn finish(spec: &UpdateSpec, w: DenseMatrix, source: WhiteningSource, det_root: f64) -> Result<Self> {
        let col_norms_sq_w = w.column_norms_sq();
        let col_norms_sq_u = spec.col_norms_sq_u().to_vec();
        for (index, (&nw, &nu)) in col_norms_sq_w.iter().zip(&col_norms_sq_u).enumerate() {
            if !(nw >= DEGENERATE_TOL * nu) || !nw.is_finite() {
                return Err(Error::DegenerateColumn { index });
            }
        }
        Ok(Whitening { w, source, col_norms_sq_u, col_norms_sq_w, det_root })
    }

    fn check(&self, spec: &UpdateSpec) -> Result<()> {
        if self.t() != spec.t() {
            return Err(Error::DimensionMismatch(format!(
                "whitening has {} columns but U has {}",
                self.t(),
                spec.t()
            )));
        }
        Ok(())
    }
}

/// `wᵢ = D^{-1/2} Qᵀ uᵢ` from a precomputed eigendecomposition of `A`.
pub fn whiten_spectral(spec: &UpdateSpec, eig: &SpectralDecomp) -> Result<Whitening> {
    let n = spec.n();
    if let Some(index) = eig.d.iter().position(|&d| !(d > 0.0)) {
        return Err(Error::NotPositiveDefinite { index, value: eig.d[index] });
    }
    let inv_sqrt: Vec<f64> = eig.d.iter().map(|d| 1.0 / d.sqrt()).collect();
    let mut cols = Vec::with_capacity(spec.t());
    for j in 0..spec.t() {
        let mut w = eig.q.tr_matvec(&spec.u().column(j))?;
        w.iter_mut().zip(&inv_sqrt).for_each(|(wi, s)| *wi *= s);
        cols.push(w);
    }
    let det_root = rooted_product(eig.d.iter().copied(), 1.0 / n as f64);
    Whitening::finish(spec, DenseMatrix::from_columns(&cols)?, WhiteningSource::Spectral, det_root)
}

/// `wᵢ = L⁻¹ uᵢ` from a precomputed Cholesky factor of `A`.
pub fn whiten_cholesky(spec: &UpdateSpec, chol: &CholeskyDecomp) -> Result<Whitening> {
    let n = spec.n();
    let mut cols = Vec::with_capacity(spec.t());
    for j in 0..spec.t() {
        cols.push(solve_lower_triangular(&chol.l, &spec.u().column(j))?);
    }
    let det_root = rooted_product(chol.diag(), 2.0 / n as f64);
    Whitening::finish(spec, DenseMatrix::from_columns(&cols)?, WhiteningSource::Cholesky, det_root)
}

/// Factors `A` and whitens the update columns.
pub fn whiten(spec: &UpdateSpec, source: WhiteningSource) -> Result<Whitening> {
    match source {
        WhiteningSource::Spectral => whiten_spectral(spec, &symmetric_eig(spec.a())?),
        WhiteningSource::Cholesky => whiten_cholesky(spec, &cholesky(spec.a())?),
    }
}

/// The open box `Ω = {γ : 1 + γᵢ‖wᵢ‖² > 0 ∀i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleBox {
    lower: Vec<f64>,
}

impl FeasibleBox {
    pub fn from_whitening(wh: &Whitening) -> Self {
        FeasibleBox { lower: wh.col_norms_sq_w.iter().map(|c| -1.0 / c).collect() }
    }

    /// Open lower bounds `-1/‖wᵢ‖²`; the upper bounds are `+∞`.
    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn first_violation(&self, gamma: &[f64]) -> Option<usize> {
        gamma.iter().zip(&self.lower).position(|(g, l)| !(g > l))
    }

    pub fn contains(&self, gamma: &[f64]) -> bool {
        gamma.len() == self.lower.len() && self.first_violation(gamma).is_none()
    }
}

/// Which rule produced a γ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GammaPolicy {
    /// Unconstrained minimizer of ω (rank one or rank t).
    #[serde(rename = "optimal")]
    Optimal,
    /// Unconstrained minimizer projected onto `[0,1]^t`.
    #[serde(rename = "omegaProj")]
    OmegaProj,
    /// Exact minimizer on `[0,1]` for a rank-one update.
    #[serde(rename = "rankOneBox")]
    RankOneBox,
    #[serde(rename = "zero")]
    Zero,
    #[serde(rename = "ones")]
    Ones,
    /// `γᵢ = min(1, 1/‖uᵢ‖²)`.
    #[serde(rename = "invnorm2")]
    InvNorm2,
}

impl GammaPolicy {
    pub fn name(self) -> &'static str {
        match self {
            GammaPolicy::Optimal => "optimal",
            GammaPolicy::OmegaProj => "omegaProj",
            GammaPolicy::RankOneBox => "rankOneBox",
            GammaPolicy::Zero => "zero",
            GammaPolicy::Ones => "ones",
            GammaPolicy::InvNorm2 => "invnorm2",
        }
    }
}

impl fmt::Display for GammaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A preconditioner vector with its provenance and exact ω(A(γ)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GammaResult {
    pub policy: GammaPolicy,
    pub gamma: Vec<f64>,
    pub clamped: bool,
    pub kkt_residual: f64,
    pub omega: f64,
    pub whitening: Option<WhiteningSource>,
}

/// Rank-one minimizer `(tr(A)‖w‖² − n‖u‖²) / ((n−1)‖u‖²‖w‖²)`.
pub fn rank_one_gamma(n: usize, trace: f64, norm_sq_u: f64, norm_sq_w: f64) -> f64 {
    let n = n as f64;
    (trace * norm_sq_w - n * norm_sq_u) / ((n - 1.0) * norm_sq_u * norm_sq_w)
}

/// Closed-form rank-t minimizer, component-wise
///
/// ```text
/// γᵢ = (tr(A)‖wᵢ‖² − (n−t+1)‖uᵢ‖²) / ((n−t)‖uᵢ‖²‖wᵢ‖²)
///      − 1/((n−t)‖uᵢ‖²) · Σ_{j≠i} ‖uⱼ‖²/‖wⱼ‖²
/// ```
///
/// Valid for any `1 ≤ t < n`; with `t = 1` it reduces to [`rank_one_gamma`].
pub fn closed_form_gamma(n: usize, trace: f64, norms_sq_u: &[f64], norms_sq_w: &[f64]) -> Vec<f64> {
    let t = norms_sq_u.len();
    let nt = (n - t) as f64;
    let ratios: Vec<f64> = norms_sq_u.iter().zip(norms_sq_w).map(|(a, c)| a / c).collect();
    let total: f64 = ratios.iter().sum();
    norms_sq_u
        .iter()
        .zip(norms_sq_w)
        .zip(&ratios)
        .map(|((&a, &c), &r)| {
            (trace * c - (nt + 1.0) * a) / (nt * a * c) - (total - r) / (nt * a)
        })
        .collect()
}

/// Solves the `t x t` stationarity system `K γ = b` with
/// `K = n Diag(‖uᵢ‖²) − e ‖u‖²ᵀ` and `b = tr(A) e − n ‖uᵢ‖²/‖wᵢ‖²` by
/// pivoted LU, independently of the Sherman–Morrison closed form.
pub fn solve_stationarity_system(n: usize, trace: f64, norms_sq_u: &[f64], norms_sq_w: &[f64]) -> Result<Vec<f64>> {
    let t = norms_sq_u.len();
    let nf = n as f64;
    let k = DenseMatrix::from_fn(t, t, |i, j| {
        let diag = if i == j { nf * norms_sq_u[i] } else { 0.0 };
        diag - norms_sq_u[j]
    });
    let b: Vec<f64> = norms_sq_u.iter().zip(norms_sq_w).map(|(a, c)| trace - nf * a / c).collect();
    lu_pivoted(&k)?.solve(&b)
}

/// Exact ω of `A(γ)`, by forming the matrix and factoring it.
pub fn omega_of_update(spec: &UpdateSpec, gamma: &[f64]) -> Result<f64> {
    let m = spec.updated_matrix(gamma)?;
    let chol = cholesky(&m)?;
    Ok(omega_from_cholesky(&m, &chol))
}

/// Stationarity brackets and gradient of ω(γ).
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaGradient {
    /// `n‖uⱼ‖²(1+γⱼ‖wⱼ‖²) − (tr(A) + γᵀ‖u‖²)‖wⱼ‖²`; same sign and zeros as the gradient.
    pub bracket: Vec<f64>,
    /// `Cⱼ(γ) · bracketⱼ` with `Cⱼ = 1/(n² g(γ) (1+γⱼ‖wⱼ‖²)) > 0`.
    pub gradient: Vec<f64>,
}

impl OmegaGradient {
    pub fn max_abs(&self) -> f64 {
        self.gradient.iter().fold(0.0_f64, |m, g| m.max(g.abs()))
    }
}

/// Gradient of ω(γ) under the product-form determinant
/// `g(γ) = det(A)^{1/n} ∏(1+γᵢ‖wᵢ‖²)^{1/n}`.
pub fn omega_gradient(spec: &UpdateSpec, wh: &Whitening, gamma: &[f64]) -> Result<OmegaGradient> {
    spec.check_gamma(gamma)?;
    wh.check(spec)?;
    if let Some(index) = FeasibleBox::from_whitening(wh).first_violation(gamma) {
        return Err(Error::OutsideDomain { index });
    }
    let n = spec.n() as f64;
    let nu = &wh.col_norms_sq_u;
    let nw = &wh.col_norms_sq_w;
    let factors: Vec<f64> = gamma.iter().zip(nw).map(|(g, c)| 1.0 + g * c).collect();
    let trace_updated = spec.a().trace() + gamma.iter().zip(nu).map(|(g, a)| g * a).sum::<f64>();
    let g_root = wh.det_root * rooted_product(factors.iter().copied(), 1.0 / n);

    let bracket: Vec<f64> = (0..gamma.len()).map(|j| n * nu[j] * factors[j] - trace_updated * nw[j]).collect();
    let gradient = bracket.iter().zip(&factors).map(|(b, f)| b / (n * n * g_root * f)).collect();
    Ok(OmegaGradient { bracket, gradient })
}

/// Gradient of the exact ω(A(γ)) without the product-form determinant:
/// `∂ω/∂γⱼ = ω(γ) (‖uⱼ‖²/tr A(γ) − uⱼᵀ A(γ)⁻¹ uⱼ / n)`.
pub fn omega_gradient_exact(spec: &UpdateSpec, gamma: &[f64]) -> Result<Vec<f64>> {
    let m = spec.updated_matrix(gamma)?;
    let chol = cholesky(&m)?;
    let omega = omega_from_cholesky(&m, &chol);
    let n = spec.n() as f64;
    let tr = m.trace();
    (0..spec.t())
        .map(|j| {
            let u = spec.u().column(j);
            let z = solve_lower_triangular(&chol.l, &u)?;
            let quad: f64 = z.iter().map(|v| v * v).sum();
            Ok(omega * (spec.col_norms_sq_u()[j] / tr - quad / n))
        })
        .collect()
}

/// Componentwise clamp onto `[0,1]`.
pub fn project_box(gamma: &[f64]) -> Vec<f64> {
    gamma.iter().map(|g| g.clamp(0.0, 1.0)).collect()
}

fn feasibility_checked_omega(spec: &UpdateSpec, wh: &Whitening, gamma: &[f64]) -> Result<f64> {
    let in_omega = FeasibleBox::from_whitening(wh).contains(gamma);
    match omega_of_update(spec, gamma) {
        Ok(w) => Ok(w),
        Err(Error::NotPositiveDefinite { index, value }) => Err(Error::FeasibilityViolation(format!(
            "A(gamma) fails Cholesky at pivot {index} ({value:e}); gamma {} the product-form region",
            if in_omega { "lies in" } else { "lies outside" }
        ))),
        Err(e) => Err(e),
    }
}

/// Unconstrained ω-optimal γ for a rank-one update.
pub fn gamma_rank_one(spec: &UpdateSpec, wh: &Whitening) -> Result<GammaResult> {
    if spec.t() != 1 {
        return Err(Error::InvalidInput(format!("rank-one formula needs t = 1, got t = {}", spec.t())));
    }
    wh.check(spec)?;
    let gamma = vec![rank_one_gamma(spec.n(), spec.a().trace(), wh.col_norms_sq_u[0], wh.col_norms_sq_w[0])];
    if !FeasibleBox::from_whitening(wh).contains(&gamma) {
        return Err(Error::FeasibilityViolation(format!(
            "gamma* = {} is not above -1/|w|^2 = {}",
            gamma[0],
            -1.0 / wh.col_norms_sq_w[0]
        )));
    }
    let omega = feasibility_checked_omega(spec, wh, &gamma)?;
    let kkt_residual = omega_gradient(spec, wh, &gamma)?.max_abs();
    Ok(GammaResult { policy: GammaPolicy::Optimal, gamma, clamped: false, kkt_residual, omega, whitening: Some(wh.source) })
}

/// [`closed_form_gamma`] for `spec`, verified against [`solve_stationarity_system`].
pub fn checked_closed_form(spec: &UpdateSpec, wh: &Whitening) -> Result<Vec<f64>> {
    wh.check(spec)?;
    let (n, trace) = (spec.n(), spec.a().trace());
    let gamma = closed_form_gamma(n, trace, &wh.col_norms_sq_u, &wh.col_norms_sq_w);
    let direct = solve_stationarity_system(n, trace, &wh.col_norms_sq_u, &wh.col_norms_sq_w)?;
    let scale = direct.iter().fold(1.0_f64, |m, g| m.max(g.abs()));
    let mismatch = gamma.iter().zip(&direct).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    if !(mismatch <= CROSS_CHECK_TOL * scale) {
        return Err(Error::InternalConsistency(format!(
            "closed-form gamma differs from the direct solve by {mismatch:e}"
        )));
    }
    Ok(gamma)
}

/// Unconstrained ω-optimal γ for a rank-t update (`2 ≤ t < n`).
///
/// The closed form is cross-checked against a direct solve of the
/// stationarity system, and `A(γ*)` must admit a Cholesky factorization.
/// `kkt_residual` is the largest product-form gradient component at γ*.
pub fn gamma_rank_t(spec: &UpdateSpec, wh: &Whitening) -> Result<GammaResult> {
    if spec.t() < 2 {
        return Err(Error::InvalidInput("rank-t formula needs t >= 2; use gamma_rank_one".into()));
    }
    let gamma = checked_closed_form(spec, wh)?;
    let omega = feasibility_checked_omega(spec, wh, &gamma)?;
    let kkt_residual = match omega_gradient(spec, wh, &gamma) {
        Ok(g) => g.max_abs(),
        // PD but outside the product-form region: the gradient formula does not apply
        Err(Error::OutsideDomain { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    Ok(GammaResult { policy: GammaPolicy::Optimal, gamma, clamped: false, kkt_residual, omega, whitening: Some(wh.source) })
}

/// Exact minimizer of ω on `[0,1]` for a rank-one update: the clamp of γ*.
pub fn gamma_rank_one_box(spec: &UpdateSpec, wh: &Whitening) -> Result<GammaResult> {
    let unconstrained = gamma_rank_one(spec, wh)?;
    let gamma = project_box(&unconstrained.gamma);
    let clamped = gamma != unconstrained.gamma;
    evaluate_gamma(spec, wh, gamma, GammaPolicy::RankOneBox, clamped)
}

/// Box-constrained preconditioner: exact for `t = 1`, projection of the
/// unconstrained optimum otherwise. The unconstrained γ* need not lie in
/// Ω; its projection always does.
pub fn gamma_projected(spec: &UpdateSpec, wh: &Whitening) -> Result<GammaResult> {
    if spec.t() == 1 {
        return gamma_rank_one_box(spec, wh);
    }
    let unconstrained = checked_closed_form(spec, wh)?;
    let gamma = project_box(&unconstrained);
    let clamped = gamma != unconstrained;
    evaluate_gamma(spec, wh, gamma, GammaPolicy::OmegaProj, clamped)
}

/// Wraps a box-feasible γ in a [`GammaResult`] with exact ω and the box KKT residual.
pub fn evaluate_gamma(
    spec: &UpdateSpec,
    wh: &Whitening,
    gamma: Vec<f64>,
    policy: GammaPolicy,
    clamped: bool,
) -> Result<GammaResult> {
    let omega = omega_of_update(spec, &gamma)?;
    let kkt_residual = kkt_check_box(spec, wh, &gamma)?;
    Ok(GammaResult { policy, gamma, clamped, kkt_residual, omega, whitening: Some(wh.source) })
}

/// KKT residual of γ for `min ω(γ)` over `[0,1]^t`.
///
/// Per coordinate: `|∂ⱼω|` in the interior, `max(0, −∂ⱼω)` at the lower
/// bound and `max(0, ∂ⱼω)` at the upper bound. Zero certifies a KKT point,
/// which is a global minimizer because ω is pseudoconvex.
pub fn kkt_check_box(spec: &UpdateSpec, wh: &Whitening, gamma: &[f64]) -> Result<f64> {
    spec.check_gamma(gamma)?;
    if let Some(index) = gamma.iter().position(|g| !(0.0..=1.0).contains(g)) {
        return Err(Error::OutsideDomain { index });
    }
    let grad = omega_gradient(spec, wh, gamma)?;
    Ok(gamma.iter().zip(&grad.gradient).fold(0.0_f64, |worst, (&g, &d)| {
        let r = if g == 0.0 {
            (-d).max(0.0)
        } else if g == 1.0 {
            d.max(0.0)
        } else {
            d.abs()
        };
        worst.max(r)
    }))
}
