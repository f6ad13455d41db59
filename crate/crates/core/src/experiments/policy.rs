//! The four γ choices compared by the benchmark.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, symmetric_eig};
use crate::lowrank::{
    checked_closed_form, closed_form_gamma, evaluate_gamma, project_box, whiten, whiten_cholesky, whiten_spectral,
    GammaPolicy, GammaResult, UpdateSpec, Whitening, WhiteningSource,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Policy {
    #[serde(rename = "zero")]
    Zero,
    #[serde(rename = "ones")]
    Ones,
    #[serde(rename = "invnorm2")]
    InvNorm2,
    #[serde(rename = "omegaProj")]
    OmegaProj,
}

impl Policy {
    pub const ALL: [Policy; 4] = [Policy::Zero, Policy::Ones, Policy::InvNorm2, Policy::OmegaProj];

    pub fn name(self) -> &'static str {
        self.gamma_policy().name()
    }

    pub fn gamma_policy(self) -> GammaPolicy {
        match self {
            Policy::Zero => GammaPolicy::Zero,
            Policy::Ones => GammaPolicy::Ones,
            Policy::InvNorm2 => GammaPolicy::InvNorm2,
            Policy::OmegaProj => GammaPolicy::OmegaProj,
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown policy '{s}'")))
    }
}

/// A policy's γ plus, for `omegaProj`, the time to compute it from scratch
/// along each whitening path (factorization included).
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGamma {
    pub result: GammaResult,
    pub gamma_time_spec: Option<f64>,
    pub gamma_time_chol: Option<f64>,
}

/// `min(1, 1/‖uᵢ‖²)` componentwise.
pub fn invnorm2_gamma(norms_sq_u: &[f64]) -> Vec<f64> {
    norms_sq_u.iter().map(|a| (1.0 / a).min(1.0)).collect()
}

/// Factor, whiten, closed form and projection, timed as one unit.
/// Returns the projected γ and the elapsed seconds.
pub fn timed_projection(spec: &UpdateSpec, source: WhiteningSource) -> Result<(Vec<f64>, f64)> {
    let start = Instant::now();
    let wh = match source {
        WhiteningSource::Spectral => whiten_spectral(spec, &symmetric_eig(spec.a())?)?,
        WhiteningSource::Cholesky => whiten_cholesky(spec, &cholesky(spec.a())?)?,
    };
    let gamma = project_box(&closed_form_gamma(spec.n(), spec.a().trace(), &wh.col_norms_sq_u, &wh.col_norms_sq_w));
    Ok((gamma, start.elapsed().as_secs_f64()))
}

/// Shares one Cholesky whitening between the policies of a problem.
pub struct PolicyContext<'a> {
    spec: &'a UpdateSpec,
    whitening: Whitening,
}

impl<'a> PolicyContext<'a> {
    pub fn new(spec: &'a UpdateSpec) -> Result<Self> {
        Ok(PolicyContext { spec, whitening: whiten(spec, WhiteningSource::Cholesky)? })
    }

    pub fn whitening(&self) -> &Whitening {
        &self.whitening
    }

    pub fn gamma(&self, policy: Policy) -> Result<PolicyGamma> {
        let spec = self.spec;
        let t = spec.t();
        let (gamma, clamped, times) = match policy {
            Policy::Zero => (vec![0.0; t], false, None),
            Policy::Ones => (vec![1.0; t], false, None),
            Policy::InvNorm2 => {
                let clamped = spec.col_norms_sq_u().iter().any(|&a| a < 1.0);
                (invnorm2_gamma(spec.col_norms_sq_u()), clamped, None)
            }
            Policy::OmegaProj => {
                let (_, t_spec) = timed_projection(spec, WhiteningSource::Spectral)?;
                let (_, t_chol) = timed_projection(spec, WhiteningSource::Cholesky)?;
                let unconstrained = checked_closed_form(spec, &self.whitening)?;
                let gamma = project_box(&unconstrained);
                let clamped = gamma != unconstrained;
                (gamma, clamped, Some((t_spec, t_chol)))
            }
        };
        let result = evaluate_gamma(spec, &self.whitening, gamma, policy.gamma_policy(), clamped)?;
        Ok(PolicyGamma { result, gamma_time_spec: times.map(|t| t.0), gamma_time_chol: times.map(|t| t.1) })
    }
}

pub fn policy_gamma(spec: &UpdateSpec, policy: Policy) -> Result<PolicyGamma> {
    PolicyContext::new(spec)?.gamma(policy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseMatrix, SymPDMatrix};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn invnorm2_examples() {
        assert_eq!(invnorm2_gamma(&[1.0, 4.0, 16.0]), vec![1.0, 0.25, 0.0625]);
        assert_eq!(invnorm2_gamma(&[0.25]), vec![1.0]);
    }

    #[test]
    fn names_round_trip() {
        for p in Policy::ALL {
            assert_eq!(p.name().parse::<Policy>().unwrap(), p);
            assert_eq!(serde_json::to_string(&p).unwrap(), format!("\"{}\"", p.name()));
        }
        assert!("best".parse::<Policy>().is_err());
    }

    #[test]
    fn example_under_omega_proj() {
        let a = SymPDMatrix::from_diag(&[1.0, 2.0, 2.0]);
        let u = DenseMatrix::from_rows(&[vec![FRAC_1_SQRT_2, 0.0], vec![-FRAC_1_SQRT_2, 0.0], vec![0.0, 1.0]]).unwrap();
        let spec = UpdateSpec::new(a, u).unwrap();
        let ctx = PolicyContext::new(&spec).unwrap();
        let p = ctx.gamma(Policy::OmegaProj).unwrap();
        assert!((p.result.gamma[0] - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(p.result.gamma[1], 0.0);
        assert!(p.result.clamped);
        assert!(p.gamma_time_spec.unwrap() >= 0.0 && p.gamma_time_chol.unwrap() >= 0.0);

        let ones = ctx.gamma(Policy::Ones).unwrap();
        assert_eq!(ones.result.gamma, vec![1.0, 1.0]);
        assert!(ones.gamma_time_spec.is_none());
        assert_eq!(ctx.gamma(Policy::Zero).unwrap().result.gamma, vec![0.0, 0.0]);
        let inv = ctx.gamma(Policy::InvNorm2).unwrap().result.gamma;
        assert!(inv.iter().all(|g| (g - 1.0).abs() < 1e-15));
    }

    #[test]
    fn invnorm2_clamps_short_columns() {
        let u = DenseMatrix::from_rows(&[vec![0.5, 3.0], vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let spec = UpdateSpec::new(SymPDMatrix::identity(3), u).unwrap();
        let r = policy_gamma(&spec, Policy::InvNorm2).unwrap().result;
        assert_eq!(r.gamma, vec![1.0, 1.0 / 9.0]);
        assert!(r.clamped);
    }
}
