use std::time::Instant;

use super::{check_dims, relative_residual, LinearOperator, SolveConfig, SolveReport, SolveStatus, StallCounter, TINY};
use crate::error::Result;
use crate::linalg::norm2;

fn scale(v: &mut [f64], c: f64) {
    v.iter_mut().for_each(|x| *x *= c);
}

/// LSQR (Paige–Saunders) on Golub–Kahan bidiagonalization, `x₀ = 0`.
pub fn lsqr<A: LinearOperator + ?Sized>(a: &A, b: &[f64], config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    check_dims(a, b, false)?;
    let start = Instant::now();
    let (m, n) = (a.nrows(), a.ncols());
    let mut x = vec![0.0; n];
    let bnorm = norm2(b);
    let finish = |x: Vec<f64>, iterations: usize, status: SolveStatus| {
        let rel_residual = relative_residual(a, b, &x);
        let status = match status {
            SolveStatus::Converged if rel_residual > config.tol => SolveStatus::Stagnated,
            s => s,
        };
        SolveReport { x, rel_residual, iterations, wall_time: start.elapsed().as_secs_f64(), status }
    };
    if bnorm == 0.0 {
        return Ok(finish(x, 0, SolveStatus::Converged));
    }

    let mut u = b.to_vec();
    let mut beta = bnorm;
    scale(&mut u, 1.0 / beta);
    let mut v = vec![0.0; n];
    a.apply_transpose(&u, &mut v);
    let mut alpha = norm2(&v);
    if alpha == 0.0 {
        // b ⟂ range(A): x = 0 is already the least-squares solution
        return Ok(finish(x, 0, SolveStatus::Stagnated));
    }
    scale(&mut v, 1.0 / alpha);
    let mut w = v.clone();
    let mut phibar = beta;
    let mut rhobar = alpha;

    let mut av = vec![0.0; m];
    let mut atu = vec![0.0; n];
    let mut stall = StallCounter::default();

    for it in 1..=config.max_iter {
        a.apply(&v, &mut av);
        u.iter_mut().zip(&av).for_each(|(ui, avi)| *ui = avi - alpha * *ui);
        beta = norm2(&u);
        if beta > 0.0 {
            scale(&mut u, 1.0 / beta);
            a.apply_transpose(&u, &mut atu);
            v.iter_mut().zip(&atu).for_each(|(vi, ai)| *vi = ai - beta * *vi);
            alpha = norm2(&v);
            if alpha > 0.0 {
                scale(&mut v, 1.0 / alpha);
            }
        } else {
            alpha = 0.0;
        }

        let rho = rhobar.hypot(beta);
        if !(rho > TINY) {
            return Ok(finish(x, it, SolveStatus::Stagnated));
        }
        let c = rhobar / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rhobar = -c * alpha;
        let phi = c * phibar;
        phibar *= s;

        let step = phi / rho;
        let mut step_sq = 0.0;
        for (xi, wi) in x.iter_mut().zip(&w) {
            *xi += step * wi;
            step_sq += (step * wi) * (step * wi);
        }
        let ratio = theta / rho;
        w.iter_mut().zip(&v).for_each(|(wi, vi)| *wi = vi - ratio * *wi);

        if !x.iter().all(|v| v.is_finite()) {
            return Ok(finish(vec![0.0; n], it, SolveStatus::Stagnated));
        }
        if phibar / bnorm <= config.tol && relative_residual(a, b, &x) <= config.tol {
            return Ok(finish(x, it, SolveStatus::Converged));
        }
        if beta == 0.0 || alpha == 0.0 {
            // Krylov space exhausted; the iterate cannot change any more
            return Ok(finish(x, it, SolveStatus::Stagnated));
        }
        if stall.record(step_sq.sqrt(), norm2(&x)) {
            return Ok(finish(x, it, SolveStatus::Stagnated));
        }
    }
    Ok(finish(x, config.max_iter, SolveStatus::MaxIter))
}
