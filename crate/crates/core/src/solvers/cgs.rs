use std::time::Instant;

use super::{check_dims, relative_residual, LinearOperator, SolveConfig, SolveReport, SolveStatus, StallCounter, TINY};
use crate::error::Result;
use crate::linalg::{dot, norm2};

/// Conjugate Gradient Squared (Sonneveld), `x₀ = 0`, shadow residual `r̃ = b`.
///
/// When the tolerance is not reached, the iterate with the smallest true
/// residual among the last one and the best one seen is returned.
pub fn cgs<A: LinearOperator + ?Sized>(a: &A, b: &[f64], config: &SolveConfig) -> Result<SolveReport> {
    config.validate()?;
    check_dims(a, b, true)?;
    let start = Instant::now();
    let n = b.len();
    let bnorm = norm2(b);
    let report = |x: Vec<f64>, rel_residual: f64, iterations: usize, status: SolveStatus| SolveReport {
        x,
        rel_residual,
        iterations,
        wall_time: start.elapsed().as_secs_f64(),
        status,
    };
    if bnorm == 0.0 {
        return Ok(report(vec![0.0; n], 0.0, 0, SolveStatus::Converged));
    }

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut r_tilde = b.to_vec();
    let mut restart = true;
    let mut u = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut v_hat = vec![0.0; n];
    let mut u_hat = vec![0.0; n];
    let mut q_hat = vec![0.0; n];
    let mut rho_prev = 1.0;
    let mut best = (x.clone(), 1.0);
    let mut stall = StallCounter::default();

    // returns the better of the current and the best-seen iterate
    let give_up = |x: Vec<f64>, best: (Vec<f64>, f64), it: usize, status: SolveStatus| {
        let current = if x.iter().all(|v| v.is_finite()) { relative_residual(a, b, &x) } else { f64::INFINITY };
        let best_true = relative_residual(a, b, &best.0);
        if current <= best_true {
            report(x, current, it, status)
        } else {
            report(best.0, best_true, it, status)
        }
    };

    for it in 1..=config.max_iter {
        let rho = dot(&r_tilde, &r);
        if !(rho.abs() > TINY) || !rho.is_finite() {
            return Ok(give_up(x, best, it - 1, SolveStatus::Stagnated));
        }
        if restart {
            restart = false;
            u.copy_from_slice(&r);
            p.copy_from_slice(&r);
        } else {
            let beta = rho / rho_prev;
            for i in 0..n {
                u[i] = r[i] + beta * q[i];
                p[i] = u[i] + beta * (q[i] + beta * p[i]);
            }
        }
        a.apply(&p, &mut v_hat);
        let sigma = dot(&r_tilde, &v_hat);
        if !(sigma.abs() > TINY) || !sigma.is_finite() {
            return Ok(give_up(x, best, it - 1, SolveStatus::Stagnated));
        }
        let alpha = rho / sigma;
        for i in 0..n {
            q[i] = u[i] - alpha * v_hat[i];
            u_hat[i] = u[i] + q[i];
        }
        let mut step_sq = 0.0;
        for (xi, ui) in x.iter_mut().zip(&u_hat) {
            *xi += alpha * ui;
            step_sq += (alpha * ui) * (alpha * ui);
        }
        a.apply(&u_hat, &mut q_hat);
        r.iter_mut().zip(&q_hat).for_each(|(ri, qi)| *ri -= alpha * qi);
        rho_prev = rho;

        let rel = norm2(&r) / bnorm;
        if !rel.is_finite() {
            return Ok(give_up(x, best, it, SolveStatus::Stagnated));
        }
        if rel <= config.tol {
            let true_rel = relative_residual(a, b, &x);
            if true_rel <= config.tol {
                return Ok(report(x, true_rel, it, SolveStatus::Converged));
            }
            // recurrence drifted: restart from the true residual
            let mut ax = vec![0.0; n];
            a.apply(&x, &mut ax);
            r.iter_mut().zip(b.iter().zip(&ax)).for_each(|(ri, (bi, axi))| *ri = bi - axi);
            r_tilde.copy_from_slice(&r);
            restart = true;
        }
        if rel < best.1 {
            best = (x.clone(), rel);
        }
        if stall.record(step_sq.sqrt(), norm2(&x)) {
            return Ok(give_up(x, best, it, SolveStatus::Stagnated));
        }
    }
    Ok(give_up(x, best, config.max_iter, SolveStatus::MaxIter))
}
