//! Damped nonlinear least squares (Levenberg–Marquardt with Marquardt
//! diagonal scaling and Nielsen's damping update).
//!
//! Residuals are expected already weighted, `r_i = (y_i − f_i(p))/σ_i`.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LsqError {
    #[error("invalid least-squares problem: {0}")]
    InvalidInput(String),
    #[error("no convergence after {iterations} iterations (cost {cost:.6e}); last parameters {params:?}")]
    NotConverged { iterations: usize, params: Vec<f64>, cost: f64 },
    #[error("residuals are not finite at the starting point")]
    NonFiniteStart,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsqOptions {
    pub max_iterations: usize,
    /// Scaled gradient: `max_j |J_jᵀ r| / (‖J_j‖ ‖r‖)`.
    pub gtol: f64,
    /// Relative step size.
    pub xtol: f64,
    /// Relative cost reduction.
    pub ftol: f64,
}

impl Default for LsqOptions {
    fn default() -> Self {
        LsqOptions { max_iterations: 200, gtol: 1e-10, xtol: 1e-14, ftol: 1e-15 }
    }
}

type ResidualFn<'a> = dyn Fn(&[f64], &mut [f64]) + 'a;
type JacobianFn<'a> = dyn Fn(&[f64], &mut DMatrix<f64>) + 'a;

pub struct Problem<'a> {
    pub n_residuals: usize,
    pub residuals: &'a ResidualFn<'a>,
    /// `∂r_i/∂p_j`; forward differences are used when absent.
    pub jacobian: Option<&'a JacobianFn<'a>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub params: Vec<f64>,
    /// `Σ r_i²` at the solution.
    pub chi2: f64,
    pub dof: usize,
    pub iterations: usize,
    /// `(JᵀJ)⁻¹`, or its pseudo-inverse when singular.
    pub jtj_inverse: DMatrix<f64>,
    pub singular: bool,
}

impl LsqSolution {
    pub fn reduced_chi2(&self) -> f64 {
        if self.dof == 0 {
            f64::NAN
        } else {
            self.chi2 / self.dof as f64
        }
    }

    /// Parameter covariance. With `absolute_sigma` the residual weights are
    /// taken as true standard deviations; otherwise the result is rescaled
    /// by the reduced χ².
    pub fn covariance(&self, absolute_sigma: bool) -> DMatrix<f64> {
        if absolute_sigma || self.dof == 0 {
            self.jtj_inverse.clone()
        } else {
            &self.jtj_inverse * self.reduced_chi2()
        }
    }

    pub fn stderr(&self, absolute_sigma: bool) -> Vec<f64> {
        let c = self.covariance(absolute_sigma);
        (0..c.nrows()).map(|i| c[(i, i)].max(0.0).sqrt()).collect()
    }
}

fn forward_difference(problem: &Problem, p: &[f64], r: &[f64], jac: &mut DMatrix<f64>) {
    let mut shifted = p.to_vec();
    let mut r_step = vec![0.0; problem.n_residuals];
    for j in 0..p.len() {
        let h = f64::EPSILON.sqrt() * p[j].abs().max(1.0);
        shifted[j] = p[j] + h;
        let step = shifted[j] - p[j];
        (problem.residuals)(&shifted, &mut r_step);
        for i in 0..r.len() {
            jac[(i, j)] = (r_step[i] - r[i]) / step;
        }
        shifted[j] = p[j];
    }
}

fn evaluate_jacobian(problem: &Problem, p: &[f64], r: &[f64], jac: &mut DMatrix<f64>) {
    match problem.jacobian {
        Some(f) => f(p, jac),
        None => forward_difference(problem, p, r, jac),
    }
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn invert_normal_matrix(jtj: &DMatrix<f64>) -> (DMatrix<f64>, bool) {
    if let Some(chol) = jtj.clone().cholesky() {
        let inv = chol.inverse();
        if inv.iter().all(|v| v.is_finite()) {
            return (inv, false);
        }
    }
    let scale = jtj.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let pinv = jtj.clone().pseudo_inverse(scale * 1e-14).unwrap_or_else(|_| DMatrix::zeros(jtj.nrows(), jtj.ncols()));
    (pinv, true)
}

pub fn levenberg_marquardt(problem: &Problem, p0: &[f64], opts: &LsqOptions) -> Result<LsqSolution, LsqError> {
    let n = p0.len();
    let m = problem.n_residuals;
    if n == 0 {
        return Err(LsqError::InvalidInput("no parameters".into()));
    }
    if m < n {
        return Err(LsqError::InvalidInput(format!("{m} residuals cannot determine {n} parameters")));
    }
    if p0.iter().any(|v| !v.is_finite()) {
        return Err(LsqError::InvalidInput("non-finite starting parameters".into()));
    }

    let mut p = p0.to_vec();
    let mut r = vec![0.0; m];
    (problem.residuals)(&p, &mut r);
    if r.iter().any(|v| !v.is_finite()) {
        return Err(LsqError::NonFiniteStart);
    }
    let mut cost = sum_sq(&r);
    let mut jac = DMatrix::zeros(m, n);
    let mut r_trial = vec![0.0; m];
    let mut mu = -1.0;
    let mut nu = 2.0;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        evaluate_jacobian(problem, &p, &r, &mut jac);
        let rv = DVector::from_column_slice(&r);
        let g = jac.tr_mul(&rv);
        let jtj = jac.tr_mul(&jac);

        let r_norm = cost.sqrt();
        if r_norm == 0.0 {
            converged = true;
            break;
        }
        let scaled_gradient = (0..n)
            .map(|j| {
                let col = jac.column(j).norm();
                if col == 0.0 {
                    0.0
                } else {
                    g[j].abs() / (col * r_norm)
                }
            })
            .fold(0.0f64, f64::max);
        if scaled_gradient < opts.gtol {
            converged = true;
            break;
        }

        let diag: Vec<f64> = (0..n).map(|j| jtj[(j, j)].max(f64::MIN_POSITIVE.sqrt())).collect();
        if mu < 0.0 {
            mu = 1e-3;
        }

        let mut accepted = false;
        while !accepted {
            let mut damped = jtj.clone();
            for j in 0..n {
                damped[(j, j)] += mu * diag[j];
            }
            let step = match damped.cholesky() {
                Some(chol) => chol.solve(&(-&g)),
                None => {
                    mu *= nu;
                    nu *= 2.0;
                    if !mu.is_finite() {
                        break;
                    }
                    continue;
                }
            };
            let p_norm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            if step.norm() <= opts.xtol * (p_norm + opts.xtol) {
                converged = true;
                break;
            }
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            (problem.residuals)(&trial, &mut r_trial);
            let trial_cost = if r_trial.iter().all(|v| v.is_finite()) { sum_sq(&r_trial) } else { f64::INFINITY };
            // predicted reduction of Σr² for the linearised model
            let predicted: f64 = (0..n).map(|j| step[j] * (mu * diag[j] * step[j] - g[j])).sum();
            let rho = (cost - trial_cost) / predicted;
            if rho > 0.0 && trial_cost.is_finite() {
                let relative_drop = (cost - trial_cost) / cost;
                p = trial;
                std::mem::swap(&mut r, &mut r_trial);
                cost = trial_cost;
                mu *= (1.0f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
                nu = 2.0;
                accepted = true;
                if relative_drop.abs() <= opts.ftol && predicted / cost.max(f64::MIN_POSITIVE) <= opts.ftol {
                    converged = true;
                }
            } else {
                mu *= nu;
                nu *= 2.0;
                if !mu.is_finite() || mu > 1e300 {
                    break;
                }
            }
        }
        if converged {
            break;
        }
        if !accepted {
            // Damping exhausted: no downhill step exists at working precision.
            converged = true;
            break;
        }
    }

    if !converged {
        return Err(LsqError::NotConverged { iterations, params: p, cost });
    }
    evaluate_jacobian(problem, &p, &r, &mut jac);
    let (jtj_inverse, singular) = invert_normal_matrix(&jac.tr_mul(&jac));
    Ok(LsqSolution { params: p, chi2: cost, dof: m - n, iterations, jtj_inverse, singular })
}
