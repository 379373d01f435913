//! Numerical maximum-entropy fit of the symmetric star-graph constraints.
//!
//! The constrained features are `f = (l0, sum(li), l0 * sum(li))` with
//! targets `F = (p, N p, N q)`; pooling by exchangeability leaves three
//! multipliers. The solution has the form `P(x) = exp(lambda . f(x)) / Z(lambda)`,
//! i.e. the `+` sign convention of the joint law. Under the `exp(-lambda . f)`
//! convention the multipliers are simply negated (see
//! [`MaxEntFit::negated_lagrange`]); moments are unaffected.
//!
//! `Z`, its gradient `E[f]` and Hessian `Cov[f]` are obtained by visiting all
//! `2^(N+1)` joint states, and the stationarity condition `E_lambda[f] = F`
//! is solved by damped Newton iteration.

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::model::{q_to_rho, CalibratedParams, ModelConfig};
use crate::numeric::{log_sum_exp, NeumaierSum};

pub const MAX_FIT_N: usize = 10;

const MAX_HALVINGS: usize = 30;
const INIT_PERTURBATION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitOptions {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iters: 200,
        }
    }
}

/// Enumerated feature table for one `(p, q, N)` moment problem.
#[derive(Debug, Clone)]
pub struct MaxEntProblem {
    n: usize,
    p: f64,
    q: f64,
    targets: Vector3<f64>,
    features: Vec<Vector3<f64>>,
}

impl MaxEntProblem {
    pub fn new(p: f64, q: f64, n: usize) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(ModelError::InvalidProbability(p));
        }
        if !(q > 0.0 && q < p && 1.0 - 2.0 * p + q > 0.0) {
            return Err(ModelError::SecondMomentOutOfRange { q, p });
        }
        if n < 1 {
            return Err(ModelError::InvalidCount(n));
        }
        if n > MAX_FIT_N {
            return Err(ModelError::EnumerationTooLarge { n, max: MAX_FIT_N });
        }
        let mut features = Vec::with_capacity(1 << (n + 1));
        for l0 in 0..2u32 {
            for state in 0..(1u32 << n) {
                let k = state.count_ones() as f64;
                let c = l0 as f64;
                features.push(Vector3::new(c, k, c * k));
            }
        }
        let nf = n as f64;
        Ok(Self {
            n,
            p,
            q,
            targets: Vector3::new(p, nf * p, nf * q),
            features,
        })
    }

    pub fn targets(&self) -> [f64; 3] {
        self.targets.into()
    }

    fn log_weights(&self, lambda: &Vector3<f64>) -> Vec<f64> {
        self.features.iter().map(|f| lambda.dot(f)).collect()
    }

    /// `log Z(lambda)` by exhaustive enumeration.
    pub fn log_partition(&self, lambda: [f64; 3]) -> f64 {
        log_sum_exp(&self.log_weights(&Vector3::from(lambda)))
    }

    /// `E_lambda[f] = grad log Z(lambda)`.
    pub fn expected_features(&self, lambda: [f64; 3]) -> [f64; 3] {
        self.moments(&Vector3::from(lambda)).0.into()
    }

    fn moments(&self, lambda: &Vector3<f64>) -> (Vector3<f64>, Matrix3<f64>) {
        let lw = self.log_weights(lambda);
        let log_z = log_sum_exp(&lw);
        let probs: Vec<f64> = lw.iter().map(|w| (w - log_z).exp()).collect();
        let mut mean = Vector3::zeros();
        for i in 0..3 {
            mean[i] = probs
                .iter()
                .zip(&self.features)
                .map(|(pr, f)| pr * f[i])
                .collect::<NeumaierSum>()
                .total();
        }
        let mut cov = Matrix3::zeros();
        for i in 0..3 {
            for j in i..3 {
                let c = probs
                    .iter()
                    .zip(&self.features)
                    .map(|(pr, f)| pr * (f[i] - mean[i]) * (f[j] - mean[j]))
                    .collect::<NeumaierSum>()
                    .total();
                cov[(i, j)] = c;
                cov[(j, i)] = c;
            }
        }
        (mean, cov)
    }

    /// `F - E_lambda[f]`, which vanishes at the MaxEnt solution.
    pub fn residual(&self, lambda: [f64; 3]) -> [f64; 3] {
        (self.targets - self.moments(&Vector3::from(lambda)).0).into()
    }

    fn newton(&self, start: Vector3<f64>, opts: &FitOptions) -> (Vector3<f64>, f64, usize) {
        let mut lambda = start;
        let (mut mean, mut cov) = self.moments(&lambda);
        let mut res = (self.targets - mean).norm();
        let mut iters = 0;
        while res >= opts.tol && iters < opts.max_iters {
            iters += 1;
            let rhs = self.targets - mean;
            let step = match cov.cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => match cov.lu().solve(&rhs) {
                    Some(s) => s,
                    None => break,
                },
            };
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..=MAX_HALVINGS {
                let trial = lambda + step * t;
                let (m, c) = self.moments(&trial);
                let r = (self.targets - m).norm();
                if r.is_finite() && r < res {
                    lambda = trial;
                    mean = m;
                    cov = c;
                    res = r;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (lambda, res, iters)
    }

    /// Default starting point: closed-form parameters shifted by a fixed amount.
    fn perturbed_closed_form(&self) -> Option<Vector3<f64>> {
        let rho = q_to_rho(self.p, self.q).ok()?;
        let params = ModelConfig::new(self.n, self.p, rho)
            .ok()?
            .calibrate()
            .ok()?;
        Some(Vector3::new(params.alpha0, params.alpha, params.beta).add_scalar(INIT_PERTURBATION))
    }

    /// Solves from `init` (or the perturbed closed form), falling back to the
    /// all-zeros start when the first attempt does not converge.
    pub fn fit(&self, init: Option<[f64; 3]>, opts: &FitOptions) -> Result<MaxEntFit> {
        let mut starts = Vec::new();
        if let Some(s) = init
            .map(Vector3::from)
            .or_else(|| self.perturbed_closed_form())
        {
            starts.push(s);
        }
        starts.push(Vector3::zeros());

        let mut best: Option<(f64, usize)> = None;
        for start in starts {
            let (lambda, res, iters) = self.newton(start, opts);
            if res < opts.tol {
                let l: [f64; 3] = lambda.into();
                return Ok(MaxEntFit {
                    lagrange: l,
                    residual_norm: res,
                    iterations: iters,
                    matched_params: CalibratedParams {
                        n: self.n,
                        alpha0: l[0],
                        alpha: l[1],
                        beta: l[2],
                        log_z: self.log_partition(l),
                    },
                });
            }
            if best.is_none_or(|(r, _)| res < r) {
                best = Some((res, iters));
            }
        }
        let (residual_norm, iterations) = best.unwrap_or((f64::INFINITY, 0));
        Err(ModelError::NonConvergence {
            iterations,
            residual_norm,
        })
    }
}

/// Converged MaxEnt multipliers and their reading as model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxEntFit {
    /// `(central field, pooled non-central field, pooled coupling)` under the `+` convention.
    pub lagrange: [f64; 3],
    pub residual_norm: f64,
    pub iterations: usize,
    pub matched_params: CalibratedParams,
}

impl MaxEntFit {
    /// Multipliers under the `exp(-lambda . f)` convention.
    pub fn negated_lagrange(&self) -> [f64; 3] {
        self.lagrange.map(|x| -x)
    }
}

pub fn maxent_fit_small(
    p: f64,
    q: f64,
    n: usize,
    init: Option<[f64; 3]>,
    opts: &FitOptions,
) -> Result<MaxEntFit> {
    MaxEntProblem::new(p, q, n)?.fit(init, opts)
}
