//! Model parameters, the admissible correlation region, and closed-form
//! calibration of the star-graph Ising model.
//!
//! Every credit (the central node and the `N` non-central ones) shares one
//! default probability `p`. The user-facing correlation `rho` between the
//! central indicator and each non-central indicator fixes the joint default
//! probability `q = E[L0 Li] = rho p (1 - p) + p^2`.

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::numeric::{log1p_exp, log_add_exp};

/// Distance from either end of the admissible correlation interval inside
/// which a configuration is rejected.
pub const EPS_BOUND: f64 = 1e-10;

/// Open interval of admissible central correlations for a given `p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoInterval {
    pub lower: f64,
    pub upper: f64,
}

impl RhoInterval {
    pub fn contains(&self, rho: f64) -> bool {
        rho > self.lower && rho < self.upper
    }

    /// True when `rho` is inside the interval and at least [`EPS_BOUND`] away from both ends.
    pub fn contains_strictly(&self, rho: f64) -> bool {
        rho > self.lower + EPS_BOUND && rho < self.upper - EPS_BOUND
    }
}

impl std::fmt::Display for RhoInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.lower, self.upper)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidProbability(p))
    }
}

/// Admissible open interval `(max(-p/(1-p), -(1-p)/p), 1)` for the central correlation.
pub fn rho_bounds(p: f64) -> Result<RhoInterval> {
    check_probability(p)?;
    let lower = f64::max(-p / (1.0 - p), -(1.0 - p) / p);
    Ok(RhoInterval { lower, upper: 1.0 })
}

/// Joint default probability `q = E[L0 Li]` implied by `rho`.
pub fn rho_to_q(p: f64, rho: f64) -> Result<f64> {
    check_probability(p)?;
    let q = p * (p + rho * (1.0 - p));
    if q > 0.0 && q < p && rho.is_finite() {
        Ok(q)
    } else {
        Err(ModelError::SecondMomentOutOfRange { q, p })
    }
}

/// Correlation implied by the joint default probability `q`.
pub fn q_to_rho(p: f64, q: f64) -> Result<f64> {
    check_probability(p)?;
    if !(q > 0.0 && q < p) {
        return Err(ModelError::SecondMomentOutOfRange { q, p });
    }
    Ok((q - p * p) / (p * (1.0 - p)))
}

/// Portfolio size, shared default probability, and central correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelConfig {
    n_credits: usize,
    p: f64,
    rho: f64,
}

impl ModelConfig {
    pub fn new(n_credits: usize, p: f64, rho: f64) -> Result<Self> {
        check_probability(p)?;
        if n_credits < 2 {
            return Err(ModelError::InvalidCount(n_credits));
        }
        let bounds = rho_bounds(p)?;
        if !bounds.contains_strictly(rho) {
            return Err(ModelError::RhoOutOfRange {
                rho,
                p,
                lower: bounds.lower,
                upper: bounds.upper,
            });
        }
        rho_to_q(p, rho)?;
        Ok(Self { n_credits, p, rho })
    }

    pub fn n_credits(&self) -> usize {
        self.n_credits
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn q(&self) -> f64 {
        self.p * (self.p + self.rho * (1.0 - self.p))
    }

    pub fn bounds(&self) -> RhoInterval {
        RhoInterval {
            lower: f64::max(-self.p / (1.0 - self.p), -(1.0 - self.p) / self.p),
            upper: 1.0,
        }
    }

    /// `(P(Li = 1 | L0 = 0), P(Li = 1 | L0 = 1))`, i.e. `((p - q)/(1 - p), q/p)`.
    pub fn conditional_probs(&self) -> (f64, f64) {
        let (p, rho) = (self.p, self.rho);
        (p * (1.0 - rho), p + rho * (1.0 - p))
    }

    pub fn calibrate(&self) -> Result<CalibratedParams> {
        calibrate(self)
    }
}

/// Natural parameters of the joint law
/// `P(l0, l) = exp(alpha0 l0 + alpha sum(l) + beta l0 sum(l) - log_z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibratedParams {
    pub n: usize,
    pub alpha: f64,
    pub alpha0: f64,
    pub beta: f64,
    pub log_z: f64,
}

impl CalibratedParams {
    /// Log of the partition-function branch with the central node solvent.
    pub fn log_branch_solvent(&self) -> f64 {
        self.n as f64 * log1p_exp(self.alpha)
    }

    /// Log of the partition-function branch with the central node in default.
    pub fn log_branch_default(&self) -> f64 {
        self.alpha0 + self.n as f64 * log1p_exp(self.alpha + self.beta)
    }
}

/// Closed-form natural parameters matching `E[L0] = E[Li] = p` and `E[L0 Li] = q`.
///
/// The logarithm arguments `q`, `p - q` and `1 - 2p + q` are evaluated in the
/// factored forms `p (p + rho (1-p))`, `p (1-p)(1-rho)` and
/// `(1-p)(1 - p + rho p)`, which keep full relative precision as `rho`
/// approaches either end of its admissible interval. `log_z` is assembled
/// from the two branch logs and `Z` itself is never formed.
pub fn calibrate(cfg: &ModelConfig) -> Result<CalibratedParams> {
    let (p, rho) = (cfg.p, cfg.rho);
    let q_factor = p + rho * (1.0 - p);
    let solvent_factor = 1.0 - p + rho * p;
    let one_minus_rho = 1.0 - rho;
    if !(q_factor > 0.0 && solvent_factor > 0.0 && one_minus_rho > 0.0) {
        let b = cfg.bounds();
        return Err(ModelError::RhoOutOfRange {
            rho,
            p,
            lower: b.lower,
            upper: b.upper,
        });
    }
    let (ln_p, ln_1mp) = (p.ln(), (-p).ln_1p());
    let ln_q = ln_p + q_factor.ln();
    let ln_p_minus_q = ln_p + ln_1mp + (-rho).ln_1p();
    let ln_1m2p_plus_q = ln_1mp + solvent_factor.ln();

    let n = cfg.n_credits as f64;
    let alpha = ln_p_minus_q - ln_1m2p_plus_q;
    let alpha0 = (n - 1.0) * (ln_1mp - ln_p) + n * alpha;
    let beta = ln_q - ln_p_minus_q - alpha;
    let log_z = log_add_exp(n * log1p_exp(alpha), alpha0 + n * log1p_exp(alpha + beta));
    Ok(CalibratedParams {
        n: cfg.n_credits,
        alpha,
        alpha0,
        beta,
        log_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn bounds_examples() {
        let b = rho_bounds(0.4).unwrap();
        assert!(close(b.lower, -2.0 / 3.0, 1e-15));
        assert_eq!(b.upper, 1.0);
        assert_eq!(rho_bounds(0.5).unwrap().lower, -1.0);
        assert!(close(rho_bounds(0.2).unwrap().lower, -0.25, 1e-15));
        assert!(close(rho_bounds(0.8).unwrap().lower, -0.25, 1e-15));
    }

    #[test]
    fn bounds_reject_bad_probability() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                rho_bounds(p),
                Err(ModelError::InvalidProbability(_))
            ));
        }
    }

    #[test]
    fn rho_q_examples() {
        assert!(close(rho_to_q(0.4, 0.0).unwrap(), 0.16, 1e-15));
        assert!(close(rho_to_q(0.4, -0.5).unwrap(), 0.04, 1e-15));
        assert!(close(rho_to_q(0.4, 0.26).unwrap(), 0.2224, 1e-15));
        assert!(close(q_to_rho(0.4, 0.16).unwrap(), 0.0, 1e-15));
        assert!(close(q_to_rho(0.4, 0.04).unwrap(), -0.5, 1e-14));
        assert!(close(q_to_rho(0.5, 0.25).unwrap(), 0.0, 1e-15));
    }

    #[test]
    fn q_endpoints_are_rejected() {
        assert!(q_to_rho(0.4, 0.0).is_err());
        assert!(q_to_rho(0.4, 0.4).is_err());
        assert!(rho_to_q(0.4, -0.7).is_err());
        assert!(rho_to_q(0.4, 1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            ModelConfig::new(1, 0.4, 0.0),
            Err(ModelError::InvalidCount(1))
        ));
        assert!(matches!(
            ModelConfig::new(10, 0.4, -0.7),
            Err(ModelError::RhoOutOfRange { .. })
        ));
        assert!(ModelConfig::new(10, 0.4, 1.0 - 1e-11).is_err());
        assert!(ModelConfig::new(10, 0.4, -2.0 / 3.0 + 5e-11).is_err());
        assert!(ModelConfig::new(10, 0.4, -2.0 / 3.0 + 1e-9).is_ok());
        assert!(ModelConfig::new(10, 0.4, f64::NAN).is_err());
    }

    #[test]
    fn independence_calibration() {
        for &(p, n) in &[(0.4, 100), (0.1, 7), (0.73, 30)] {
            let params = ModelConfig::new(n, p, 0.0).unwrap().calibrate().unwrap();
            assert!(params.beta.abs() < 1e-12, "beta = {}", params.beta);
            assert!(close(params.alpha, (p / (1.0 - p)).ln(), 1e-12));
        }
        let params = ModelConfig::new(100, 0.4, 0.0)
            .unwrap()
            .calibrate()
            .unwrap();
        assert!(close(params.alpha, (2.0f64 / 3.0).ln(), 1e-12));
    }

    #[test]
    fn beta_matches_combined_log_form() {
        for &(p, rho) in &[
            (0.4, 0.26),
            (0.4, -0.5),
            (0.2, -0.2),
            (0.7, 0.6),
            (0.7, -0.4),
        ] {
            let cfg = ModelConfig::new(12, p, rho).unwrap();
            let q = cfg.q();
            let combined = (q * (1.0 - 2.0 * p + q) / ((p - q) * (p - q))).ln();
            let params = cfg.calibrate().unwrap();
            assert!(close(params.beta, combined, 1e-12), "p={p} rho={rho}");
        }
    }

    #[test]
    fn conditional_probs_examples() {
        let (a, b) = ModelConfig::new(5, 0.4, 0.0).unwrap().conditional_probs();
        assert!(close(a, 0.4, 1e-15) && close(b, 0.4, 1e-15));
        let (a, b) = ModelConfig::new(5, 0.4, -0.5).unwrap().conditional_probs();
        assert!(close(a, 0.6, 1e-15) && close(b, 0.1, 1e-15));
        let (a, b) = ModelConfig::new(5, 0.4, 0.26).unwrap().conditional_probs();
        assert!(close(a, 0.296, 1e-15) && close(b, 0.556, 1e-15));
    }

    #[test]
    fn log_z_is_finite_at_large_n_near_bounds() {
        for &rho in &[-2.0 / 3.0 + 1e-9, 1.0 - 1e-9, 0.5] {
            let params = ModelConfig::new(5000, 0.4, rho)
                .unwrap()
                .calibrate()
                .unwrap();
            assert!(params.log_z.is_finite());
            assert!(params.log_branch_solvent().is_finite());
            assert!(params.log_branch_default().is_finite());
        }
    }
}
