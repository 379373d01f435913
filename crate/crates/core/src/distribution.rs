//! Joint, marginal, and loss distributions of the star-graph model.
//!
//! The loss `L = L1 + ... + LN` counts defaults among the non-central credits
//! only; the central node's indicator `L0` is not part of the loss.

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::model::{CalibratedParams, ModelConfig};
use crate::numeric::{log_add_exp, LogBinomialTable, NeumaierSum};

fn count_defaults(params: &CalibratedParams, l: &[bool]) -> Result<usize> {
    if l.len() != params.n {
        return Err(ModelError::LengthMismatch {
            expected: params.n,
            got: l.len(),
        });
    }
    Ok(l.iter().filter(|&&b| b).count())
}

/// Log-probability of the joint state `(l0, l1, ..., lN)`.
pub fn joint_log_prob(params: &CalibratedParams, l0: bool, l: &[bool]) -> Result<f64> {
    let k = count_defaults(params, l)? as f64;
    let central = if l0 {
        params.alpha0 + params.beta * k
    } else {
        0.0
    };
    Ok(central + params.alpha * k - params.log_z)
}

/// Log-probability of the non-central state `(l1, ..., lN)` with `l0` summed out.
pub fn marginal_noncentral_log_prob(params: &CalibratedParams, l: &[bool]) -> Result<f64> {
    let k = count_defaults(params, l)? as f64;
    Ok(log_add_exp(
        params.alpha * k,
        params.alpha0 + (params.alpha + params.beta) * k,
    ) - params.log_z)
}

/// Probability mass function of the portfolio loss on `{0, ..., N}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossPmf {
    n: usize,
    log_mass: Vec<f64>,
    mass: Vec<f64>,
}

impl LossPmf {
    /// Builds a pmf from log-masses; the support size is `log_mass.len() - 1`.
    pub fn from_log_mass(log_mass: Vec<f64>) -> Self {
        assert!(
            !log_mass.is_empty(),
            "a loss pmf needs at least one support point"
        );
        let mass = log_mass.iter().map(|x| x.exp()).collect();
        Self {
            n: log_mass.len() - 1,
            log_mass,
            mass,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log_mass(&self) -> &[f64] {
        &self.log_mass
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().copied().collect::<NeumaierSum>().total()
    }

    /// Running cumulative mass `P(L <= l)`.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = NeumaierSum::default();
        self.mass
            .iter()
            .map(|&m| {
                acc.add(m);
                acc.total()
            })
            .collect()
    }

    /// Local maxima of the pmf.
    ///
    /// A maximal run of equal masses `[a, b]` is a peak when both of its
    /// neighbours (those that exist) carry strictly smaller mass; the run is
    /// reported once, at `a`. Comparisons use the log-masses so that tail
    /// underflow cannot manufacture plateaus.
    pub fn peaks(&self) -> Vec<usize> {
        let v = &self.log_mass;
        let mut peaks = Vec::new();
        let mut a = 0;
        while a < v.len() {
            let mut b = a;
            while b + 1 < v.len() && v[b + 1] == v[a] {
                b += 1;
            }
            let left_lower = a == 0 || v[a - 1] < v[a];
            let right_lower = b + 1 == v.len() || v[b + 1] < v[a];
            if left_lower && right_lower {
                peaks.push(a);
            }
            a = b + 1;
        }
        peaks
    }
}

/// Exact loss pmf, `P(L = l) = C(N,l) (exp(alpha l) + exp(alpha0 + l (alpha + beta))) / Z`.
pub fn loss_pmf(cfg: &ModelConfig) -> Result<LossPmf> {
    let params = cfg.calibrate()?;
    Ok(loss_pmf_from_params(&params))
}

pub fn loss_pmf_from_params(params: &CalibratedParams) -> LossPmf {
    let table = LogBinomialTable::new(params.n);
    let coupled = params.alpha + params.beta;
    let log_mass = (0..=params.n)
        .map(|l| {
            let l_f = l as f64;
            table.get(l) + log_add_exp(params.alpha * l_f, params.alpha0 + coupled * l_f)
                - params.log_z
        })
        .collect();
    LossPmf::from_log_mass(log_mass)
}

/// The loss law as a two-component binomial mixture, one component per state of `L0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureForm {
    /// `P(L0 = 0) = 1 - p`.
    pub weight1: f64,
    /// `P(Li = 1 | L0 = 0) = (p - q)/(1 - p)`.
    pub rate1: f64,
    /// `P(L0 = 1) = p`.
    pub weight2: f64,
    /// `P(Li = 1 | L0 = 1) = q/p`.
    pub rate2: f64,
}

impl MixtureForm {
    /// Linear-space masses `w1 Binom(n, r1)[l] + w2 Binom(n, r2)[l]`.
    pub fn expand(&self, n: usize) -> Vec<f64> {
        let table = LogBinomialTable::new(n);
        let binom = |rate: f64, l: usize| {
            let k = l as f64;
            (table.get(l) + k * rate.ln() + (n as f64 - k) * (-rate).ln_1p()).exp()
        };
        (0..=n)
            .map(|l| self.weight1 * binom(self.rate1, l) + self.weight2 * binom(self.rate2, l))
            .collect()
    }
}

pub fn mixture_form(cfg: &ModelConfig) -> MixtureForm {
    let (rate1, rate2) = cfg.conditional_probs();
    MixtureForm {
        weight1: 1.0 - cfg.p(),
        rate1,
        weight2: cfg.p(),
        rate2,
    }
}

/// `E[Li Lj]` for distinct non-central credits: `(p - q)^2/(1 - p) + q^2/p`.
pub fn pair_moment(cfg: &ModelConfig) -> f64 {
    let (p, q) = (cfg.p(), cfg.q());
    (p - q).powi(2) / (1.0 - p) + q * q / p
}

/// Correlation between two distinct non-central default indicators.
pub fn rho_noncentral(cfg: &ModelConfig) -> f64 {
    let p = cfg.p();
    (pair_moment(cfg) - p * p) / (p * (1.0 - p))
}

/// `(mean, variance)` of the loss.
pub fn loss_moments(pmf: &LossPmf) -> (f64, f64) {
    let mean = pmf
        .mass()
        .iter()
        .enumerate()
        .map(|(l, &m)| l as f64 * m)
        .collect::<NeumaierSum>()
        .total();
    let variance = pmf
        .mass()
        .iter()
        .enumerate()
        .map(|(l, &m)| (l as f64 - mean).powi(2) * m)
        .collect::<NeumaierSum>()
        .total();
    (mean, variance)
}
