use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::model::ModelConfig;
use crate::numeric::NeumaierSum;

/// Largest portfolio the exhaustive engine accepts (2^17 joint states).
pub const MAX_ENUM_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnumeratedMoments {
    /// `E[L0]`
    pub central: f64,
    /// `E[L1]`
    pub noncentral: f64,
    /// `E[L0 L1]`
    pub central_pair: f64,
    /// `E[L1 L2]`
    pub noncentral_pair: f64,
}

impl EnumeratedMoments {
    /// Correlation between two non-central indicators.
    pub fn noncentral_correlation(&self) -> f64 {
        let p = self.noncentral;
        (self.noncentral_pair - p * p) / (p * (1.0 - p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerationReport {
    pub n: usize,
    pub moments: EnumeratedMoments,
    pub loss_pmf_bf: Vec<f64>,
    pub total_mass: f64,
}

/// Visits every joint state `(l0, l1, ..., lN)` and accumulates exact moments
/// and the loss histogram using the calibrated natural parameters.
pub fn enumerate(cfg: &ModelConfig) -> Result<EnumerationReport> {
    let n = cfg.n_credits();
    if n > MAX_ENUM_N {
        return Err(ModelError::EnumerationTooLarge { n, max: MAX_ENUM_N });
    }
    let params = cfg.calibrate()?;

    let mut total = NeumaierSum::default();
    let mut central = NeumaierSum::default();
    let mut noncentral = NeumaierSum::default();
    let mut central_pair = NeumaierSum::default();
    let mut noncentral_pair = NeumaierSum::default();
    let mut loss = vec![NeumaierSum::default(); n + 1];

    for l0 in 0..2u32 {
        for state in 0..(1u32 << n) {
            let first = state & 1;
            let second = state >> 1 & 1;
            let defaults = state.count_ones();
            let energy = params.alpha0 * l0 as f64
                + params.alpha * defaults as f64
                + params.beta * (l0 * defaults) as f64;
            let prob = (energy - params.log_z).exp();

            total.add(prob);
            loss[defaults as usize].add(prob);
            if l0 == 1 {
                central.add(prob);
            }
            if first == 1 {
                noncentral.add(prob);
                if l0 == 1 {
                    central_pair.add(prob);
                }
                if second == 1 {
                    noncentral_pair.add(prob);
                }
            }
        }
    }

    Ok(EnumerationReport {
        n,
        moments: EnumeratedMoments {
            central: central.total(),
            noncentral: noncentral.total(),
            central_pair: central_pair.total(),
            noncentral_pair: noncentral_pair.total(),
        },
        loss_pmf_bf: loss.iter().map(NeumaierSum::total).collect(),
        total_mass: total.total(),
    })
}
