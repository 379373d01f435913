//! Exact loss distributions for the star-graph ("Dandelion") Ising model of
//! correlated credit defaults.
//!
//! A central credit `L0` is coupled to `N` non-central credits `L1..LN`. All
//! credits default with probability `p`, and the correlation `rho` between the
//! central indicator and each non-central indicator may be negative as well as
//! positive. The crate calibrates the model in closed form, evaluates the loss
//! pmf in log space, computes risk metrics and correlation scans, and ships
//! independent oracles (enumeration, sampling, MaxEnt fitting) that check it.

pub mod distribution;
pub mod error;
pub mod metrics;
pub mod model;
pub mod numeric;
pub mod oracle;

pub use distribution::{
    joint_log_prob, loss_moments, loss_pmf, marginal_noncentral_log_prob, mixture_form,
    pair_moment, rho_noncentral, LossPmf, MixtureForm,
};
pub use error::{ModelError, Result};
pub use metrics::{
    mode_of, risk_report, scan_rho, value_at_risk, GridSpec, RiskReport, ScanOptions, ScanResult,
};
pub use model::{
    calibrate, q_to_rho, rho_bounds, rho_to_q, CalibratedParams, ModelConfig, RhoInterval,
};
