//! Risk metrics on a loss pmf and correlation scans over the admissible range.

use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{loss_moments, loss_pmf, LossPmf};
use crate::error::{ModelError, Result};
use crate::model::{rho_bounds, ModelConfig};

pub const DEFAULT_VAR_LEVEL: f64 = 0.99;
pub const DEFAULT_JUMP_THRESHOLD: usize = 10;

/// Summary of one loss distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskReport {
    pub var_level: f64,
    pub var_value: usize,
    pub mode: usize,
    pub mode_prob: f64,
    pub mean: f64,
    pub variance: f64,
    pub peaks: Vec<usize>,
}

/// Lower quantile: the smallest loss whose cumulative mass reaches `level`.
pub fn value_at_risk(pmf: &LossPmf, level: f64) -> Result<usize> {
    if !(level > 0.0 && level < 1.0) {
        return Err(ModelError::InvalidLevel(level));
    }
    // Rounding can leave the final cumulative value just below a level close
    // to one; the top of the support is the answer then.
    Ok(pmf
        .cdf()
        .iter()
        .position(|&c| c >= level)
        .unwrap_or(pmf.n()))
}

/// Most probable loss and its mass; ties go to the smallest loss.
pub fn mode_of(pmf: &LossPmf) -> (usize, f64) {
    let mut best = 0;
    for (l, &lm) in pmf.log_mass().iter().enumerate() {
        if lm > pmf.log_mass()[best] {
            best = l;
        }
    }
    (best, pmf.mass()[best])
}

pub fn risk_report(pmf: &LossPmf, level: f64) -> Result<RiskReport> {
    let var_value = value_at_risk(pmf, level)?;
    let (mode, mode_prob) = mode_of(pmf);
    let (mean, variance) = loss_moments(pmf);
    Ok(RiskReport {
        var_level: level,
        var_value,
        mode,
        mode_prob,
        mean,
        variance,
        peaks: pmf.peaks(),
    })
}

/// Evenly spaced correlation grid kept `margin` away from both open bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub count: usize,
    pub margin: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            count: 201,
            margin: 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    pub grid: GridSpec,
    pub level: f64,
    /// Smallest adjacent mode change (exclusive) reported as a jump.
    pub jump_threshold: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            level: DEFAULT_VAR_LEVEL,
            jump_threshold: DEFAULT_JUMP_THRESHOLD,
        }
    }
}

pub fn rho_grid(p: f64, grid: GridSpec) -> Result<Vec<f64>> {
    if grid.count < 3 {
        return Err(ModelError::GridTooCoarse(grid.count));
    }
    let bounds = rho_bounds(p)?;
    let lo = bounds.lower + grid.margin;
    let hi = bounds.upper - grid.margin;
    if !(grid.margin > 0.0 && lo < hi) {
        return Err(ModelError::InvalidMargin {
            margin: grid.margin,
            lower: bounds.lower,
            upper: bounds.upper,
        });
    }
    let last = (grid.count - 1) as f64;
    Ok((0..grid.count)
        .map(|k| {
            if k == grid.count - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / last
            }
        })
        .collect())
}

/// Risk reports across a correlation grid plus the detected mode jump.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub p: f64,
    pub n: usize,
    pub rho_grid: Vec<f64>,
    pub reports: Vec<RiskReport>,
    /// Midpoint of the adjacent grid pair with the largest mode change, when
    /// that change exceeds the jump threshold.
    pub rho_star: Option<f64>,
    /// Signed mode change across the jump.
    pub jump_size: Option<i64>,
    /// Index of the left grid point of the jump pair.
    pub jump_index: Option<usize>,
}

impl ScanResult {
    /// Grid index closest to `rho`.
    pub fn nearest_index(&self, rho: f64) -> usize {
        let mut best = 0;
        for (i, &r) in self.rho_grid.iter().enumerate() {
            if (r - rho).abs() < (self.rho_grid[best] - rho).abs() {
                best = i;
            }
        }
        best
    }

    pub fn report_near(&self, rho: f64) -> &RiskReport {
        &self.reports[self.nearest_index(rho)]
    }
}

pub fn scan_rho(p: f64, n: usize, opts: &ScanOptions) -> Result<ScanResult> {
    if !(opts.level > 0.0 && opts.level < 1.0) {
        return Err(ModelError::InvalidLevel(opts.level));
    }
    let rho_grid = rho_grid(p, opts.grid)?;
    let reports = rho_grid
        .par_iter()
        .map(|&rho| {
            let cfg = ModelConfig::new(n, p, rho)?;
            risk_report(&loss_pmf(&cfg)?, opts.level)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut jump: Option<(usize, i64)> = None;
    for (k, pair) in reports.windows(2).enumerate() {
        let delta = pair[1].mode as i64 - pair[0].mode as i64;
        if jump.is_none_or(|(_, best)| delta.abs() > best.abs()) {
            jump = Some((k, delta));
        }
    }
    let jump = jump.filter(|&(_, d)| d.unsigned_abs() > opts.jump_threshold as u64);

    Ok(ScanResult {
        p,
        n,
        rho_star: jump.map(|(k, _)| 0.5 * (rho_grid[k] + rho_grid[k + 1])),
        jump_size: jump.map(|(_, d)| d),
        jump_index: jump.map(|(k, _)| k),
        rho_grid,
        reports,
    })
}

/// Bisects `[lo, hi]` for the correlation at which the loss mode changes by
/// more than `threshold` units. The mode must differ by more than `threshold`
/// between the two ends; the returned pair brackets the jump to within `tol`.
pub fn locate_mode_jump(
    p: f64,
    n: usize,
    lo: f64,
    hi: f64,
    threshold: usize,
    tol: f64,
) -> Result<Option<(f64, f64)>> {
    let mode_at =
        |rho: f64| -> Result<usize> { Ok(mode_of(&loss_pmf(&ModelConfig::new(n, p, rho)?)?).0) };
    let (mut a, mut b) = (lo, hi);
    let mode_a = mode_at(a)?;
    if mode_a.abs_diff(mode_at(b)?) <= threshold {
        return Ok(None);
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        if mode_at(mid)?.abs_diff(mode_a) <= threshold {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Some((a, b)))
}

/// VaR at `rho` next to VaR at `-rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VarMirror {
    pub rho: f64,
    pub var_positive: usize,
    pub var_negative: usize,
}

impl VarMirror {
    pub fn asymmetry(&self) -> i64 {
        self.var_positive as i64 - self.var_negative as i64
    }
}

/// Compares VaR at `|rho|` and `-|rho|` for each requested correlation whose
/// mirror image is also admissible; other entries are skipped.
pub fn var_mirror(p: f64, n: usize, rhos: &[f64], level: f64) -> Result<Vec<VarMirror>> {
    let mut out = Vec::new();
    for &r in rhos {
        let r = r.abs();
        let (Ok(pos), Ok(neg)) = (ModelConfig::new(n, p, r), ModelConfig::new(n, p, -r)) else {
            continue;
        };
        out.push(VarMirror {
            rho: r,
            var_positive: value_at_risk(&loss_pmf(&pos)?, level)?,
            var_negative: value_at_risk(&loss_pmf(&neg)?, level)?,
        });
    }
    Ok(out)
}
