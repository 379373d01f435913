use std::path::PathBuf;

use dandelion::metrics::{risk_report, var_mirror, VarMirror};
use dandelion::oracle::{self, Draw, GENERATOR};
use dandelion::{
    loss_pmf, scan_rho, CalibratedParams, ModelConfig, RhoInterval, RiskReport, ScanOptions,
    ScanResult,
};
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::output::{fmt_f64, Csv, Destination};
use crate::{CliError, Format, ModelArgs};

fn config(model: &ModelArgs) -> Result<ModelConfig, CliError> {
    Ok(ModelConfig::new(model.n, model.p, model.rho)?)
}

fn model_manifest(command: &str, model: &ModelArgs) -> RunManifest {
    RunManifest::new(command)
        .param("p", model.p)
        .param("rho", model.rho)
        .param("n", model.n)
}

fn tag(model: &ModelArgs) -> String {
    format!("p{}_rho{}_n{}", model.p, model.rho, model.n)
}

fn unsupported(command: &str, format: Format) -> CliError {
    CliError::Usage(format!("{command} does not support --format {format:?}").to_lowercase())
}

#[derive(Serialize)]
struct CalibrationReport {
    p: f64,
    rho: f64,
    n: usize,
    q: f64,
    rho_interval: RhoInterval,
    params: CalibratedParams,
}

pub fn calibrate(
    model: &ModelArgs,
    format: Format,
    output: Option<PathBuf>,
    dir: Option<PathBuf>,
) -> Result<(), CliError> {
    let cfg = config(model)?;
    let params = cfg.calibrate()?;
    let manifest = model_manifest("calibrate", model);
    let report = CalibrationReport {
        p: cfg.p(),
        rho: cfg.rho(),
        n: cfg.n_credits(),
        q: cfg.q(),
        rho_interval: cfg.bounds(),
        params,
    };
    match format {
        Format::Json => {
            let dest = Destination::resolve(output, dir, &format!("calibrate_{}.json", tag(model)));
            dest.emit_json(&report, &manifest)
        }
        Format::Text => {
            let dest = Destination::resolve(output, dir, &format!("calibrate_{}.txt", tag(model)));
            let b = report.rho_interval;
            let text = format!(
                "p = {}\nrho = {}\nn = {}\nq = {}\nrho_interval = ({}, {})\nalpha = {}\nalpha0 = {}\nbeta = {}\nlog_z = {}\n",
                fmt_f64(report.p),
                fmt_f64(report.rho),
                report.n,
                fmt_f64(report.q),
                fmt_f64(b.lower),
                fmt_f64(b.upper),
                fmt_f64(params.alpha),
                fmt_f64(params.alpha0),
                fmt_f64(params.beta),
                fmt_f64(params.log_z),
            );
            dest.emit_text(&text, &manifest)
        }
        Format::Csv => Err(unsupported("calibrate", format)),
    }
}

#[derive(Serialize)]
struct PmfRow {
    l: usize,
    mass: f64,
    log_mass: f64,
}

#[derive(Serialize)]
struct PmfDocument {
    p: f64,
    rho: f64,
    n: usize,
    rows: Vec<PmfRow>,
}

pub fn pmf(
    model: &ModelArgs,
    format: Format,
    output: Option<PathBuf>,
    dir: Option<PathBuf>,
) -> Result<(), CliError> {
    let cfg = config(model)?;
    let pmf = loss_pmf(&cfg)?;
    let manifest = model_manifest("pmf", model);
    match format {
        Format::Csv => {
            let mut csv = Csv::with_header("l,mass,log_mass");
            for (l, (m, lm)) in pmf.mass().iter().zip(pmf.log_mass()).enumerate() {
                csv.row([l.to_string(), fmt_f64(*m), fmt_f64(*lm)]);
            }
            let dest = Destination::resolve(output, dir, &format!("pmf_{}.csv", tag(model)));
            dest.emit_text(&csv.into_string(), &manifest)
        }
        Format::Json => {
            let doc = PmfDocument {
                p: cfg.p(),
                rho: cfg.rho(),
                n: cfg.n_credits(),
                rows: pmf
                    .mass()
                    .iter()
                    .zip(pmf.log_mass())
                    .enumerate()
                    .map(|(l, (&mass, &log_mass))| PmfRow { l, mass, log_mass })
                    .collect(),
            };
            let dest = Destination::resolve(output, dir, &format!("pmf_{}.json", tag(model)));
            dest.emit_json(&doc, &manifest)
        }
        Format::Text => Err(unsupported("pmf", format)),
    }
}

#[derive(Serialize)]
struct MetricsDocument {
    p: f64,
    rho: f64,
    n: usize,
    #[serde(flatten)]
    report: RiskReport,
}

fn peaks_field(peaks: &[usize]) -> String {
    peaks
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

pub fn metrics(
    model: &ModelArgs,
    level: f64,
    format: Format,
    output: Option<PathBuf>,
    dir: Option<PathBuf>,
) -> Result<(), CliError> {
    let cfg = config(model)?;
    let report = risk_report(&loss_pmf(&cfg)?, level)?;
    let manifest = model_manifest("metrics", model).param("level", level);
    match format {
        Format::Json => {
            let doc = MetricsDocument {
                p: cfg.p(),
                rho: cfg.rho(),
                n: cfg.n_credits(),
                report,
            };
            let dest = Destination::resolve(output, dir, &format!("metrics_{}.json", tag(model)));
            dest.emit_json(&doc, &manifest)
        }
        Format::Csv => {
            let mut csv = Csv::with_header("var_level,var,mode,mode_prob,mean,variance,peaks");
            csv.row([
                fmt_f64(report.var_level),
                report.var_value.to_string(),
                report.mode.to_string(),
                fmt_f64(report.mode_prob),
                fmt_f64(report.mean),
                fmt_f64(report.variance),
                peaks_field(&report.peaks),
            ]);
            let dest = Destination::resolve(output, dir, &format!("metrics_{}.csv", tag(model)));
            dest.emit_text(&csv.into_string(), &manifest)
        }
        Format::Text => Err(unsupported("metrics", format)),
    }
}

#[derive(Serialize)]
struct ScanDocument {
    level: f64,
    #[serde(flatten)]
    scan: ScanResult,
    var_mirror: Vec<VarMirror>,
}

pub fn scan(
    p: f64,
    n: usize,
    opts: &ScanOptions,
    format: Format,
    output: Option<PathBuf>,
    dir: Option<PathBuf>,
) -> Result<(), CliError> {
    let result = scan_rho(p, n, opts)?;
    let manifest = RunManifest::new("scan")
        .param("p", p)
        .param("n", n)
        .param("points", opts.grid.count)
        .param("margin", opts.grid.margin)
        .param("level", opts.level)
        .param("jump_threshold", opts.jump_threshold);
    let tag = format!("p{p}_n{n}_points{}", opts.grid.count);
    match format {
        Format::Csv => {
            let mut csv = Csv::with_header("rho,var,mode,mode_prob,mean,variance");
            for (rho, r) in result.rho_grid.iter().zip(&result.reports) {
                csv.row([
                    fmt_f64(*rho),
                    r.var_value.to_string(),
                    r.mode.to_string(),
                    fmt_f64(r.mode_prob),
                    fmt_f64(r.mean),
                    fmt_f64(r.variance),
                ]);
            }
            match (result.rho_star, result.jump_size) {
                (Some(star), Some(size)) => {
                    csv.line(&format!("# rho_star={},jump_size={size}", fmt_f64(star)))
                }
                _ => csv.line("# rho_star=none"),
            }
            let dest = Destination::resolve(output, dir, &format!("scan_{tag}.csv"));
            dest.emit_text(&csv.into_string(), &manifest)
        }
        Format::Json => {
            let positive: Vec<f64> = result
                .rho_grid
                .iter()
                .copied()
                .filter(|&r| r > 0.0)
                .collect();
            let mirror = var_mirror(p, n, &positive, opts.level)?;
            let doc = ScanDocument {
                level: opts.level,
                scan: result,
                var_mirror: mirror,
            };
            let dest = Destination::resolve(output, dir, &format!("scan_{tag}.json"));
            dest.emit_json(&doc, &manifest)
        }
        Format::Text => Err(unsupported("scan", format)),
    }
}

#[derive(Serialize)]
struct SampleDocument {
    p: f64,
    rho: f64,
    n: usize,
    draws: Vec<Draw>,
}

pub fn sample(
    model: &ModelArgs,
    count: usize,
    seed: u64,
    format: Format,
    output: Option<PathBuf>,
    dir: Option<PathBuf>,
) -> Result<(), CliError> {
    let cfg = config(model)?;
    let draws = oracle::sample(&cfg, count, seed)?;
    let mut manifest = model_manifest("sample", model).param("count", count);
    manifest.seed = Some(seed);
    manifest.generator = Some(GENERATOR.to_string());
    let tag = format!("{}_seed{seed}", tag(model));
    match format {
        Format::Csv => {
            let mut csv = Csv::with_header("draw_index,l0,loss");
            for (i, d) in draws.iter().enumerate() {
                csv.row([
                    i.to_string(),
                    u8::from(d.l0).to_string(),
                    d.loss.to_string(),
                ]);
            }
            let dest = Destination::resolve(output, dir, &format!("sample_{tag}.csv"));
            dest.emit_text(&csv.into_string(), &manifest)
        }
        Format::Json => {
            let doc = SampleDocument {
                p: cfg.p(),
                rho: cfg.rho(),
                n: cfg.n_credits(),
                draws,
            };
            let dest = Destination::resolve(output, dir, &format!("sample_{tag}.json"));
            dest.emit_json(&doc, &manifest)
        }
        Format::Text => Err(unsupported("sample", format)),
    }
}
