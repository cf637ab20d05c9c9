//! CSV and JSON artifacts of a sweep.

use std::path::{Path, PathBuf};

use anyhow::Result;
use serde::Serialize;
use slipflow::analysis::slip_prediction;

use crate::cache::{write_atomic, write_json};
use crate::config::RunConfig;
use crate::pipeline::Summary;

pub const SUMMARY_FILE: &str = "summary.json";
pub const CONSTANTS_FILE: &str = "constants.json";

#[derive(Serialize)]
struct ErrorRow {
    order: usize,
    epsilon: f64,
    eta: Option<f64>,
    #[serde(rename = "F")]
    force: f64,
    norm_grad: f64,
    norm_omega2: f64,
    norm_sigma: f64,
    norm_omega1: f64,
    norm_total: f64,
    theoretical_rate: f64,
    observed_rate: Option<f64>,
    delta: f64,
    gamma: f64,
}

#[derive(Serialize)]
struct AprioriRow {
    epsilon: f64,
    eta: Option<f64>,
    #[serde(rename = "F")]
    force: f64,
    norm_grad: f64,
    norm_omega2: f64,
    norm_sigma: f64,
    norm_omega1: f64,
    norm_total: f64,
    theoretical_rate: f64,
    observed_rate: Option<f64>,
    delta: f64,
    gamma: f64,
}

#[derive(Serialize)]
struct SlipRow {
    epsilon: f64,
    eta: Option<f64>,
    #[serde(rename = "F")]
    force: f64,
    v1_eff: f64,
    shear_eff: f64,
    a_lin_pred: f64,
    a_quad_pred: f64,
}

fn csv_bytes<T: Serialize>(rows: &[T], header: &[&str]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(header)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    Ok(w.into_inner()?)
}

const ERROR_HEADER: &[&str] = &[
    "order", "epsilon", "eta", "F", "norm_grad", "norm_omega2", "norm_sigma", "norm_omega1",
    "norm_total", "theoretical_rate", "observed_rate", "delta", "gamma",
];
const SLIP_HEADER: &[&str] = &["epsilon", "eta", "F", "v1_eff", "shear_eff", "a_lin_pred", "a_quad_pred"];

/// Rows for orders 0–2 at the rate force, one per (order, regime, ε).
pub fn errors_csv(cfg: &RunConfig, s: &Summary) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for order in 0..3 {
        for r in &s.rates {
            for p in &s.points {
                if p.spec.shape != cfg.geometry.shape || p.spec.regime() != r.regime || p.spec.force != r.force {
                    continue;
                }
                let Some(n) = p.ok().and_then(|d| d.norms) else { continue };
                let w = n.orders[order];
                rows.push(ErrorRow {
                    order,
                    epsilon: p.spec.epsilon,
                    eta: p.spec.eta,
                    force: p.spec.force,
                    norm_grad: w.grad,
                    norm_omega2: w.omega2,
                    norm_sigma: w.sigma,
                    norm_omega1: w.omega1,
                    norm_total: w.total(),
                    theoretical_rate: r.theoretical.for_order(order),
                    observed_rate: r.orders[order].map(|f| f.rate),
                    delta: p.spec.delta,
                    gamma: p.spec.gamma,
                });
            }
        }
    }
    csv_bytes(&rows, ERROR_HEADER)
}

pub fn apriori_csv(cfg: &RunConfig, s: &Summary) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for r in &s.rates {
        for p in &s.points {
            if p.spec.shape != cfg.geometry.shape || p.spec.regime() != r.regime || p.spec.force != r.force {
                continue;
            }
            let Some(n) = p.ok().and_then(|d| d.norms) else { continue };
            let w = n.apriori;
            rows.push(AprioriRow {
                epsilon: p.spec.epsilon,
                eta: p.spec.eta,
                force: p.spec.force,
                norm_grad: w.grad,
                norm_omega2: w.omega2,
                norm_sigma: w.sigma,
                norm_omega1: w.omega1,
                norm_total: w.total(),
                theoretical_rate: r.theoretical.apriori,
                observed_rate: r.apriori.map(|f| f.rate),
                delta: p.spec.delta,
                gamma: p.spec.gamma,
            });
        }
    }
    csv_bytes(&rows, &ERROR_HEADER[1..])
}

/// Every computed point on `shape` with the predicted coefficients at its
/// (ε, δ, γ).
fn slip_rows(cfg: &RunConfig, s: &Summary, label: &str) -> Vec<SlipRow> {
    let Some(a) = s.slip.iter().find(|a| a.label == label) else {
        return Vec::new();
    };
    s.points
        .iter()
        .filter(|p| p.spec.shape == a.shape)
        .filter_map(|p| {
            let d = p.ok()?;
            let pred = slip_prediction(&a.constants, &p.spec.params(), d.fracture_height, cfg.solver.correction);
            Some(SlipRow {
                epsilon: p.spec.epsilon,
                eta: p.spec.eta,
                force: p.spec.force,
                v1_eff: d.v1_eff,
                shear_eff: d.shear_eff,
                a_lin_pred: pred.a_lin_pred,
                a_quad_pred: pred.a_quad_pred,
            })
        })
        .collect()
}

pub fn slip_csv(cfg: &RunConfig, s: &Summary, label: &str) -> Result<Vec<u8>> {
    csv_bytes(&slip_rows(cfg, s, label), SLIP_HEADER)
}

pub fn summary_bytes(s: &Summary) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(s)?;
    b.push(b'\n');
    Ok(b)
}

/// Writes every sweep artifact into `dir` and returns the paths.
pub fn write_sweep(cfg: &RunConfig, s: &Summary, dir: &Path) -> Result<Vec<PathBuf>> {
    let files = [
        ("errors.csv", errors_csv(cfg, s)?),
        ("apriori.csv", apriori_csv(cfg, s)?),
        ("slip.csv", slip_csv(cfg, s, "default")?),
        ("slip_asymmetric.csv", slip_csv(cfg, s, "asymmetric")?),
        (CONSTANTS_FILE, constants_bytes(&s.cell)?),
        (SUMMARY_FILE, summary_bytes(s)?),
    ];
    let mut out = Vec::new();
    for (name, bytes) in files {
        let path = dir.join(name);
        write_atomic(&path, &bytes)?;
        out.push(path);
    }
    Ok(out)
}

pub fn constants_bytes<T: Serialize>(cell: &T) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(cell)?;
    b.push(b'\n');
    Ok(b)
}

pub fn write_constants<T: Serialize>(cell: &T, dir: &Path) -> Result<PathBuf> {
    let path = dir.join(CONSTANTS_FILE);
    write_json(&path, cell)?;
    Ok(path)
}
