//! Browser bindings. Each export returns a JSON string; the plain functions
//! behind them are usable natively.

use serde::Serialize;
use slipflow::analysis::{slip_prediction, slip_regression, SlipSample};
use slipflow::boundary_layer::{solve_cell_problems, CellConstants};
use slipflow::dns::{interface_trace, run_dns, DnsOptions};
use slipflow::geometry::{build_bl_slab, build_grid_domain, UnitCell};
use slipflow::scaling::{CounterflowCorrection, HypothesisReport, ScalingParams};
use wasm_bindgen::prelude::*;

/// Rows of the slab shown in the picture, below and above S.
const VIEW_BELOW: usize = 2;
const VIEW_ABOVE: f64 = 1.5;
const SLAB_ROWS: usize = 4;
const SLAB_HEIGHT: f64 = 2.5;

#[derive(Debug, Clone, Serialize)]
pub struct CellView {
    pub constants: CellConstants,
    pub dual_gap: f64,
    /// Cell-centered β₁ on a `nx × ny` window, row-major from the bottom;
    /// NaN inside inclusions.
    pub nx: usize,
    pub ny: usize,
    pub interface_row: usize,
    pub u: Vec<f64>,
}

pub fn cell_view(radius: f64, cells_per_period: usize) -> slipflow::Result<CellView> {
    let cell = UnitCell::disc(radius)?;
    let slab = build_bl_slab(&cell, SLAB_ROWS, SLAB_HEIGHT, cells_per_period)?;
    let cells = solve_cell_problems(&slab)?;
    let first = &cells.first;
    let a = &first.constants;
    let g = &*first.field.grid;
    let js = slab.interface_row();
    let lo = js - VIEW_BELOW * cells_per_period;
    let hi = (js + (VIEW_ABOVE * cells_per_period as f64) as usize).min(g.ny);
    let mut u = Vec::with_capacity(g.nx * (hi - lo));
    for j in lo..hi {
        for i in 0..g.nx {
            u.push(if g.is_solid(i, j) {
                f64::NAN
            } else {
                0.5 * (first.field.u_at(i, j) + first.field.u_at((i + 1) % g.nx, j))
            });
        }
    }
    Ok(CellView {
        constants: CellConstants::from_layers(&cells),
        dual_gap: (a.trace_mean + a.dirichlet_energy).abs() / a.dirichlet_energy,
        nx: g.nx,
        ny: hi - lo,
        interface_row: js - lo,
        u,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Exponents {
    pub delta: f64,
    pub gamma: f64,
    pub report: HypothesisReport,
}

pub fn exponents(delta: f64, gamma: f64) -> Exponents {
    Exponents {
        delta,
        gamma,
        report: ScalingParams::new(0.125, delta, gamma, 1.0).validate(),
    }
}

pub fn exponents_from_eta(eta: f64) -> Exponents {
    let p = ScalingParams::from_eta(0.125, eta, 1.0);
    exponents(p.delta, p.gamma)
}

#[derive(Debug, Clone, Serialize)]
pub struct SlipCurve {
    pub epsilon: f64,
    pub eta: f64,
    pub c1: f64,
    pub leading: f64,
    pub predicted_a_lin: f64,
    pub samples: Vec<SlipSample>,
    pub fit_a_lin: Option<f64>,
    pub fit_a_quad: Option<f64>,
}

/// DNS at each force in `forces`, the fitted law and the predicted one.
pub fn slip_curve(radius: f64, eta: f64, epsilon: f64, forces: &[f64]) -> slipflow::Result<SlipCurve> {
    let cpp = 32;
    let cell = UnitCell::disc(radius)?;
    let slab = build_bl_slab(&cell, SLAB_ROWS, SLAB_HEIGHT, cpp)?;
    let c = CellConstants::from_layers(&solve_cell_problems(&slab)?);
    let p = ScalingParams::from_eta(epsilon, eta, 1.0);
    let domain = build_grid_domain(&cell, epsilon, p.delta, cpp)?;
    let samples = forces
        .iter()
        .map(|&f| {
            let sol = run_dns(&p.with_force(f), &domain, &DnsOptions::default())?;
            let t = interface_trace(&sol)?;
            Ok(SlipSample {
                force: f,
                epsilon,
                eta: Some(eta),
                v1_eff: t.slip_mean,
                shear_eff: t.shear_mean,
            })
        })
        .collect::<slipflow::Result<Vec<_>>>()?;
    let fit = slip_regression(&samples).ok();
    let pred = slip_prediction(&c, &p, domain.fracture_height, CounterflowCorrection::Consistent);
    Ok(SlipCurve {
        epsilon,
        eta,
        c1: c.c1,
        leading: -epsilon * c.c1,
        predicted_a_lin: pred.a_lin_pred,
        samples,
        fit_a_lin: fit.map(|f| f.a_lin),
        fit_a_quad: fit.map(|f| f.a_quad),
    })
}

fn to_js<T: Serialize>(r: slipflow::Result<T>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = cellView)]
pub fn cell_view_js(radius: f64, cells_per_period: usize) -> Result<String, JsError> {
    to_js(cell_view(radius, cells_per_period))
}

#[wasm_bindgen(js_name = exponents)]
pub fn exponents_js(delta: f64, gamma: f64) -> Result<String, JsError> {
    to_js(Ok(exponents(delta, gamma)))
}

#[wasm_bindgen(js_name = exponentsFromEta)]
pub fn exponents_from_eta_js(eta: f64) -> Result<String, JsError> {
    to_js(Ok(exponents_from_eta(eta)))
}

#[wasm_bindgen(js_name = slipCurve)]
pub fn slip_curve_js(radius: f64, eta: f64, epsilon: f64, forces: Vec<f64>) -> Result<String, JsError> {
    to_js(slip_curve(radius, eta, epsilon, &forces))
}
