//! Boundary-layer cell problems on the truncated slab.
//!
//! First layer: Stokes flow driven by a unit jump of the tangential stress
//! across S = {y₂ = 0}. Second layer: Stokes flow forced by the convective
//! self-interaction of the first layer. Both are 1-periodic in y₁, vanish on
//! the inclusions and stabilize to constants far above S.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_bl_slab, BLSlab, InclusionShape, UnitCell};
use crate::saddle::{
    convection, dirichlet_energy, solve_stokes, Gauge, SaddleProblem, SolveStats, StaggeredField,
};

/// Distance below the top of the slab where far-field constants are read.
pub const FAR_FIELD_OFFSET: f64 = 0.5;
/// Fits need at least this many heights above the noise floor.
pub const MIN_DECAY_POINTS: usize = 10;
/// Relative noise floor for decay fits.
const NOISE_FLOOR: f64 = 1e-13;
/// Doubling the truncation may move a constant by at most this much.
pub const TRUNCATION_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Above,
    Below,
}

/// Values extracted from a layer solution. `far_velocity` is C¹ᵇˡ for the
/// first layer and C₁₁ᵇˡ for the second; `far_pressure` is Cωᵇˡ or C_π1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerConstants {
    pub far_velocity: f64,
    pub far_pressure: f64,
    /// ∫₀¹ β₁(y₁, 0) dy₁ from the average of the two u rows next to S.
    pub trace_mean: f64,
    /// Same average, extrapolated from the fracture side.
    pub trace_upper: f64,
    /// ⟨∂β₁/∂y₂⟩ on S from the fracture side.
    pub shear_upper: f64,
    /// Mean pressure on S (two-row average).
    pub pressure_interface: f64,
    /// ‖∇β‖² over the slab.
    pub dirichlet_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Positive exponential rate.
    pub rate: f64,
    /// RMS residual of the log-linear fit.
    pub residual: f64,
    pub points: usize,
    /// Heights actually used.
    pub window: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct BoundaryLayerResult {
    pub layer: Layer,
    pub slab: BLSlab,
    pub field: StaggeredField,
    pub constants: LayerConstants,
    pub stats: SolveStats,
}

impl BoundaryLayerResult {
    fn nx(&self) -> usize {
        self.field.grid.nx
    }

    /// u in slab row `row` (may lie outside the slab: far-field constant
    /// above, zero below).
    pub fn u_extended(&self, i: usize, row: isize) -> f64 {
        let g = &self.field.grid;
        if row < 0 {
            0.0
        } else if row as usize >= g.ny {
            self.constants.far_velocity
        } else {
            self.field.u_at(i % g.nx, row as usize)
        }
    }

    /// v on slab face line `row`, zero outside the slab.
    pub fn v_extended(&self, i: usize, row: isize) -> f64 {
        let g = &self.field.grid;
        if row < 0 || row as usize > g.ny {
            0.0
        } else {
            self.field.v_at(i % g.nx, row as usize)
        }
    }

    /// Pressure in slab row `row`: far-field constant above, zero below.
    pub fn p_extended(&self, i: usize, row: isize) -> f64 {
        let g = &self.field.grid;
        if row < 0 {
            0.0
        } else if row as usize >= g.ny {
            self.constants.far_pressure
        } else {
            self.field.p_at(i % g.nx, row as usize)
        }
    }

    /// Bilinear interpolation of the extended velocity at cell coordinates
    /// `(y1, y2)`, with `y1` taken modulo 1.
    pub fn velocity_at(&self, y1: f64, y2: f64) -> (f64, f64) {
        let g = &self.field.grid;
        let h = g.h;
        let nx = g.nx;
        let y1 = y1.rem_euclid(1.0);
        let interp = |fx: f64, fy: f64, get: &dyn Fn(usize, isize) -> f64| {
            let (i0, j0) = (fx.floor(), fy.floor());
            let (tx, ty) = (fx - i0, fy - j0);
            let i0 = (i0 as isize).rem_euclid(nx as isize) as usize;
            let i1 = (i0 + 1) % nx;
            let j0 = j0 as isize;
            (1.0 - ty) * ((1.0 - tx) * get(i0, j0) + tx * get(i1, j0))
                + ty * ((1.0 - tx) * get(i0, j0 + 1) + tx * get(i1, j0 + 1))
        };
        let ys = (y2 - g.y0) / h;
        let u = interp(y1 / h, ys - 0.5, &|i, j| self.u_extended(i, j));
        let v = interp(y1 / h - 0.5, ys, &|i, j| self.v_extended(i, j));
        (u, v)
    }

    /// Period-RMS deviation of the velocity from `(c, 0)` on each row, with
    /// the row-center height.
    fn velocity_deviation(&self, c: f64) -> Vec<(f64, f64)> {
        let g = &self.field.grid;
        let nx = self.nx();
        (0..g.ny)
            .map(|j| {
                let y = g.y0 + (j as f64 + 0.5) * g.h;
                let mut s = 0.0;
                for i in 0..nx {
                    let du = if g.u_active(i, j) { self.field.u_at(i, j) - c } else { 0.0 };
                    let v = 0.5 * (self.field.v_at(i, j) + self.field.v_at(i, j + 1));
                    s += du * du + v * v;
                }
                (y, (s / nx as f64).sqrt())
            })
            .collect()
    }

    fn pressure_deviation(&self, c: f64) -> Vec<(f64, f64)> {
        let g = &self.field.grid;
        (0..g.ny)
            .map(|j| {
                let y = g.y0 + (j as f64 + 0.5) * g.h;
                let (mut s, mut n) = (0.0, 0usize);
                for i in 0..g.nx {
                    if !g.is_solid(i, j) {
                        s += (self.field.p_at(i, j) - c).powi(2);
                        n += 1;
                    }
                }
                (y, (s / n.max(1) as f64).sqrt())
            })
            .collect()
    }

    fn above_window(&self) -> (f64, f64) {
        (0.75, self.slab.height_above - FAR_FIELD_OFFSET)
    }

    fn below_window(&self) -> (f64, f64) {
        (-(self.slab.rows_below as f64 - 1.0), -0.25)
    }
}

/// Least-squares fit of `log dev = a − rate·|y|` over samples inside
/// `window`, walking away from the interface and stopping at the noise floor.
pub fn fit_decay_samples(samples: &[(f64, f64)], window: (f64, f64)) -> Result<DecayFit> {
    let peak = samples.iter().fold(0.0f64, |m, s| m.max(s.1));
    let floor = NOISE_FLOOR * peak;
    let mut inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(y, _)| *y >= window.0 && *y <= window.1)
        .collect();
    // order by distance from the interface
    inside.sort_by(|a, b| a.0.abs().total_cmp(&b.0.abs()));
    let usable: Vec<(f64, f64)> = inside.into_iter().take_while(|(_, d)| *d > floor).collect();
    if usable.len() < MIN_DECAY_POINTS {
        return Err(Error::InsufficientDecayWindow {
            usable: usable.len(),
            required: MIN_DECAY_POINTS,
            window,
        });
    }
    let n = usable.len() as f64;
    let xs: Vec<f64> = usable.iter().map(|(y, _)| y.abs()).collect();
    let ys: Vec<f64> = usable.iter().map(|(_, d)| d.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - icpt - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(0.0, f64::max);
    let (a, b) = if usable[0].0 < 0.0 { (-hi, -lo) } else { (lo, hi) };
    Ok(DecayFit {
        rate: -slope,
        residual,
        points: usable.len(),
        window: (a, b),
    })
}

/// Exponential decay of the velocity deviation from its far-field limit
/// (above) or from zero (below).
pub fn fit_decay(result: &BoundaryLayerResult, side: Side) -> Result<DecayFit> {
    match side {
        Side::Above => fit_decay_samples(
            &result.velocity_deviation(result.constants.far_velocity),
            result.above_window(),
        ),
        Side::Below => fit_decay_samples(&result.velocity_deviation(0.0), result.below_window()),
    }
}

/// Exponential decay of the pressure deviation above S.
pub fn fit_pressure_decay(result: &BoundaryLayerResult) -> Result<DecayFit> {
    fit_decay_samples(
        &result.pressure_deviation(result.constants.far_pressure),
        result.above_window(),
    )
}

fn bottom_pin(slab: &BLSlab) -> Result<Gauge> {
    let g = &slab.grid;
    (0..g.nx)
        .find(|&i| !g.is_solid(i, 0))
        .map(|i| Gauge::Pin { i, j: 0 })
        .ok_or_else(|| Error::SingularSystem("bottom slab row has no fluid".into()))
}

fn extract(slab: &BLSlab, field: &StaggeredField) -> LayerConstants {
    let g = &*field.grid;
    let h = g.h;
    let js = slab.interface_row();
    let far_row = g.ny - (FAR_FIELD_OFFSET / h).round() as usize;
    let (f1, f2, f3) = (field.row_mean_u(js), field.row_mean_u(js + 1), field.row_mean_u(js + 2));
    LayerConstants {
        far_velocity: field.row_mean_u(far_row),
        far_pressure: field.row_mean_p(far_row),
        trace_mean: 0.5 * (field.row_mean_u(js - 1) + f1),
        trace_upper: (15.0 * f1 - 10.0 * f2 + 3.0 * f3) / 8.0,
        shear_upper: (-2.0 * f1 + 3.0 * f2 - f3) / h,
        pressure_interface: 0.5 * (field.row_mean_p(js - 1) + field.row_mean_p(js)),
        dirichlet_energy: dirichlet_energy(field),
    }
}

/// First layer with stress jump `sigma` (unity for the cell problem).
pub fn solve_first_layer_with_jump(slab: &BLSlab, sigma: f64) -> Result<BoundaryLayerResult> {
    let prob = SaddleProblem::new(slab.grid.clone(), 1.0)
        .with_jump(slab.interface_row(), sigma)
        .with_gauge(bottom_pin(slab)?);
    let (field, stats) = solve_stokes(&prob)?;
    Ok(BoundaryLayerResult {
        layer: Layer::First,
        constants: extract(slab, &field),
        slab: slab.clone(),
        field,
        stats,
    })
}

pub fn solve_first_layer(slab: &BLSlab) -> Result<BoundaryLayerResult> {
    solve_first_layer_with_jump(slab, 1.0)
}

/// Convective forcing `(β·∇)β` of the second layer.
pub fn second_layer_forcing(first: &BoundaryLayerResult) -> Result<StaggeredField> {
    convection(&first.field, &first.field)
}

pub fn solve_second_layer(slab: &BLSlab, first: &BoundaryLayerResult) -> Result<BoundaryLayerResult> {
    if first.layer != Layer::First || *first.field.grid != *slab.grid {
        return Err(Error::GridMismatch("second layer needs the first layer on the same slab".into()));
    }
    let forcing = second_layer_forcing(first)?;
    let prob = SaddleProblem::new(slab.grid.clone(), 1.0)
        .with_force_field(&forcing)?
        .with_gauge(bottom_pin(slab)?);
    let (field, stats) = solve_stokes(&prob)?;
    Ok(BoundaryLayerResult {
        layer: Layer::Second,
        constants: extract(slab, &field),
        slab: slab.clone(),
        field,
        stats,
    })
}

/// Both layers on one slab.
#[derive(Debug, Clone)]
pub struct CellProblems {
    pub first: Arc<BoundaryLayerResult>,
    pub second: Arc<BoundaryLayerResult>,
}

pub fn solve_cell_problems(slab: &BLSlab) -> Result<CellProblems> {
    let first = solve_first_layer(slab)?;
    let second = solve_second_layer(slab, &first)?;
    Ok(CellProblems {
        first: Arc::new(first),
        second: Arc::new(second),
    })
}

/// Constants of both layers as written to the constants file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellConstants {
    pub shape: InclusionShape,
    pub cells_per_period: usize,
    pub rows_below: usize,
    pub height_above: f64,
    pub c1: f64,
    pub c1_trace: f64,
    pub c_omega: f64,
    pub c_omega_interface: f64,
    pub c11: f64,
    pub c_pi1: f64,
    /// ⟨β₁^{1}|_S⟩
    pub beta1_trace: f64,
    /// ⟨∂β₁^{1}/∂y₂|_S⟩
    pub beta1_shear: f64,
    pub first_layer_energy: f64,
    pub decay_above: Option<f64>,
    pub decay_below: Option<f64>,
    pub decay_pressure_above: Option<f64>,
    pub decay_second_above: Option<f64>,
}

impl CellConstants {
    pub fn from_layers(cells: &CellProblems) -> Self {
        let (a, b) = (&cells.first, &cells.second);
        let slab = &a.slab;
        Self {
            shape: slab.cell.shape,
            cells_per_period: slab.cells_per_period,
            rows_below: slab.rows_below,
            height_above: slab.height_above,
            c1: a.constants.far_velocity,
            c1_trace: a.constants.trace_mean,
            c_omega: a.constants.far_pressure,
            c_omega_interface: a.constants.pressure_interface,
            c11: b.constants.far_velocity,
            c_pi1: b.constants.far_pressure,
            beta1_trace: b.constants.trace_upper,
            beta1_shear: b.constants.shear_upper,
            first_layer_energy: a.constants.dirichlet_energy,
            decay_above: fit_decay(a, Side::Above).ok().map(|f| f.rate),
            decay_below: fit_decay(a, Side::Below).ok().map(|f| f.rate),
            decay_pressure_above: fit_pressure_decay(a).ok().map(|f| f.rate),
            decay_second_above: fit_decay(b, Side::Above).ok().map(|f| f.rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationReport {
    pub base: CellConstants,
    /// Constants with the height above doubled.
    pub tall: CellConstants,
    /// Constants with the rows below doubled.
    pub deep: CellConstants,
    /// Relative shifts of (C1, Cω, C11) when the height above is doubled.
    pub shift_height: [f64; 3],
    /// Relative shifts of (C1, Cω, C11) when the rows below are doubled.
    pub shift_rows: [f64; 3],
}

impl TruncationReport {
    pub fn max_shift(&self) -> f64 {
        self.shift_height
            .iter()
            .chain(&self.shift_rows)
            .fold(0.0, |m, s| m.max(*s))
    }
}

fn rel_shift(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn shifts(a: &CellConstants, b: &CellConstants) -> [f64; 3] {
    [
        rel_shift(a.c1, b.c1),
        rel_shift(a.c_omega, b.c_omega),
        rel_shift(a.c11, b.c11),
    ]
}

/// Re-solves both layers with doubled height above and with doubled rows
/// below. Fails with `TruncationSuspect` if C¹ᵇˡ moves by more than
/// [`TRUNCATION_TOL`].
pub fn truncation_study(
    cell: &UnitCell,
    rows_below: usize,
    height_above: f64,
    cells_per_period: usize,
) -> Result<TruncationReport> {
    let solve = |rows: usize, height: f64| -> Result<CellConstants> {
        let slab = build_bl_slab(cell, rows, height, cells_per_period)?;
        Ok(CellConstants::from_layers(&solve_cell_problems(&slab)?))
    };
    let base = solve(rows_below, height_above)?;
    let tall = solve(rows_below, 2.0 * height_above)?;
    let deep = solve(2 * rows_below, height_above)?;
    let report = TruncationReport {
        shift_height: shifts(&base, &tall),
        shift_rows: shifts(&base, &deep),
        base,
        tall,
        deep,
    };
    let c1_shift = report.shift_height[0].max(report.shift_rows[0]);
    if c1_shift > TRUNCATION_TOL {
        return Err(Error::TruncationSuspect {
            relative_shift: c1_shift,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_pure_exponential() {
        let s: Vec<(f64, f64)> = (0..100).map(|k| {
            let y = k as f64 * 0.03;
            (y, 3.0 * (-6.0 * y).exp())
        }).collect();
        let f = fit_decay_samples(&s, (0.75, 2.5)).unwrap();
        assert!((f.rate - 6.0).abs() < 1e-10);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn fit_reports_short_window() {
        let s: Vec<(f64, f64)> = (0..100).map(|k| {
            let y = k as f64 * 0.03;
            (y, if y < 1.0 { (-6.0 * y).exp() } else { 0.0 })
        }).collect();
        assert!(matches!(
            fit_decay_samples(&s, (0.75, 2.5)),
            Err(Error::InsufficientDecayWindow { .. })
        ));
    }
}
