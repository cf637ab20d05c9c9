//! Closed-form reference problems for the saddle solver.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{MacGrid, Wall};
use crate::saddle::{solve_stokes, Gauge, SaddleProblem, StaggeredField};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRun {
    pub cells: usize,
    /// Maximum pointwise velocity error.
    pub max_error: f64,
    pub residual: f64,
}

/// Two no-slip walls at y = 0 and 1 with a unit tangential-stress jump at
/// y = 1/2; the exact profile is −y/2 below and −(1 − y)/2 above, which the
/// scheme reproduces up to round-off. `n` must be even.
pub fn two_layer_strip(n: usize) -> Result<ReferenceRun> {
    let g = Arc::new(
        MacGrid::channel(4, n, 1.0 / n as f64, 0.0, 0.0).with_walls(Wall::NoSlip, Wall::NoSlip),
    );
    let prob = SaddleProblem::new(g.clone(), 1.0)
        .with_jump(n / 2, 1.0)
        .with_gauge(Gauge::Pin { i: 0, j: 0 });
    let (f, stats) = solve_stokes(&prob)?;
    let exact = StaggeredField::from_fn(
        g,
        |_, y| if y < 0.5 { -0.5 * y } else { -0.5 * (1.0 - y) },
        |_, _| 0.0,
        |_, _| 0.0,
    );
    Ok(ReferenceRun {
        cells: n,
        max_error: f.axpy(-1.0, &exact)?.max_abs_velocity(),
        residual: stats.linear_residual,
    })
}

/// Stream function ψ = sin(2πx) y²(1 − y)², pressure cos(2πx) cos(πy),
/// unit viscosity, on the periodic unit channel.
fn manufactured_parts(y: f64) -> [f64; 4] {
    [
        y * y * (1.0 - y) * (1.0 - y),
        2.0 * y - 6.0 * y * y + 4.0 * y * y * y,
        2.0 - 12.0 * y + 12.0 * y * y,
        -12.0 + 24.0 * y,
    ]
}

pub fn manufactured_stokes(n: usize) -> Result<ReferenceRun> {
    let g = Arc::new(MacGrid::channel(n, n, 1.0 / n as f64, 0.0, 0.0));
    let k = 2.0 * PI;
    let force = StaggeredField::from_fn(
        g.clone(),
        |x, y| {
            let [_, d1, _, d3] = manufactured_parts(y);
            -(k * x).sin() * (d3 - k * k * d1) - k * (k * x).sin() * (PI * y).cos()
        },
        |x, y| {
            let [s, _, d2, _] = manufactured_parts(y);
            k * (k * x).cos() * (d2 - k * k * s) - PI * (k * x).cos() * (PI * y).sin()
        },
        |_, _| 0.0,
    );
    let prob = SaddleProblem::new(g.clone(), 1.0)
        .with_force_field(&force)?
        .with_gauge(Gauge::Pin { i: 0, j: 0 });
    let (f, stats) = solve_stokes(&prob)?;
    let exact = StaggeredField::from_fn(
        g,
        |x, y| (k * x).sin() * manufactured_parts(y)[1],
        |x, y| -k * (k * x).cos() * manufactured_parts(y)[0],
        |_, _| 0.0,
    );
    Ok(ReferenceRun {
        cells: n,
        max_error: f.axpy(-1.0, &exact)?.max_abs_velocity(),
        residual: stats.linear_residual,
    })
}

/// Observed orders between consecutive runs.
pub fn observed_orders(runs: &[ReferenceRun]) -> Vec<f64> {
    runs.windows(2)
        .map(|w| (w[0].max_error / w[1].max_error).ln() / (w[1].cells as f64 / w[0].cells as f64).ln())
        .collect()
}
