//! Stokes and Navier–Stokes solves on masked, x-periodic MAC grids.
//!
//! The full saddle-point system (velocity, pressure) is factored with a sparse
//! direct LU. Convection is handled by Picard iteration, with the
//! linearization `N(a)u` evaluated in divergence form with centered fluxes.

mod assemble;
mod layout;
mod ops;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::MacGrid;
use assemble::{convection_block, norm2, solve_refined, stokes_block, Coo, Factorizer};
pub use layout::Layout;
pub use ops::{
    convection, discrete_divergence, dirichlet_energy, max_abs_divergence, norms, Norms, Region,
};

/// Velocity and pressure on a MAC grid. Inactive faces and solid cells hold
/// zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct StaggeredField {
    pub grid: Arc<MacGrid>,
    /// `u[j * nx + i]`, left face of cell `(i, j)`.
    pub u: Vec<f64>,
    /// `v[j * nx + i]`, bottom face of cell `(i, j)`, `j` in `0..=ny`.
    pub v: Vec<f64>,
    /// `p[j * nx + i]`, cell center.
    pub p: Vec<f64>,
}

impl StaggeredField {
    pub fn zeros(grid: Arc<MacGrid>) -> Self {
        let (nx, ny) = (grid.nx, grid.ny);
        Self {
            u: vec![0.0; nx * ny],
            v: vec![0.0; nx * (ny + 1)],
            p: vec![0.0; nx * ny],
            grid,
        }
    }

    /// Samples velocity and pressure functions at the staggered positions.
    /// Inactive faces and solid cells are left at zero.
    pub fn from_fn(
        grid: Arc<MacGrid>,
        fu: impl Fn(f64, f64) -> f64,
        fv: impl Fn(f64, f64) -> f64,
        fp: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut f = Self::zeros(grid.clone());
        let g = &*grid;
        for j in 0..g.ny {
            for i in 0..g.nx {
                if g.u_active(i, j) {
                    let (x, y) = g.u_position(i, j);
                    f.u[j * g.nx + i] = fu(x, y);
                }
                if !g.is_solid(i, j) {
                    let (x, y) = g.cell_center(i, j);
                    f.p[j * g.nx + i] = fp(x, y);
                }
            }
        }
        for j in 0..=g.ny {
            for i in 0..g.nx {
                if g.v_active(i, j) {
                    let (x, y) = g.v_position(i, j);
                    f.v[j * g.nx + i] = fv(x, y);
                }
            }
        }
        f
    }

    #[inline]
    pub fn u_at(&self, i: usize, j: usize) -> f64 {
        self.u[j * self.grid.nx + i]
    }

    #[inline]
    pub fn v_at(&self, i: usize, j: usize) -> f64 {
        self.v[j * self.grid.nx + i]
    }

    #[inline]
    pub fn p_at(&self, i: usize, j: usize) -> f64 {
        self.p[j * self.grid.nx + i]
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch("fields live on different grids".into()))
        }
    }

    /// `self + s * other`, component-wise on all three arrays.
    pub fn axpy(&self, s: f64, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let add = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x + s * y).collect();
        Ok(Self {
            grid: self.grid.clone(),
            u: add(&self.u, &other.u),
            v: add(&self.v, &other.v),
            p: add(&self.p, &other.p),
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            u: self.u.iter().map(|x| s * x).collect(),
            v: self.v.iter().map(|x| s * x).collect(),
            p: self.p.iter().map(|x| s * x).collect(),
        }
    }

    pub fn max_abs_velocity(&self) -> f64 {
        self.u.iter().chain(&self.v).fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Period average of u along cell row `j`.
    pub fn row_mean_u(&self, j: usize) -> f64 {
        let nx = self.grid.nx;
        self.u[j * nx..(j + 1) * nx].iter().sum::<f64>() / nx as f64
    }

    /// Period average of v along face line `j`.
    pub fn row_mean_v(&self, j: usize) -> f64 {
        let nx = self.grid.nx;
        self.v[j * nx..(j + 1) * nx].iter().sum::<f64>() / nx as f64
    }

    /// Average pressure over the fluid cells of row `j`.
    pub fn row_mean_p(&self, j: usize) -> f64 {
        let g = &self.grid;
        let (mut s, mut n) = (0.0, 0usize);
        for i in 0..g.nx {
            if !g.is_solid(i, j) {
                s += self.p_at(i, j);
                n += 1;
            }
        }
        if n == 0 {
            0.0
        } else {
            s / n as f64
        }
    }

    pub(crate) fn to_vector(&self, layout: &Layout) -> Vec<f64> {
        let nx = self.grid.nx;
        let mut x = Vec::with_capacity(layout.n_total());
        x.extend(layout.u_at.iter().map(|&(i, j)| self.u[j * nx + i]));
        x.extend(layout.v_at.iter().map(|&(i, j)| self.v[j * nx + i]));
        x.extend(layout.p_at.iter().map(|&(i, j)| self.p[j * nx + i]));
        x
    }

    pub(crate) fn from_vector(grid: Arc<MacGrid>, layout: &Layout, x: &[f64]) -> Self {
        let nx = grid.nx;
        let mut f = Self::zeros(grid);
        for (k, &(i, j)) in layout.u_at.iter().enumerate() {
            f.u[j * nx + i] = x[k];
        }
        for (k, &(i, j)) in layout.v_at.iter().enumerate() {
            f.v[j * nx + i] = x[layout.gv(k)];
        }
        for (k, &(i, j)) in layout.p_at.iter().enumerate() {
            f.p[j * nx + i] = x[layout.gp(k)];
        }
        f
    }
}

/// Tangential-stress jump `[μ ∂u/∂y] = sigma` across face line `row`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressJump {
    pub row: usize,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    /// `p = 0` in the given cell.
    Pin { i: usize, j: usize },
    /// Zero mean over the fluid cells of rows `from..to`.
    ZeroMean { from: usize, to: usize },
}

#[derive(Debug, Clone)]
pub struct SaddleProblem {
    pub grid: Arc<MacGrid>,
    pub viscosity: f64,
    /// Volumetric forcing at u positions (`nx * ny`).
    pub force_u: Vec<f64>,
    /// Volumetric forcing at v positions (`nx * (ny + 1)`).
    pub force_v: Vec<f64>,
    pub jump: Option<StressJump>,
    pub convection: bool,
    pub gauge: Option<Gauge>,
}

impl SaddleProblem {
    pub fn new(grid: Arc<MacGrid>, viscosity: f64) -> Self {
        let (nx, ny) = (grid.nx, grid.ny);
        Self {
            grid,
            viscosity,
            force_u: vec![0.0; nx * ny],
            force_v: vec![0.0; nx * (ny + 1)],
            jump: None,
            convection: false,
            gauge: None,
        }
    }

    pub fn with_gauge(mut self, gauge: Gauge) -> Self {
        self.gauge = Some(gauge);
        self
    }

    pub fn with_jump(mut self, row: usize, sigma: f64) -> Self {
        self.jump = Some(StressJump { row, sigma });
        self
    }

    pub fn with_convection(mut self, on: bool) -> Self {
        self.convection = on;
        self
    }

    /// Constant horizontal forcing on all u rows `j >= from_row`.
    pub fn with_horizontal_force_above(mut self, from_row: usize, f: f64) -> Self {
        let nx = self.grid.nx;
        for j in from_row..self.grid.ny {
            for i in 0..nx {
                self.force_u[j * nx + i] = f;
            }
        }
        self
    }

    /// Forcing taken from the velocity part of a field on the same grid.
    pub fn with_force_field(mut self, f: &StaggeredField) -> Result<Self> {
        if *f.grid != *self.grid {
            return Err(Error::GridMismatch("forcing field grid".into()));
        }
        self.force_u = f.u.clone();
        self.force_v = f.v.clone();
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    /// Consecutive residual increases tolerated before giving up.
    pub growth_limit: usize,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
            damping: 1.0,
            growth_limit: 5,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub unknowns: usize,
    /// Relative residual of the last linear solve.
    pub linear_residual: f64,
    /// Relative residual of the full (nonlinear) discrete system.
    pub residual: f64,
    pub picard_iterations: usize,
    pub picard_history: Vec<f64>,
    pub divergence_max: f64,
}

const LINEAR_TARGET: f64 = 1e-12;
const LINEAR_ACCEPT: f64 = 1e-10;
const MIN_THETA: f64 = 1.0 / 64.0;

struct Prepared {
    layout: Layout,
    stokes: Coo,
    rhs: Vec<f64>,
    gauge: Gauge,
}

fn prepare(prob: &SaddleProblem) -> Result<Prepared> {
    let g = &*prob.grid;
    let gauge = prob
        .gauge
        .ok_or_else(|| Error::SingularSystem("no pressure gauge".into()))?;
    if !(prob.viscosity > 0.0) {
        return Err(Error::InvalidInput(format!("viscosity {} must be positive", prob.viscosity)));
    }
    if prob.force_u.len() != g.nx * g.ny || prob.force_v.len() != g.nx * (g.ny + 1) {
        return Err(Error::GridMismatch("forcing arrays".into()));
    }
    let layout = Layout::new(g);
    if layout.n_p() == 0 {
        return Err(Error::SingularSystem("no fluid cells".into()));
    }
    if !g.is_connected() {
        return Err(Error::SingularSystem("fluid region is disconnected".into()));
    }
    let pin_cell = match gauge {
        Gauge::Pin { i, j } => {
            if i >= g.nx || j >= g.ny || g.is_solid(i, j) {
                return Err(Error::InvalidInput(format!("pin cell ({i}, {j}) is not fluid")));
            }
            (i, j)
        }
        Gauge::ZeroMean { from, to } => (from..to.min(g.ny))
            .flat_map(|j| (0..g.nx).map(move |i| (i, j)))
            .find(|&(i, j)| !g.is_solid(i, j))
            .ok_or_else(|| Error::SingularSystem("gauge region has no fluid".into()))?,
    };
    let pinned = layout.p_dof[pin_cell.1 * g.nx + pin_cell.0];
    let stokes = stokes_block(&layout, g, prob.viscosity, pinned);

    let mut rhs = vec![0.0; layout.n_total()];
    for (k, &(i, j)) in layout.u_at.iter().enumerate() {
        rhs[k] = prob.force_u[j * g.nx + i];
        if let Some(jump) = prob.jump {
            if jump.row == 0 || jump.row >= g.ny {
                return Err(Error::InvalidInput(format!("jump row {} is not interior", jump.row)));
            }
            if j + 1 == jump.row || j == jump.row {
                rhs[k] -= 0.5 * jump.sigma / g.h;
            }
        }
    }
    for (k, &(i, j)) in layout.v_at.iter().enumerate() {
        rhs[layout.gv(k)] = prob.force_v[j * g.nx + i];
    }
    Ok(Prepared {
        layout,
        stokes,
        rhs,
        gauge,
    })
}

fn apply_gauge(field: &mut StaggeredField, gauge: Gauge) {
    if let Gauge::ZeroMean { from, to } = gauge {
        let g = field.grid.clone();
        let (mut s, mut n) = (0.0, 0usize);
        for j in from..to.min(g.ny) {
            for i in 0..g.nx {
                if !g.is_solid(i, j) {
                    s += field.p_at(i, j);
                    n += 1;
                }
            }
        }
        let mean = s / n.max(1) as f64;
        for j in 0..g.ny {
            for i in 0..g.nx {
                if !g.is_solid(i, j) {
                    field.p[j * g.nx + i] -= mean;
                }
            }
        }
    }
}

fn convection_of(prep: &Prepared, g: &MacGrid, field: &StaggeredField) -> Coo {
    convection_block(&prep.layout, g, &field.u, &field.v)
}

/// Relative residual `‖b − (S + N(x)) x‖ / ‖b‖`.
fn nonlinear_residual(prep: &Prepared, g: &MacGrid, x: &[f64], field: &StaggeredField) -> f64 {
    let bn = norm2(&prep.rhs);
    let mut ax = vec![0.0; x.len()];
    prep.stokes.mul_add(x, &mut ax);
    convection_of(prep, g, field).mul_add(x, &mut ax);
    let r: Vec<f64> = prep.rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
    if bn == 0.0 {
        norm2(&r)
    } else {
        norm2(&r) / bn
    }
}

/// Linear Stokes solve (convection ignored).
pub fn solve_stokes(prob: &SaddleProblem) -> Result<(StaggeredField, SolveStats)> {
    let prep = prepare(prob)?;
    let n = prep.layout.n_total();
    let fac = Factorizer::new(n, &prep.stokes.rows, &prep.stokes.cols)?;
    let lu = fac.factor(&prep.stokes.vals)?;
    let (x, rel) = solve_refined(&lu, &prep.stokes, &prep.rhs, LINEAR_TARGET)?;
    if rel > LINEAR_ACCEPT {
        return Err(Error::NonConvergence { residual: rel });
    }
    let mut field = StaggeredField::from_vector(prob.grid.clone(), &prep.layout, &x);
    apply_gauge(&mut field, prep.gauge);
    let stats = SolveStats {
        unknowns: n,
        linear_residual: rel,
        residual: rel,
        picard_iterations: 0,
        picard_history: Vec::new(),
        divergence_max: max_abs_divergence(&field),
    };
    Ok((field, stats))
}

/// Picard iteration for the stationary Navier–Stokes problem, started from
/// the Stokes solution.
pub fn solve_navier_stokes(
    prob: &SaddleProblem,
    opts: &PicardOptions,
) -> Result<(StaggeredField, SolveStats)> {
    if !(opts.damping > 0.0 && opts.damping <= 1.0) {
        return Err(Error::InvalidInput(format!("damping {} outside (0, 1]", opts.damping)));
    }
    let prep = prepare(prob)?;
    let g = &*prob.grid;
    let n = prep.layout.n_total();
    let mut stats = SolveStats {
        unknowns: n,
        ..Default::default()
    };
    if norm2(&prep.rhs) == 0.0 {
        stats.picard_iterations = 1;
        stats.picard_history.push(0.0);
        return Ok((StaggeredField::zeros(prob.grid.clone()), stats));
    }

    // Pattern = Stokes entries followed by the (value-dependent) convection
    // entries, whose positions never change.
    let zero_field = StaggeredField::zeros(prob.grid.clone());
    let conv0 = convection_of(&prep, g, &zero_field);
    let mut rows = prep.stokes.rows.clone();
    rows.extend_from_slice(&conv0.rows);
    let mut cols = prep.stokes.cols.clone();
    cols.extend_from_slice(&conv0.cols);
    let fac = Factorizer::new(n, &rows, &cols)?;
    let ns = prep.stokes.len();

    let mut system = Coo {
        rows,
        cols,
        vals: prep.stokes.vals.clone(),
    };
    system.vals.extend_from_slice(&conv0.vals);

    let lu = fac.factor(&system.vals)?;
    let (mut x, rel) = solve_refined(&lu, &system, &prep.rhs, LINEAR_TARGET)?;
    stats.linear_residual = rel;
    let mut field = StaggeredField::from_vector(prob.grid.clone(), &prep.layout, &x);
    let mut res = nonlinear_residual(&prep, g, &x, &field);
    stats.picard_history.push(res);

    let mut theta = opts.damping;
    let mut growth = 0usize;
    for it in 1..=opts.max_iter {
        if res <= opts.tol {
            stats.picard_iterations = it;
            stats.residual = res;
            apply_gauge(&mut field, prep.gauge);
            stats.divergence_max = max_abs_divergence(&field);
            return Ok((field, stats));
        }
        let conv = convection_of(&prep, g, &field);
        system.vals.truncate(ns);
        system.vals.extend_from_slice(&conv.vals);
        let lu = fac.factor(&system.vals)?;
        let (xhat, rel) = solve_refined(&lu, &system, &prep.rhs, LINEAR_TARGET)?;
        stats.linear_residual = rel;

        let step = |theta: f64| {
            let xt: Vec<f64> = x.iter().zip(&xhat).map(|(a, b)| a + theta * (b - a)).collect();
            let ft = StaggeredField::from_vector(prob.grid.clone(), &prep.layout, &xt);
            let rt = nonlinear_residual(&prep, g, &xt, &ft);
            (xt, ft, rt)
        };
        let (mut xt, mut ft, mut rt) = step(theta);
        while !(rt <= res) && theta > MIN_THETA {
            theta *= 0.5;
            (xt, ft, rt) = step(theta);
        }
        if !rt.is_finite() {
            return Err(Error::PicardDiverged {
                iterations: it,
                residual: rt,
            });
        }
        if rt > res {
            growth += 1;
            if growth >= opts.growth_limit {
                return Err(Error::PicardDiverged {
                    iterations: it,
                    residual: rt,
                });
            }
        } else {
            growth = 0;
            theta = (2.0 * theta).min(opts.damping);
        }
        x = xt;
        field = ft;
        res = rt;
        stats.picard_history.push(res);
    }
    if res <= opts.tol {
        stats.picard_iterations = opts.max_iter;
        stats.residual = res;
        apply_gauge(&mut field, prep.gauge);
        stats.divergence_max = max_abs_divergence(&field);
        return Ok((field, stats));
    }
    Err(Error::MaxIterExceeded {
        iterations: opts.max_iter,
        residual: res,
    })
}

/// Sums over all u equations of the viscous, pressure-gradient and
/// convective terms applied to `field`, in the units of the momentum
/// equation (per unit cell area).
pub(crate) fn x_momentum_parts(
    prob: &SaddleProblem,
    field: &StaggeredField,
    convection: bool,
) -> Result<(f64, f64, f64)> {
    let prep = prepare(prob)?;
    let g = &*prob.grid;
    if *field.grid != *g {
        return Err(Error::GridMismatch("field grid".into()));
    }
    let x = field.to_vector(&prep.layout);
    let n_u = prep.layout.n_u();
    let p0 = prep.layout.gp(0);
    let (mut visc, mut pres) = (0.0, 0.0);
    let s = &prep.stokes;
    for k in 0..s.len() {
        if s.rows[k] < n_u {
            let t = s.vals[k] * x[s.cols[k]];
            if s.cols[k] >= p0 {
                pres += t;
            } else {
                visc += t;
            }
        }
    }
    let mut conv = 0.0;
    if convection {
        let c = convection_of(&prep, g, field);
        for k in 0..c.len() {
            if c.rows[k] < n_u {
                conv += c.vals[k] * x[c.cols[k]];
            }
        }
    }
    Ok((visc, pres, conv))
}

/// Dispatches on the convection flag.
pub fn solve(prob: &SaddleProblem, opts: &PicardOptions) -> Result<(StaggeredField, SolveStats)> {
    if prob.convection {
        solve_navier_stokes(prob, opts)
    } else {
        solve_stokes(prob)
    }
}
