//! Resolved Navier–Stokes flow in the fracture/porous-medium domain.
//!
//! The forcing is independent of x₁ and the geometry is ε-periodic, so the
//! solution is ε-periodic as well. By default a single pore column is solved
//! and norms are scaled by the number of periods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridDomain;
use crate::saddle::{
    norms, solve, Gauge, Norms, PicardOptions, Region, SaddleProblem, SolveStats, StaggeredField,
};
use crate::scaling::ScalingParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DnsOptions {
    pub picard: PicardOptions,
    pub convection: bool,
    pub allow_out_of_hypothesis: bool,
    /// Solve all 1/ε periods instead of one pore column.
    pub full_width: bool,
}

impl Default for DnsOptions {
    fn default() -> Self {
        Self {
            picard: PicardOptions::default(),
            convection: true,
            allow_out_of_hypothesis: false,
            full_width: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DNSSolution {
    pub field: StaggeredField,
    pub params: ScalingParams,
    /// The domain the field lives on (a pore column unless full width).
    pub domain: GridDomain,
    pub stats: SolveStats,
    pub options: DnsOptions,
}

pub fn dns_problem(p: &ScalingParams, domain: &GridDomain, convection: bool) -> SaddleProblem {
    let g = domain.grid.clone();
    let ny = g.ny;
    SaddleProblem::new(g, p.viscosity())
        .with_horizontal_force_above(domain.porous_rows, p.force)
        .with_convection(convection)
        .with_gauge(Gauge::ZeroMean {
            from: domain.porous_rows,
            to: ny,
        })
}

pub fn run_dns(p: &ScalingParams, domain: &GridDomain, opts: &DnsOptions) -> Result<DNSSolution> {
    p.check_finite()?;
    if !opts.allow_out_of_hypothesis {
        p.require_hypotheses()?;
    }
    if (domain.epsilon - p.epsilon).abs() > 1e-12 * p.epsilon || domain.delta != p.delta {
        return Err(Error::GridMismatch(format!(
            "domain built for (epsilon {}, delta {}), parameters are ({}, {})",
            domain.epsilon, domain.delta, p.epsilon, p.delta
        )));
    }
    let domain = if opts.full_width || !domain.is_full_width() {
        domain.clone()
    } else {
        domain.period_column()
    };
    let prob = dns_problem(p, &domain, opts.convection);
    let (field, stats) = solve(&prob, &opts.picard)?;
    Ok(DNSSolution {
        field,
        params: *p,
        domain,
        stats,
        options: *opts,
    })
}

/// Interface samples, one entry per ε-period along Σ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterfaceTrace {
    /// Period averages of v₁ on Σ.
    pub slip: Vec<f64>,
    /// Period averages of ∂v₁/∂x₂ on Σ (fracture side).
    pub shear: Vec<f64>,
    pub slip_mean: f64,
    pub shear_mean: f64,
}

/// One-sided interface values from the three u rows above Σ, exact for
/// quadratic profiles.
pub fn trace_of_field(field: &StaggeredField, domain: &GridDomain) -> Result<InterfaceTrace> {
    let g = &*field.grid;
    if *g != *domain.grid {
        return Err(Error::GridMismatch("field and domain grids differ".into()));
    }
    let js = domain.porous_rows;
    if js + 3 > g.ny {
        return Err(Error::UnderResolvedFracture {
            rows: g.ny - js,
            required: 3,
        });
    }
    let cpp = domain.cells_per_period;
    let periods = g.nx / cpp;
    let mut slip = Vec::with_capacity(periods);
    let mut shear = Vec::with_capacity(periods);
    for k in 0..periods {
        let mean = |j: usize| (k * cpp..(k + 1) * cpp).map(|i| field.u_at(i, j)).sum::<f64>() / cpp as f64;
        let (f1, f2, f3) = (mean(js), mean(js + 1), mean(js + 2));
        slip.push((15.0 * f1 - 10.0 * f2 + 3.0 * f3) / 8.0);
        shear.push((-2.0 * f1 + 3.0 * f2 - f3) / g.h);
    }
    let n = periods as f64;
    Ok(InterfaceTrace {
        slip_mean: slip.iter().sum::<f64>() / n,
        shear_mean: shear.iter().sum::<f64>() / n,
        slip,
        shear,
    })
}

pub fn interface_trace(sol: &DNSSolution) -> Result<InterfaceTrace> {
    trace_of_field(&sol.field, &sol.domain)
}

impl DNSSolution {
    /// Mean of v₁ over the fracture.
    pub fn fracture_mean_velocity(&self) -> f64 {
        let g = &self.field.grid;
        let rows = self.domain.porous_rows..g.ny;
        let n = rows.len() as f64;
        rows.map(|j| self.field.row_mean_u(j)).sum::<f64>() / n
    }

    pub fn norms(&self, region: Region) -> Result<Norms> {
        norms(&self.field, region)
    }

    /// Mean pressure over the fracture fluid cells.
    pub fn fracture_mean_pressure(&self) -> f64 {
        let g = &self.field.grid;
        let rows = self.domain.porous_rows..g.ny;
        let n = rows.len() as f64;
        rows.map(|j| self.field.row_mean_p(j)).sum::<f64>() / n
    }
}

/// Integral of the x-momentum equation over the whole domain, split by
/// mechanism. Interior viscous fluxes cancel in pairs; what remains is
/// friction on walls and inclusions, form drag and convective flux through
/// solid faces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumBudget {
    pub forcing: f64,
    pub viscous: f64,
    pub pressure: f64,
    pub convective: f64,
}

impl MomentumBudget {
    pub fn imbalance(&self) -> f64 {
        self.forcing - self.viscous - self.pressure - self.convective
    }
}

pub fn momentum_budget(sol: &DNSSolution) -> Result<MomentumBudget> {
    let g = &*sol.field.grid;
    let prob = dns_problem(&sol.params, &sol.domain, false);
    let residual_parts = crate::saddle::x_momentum_parts(&prob, &sol.field, sol.options.convection)?;
    let area = g.h * g.h * g.replicas as f64;
    let forcing: f64 = (sol.domain.porous_rows..g.ny)
        .map(|j| (0..g.nx).filter(|&i| g.u_active(i, j)).count() as f64)
        .sum::<f64>()
        * sol.params.force
        * area;
    Ok(MomentumBudget {
        forcing,
        viscous: residual_parts.0 * area,
        pressure: residual_parts.1 * area,
        convective: residual_parts.2 * area,
    })
}
