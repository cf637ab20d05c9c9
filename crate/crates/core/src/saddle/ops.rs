use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::assemble::convection_block;
use super::layout::{Layout, Link, E, N};
use super::StaggeredField;
use crate::error::{Error, Result};

/// Cell-centered discrete divergence; zero in solid cells.
pub fn discrete_divergence(f: &StaggeredField) -> Vec<f64> {
    let g = &*f.grid;
    let nx = g.nx;
    let mut d = vec![0.0; nx * g.ny];
    for j in 0..g.ny {
        for i in 0..nx {
            if g.is_solid(i, j) {
                continue;
            }
            let ip = (i + 1) % nx;
            d[j * nx + i] = (f.u[j * nx + ip] - f.u[j * nx + i] + f.v[(j + 1) * nx + i]
                - f.v[j * nx + i])
                / g.h;
        }
    }
    d
}

pub fn max_abs_divergence(f: &StaggeredField) -> f64 {
    discrete_divergence(f).iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Discrete convective term `(a·∇) b` in divergence form, as used by the
/// Navier–Stokes solver. The pressure part of the result is zero.
pub fn convection(a: &StaggeredField, b: &StaggeredField) -> Result<StaggeredField> {
    if *a.grid != *b.grid {
        return Err(Error::GridMismatch("convection operands".into()));
    }
    let layout = Layout::new(&a.grid);
    let m = convection_block(&layout, &a.grid, &a.u, &a.v);
    let x = b.to_vector(&layout);
    let mut y = vec![0.0; x.len()];
    m.mul_add(&x, &mut y);
    let mut out = StaggeredField::from_vector(a.grid.clone(), &layout, &y);
    out.p.iter_mut().for_each(|p| *p = 0.0);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// The whole fluid domain Ω^ε.
    Whole,
    /// Ω₂^ε, below the interface.
    Porous,
    /// Ω₁, above the interface.
    Fracture,
    /// The interface line Σ.
    Interface,
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "omega" | "whole" | "Ω" => Ok(Self::Whole),
            "omega2" | "porous" => Ok(Self::Porous),
            "omega1" | "fracture" => Ok(Self::Fracture),
            "sigma" | "interface" | "σ" => Ok(Self::Interface),
            _ => Err(Error::UnknownRegion(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Norms {
    /// L² norm of the velocity over the region.
    pub l2: f64,
    /// L² norm of the velocity gradient over the region.
    pub grad: f64,
    /// L² norm of the velocity trace on the interface.
    pub trace: f64,
}

/// Fraction of a quantity located at height `y` that belongs to `region`.
fn share(region: Region, y: f64, y_sigma: f64, tol: f64) -> f64 {
    match region {
        Region::Whole => 1.0,
        Region::Interface => 0.0,
        Region::Porous | Region::Fracture => {
            let above = if (y - y_sigma).abs() <= tol {
                0.5
            } else if y > y_sigma {
                1.0
            } else {
                0.0
            };
            if region == Region::Fracture {
                above
            } else {
                1.0 - above
            }
        }
    }
}

/// Squared gradient norm split by region; `y_sigma` is the split height.
fn gradient_sq(f: &StaggeredField, layout: &Layout, region: Region, y_sigma: f64) -> f64 {
    let g = &*f.grid;
    let nx = g.nx;
    let tol = 1e-9 * g.h;
    let mut total = 0.0;
    let link_sq = |own: f64, link: Link, other: &dyn Fn(usize) -> f64| match link {
        Link::Dof(b) => (own - other(b)).powi(2),
        Link::Node => own * own,
        Link::Reflect => 2.0 * own * own,
        Link::Free => 0.0,
    };
    let u_of = |b: usize| {
        let (i, j) = layout.u_at[b];
        f.u[j * nx + i]
    };
    let v_of = |b: usize| {
        let (i, j) = layout.v_at[b];
        f.v[j * nx + i]
    };
    for (k, &(i, j)) in layout.u_at.iter().enumerate() {
        let own = f.u[j * nx + i];
        let yc = g.y0 + (j as f64 + 0.5) * g.h;
        for (side, link) in layout.u_links[k].iter().enumerate() {
            // interior links are visited once, from the W/S end
            if matches!(link, Link::Dof(_)) && side != E && side != N {
                continue;
            }
            let y = match side {
                2 => g.face_y(j),
                3 => g.face_y(j + 1),
                _ => yc,
            };
            total += share(region, y, y_sigma, tol) * link_sq(own, *link, &u_of);
        }
    }
    for (k, &(i, j)) in layout.v_at.iter().enumerate() {
        let own = f.v[j * nx + i];
        let yf = g.face_y(j);
        for (side, link) in layout.v_links[k].iter().enumerate() {
            if matches!(link, Link::Dof(_)) && side != E && side != N {
                continue;
            }
            let y = match side {
                2 => yf - 0.5 * g.h,
                3 => yf + 0.5 * g.h,
                _ => yf,
            };
            total += share(region, y, y_sigma, tol) * link_sq(own, *link, &v_of);
        }
    }
    total * g.replicas as f64
}

/// Discrete ‖∇u‖² over the whole grid. Equals `h² uᵀAu` for the assembled
/// viscous operator with unit viscosity.
pub fn dirichlet_energy(f: &StaggeredField) -> f64 {
    let layout = Layout::new(&f.grid);
    gradient_sq(f, &layout, Region::Whole, f64::NAN)
}

/// Midpoint-quadrature norms of the velocity of `f` over `region`.
pub fn norms(f: &StaggeredField, region: Region) -> Result<Norms> {
    let g = &*f.grid;
    let nx = g.nx;
    let rep = g.replicas as f64;
    let y_sigma = match (region, g.interface_row) {
        (Region::Whole, _) => f64::NAN,
        (_, Some(row)) => g.face_y(row),
        (_, None) => {
            return Err(Error::InvalidInput("grid has no interface line".into()));
        }
    };
    let tol = 1e-9 * g.h;
    let layout = Layout::new(g);

    let mut l2 = 0.0;
    for j in 0..g.ny {
        let w = share(region, g.y0 + (j as f64 + 0.5) * g.h, y_sigma, tol);
        if w > 0.0 {
            l2 += w * f.u[j * nx..(j + 1) * nx].iter().map(|x| x * x).sum::<f64>();
        }
    }
    for j in 0..=g.ny {
        let w = share(region, g.face_y(j), y_sigma, tol);
        if w > 0.0 {
            l2 += w * f.v[j * nx..(j + 1) * nx].iter().map(|x| x * x).sum::<f64>();
        }
    }
    l2 *= g.h * g.h * rep;

    let grad = if region == Region::Interface {
        0.0
    } else {
        gradient_sq(f, &layout, region, y_sigma)
    };

    let trace = match g.interface_row {
        Some(js) if js > 0 && js < g.ny => {
            let mut s = 0.0;
            for i in 0..nx {
                let u = 0.5 * (f.u[(js - 1) * nx + i] + f.u[js * nx + i]);
                let v = f.v[js * nx + i];
                s += u * u + v * v;
            }
            s * g.h * rep
        }
        _ => 0.0,
    };
    let l2 = if region == Region::Interface { trace } else { l2 };
    Ok(Norms {
        l2: l2.sqrt(),
        grad: grad.sqrt(),
        trace: trace.sqrt(),
    })
}
