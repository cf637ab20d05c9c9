//! Degree-of-freedom numbering and neighbor classification on a masked MAC
//! grid. The same classification drives the viscous stencil, the convective
//! fluxes and the discrete gradient norm, so that `h² uᵀAu` is exactly the
//! discrete Dirichlet energy.

use crate::geometry::{MacGrid, Wall};

pub(crate) const NONE: usize = usize::MAX;

/// What sits across one side of a velocity control volume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Link {
    /// Another unknown of the same component.
    Dof(usize),
    /// Zero-velocity wall halfway to the neighbor node (ghost = −value).
    Reflect,
    /// The neighbor node itself lies on a wall (value 0 at distance h).
    Node,
    /// Zero tangential stress (ghost = value).
    Free,
}

impl Link {
    /// Contribution to the diagonal of the 5-point Laplacian (in units 1/h²).
    #[inline]
    pub(crate) fn weight(self) -> f64 {
        match self {
            Link::Dof(_) | Link::Node => 1.0,
            Link::Reflect => 2.0,
            Link::Free => 0.0,
        }
    }
}

/// Neighbor order used in all stencils.
pub(crate) const W: usize = 0;
pub(crate) const E: usize = 1;
pub(crate) const S: usize = 2;
pub(crate) const N: usize = 3;

#[derive(Debug, Clone)]
pub struct Layout {
    pub(crate) u_dof: Vec<usize>,
    pub(crate) v_dof: Vec<usize>,
    pub(crate) p_dof: Vec<usize>,
    pub(crate) u_at: Vec<(usize, usize)>,
    pub(crate) v_at: Vec<(usize, usize)>,
    pub(crate) p_at: Vec<(usize, usize)>,
    pub(crate) u_links: Vec<[Link; 4]>,
    pub(crate) v_links: Vec<[Link; 4]>,
}

impl Layout {
    pub fn new(g: &MacGrid) -> Self {
        let (nx, ny) = (g.nx, g.ny);
        let mut u_dof = vec![NONE; nx * ny];
        let mut u_at = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if g.u_active(i, j) {
                    u_dof[j * nx + i] = u_at.len();
                    u_at.push((i, j));
                }
            }
        }
        let mut v_dof = vec![NONE; nx * (ny + 1)];
        let mut v_at = Vec::new();
        for j in 0..=ny {
            for i in 0..nx {
                if g.v_active(i, j) {
                    v_dof[j * nx + i] = v_at.len();
                    v_at.push((i, j));
                }
            }
        }
        let mut p_dof = vec![NONE; nx * ny];
        let mut p_at = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if !g.is_solid(i, j) {
                    p_dof[j * nx + i] = p_at.len();
                    p_at.push((i, j));
                }
            }
        }

        let wrap = |i: isize| i.rem_euclid(nx as isize) as usize;
        let u_links = u_at
            .iter()
            .map(|&(i, j)| {
                let x_link = |ii: usize| match u_dof[j * nx + ii] {
                    NONE => Link::Node,
                    d => Link::Dof(d),
                };
                let y_link = |jj: isize, wall: Wall| {
                    if jj < 0 || jj >= ny as isize {
                        return match wall {
                            Wall::NoSlip => Link::Reflect,
                            Wall::FreeSlip => Link::Free,
                        };
                    }
                    let jj = jj as usize;
                    match u_dof[jj * nx + i] {
                        NONE => {
                            let im = wrap(i as isize - 1);
                            if g.is_solid(im, jj) && g.is_solid(i, jj) {
                                Link::Reflect
                            } else {
                                Link::Node
                            }
                        }
                        d => Link::Dof(d),
                    }
                };
                [
                    x_link(wrap(i as isize - 1)),
                    x_link(wrap(i as isize + 1)),
                    y_link(j as isize - 1, g.bottom),
                    y_link(j as isize + 1, g.top),
                ]
            })
            .collect();

        let v_links = v_at
            .iter()
            .map(|&(i, j)| {
                let x_link = |ii: usize| match v_dof[j * nx + ii] {
                    NONE => {
                        if g.is_solid(ii, j - 1) && g.is_solid(ii, j) {
                            Link::Reflect
                        } else {
                            Link::Node
                        }
                    }
                    d => Link::Dof(d),
                };
                let y_link = |jj: usize| match v_dof[jj * nx + i] {
                    NONE => Link::Node,
                    d => Link::Dof(d),
                };
                [
                    x_link(wrap(i as isize - 1)),
                    x_link(wrap(i as isize + 1)),
                    y_link(j - 1),
                    y_link(j + 1),
                ]
            })
            .collect();

        Self {
            u_dof,
            v_dof,
            p_dof,
            u_at,
            v_at,
            p_at,
            u_links,
            v_links,
        }
    }

    pub fn n_u(&self) -> usize {
        self.u_at.len()
    }

    pub fn n_v(&self) -> usize {
        self.v_at.len()
    }

    pub fn n_p(&self) -> usize {
        self.p_at.len()
    }

    pub fn n_total(&self) -> usize {
        self.n_u() + self.n_v() + self.n_p()
    }

    /// Global unknown index of a v dof.
    #[inline]
    pub(crate) fn gv(&self, d: usize) -> usize {
        self.n_u() + d
    }

    /// Global unknown index of a pressure dof.
    #[inline]
    pub(crate) fn gp(&self, d: usize) -> usize {
        self.n_u() + self.n_v() + d
    }
}
