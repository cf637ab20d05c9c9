//! Periodic unit cell, the ε-scaled fracture/porous domain and the truncated
//! boundary-layer slab, all discretized on uniform staggered grids with a
//! stair-case solid mask (a cell is solid when its center lies in the
//! inclusion).

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible distance between the inclusion and the cell boundary.
pub const MIN_MARGIN: f64 = 0.02;

/// Resolution used for the connectivity check in [`UnitCell::new`].
const CONNECTIVITY_CHECK_CELLS: usize = 64;

/// Minimum number of grid rows across the fracture.
pub const MIN_FRACTURE_ROWS: usize = 8;

pub const MIN_DNS_CELLS_PER_PERIOD: usize = 16;
pub const MIN_SLAB_CELLS_PER_PERIOD: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InclusionShape {
    /// Disc centered at (1/2, 1/2).
    Disc { radius: f64 },
    /// `|ξ/a|^p + |ζ/b|^p <= 1` in coordinates (ξ, ζ) rotated by `rotation`
    /// radians about (1/2, 1/2). A rotation that is not a multiple of π/2
    /// breaks the mirror symmetry about y₁ = 1/2.
    Superellipse {
        half_width: f64,
        half_height: f64,
        exponent: f64,
        #[serde(default)]
        rotation: f64,
    },
}

impl InclusionShape {
    pub fn disc(radius: f64) -> Self {
        Self::Disc { radius }
    }

    /// Negative inside the solid, positive in the fluid. Exact signed distance
    /// for the disc; an implicit function with the same sign for superellipses.
    pub fn level_set(&self, y1: f64, y2: f64) -> f64 {
        let (dx, dy) = (y1 - 0.5, y2 - 0.5);
        match *self {
            Self::Disc { radius } => dx.hypot(dy) - radius,
            Self::Superellipse {
                half_width,
                half_height,
                exponent,
                rotation,
            } => {
                let (sn, cs) = rotation.sin_cos();
                let (xi, zeta) = (cs * dx + sn * dy, -sn * dx + cs * dy);
                let s = (xi / half_width).abs().powf(exponent)
                    + (zeta / half_height).abs().powf(exponent);
                s.powf(1.0 / exponent) - 1.0
            }
        }
    }

    /// Distance between the inclusion and the boundary of the unit square.
    pub fn margin(&self) -> f64 {
        match *self {
            Self::Disc { radius } => 0.5 - radius,
            Self::Superellipse {
                half_width,
                half_height,
                exponent,
                rotation,
            } => {
                if rotation == 0.0 {
                    return 0.5 - half_width.max(half_height);
                }
                // extent of the rotated boundary, sampled densely
                let (sn, cs) = rotation.sin_cos();
                let mut extent = 0.0f64;
                let n = 8192;
                for k in 0..n {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                    let (st, ct) = t.sin_cos();
                    let xi = half_width * ct.signum() * ct.abs().powf(2.0 / exponent);
                    let zeta = half_height * st.signum() * st.abs().powf(2.0 / exponent);
                    let x = cs * xi - sn * zeta;
                    let y = sn * xi + cs * zeta;
                    extent = extent.max(x.abs()).max(y.abs());
                }
                0.5 - extent
            }
        }
    }

    fn is_degenerate(&self) -> bool {
        match *self {
            Self::Disc { radius } => !(radius > 0.0),
            Self::Superellipse {
                half_width,
                half_height,
                exponent,
                ..
            } => !(half_width > 0.0 && half_height > 0.0 && exponent >= 2.0),
        }
    }

    /// Exact solid area of the inclusion.
    pub fn area(&self) -> f64 {
        match *self {
            Self::Disc { radius } => std::f64::consts::PI * radius * radius,
            Self::Superellipse {
                half_width,
                half_height,
                exponent,
                ..
            } => {
                // 4ab Γ(1+1/p)² / Γ(1+2/p)
                let g = |x: f64| gamma_fn(x);
                4.0 * half_width * half_height * g(1.0 + 1.0 / exponent).powi(2)
                    / g(1.0 + 2.0 / exponent)
            }
        }
    }
}

// Lanczos approximation, adequate for the superellipse area formula.
fn gamma_fn(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_fn(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// The periodic cell Y = (0,1)² with a strictly interior solid inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCell {
    pub shape: InclusionShape,
}

impl UnitCell {
    pub fn new(shape: InclusionShape) -> Result<Self> {
        let margin = shape.margin();
        if shape.is_degenerate() || margin < MIN_MARGIN {
            return Err(Error::ShapeTouchesBoundary {
                margin,
                min_margin: MIN_MARGIN,
            });
        }
        let cell = Self { shape };
        cell.check_connectivity(CONNECTIVITY_CHECK_CELLS)?;
        Ok(cell)
    }

    pub fn disc(radius: f64) -> Result<Self> {
        Self::new(InclusionShape::disc(radius))
    }

    pub fn is_solid(&self, y1: f64, y2: f64) -> bool {
        self.shape.level_set(y1, y2) <= 0.0
    }

    /// Exact fluid volume fraction |Y_F|.
    pub fn fluid_fraction(&self) -> f64 {
        1.0 - self.shape.area()
    }

    /// Stair-case mask of one cell, row-major with `mask[b * n + a]` for the
    /// cell whose center is ((a+1/2)/n, (b+1/2)/n).
    pub fn mask(&self, cells_per_period: usize) -> Vec<bool> {
        let n = cells_per_period;
        let h = 1.0 / n as f64;
        let mut mask = vec![false; n * n];
        for b in 0..n {
            for a in 0..n {
                mask[b * n + a] = self.is_solid((a as f64 + 0.5) * h, (b as f64 + 0.5) * h);
            }
        }
        mask
    }

    /// Minimum of the level set over sample points on ∂Y.
    pub fn boundary_clearance(&self, samples_per_side: usize) -> f64 {
        let mut min = f64::INFINITY;
        for k in 0..=samples_per_side {
            let t = k as f64 / samples_per_side as f64;
            for (y1, y2) in [(t, 0.0), (t, 1.0), (0.0, t), (1.0, t)] {
                min = min.min(self.shape.level_set(y1, y2));
            }
        }
        min
    }

    pub fn check_connectivity(&self, cells_per_period: usize) -> Result<()> {
        let n = cells_per_period;
        let mask = self.mask(n);
        if mask_is_connected(&mask, n, n, false) {
            Ok(())
        } else {
            Err(Error::DisconnectedFluid { cells_per_period: n })
        }
    }
}

/// 4-connected flood fill over fluid cells; `periodic_x` wraps columns.
fn mask_is_connected(solid: &[bool], nx: usize, ny: usize, periodic_x: bool) -> bool {
    let Some(start) = solid.iter().position(|s| !s) else {
        return false;
    };
    let mut seen = vec![false; solid.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    let mut count = 1;
    while let Some(k) = queue.pop_front() {
        let (i, j) = (k % nx, k / nx);
        let mut push = |ii: usize, jj: usize| {
            let kk = jj * nx + ii;
            if !solid[kk] && !seen[kk] {
                seen[kk] = true;
                count += 1;
                queue.push_back(kk);
            }
        };
        if i + 1 < nx {
            push(i + 1, j);
        } else if periodic_x {
            push(0, j);
        }
        if i > 0 {
            push(i - 1, j);
        } else if periodic_x {
            push(nx - 1, j);
        }
        if j + 1 < ny {
            push(i, j + 1);
        }
        if j > 0 {
            push(i, j - 1);
        }
    }
    count == solid.iter().filter(|s| !**s).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    NoSlip,
    /// Zero tangential stress, zero normal velocity.
    FreeSlip,
}

/// Uniform staggered (MAC) grid over `[x0, x0 + nx h] × [y0, y0 + ny h]`,
/// periodic in x, with walls at the bottom and top face lines.
///
/// Storage conventions used throughout the crate:
/// * cell `(i, j)` has center `(x0 + (i+1/2)h, y0 + (j+1/2)h)`;
/// * `u(i, j)` lives on the left face of cell `(i, j)`, `0 <= i < nx`;
/// * `v(i, j)` lives on the bottom face of cell `(i, j)`, `0 <= j <= ny`.
#[derive(Debug, Clone, PartialEq)]
pub struct MacGrid {
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
    pub x0: f64,
    pub y0: f64,
    solid: Vec<bool>,
    pub bottom: Wall,
    pub top: Wall,
    /// Face-line index of the interface Σ (or S), if the grid has one.
    pub interface_row: Option<usize>,
    /// Number of identical periodic copies this grid stands for in x; norms
    /// are scaled accordingly.
    pub replicas: usize,
}

impl MacGrid {
    pub fn new(nx: usize, ny: usize, h: f64, x0: f64, y0: f64, solid: Vec<bool>) -> Self {
        assert_eq!(solid.len(), nx * ny, "mask size");
        Self {
            nx,
            ny,
            h,
            x0,
            y0,
            solid,
            bottom: Wall::NoSlip,
            top: Wall::NoSlip,
            interface_row: None,
            replicas: 1,
        }
    }

    /// All-fluid periodic channel.
    pub fn channel(nx: usize, ny: usize, h: f64, x0: f64, y0: f64) -> Self {
        Self::new(nx, ny, h, x0, y0, vec![false; nx * ny])
    }

    pub fn with_walls(mut self, bottom: Wall, top: Wall) -> Self {
        self.bottom = bottom;
        self.top = top;
        self
    }

    pub fn with_interface(mut self, row: usize) -> Self {
        self.interface_row = Some(row);
        self
    }

    pub fn with_replicas(mut self, replicas: usize) -> Self {
        self.replicas = replicas;
        self
    }

    pub fn width(&self) -> f64 {
        self.nx as f64 * self.h
    }

    pub fn height(&self) -> f64 {
        self.ny as f64 * self.h
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.nx as isize) as usize
    }

    #[inline]
    pub fn is_solid(&self, i: usize, j: usize) -> bool {
        self.solid[j * self.nx + i]
    }

    pub fn solid_mask(&self) -> &[bool] {
        &self.solid
    }

    pub fn solid_count(&self) -> usize {
        self.solid.iter().filter(|s| **s).count()
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (
            self.x0 + (i as f64 + 0.5) * self.h,
            self.y0 + (j as f64 + 0.5) * self.h,
        )
    }

    pub fn u_position(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + i as f64 * self.h, self.y0 + (j as f64 + 0.5) * self.h)
    }

    pub fn v_position(&self, i: usize, j: usize) -> (f64, f64) {
        (self.x0 + (i as f64 + 0.5) * self.h, self.y0 + j as f64 * self.h)
    }

    /// y-coordinate of face line `row`.
    pub fn face_y(&self, row: usize) -> f64 {
        self.y0 + row as f64 * self.h
    }

    /// A u face carries an unknown when both adjacent cells are fluid.
    #[inline]
    pub fn u_active(&self, i: usize, j: usize) -> bool {
        let im = if i == 0 { self.nx - 1 } else { i - 1 };
        !self.is_solid(im, j) && !self.is_solid(i, j)
    }

    /// A v face carries an unknown when it is interior and both adjacent cells
    /// are fluid.
    #[inline]
    pub fn v_active(&self, i: usize, j: usize) -> bool {
        j > 0 && j < self.ny && !self.is_solid(i, j - 1) && !self.is_solid(i, j)
    }

    pub fn is_connected(&self) -> bool {
        mask_is_connected(&self.solid, self.nx, self.ny, true)
    }

    /// Whether every fluid cell can be reached from the given fluid cell.
    pub fn reachable_from(&self, i: usize, j: usize) -> bool {
        !self.is_solid(i, j) && self.is_connected()
    }
}

/// Discretized Ω = (0,1) × (−1, ε^δ) with ε-periodic inclusions in the porous
/// part and an open fracture strip above Σ = {x₂ = 0}.
#[derive(Debug, Clone)]
pub struct GridDomain {
    pub grid: Arc<MacGrid>,
    pub cell: UnitCell,
    pub epsilon: f64,
    /// 1/ε.
    pub periods: usize,
    pub delta: f64,
    pub cells_per_period: usize,
    /// ε^δ before snapping.
    pub fracture_height_exact: f64,
    /// Fracture height snapped to a multiple of h; used in every formula.
    pub fracture_height: f64,
    pub fracture_rows: usize,
    pub porous_rows: usize,
}

impl GridDomain {
    pub fn h(&self) -> f64 {
        self.grid.h
    }

    /// Face-line index of Σ.
    pub fn interface_row(&self) -> usize {
        self.porous_rows
    }

    pub fn is_full_width(&self) -> bool {
        self.grid.replicas == 1
    }

    /// The same domain restricted to a single pore period `(0, ε)` in x₁, to
    /// be read as `1/ε` periodic copies.
    pub fn period_column(&self) -> GridDomain {
        let n = self.cells_per_period;
        let g = &self.grid;
        let mut solid = Vec::with_capacity(n * g.ny);
        for j in 0..g.ny {
            for i in 0..n {
                solid.push(g.is_solid(i, j));
            }
        }
        let grid = MacGrid::new(n, g.ny, g.h, 0.0, g.y0, solid)
            .with_walls(g.bottom, g.top)
            .with_interface(self.porous_rows)
            .with_replicas(self.periods);
        GridDomain {
            grid: Arc::new(grid),
            ..self.clone()
        }
    }
}

/// Number of periods `n = 1/ε`; fails unless `1/ε` is an integer.
pub fn periods_for(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::GridMismatch(format!("epsilon {epsilon} outside (0, 1]")));
    }
    let n = (1.0 / epsilon).round();
    if (n * epsilon - 1.0).abs() > 1e-9 {
        return Err(Error::GridMismatch(format!("1/epsilon = {} is not an integer", 1.0 / epsilon)));
    }
    Ok(n as usize)
}

pub fn build_grid_domain(
    cell: &UnitCell,
    epsilon: f64,
    delta: f64,
    cells_per_period: usize,
) -> Result<GridDomain> {
    if cells_per_period < MIN_DNS_CELLS_PER_PERIOD {
        return Err(Error::InvalidInput(format!(
            "cells_per_period = {cells_per_period} < {MIN_DNS_CELLS_PER_PERIOD}"
        )));
    }
    if !(delta > 0.0) {
        return Err(Error::InvalidInput(format!("delta = {delta} must be positive")));
    }
    let periods = periods_for(epsilon)?;
    let epsilon = 1.0 / periods as f64;
    let nx = periods * cells_per_period;
    let h = 1.0 / nx as f64;
    let exact = epsilon.powf(delta);
    let fracture_rows = (exact / h).round() as usize;
    if fracture_rows < MIN_FRACTURE_ROWS {
        return Err(Error::UnderResolvedFracture {
            rows: fracture_rows,
            required: MIN_FRACTURE_ROWS,
        });
    }
    cell.check_connectivity(cells_per_period)?;
    let porous_rows = nx;
    let ny = porous_rows + fracture_rows;
    let unit = cell.mask(cells_per_period);
    let mut solid = vec![false; nx * ny];
    for j in 0..porous_rows {
        let b = j % cells_per_period;
        for i in 0..nx {
            solid[j * nx + i] = unit[b * cells_per_period + i % cells_per_period];
        }
    }
    let grid = MacGrid::new(nx, ny, h, 0.0, -1.0, solid).with_interface(porous_rows);
    Ok(GridDomain {
        grid: Arc::new(grid),
        cell: *cell,
        epsilon,
        periods,
        delta,
        cells_per_period,
        fracture_height_exact: exact,
        fracture_height: fracture_rows as f64 * h,
        fracture_rows,
        porous_rows,
    })
}

/// Truncated boundary-layer slab `Z_BL`: width 1, `rows_below` inclusion rows
/// under the interface S = {y₂ = 0}, open fluid of height `height_above`
/// over it. No-slip at the bottom, free slip at the top.
#[derive(Debug, Clone)]
pub struct BLSlab {
    pub grid: Arc<MacGrid>,
    pub cell: UnitCell,
    pub rows_below: usize,
    /// Snapped to a multiple of h.
    pub height_above: f64,
    pub cells_per_period: usize,
}

impl BLSlab {
    pub fn h(&self) -> f64 {
        self.grid.h
    }

    /// Face-line index of S.
    pub fn interface_row(&self) -> usize {
        self.rows_below * self.cells_per_period
    }

    pub fn rows_above(&self) -> usize {
        self.grid.ny - self.interface_row()
    }
}

pub fn build_bl_slab(
    cell: &UnitCell,
    rows_below: usize,
    height_above: f64,
    cells_per_period: usize,
) -> Result<BLSlab> {
    if rows_below < 3 {
        return Err(Error::InvalidInput(format!("rows_below = {rows_below} < 3")));
    }
    if !(height_above >= 1.0) {
        return Err(Error::InvalidInput(format!("height_above = {height_above} < 1")));
    }
    if cells_per_period < MIN_SLAB_CELLS_PER_PERIOD {
        return Err(Error::InvalidInput(format!(
            "cells_per_period = {cells_per_period} < {MIN_SLAB_CELLS_PER_PERIOD}"
        )));
    }
    cell.check_connectivity(cells_per_period)?;
    let n = cells_per_period;
    let h = 1.0 / n as f64;
    let below = rows_below * n;
    let above = (height_above * n as f64).round() as usize;
    let ny = below + above;
    let unit = cell.mask(n);
    let mut solid = vec![false; n * ny];
    for j in 0..below {
        let b = j % n;
        solid[j * n..(j + 1) * n].copy_from_slice(&unit[b * n..(b + 1) * n]);
    }
    let grid = MacGrid::new(n, ny, h, 0.0, -(rows_below as f64), solid)
        .with_walls(Wall::NoSlip, Wall::FreeSlip)
        .with_interface(below);
    Ok(BLSlab {
        grid: Arc::new(grid),
        cell: *cell,
        rows_below,
        height_above: above as f64 * h,
        cells_per_period: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disc_quarter_fluid_fraction() {
        let cell = UnitCell::disc(0.25).unwrap();
        let expected = 1.0 - std::f64::consts::PI / 16.0;
        assert!((cell.fluid_fraction() - expected).abs() < 1e-15);
        assert!((cell.fluid_fraction() - 0.8037).abs() < 1e-4);
        assert!(cell.boundary_clearance(200) > 0.0);
    }

    #[test]
    fn admissibility_margin() {
        assert!(matches!(UnitCell::disc(0.49), Err(Error::ShapeTouchesBoundary { .. })));
        assert!(matches!(UnitCell::disc(0.0), Err(Error::ShapeTouchesBoundary { .. })));
        assert!(UnitCell::disc(0.48).is_ok());
    }

    #[test]
    fn superellipse_area_reduces_to_disc_and_square() {
        let e = InclusionShape::Superellipse {
            half_width: 0.3,
            half_height: 0.3,
            exponent: 2.0,
            rotation: 0.0,
        };
        assert!((e.area() - std::f64::consts::PI * 0.09).abs() < 1e-12);
        let sq = InclusionShape::Superellipse {
            half_width: 0.2,
            half_height: 0.1,
            exponent: 200.0,
            rotation: 0.0,
        };
        assert!((sq.area() - 0.08).abs() < 1e-3);
        assert!(UnitCell::new(sq).is_ok());
    }

    #[test]
    fn rotated_ellipse_margin() {
        let e = InclusionShape::Superellipse {
            half_width: 0.3,
            half_height: 0.15,
            exponent: 2.0,
            rotation: std::f64::consts::FRAC_PI_6,
        };
        // half extent along x of a rotated ellipse: sqrt(a² cos² + b² sin²)
        let ext = (0.09 * 0.75f64 + 0.0225 * 0.25).sqrt();
        assert!((e.margin() - (0.5 - ext)).abs() < 1e-6);
        let cell = UnitCell::new(e).unwrap();
        let n = 32;
        let m = cell.mask(n);
        let asym = (0..n * n).any(|k| m[k] != m[(k / n) * n + (n - 1 - k % n)]);
        assert!(asym);
    }

    #[test]
    fn cell_mask_is_mirror_symmetric() {
        let cell = UnitCell::disc(0.25).unwrap();
        let n = 32;
        let m = cell.mask(n);
        for b in 0..n {
            for a in 0..n {
                assert_eq!(m[b * n + a], m[b * n + (n - 1 - a)]);
            }
        }
    }

    #[test]
    fn grid_domain_counts() {
        let cell = UnitCell::disc(0.25).unwrap();
        let d = build_grid_domain(&cell, 1.0 / 8.0, 0.75, 32).unwrap();
        assert_eq!(d.grid.nx, 256);
        assert_eq!(d.porous_rows, 256);
        let per_period = cell.mask(32).iter().filter(|s| **s).count();
        assert_eq!(d.grid.solid_count(), 64 * per_period);
        // ε^δ = 8^-0.75 ≈ 0.2102 snapped to h = 1/256
        assert!((d.fracture_height_exact - 0.210_224).abs() < 1e-6);
        assert_eq!(d.fracture_rows, 54);
        assert!((d.fracture_height - 54.0 / 256.0).abs() < 1e-15);
        assert!(d.grid.is_connected());
    }

    #[test]
    fn grid_domain_divisibility() {
        let cell = UnitCell::disc(0.25).unwrap();
        let d = build_grid_domain(&cell, 1.0 / 3.0, 0.75, 16).unwrap();
        assert_eq!(d.periods, 3);
        assert!((d.grid.width() - 1.0).abs() < 1e-14);
        assert!(matches!(build_grid_domain(&cell, 0.3, 0.75, 16), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn under_resolved_fracture() {
        let cell = UnitCell::disc(0.25).unwrap();
        // ε^δ = ε: 16 rows at 16 cells/period; δ large shrinks the strip below 8 rows
        assert!(build_grid_domain(&cell, 0.25, 1.0, 16).is_ok());
        assert!(matches!(
            build_grid_domain(&cell, 0.25, 1.6, 16),
            Err(Error::UnderResolvedFracture { .. })
        ));
    }

    #[test]
    fn slab_counts() {
        let cell = UnitCell::disc(0.25).unwrap();
        let s = build_bl_slab(&cell, 5, 3.0, 32).unwrap();
        assert_eq!((s.grid.nx, s.grid.ny), (32, 256));
        let per_period = cell.mask(32).iter().filter(|c| **c).count();
        assert_eq!(s.grid.solid_count(), 5 * per_period);
        assert_eq!(s.interface_row(), 160);
        for i in 0..32 {
            assert!(!s.grid.is_solid(i, 159) && !s.grid.is_solid(i, 160));
        }
        assert!(matches!(build_bl_slab(&cell, 2, 3.0, 32), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn column_matches_full_domain() {
        let cell = UnitCell::disc(0.25).unwrap();
        let d = build_grid_domain(&cell, 0.25, 0.75, 16).unwrap();
        let c = d.period_column();
        assert_eq!(c.grid.nx, 16);
        assert_eq!(c.grid.replicas, 4);
        for j in 0..d.grid.ny {
            for i in 0..d.grid.nx {
                assert_eq!(d.grid.is_solid(i, j), c.grid.is_solid(i % 16, j));
            }
        }
    }
}
