//! Poiseuille flow corrected by boundary layers and counterflows, sampled on
//! the resolved grid.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Poiseuille, ScalingParams};
use crate::boundary_layer::BoundaryLayerResult;
use crate::error::{Error, Result};
use crate::geometry::GridDomain;
use crate::saddle::StaggeredField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Zero,
    One,
    Two,
}

impl Order {
    pub const ALL: [Order; 3] = [Order::Zero, Order::One, Order::Two];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Result<Self> {
        match k {
            0 => Ok(Self::Zero),
            1 => Ok(Self::One),
            2 => Ok(Self::Two),
            _ => Err(Error::InvalidInput(format!("order {k} not in 0..=2"))),
        }
    }
}

/// How v⁰ is put on the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PoiseuilleMode {
    /// Point values of the parabola.
    Analytic,
    /// The exact discrete Poiseuille solution between no-slip walls: the
    /// parabola plus `F h² / (8μ)` in the fracture.
    #[default]
    GridConsistent,
}

/// Sign of the first-order counterflow correction. The correction cancels
/// the interface stress jump left by the Couette counterflow
/// `−a₁ C₁ x₂⁺/H`; that jump has the sign of the Poiseuille shear, so the
/// boundary-layer coefficient grows to `−(F/2)H ε^{1−γ}(1 + C₁ ε/H)`.
/// `AsPublished` keeps the opposite sign, `(1 − C₁ ε/H)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CounterflowCorrection {
    #[default]
    Consistent,
    AsPublished,
}

impl CounterflowCorrection {
    /// `s` in `a₁ = −(F/2)H ε^{1−γ}(1 − s C₁ ε/H)`.
    pub fn sign(self) -> f64 {
        match self {
            CounterflowCorrection::Consistent => -1.0,
            CounterflowCorrection::AsPublished => 1.0,
        }
    }
}

/// One boundary-layer term `coef · (β − C x₂⁺/H e¹)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerTerm {
    pub layer_index: usize,
    pub coef: f64,
    pub counterflow: f64,
}

/// v⁰ plus first- (and optionally second-) layer corrections with their
/// Couette counterflows. `height` is the fracture height actually used.
#[derive(Debug, Clone)]
pub struct ComposedApproximation {
    pub params: ScalingParams,
    pub height: f64,
    pub order: Order,
    pub poiseuille_mode: PoiseuilleMode,
    pub correction: CounterflowCorrection,
    pub first: Arc<BoundaryLayerResult>,
    pub second: Option<Arc<BoundaryLayerResult>>,
}

impl ComposedApproximation {
    pub fn new(
        params: ScalingParams,
        height: f64,
        first: Arc<BoundaryLayerResult>,
        second: Option<Arc<BoundaryLayerResult>>,
        order: Order,
    ) -> Result<Self> {
        if order == Order::Two && second.is_none() {
            return Err(Error::MissingSecondLayer);
        }
        Ok(Self {
            params,
            height,
            order,
            poiseuille_mode: PoiseuilleMode::default(),
            correction: CounterflowCorrection::default(),
            first,
            second,
        })
    }

    pub fn with_poiseuille_mode(mut self, mode: PoiseuilleMode) -> Self {
        self.poiseuille_mode = mode;
        self
    }

    pub fn with_correction(mut self, correction: CounterflowCorrection) -> Self {
        self.correction = correction;
        self
    }

    pub fn with_order(&self, order: Order) -> Result<Self> {
        Self::new(self.params, self.height, self.first.clone(), self.second.clone(), order)
            .map(|a| a.with_poiseuille_mode(self.poiseuille_mode).with_correction(self.correction))
    }

    pub fn poiseuille(&self) -> Poiseuille {
        Poiseuille {
            viscosity: self.params.viscosity(),
            force: self.params.force,
            height: self.height,
        }
    }

    pub fn c1(&self) -> f64 {
        self.first.constants.far_velocity
    }

    pub fn c11(&self) -> Option<f64> {
        self.second.as_ref().map(|s| s.constants.far_velocity)
    }

    /// Boundary-layer terms in the order they are added.
    pub fn terms(&self) -> Vec<LayerTerm> {
        let p = &self.params;
        let (eps, g, half_f) = (p.epsilon, p.gamma, 0.5 * p.force);
        let c1 = self.c1();
        let mut a1 = -half_f * self.height * eps.powf(1.0 - g);
        if self.order >= Order::One {
            a1 += self.correction.sign() * half_f * c1 * eps.powf(2.0 - g);
        }
        let mut terms = vec![LayerTerm {
            layer_index: 0,
            coef: a1,
            counterflow: c1,
        }];
        if self.order == Order::Two {
            terms.push(LayerTerm {
                layer_index: 1,
                coef: -half_f * half_f * self.height * self.height * eps.powf(3.0 - 3.0 * g),
                counterflow: self.c11().unwrap_or(0.0),
            });
        }
        terms
    }

    fn layer(&self, k: usize) -> &BoundaryLayerResult {
        if k == 0 {
            &self.first
        } else {
            self.second.as_deref().expect("second layer present for order two")
        }
    }

    /// Pointwise evaluation (bilinear in the layer fields).
    pub fn velocity_at(&self, x1: f64, x2: f64) -> (f64, f64) {
        let eps = self.params.epsilon;
        let mut u = self.poiseuille().velocity(x2);
        let mut v = 0.0;
        for t in self.terms() {
            let (bu, bv) = self.layer(t.layer_index).velocity_at(x1 / eps, x2 / eps);
            u += t.coef * (bu - t.counterflow * x2.max(0.0) / self.height);
            v += t.coef * bv;
        }
        (u, v)
    }

    fn check_domain(&self, domain: &GridDomain) -> Result<()> {
        if domain.cells_per_period != self.first.slab.cells_per_period {
            return Err(Error::GridMismatch(format!(
                "domain has {} cells per period, cell problems {}",
                domain.cells_per_period, self.first.slab.cells_per_period
            )));
        }
        if (domain.fracture_height - self.height).abs() > 1e-12 {
            return Err(Error::GridMismatch("fracture height differs from the domain".into()));
        }
        Ok(())
    }

    /// The approximation sampled at the staggered positions of `domain`,
    /// zero on inactive faces. Pressure is left at zero.
    pub fn sample_on(&self, domain: &GridDomain) -> Result<StaggeredField> {
        self.check_domain(domain)?;
        let grid = domain.grid.clone();
        let g = &*grid;
        let nx = g.nx;
        let cpp = domain.cells_per_period;
        let off = self.first.slab.interface_row() as isize - domain.porous_rows as isize;
        let v0 = self.poiseuille();
        let shift = match self.poiseuille_mode {
            PoiseuilleMode::Analytic => 0.0,
            PoiseuilleMode::GridConsistent => {
                self.params.force * g.h * g.h / (8.0 * self.params.viscosity())
            }
        };
        let terms = self.terms();
        let mut f = StaggeredField::zeros(grid.clone());
        for j in 0..g.ny {
            let y = g.y0 + (j as f64 + 0.5) * g.h;
            let base = if j >= domain.porous_rows { v0.velocity(y) + shift } else { 0.0 };
            let jb = j as isize + off;
            for i in 0..nx {
                if !g.u_active(i, j) {
                    continue;
                }
                let mut u = base;
                for t in &terms {
                    let b = self.layer(t.layer_index).u_extended(i % cpp, jb);
                    u += t.coef * (b - t.counterflow * y.max(0.0) / self.height);
                }
                f.u[j * nx + i] = u;
            }
        }
        for j in 0..=g.ny {
            let jb = j as isize + off;
            for i in 0..nx {
                if !g.v_active(i, j) {
                    continue;
                }
                f.v[j * nx + i] = terms
                    .iter()
                    .map(|t| t.coef * self.layer(t.layer_index).v_extended(i % cpp, jb))
                    .sum();
            }
        }
        Ok(f)
    }
}

/// p(ε) = −(F/2) H (ω(x/ε) − Cω), with H the fracture height used.
#[derive(Debug, Clone)]
pub struct PressureApproximation {
    pub coef: f64,
    pub c_omega: f64,
    pub first: Arc<BoundaryLayerResult>,
}

pub fn pressure_approximation(
    params: &ScalingParams,
    height: f64,
    first: Arc<BoundaryLayerResult>,
) -> PressureApproximation {
    PressureApproximation {
        coef: -0.5 * params.force * height,
        c_omega: first.constants.far_pressure,
        first,
    }
}

impl PressureApproximation {
    /// Cell-centered samples on `domain`; zero in solid cells.
    pub fn sample_on(&self, domain: &GridDomain) -> Result<Vec<f64>> {
        if domain.cells_per_period != self.first.slab.cells_per_period {
            return Err(Error::GridMismatch("cells per period".into()));
        }
        let g = &*domain.grid;
        let cpp = domain.cells_per_period;
        let off = self.first.slab.interface_row() as isize - domain.porous_rows as isize;
        let mut p = vec![0.0; g.nx * g.ny];
        for j in 0..g.ny {
            for i in 0..g.nx {
                if !g.is_solid(i, j) {
                    let w = self.first.p_extended(i % cpp, j as isize + off);
                    p[j * g.nx + i] = self.coef * (w - self.c_omega);
                }
            }
        }
        Ok(p)
    }

    /// Period average on the interface, from the two rows next to it.
    pub fn interface_mean(&self) -> f64 {
        self.coef * (self.first.constants.pressure_interface - self.c_omega)
    }
}
