//! Error fields, weighted norms, convergence-rate fits and the effective
//! slip-law regression.

use serde::{Deserialize, Serialize};

use crate::boundary_layer::CellConstants;
use crate::dns::DNSSolution;
use crate::error::{Error, Result};
use crate::saddle::{norms, Region, StaggeredField};
use crate::scaling::{
    ComposedApproximation, CounterflowCorrection, PoiseuilleMode, PressureApproximation,
    ScalingParams,
};

/// `v^ε − approx` on the DNS grid; pressure difference if `pressure` is given.
pub fn error_field(
    sol: &DNSSolution,
    approx: &ComposedApproximation,
    pressure: Option<&PressureApproximation>,
) -> Result<StaggeredField> {
    if approx.params != sol.params {
        return Err(Error::GridMismatch("approximation built for other parameters".into()));
    }
    let mut a = approx.sample_on(&sol.domain)?;
    if let Some(p) = pressure {
        a.p = p.sample_on(&sol.domain)?;
    }
    let mut e = sol.field.axpy(-1.0, &a)?;
    if pressure.is_none() {
        e.p.iter_mut().for_each(|x| *x = 0.0);
    }
    Ok(e)
}

/// `v^ε − v⁰` (Poiseuille only), the field of the a priori estimate.
pub fn apriori_error(sol: &DNSSolution, approx: &ComposedApproximation) -> Result<StaggeredField> {
    let g = &*sol.field.grid;
    let v0 = approx.poiseuille();
    let shift = match approx.poiseuille_mode {
        PoiseuilleMode::Analytic => 0.0,
        PoiseuilleMode::GridConsistent => {
            sol.params.force * g.h * g.h / (8.0 * sol.params.viscosity())
        }
    };
    let mut e = sol.field.clone();
    e.p.iter_mut().for_each(|x| *x = 0.0);
    for j in sol.domain.porous_rows..g.ny {
        let y = g.y0 + (j as f64 + 0.5) * g.h;
        for i in 0..g.nx {
            if g.u_active(i, j) {
                e.u[j * g.nx + i] -= v0.velocity(y) + shift;
            }
        }
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSet {
    /// √ε ‖∇·‖ + ε^{−1/2} ‖·‖_{Ω₂} + ‖·‖_Σ + ε^{1/2−δ} ‖·‖_{Ω₁}
    Apriori,
    /// ε ‖∇·‖ + ‖·‖_{Ω₂} + ε^{1/2} ‖·‖_Σ + ε^{1−δ} ‖·‖_{Ω₁}
    Corrector,
}

impl WeightSet {
    /// Weights on (gradient, Ω₂, Σ, Ω₁).
    pub fn weights(self, p: &ScalingParams) -> [f64; 4] {
        let (e, d) = (p.epsilon, p.delta);
        match self {
            WeightSet::Apriori => [e.sqrt(), 1.0 / e.sqrt(), 1.0, e.powf(0.5 - d)],
            WeightSet::Corrector => [e, 1.0, e.sqrt(), e.powf(1.0 - d)],
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightedNorm {
    pub grad: f64,
    pub omega2: f64,
    pub sigma: f64,
    pub omega1: f64,
}

impl WeightedNorm {
    pub fn total(&self) -> f64 {
        self.grad + self.omega2 + self.sigma + self.omega1
    }
}

/// Weighted components; each is the raw norm times its weight.
pub fn weighted_norm(err: &StaggeredField, set: WeightSet, p: &ScalingParams) -> Result<WeightedNorm> {
    let w = set.weights(p);
    Ok(WeightedNorm {
        grad: w[0] * norms(err, Region::Whole)?.grad,
        omega2: w[1] * norms(err, Region::Porous)?.l2,
        sigma: w[2] * norms(err, Region::Interface)?.l2,
        omega1: w[3] * norms(err, Region::Fracture)?.l2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares slope of `ln norm` against `ln ε`.
pub fn fit_rates(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints {
            got: points.len(),
            required: 3,
        });
    }
    if points.iter().any(|&(e, n)| !(e > 0.0 && n > 0.0 && n.is_finite())) {
        return Err(Error::InvalidInput("rate fit needs positive finite samples".into()));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (rate, intercept, r_squared) = linear_fit(&xs, &ys);
    Ok(RateFit {
        rate,
        intercept,
        r_squared,
        points: points.len(),
    })
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Pore-face averaged interface slip and shear at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlipSample {
    pub force: f64,
    pub epsilon: f64,
    pub eta: Option<f64>,
    pub v1_eff: f64,
    pub shear_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlipFit {
    pub a_lin: f64,
    pub a_quad: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

/// Least squares `v = a_lin s + a_quad s²`.
pub fn slip_regression(samples: &[SlipSample]) -> Result<SlipFit> {
    if samples.len() < 3 {
        return Err(Error::InsufficientPoints {
            got: samples.len(),
            required: 3,
        });
    }
    // columns scaled to unit norm before solving the 2x2 normal equations
    let s: Vec<f64> = samples.iter().map(|x| x.shear_eff).collect();
    let v: Vec<f64> = samples.iter().map(|x| x.v1_eff).collect();
    let c1: f64 = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    let c2: f64 = s.iter().map(|x| x.powi(4)).sum::<f64>().sqrt();
    if !(c1 > 0.0 && c2 > 0.0) {
        return Err(Error::CollinearSamples);
    }
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (x, y) in s.iter().zip(&v) {
        let (p, q) = (x / c1, x * x / c2);
        a11 += p * p;
        a12 += p * q;
        a22 += q * q;
        b1 += p * y;
        b2 += q * y;
    }
    let det = a11 * a22 - a12 * a12;
    if det < 1e-10 {
        return Err(Error::CollinearSamples);
    }
    let a_lin = (a22 * b1 - a12 * b2) / det / c1;
    let a_quad = (a11 * b2 - a12 * b1) / det / c2;
    let rss: f64 = s
        .iter()
        .zip(&v)
        .map(|(x, y)| (y - a_lin * x - a_quad * x * x).powi(2))
        .sum();
    Ok(SlipFit {
        a_lin,
        a_quad,
        residual: (rss / s.len() as f64).sqrt(),
    })
}

/// Effective slip coefficients implied by the cell constants. `height`
/// replaces ε^δ, so that t = ε/H plays the role of ε^{7η/12}. With sign
/// `s` of the counterflow correction the linear coefficient is
/// `−C₁ε(1 − sC₁t)/(1 + C₁t(1 − sC₁t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlipPrediction {
    pub a_lin_pred: f64,
    /// Leading quadratic coefficient −ε (H² ε^{2−3γ}) / (H ε^{−γ})² ⟨β₁¹|Σ⟩.
    pub a_quad_pred: f64,
    /// Second Taylor coefficient of the exact elimination of F.
    pub a_quad_taylor: f64,
    /// Interface slip per unit F/2 (linear and quadratic parts).
    pub slip: [f64; 2],
    /// Interface shear per unit F/2 (linear and quadratic parts).
    pub shear: [f64; 2],
}

pub fn slip_prediction(
    c: &CellConstants,
    p: &ScalingParams,
    height: f64,
    correction: CounterflowCorrection,
) -> SlipPrediction {
    let (eps, g) = (p.epsilon, p.gamma);
    let t = eps / height;
    let c1 = c.c1;
    let k = 1.0 - correction.sign() * t * c1;
    let a1 = height * eps.powf(-g);
    let b1 = height * height * eps.powf(2.0 - 3.0 * g);
    let lin_s = a1 * (1.0 + t * c1 * k);
    let quad_s = -b1 * (c.beta1_shear - t * c.c11);
    let lin_v = -eps * a1 * c1 * k;
    let quad_v = -eps * b1 * c.beta1_trace;
    let a_lin_pred = lin_v / lin_s;
    SlipPrediction {
        a_lin_pred,
        a_quad_pred: -eps * b1 / (a1 * a1) * c.beta1_trace,
        a_quad_taylor: (quad_v - a_lin_pred * quad_s) / (lin_s * lin_s),
        slip: [lin_v, quad_v],
        shear: [lin_s, quad_s],
    }
}

impl SlipPrediction {
    /// Interface slip and shear produced by the approximation at force `f`.
    pub fn sample(&self, p: &ScalingParams, f: f64) -> SlipSample {
        let k = 0.5 * f;
        SlipSample {
            force: f,
            epsilon: p.epsilon,
            eta: p.eta,
            v1_eff: k * self.slip[0] + k * k * self.slip[1],
            shear_eff: k * self.shear[0] + k * k * self.shear[1],
        }
    }
}

/// Approximation-generated samples, no DNS involved.
pub fn closed_loop_samples(
    c: &CellConstants,
    p: &ScalingParams,
    height: f64,
    correction: CounterflowCorrection,
    forces: &[f64],
) -> Vec<SlipSample> {
    let pred = slip_prediction(c, p, height, correction);
    forces.iter().map(|&f| pred.sample(&p.with_force(f), f)).collect()
}

/// Relative residual of the linear law `v = a_lin s` on one sample.
pub fn linear_law_residual(sample: &SlipSample, a_lin: f64) -> f64 {
    let r = sample.v1_eff - a_lin * sample.shear_eff;
    if sample.v1_eff == 0.0 {
        r.abs()
    } else {
        (r / sample.v1_eff).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaffmanRow {
    pub epsilon: f64,
    pub v1_eff: f64,
    pub linear_prediction: f64,
    pub absolute: f64,
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaffmanTable {
    pub rows: Vec<SaffmanRow>,
    /// Fitted decay exponent of the absolute residual.
    pub residual_rate: RateFit,
    /// 2 − γ
    pub reference_rate: f64,
}

/// Deviation of samples from the linear (Saffman) law across ε. `a_lin`
/// gives the linear coefficient for each ε.
pub fn saffman_check(
    samples: &[SlipSample],
    gamma: f64,
    a_lin: impl Fn(f64) -> f64,
) -> Result<SaffmanTable> {
    if samples.len() < 3 {
        return Err(Error::InsufficientPoints {
            got: samples.len(),
            required: 3,
        });
    }
    let rows: Vec<SaffmanRow> = samples
        .iter()
        .map(|s| {
            let lp = a_lin(s.epsilon) * s.shear_eff;
            SaffmanRow {
                epsilon: s.epsilon,
                v1_eff: s.v1_eff,
                linear_prediction: lp,
                absolute: (s.v1_eff - lp).abs(),
                relative: linear_law_residual(s, a_lin(s.epsilon)),
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.absolute)).collect();
    Ok(SaffmanTable {
        residual_rate: fit_rates(&pts)?,
        reference_rate: 2.0 - gamma,
        rows,
    })
}
