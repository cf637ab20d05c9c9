//! Cell problems, the DNS sweep and the analyses built on top of them.

use std::collections::BTreeMap;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use slipflow::analysis::{
    apriori_error, closed_loop_samples, error_field, fit_rates, saffman_check, slip_prediction,
    slip_regression, weighted_norm, RateFit, SaffmanRow, SaffmanTable, SlipFit, SlipPrediction,
    SlipSample, WeightSet, WeightedNorm,
};
use slipflow::boundary_layer::{
    fit_decay, fit_pressure_decay, solve_cell_problems, solve_first_layer, truncation_study,
    CellConstants, CellProblems, DecayFit, Side, TruncationReport,
};
use slipflow::dns::{interface_trace, momentum_budget, run_dns, DnsOptions, MomentumBudget};
use slipflow::geometry::{build_bl_slab, build_grid_domain, InclusionShape, UnitCell};
use slipflow::scaling::{ComposedApproximation, HypothesisReport, Order, Poiseuille, Rates};
use slipflow::verification::{manufactured_stokes, observed_orders, two_layer_strip, ReferenceRun};

use crate::cache::{key_of, Cache};
use crate::config::{Regime, RunConfig};
use crate::error::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualIdentity {
    /// ∫ β₁(y₁, 0) dy₁
    pub trace: f64,
    /// ‖∇β‖²
    pub energy: f64,
    /// |trace + energy| / energy
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub above: Option<DecayFit>,
    pub pressure_above: Option<DecayFit>,
    pub below: Option<DecayFit>,
    pub second_above: Option<DecayFit>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusSample {
    pub radius: f64,
    pub c1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationOutcome {
    pub shape: InclusionShape,
    pub report: Option<TruncationReport>,
    pub error: Option<String>,
}

/// Constants at `h` and `h/2` and their extrapolation assuming first-order
/// convergence (staircase boundaries).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefineReport {
    pub cells_per_period: [usize; 2],
    /// (C1, Cω, C11) at the base resolution.
    pub coarse: [f64; 3],
    pub fine: [f64; 3],
    pub extrapolated: [f64; 3],
    pub delta: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStage {
    pub constants: CellConstants,
    pub dual_identity: DualIdentity,
    pub decay: DecayReport,
    pub radii: Vec<RadiusSample>,
    pub truncation: Vec<TruncationOutcome>,
    pub asymmetric: CellConstants,
    pub refine: Option<RefineReport>,
}

fn triple(c: &CellConstants) -> [f64; 3] {
    [c.c1, c.c_omega, c.c11]
}

fn cell_problems(cfg: &RunConfig, shape: InclusionShape, cpp: usize) -> Result<CellProblems> {
    let g = &cfg.geometry;
    let cell = UnitCell::new(shape)?;
    let slab = build_bl_slab(&cell, g.rows_below, g.height_above, cpp)?;
    Ok(solve_cell_problems(&slab)?)
}

/// Both layers on the configured geometry plus the derived checks.
pub fn run_cell_stage(cfg: &RunConfig) -> Result<(CellStage, CellProblems)> {
    let g = &cfg.geometry;
    let cells = cell_problems(cfg, g.shape, g.cells_per_period).context("cell problems")?;
    let constants = CellConstants::from_layers(&cells);
    let a = &cells.first.constants;
    let dual_identity = DualIdentity {
        trace: a.trace_mean,
        energy: a.dirichlet_energy,
        relative: (a.trace_mean + a.dirichlet_energy).abs() / a.dirichlet_energy,
    };
    let decay = DecayReport {
        above: fit_decay(&cells.first, Side::Above).ok(),
        pressure_above: fit_pressure_decay(&cells.first).ok(),
        below: fit_decay(&cells.first, Side::Below).ok(),
        second_above: fit_decay(&cells.second, Side::Above).ok(),
    };

    let radii = cfg
        .analysis
        .radii
        .par_iter()
        .map(|&r| -> Result<RadiusSample> {
            let cell = UnitCell::new(InclusionShape::disc(r))?;
            let slab = build_bl_slab(&cell, g.rows_below, g.height_above, g.cells_per_period)?;
            Ok(RadiusSample {
                radius: r,
                c1: solve_first_layer(&slab)?.constants.far_velocity,
            })
        })
        .collect::<Result<Vec<_>>>()
        .context("radius study")?;

    let truncation = [g.shape, cfg.analysis.asymmetric_shape]
        .par_iter()
        .map(|&shape| -> Result<TruncationOutcome> {
            let cell = UnitCell::new(shape)?;
            Ok(match truncation_study(&cell, g.rows_below, g.height_above, g.cells_per_period) {
                Ok(report) => TruncationOutcome {
                    shape,
                    report: Some(report),
                    error: None,
                },
                Err(e) => TruncationOutcome {
                    shape,
                    report: None,
                    error: Some(e.to_string()),
                },
            })
        })
        .collect::<Result<Vec<_>>>()
        .context("truncation study")?;

    let asymmetric = CellConstants::from_layers(
        &cell_problems(cfg, cfg.analysis.asymmetric_shape, g.cells_per_period)
            .context("cell problems on the asymmetric shape")?,
    );

    let refine = if cfg.flags.refine_check {
        let fine_cpp = 2 * g.cells_per_period;
        let fine = CellConstants::from_layers(&cell_problems(cfg, g.shape, fine_cpp).context("refined cell problems")?);
        let (c, f) = (triple(&constants), triple(&fine));
        Some(RefineReport {
            cells_per_period: [g.cells_per_period, fine_cpp],
            coarse: c,
            fine: f,
            extrapolated: [0, 1, 2].map(|k| 2.0 * f[k] - c[k]),
            delta: [0, 1, 2].map(|k| f[k] - c[k]),
        })
    } else {
        None
    };

    Ok((
        CellStage {
            constants,
            dual_identity,
            decay,
            radii,
            truncation,
            asymmetric,
            refine,
        },
        cells,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationStage {
    pub strip: ReferenceRun,
    pub manufactured: Vec<ReferenceRun>,
    pub manufactured_orders: Vec<f64>,
}

pub fn run_verification() -> Result<VerificationStage> {
    let strip = two_layer_strip(32)?;
    let manufactured = [16, 32, 64]
        .par_iter()
        .map(|&n| manufactured_stokes(n))
        .collect::<slipflow::Result<Vec<_>>>()?;
    Ok(VerificationStage {
        strip,
        manufactured_orders: observed_orders(&manufactured),
        manufactured,
    })
}

/// One DNS run of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointSpec {
    pub shape: InclusionShape,
    pub eta: Option<f64>,
    pub delta: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub force: f64,
}

impl PointSpec {
    pub fn new(shape: InclusionShape, regime: &Regime, epsilon: f64, force: f64) -> Self {
        Self {
            shape,
            eta: regime.eta,
            delta: regime.delta,
            gamma: regime.gamma,
            epsilon,
            force,
        }
    }

    pub fn regime(&self) -> Regime {
        Regime {
            eta: self.eta,
            delta: self.delta,
            gamma: self.gamma,
        }
    }

    pub fn params(&self) -> slipflow::scaling::ScalingParams {
        self.regime().params(self.epsilon, self.force)
    }

    fn matches(&self, shape: &InclusionShape, regime: &Regime, epsilon: f64, force: f64) -> bool {
        self.shape == *shape && self.regime() == *regime && self.epsilon == epsilon && self.force == force
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    Ok,
    HypothesisFail,
    Failed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointNorms {
    pub apriori: WeightedNorm,
    /// Corrector-weighted norms of U, U¹, U².
    pub orders: [WeightedNorm; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointData {
    pub iterations: usize,
    pub residual: f64,
    pub linear_residual: f64,
    pub divergence_max: f64,
    pub v1_eff: f64,
    pub shear_eff: f64,
    pub fracture_mean: f64,
    /// Mean of v⁰ over the snapped fracture height.
    pub poiseuille_mean: f64,
    pub fracture_height: f64,
    pub budget: MomentumBudget,
    /// Only on the configured geometry, whose layers are at hand.
    pub norms: Option<PointNorms>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub spec: PointSpec,
    pub status: PointStatus,
    pub message: Option<String>,
    pub data: Option<PointData>,
}

impl PointResult {
    pub fn ok(&self) -> Option<&PointData> {
        match self.status {
            PointStatus::Ok => self.data.as_ref(),
            _ => None,
        }
    }
}

/// Everything besides the point that changes a cached result.
#[derive(Serialize)]
struct PointKey<'a> {
    point: &'a PointSpec,
    cells_per_period: usize,
    rows_below: usize,
    height_above: f64,
    solver: &'a crate::config::SolverConfig,
    allow_out_of_hypothesis: bool,
    with_norms: bool,
}

pub fn point_key(cfg: &RunConfig, spec: &PointSpec) -> String {
    key_of(&PointKey {
        point: spec,
        cells_per_period: cfg.geometry.cells_per_period,
        rows_below: cfg.geometry.rows_below,
        height_above: cfg.geometry.height_above,
        solver: &cfg.solver,
        allow_out_of_hypothesis: cfg.flags.allow_out_of_hypothesis,
        with_norms: spec.shape == cfg.geometry.shape,
    })
}

pub fn dns_options(cfg: &RunConfig) -> DnsOptions {
    DnsOptions {
        picard: cfg.picard(),
        convection: cfg.solver.convection,
        allow_out_of_hypothesis: cfg.flags.allow_out_of_hypothesis,
        full_width: false,
    }
}

/// Runs one point and stores it in the cache.
pub fn compute_point(
    cfg: &RunConfig,
    spec: &PointSpec,
    cells: Option<&CellProblems>,
    cache: &Cache,
) -> Result<PointData> {
    let p = spec.params();
    let cell = UnitCell::new(spec.shape)?;
    let domain = build_grid_domain(&cell, spec.epsilon, p.delta, cfg.geometry.cells_per_period)?;
    let sol = run_dns(&p, &domain, &dns_options(cfg))?;
    let trace = interface_trace(&sol)?;
    let height = sol.domain.fracture_height;
    let norms = match cells {
        Some(c) => {
            let approx = ComposedApproximation::new(p, height, c.first.clone(), Some(c.second.clone()), Order::Zero)?
                .with_poiseuille_mode(cfg.solver.poiseuille)
                .with_correction(cfg.solver.correction);
            let apriori = weighted_norm(&apriori_error(&sol, &approx)?, WeightSet::Apriori, &p)?;
            let mut orders = [WeightedNorm::default(); 3];
            for (k, slot) in orders.iter_mut().enumerate() {
                let a = approx.with_order(Order::from_index(k)?)?;
                *slot = weighted_norm(&error_field(&sol, &a, None)?, WeightSet::Corrector, &p)?;
            }
            Some(PointNorms { apriori, orders })
        }
        None => None,
    };
    let data = PointData {
        iterations: sol.stats.picard_iterations,
        residual: sol.stats.residual,
        linear_residual: sol.stats.linear_residual,
        divergence_max: sol.stats.divergence_max,
        v1_eff: trace.slip_mean,
        shear_eff: trace.shear_mean,
        fracture_mean: sol.fracture_mean_velocity(),
        poiseuille_mean: Poiseuille {
            viscosity: p.viscosity(),
            force: p.force,
            height,
        }
        .mean_velocity(),
        fracture_height: height,
        budget: momentum_budget(&sol)?,
        norms,
    };
    let result = PointResult {
        spec: *spec,
        status: PointStatus::Ok,
        message: None,
        data: Some(data),
    };
    cache.store_point(&point_key(cfg, spec), &sol.field, &p, &result)?;
    Ok(data)
}

/// Cached result, a fresh computation, or a gate/failure record.
pub fn resolve_point(
    cfg: &RunConfig,
    spec: &PointSpec,
    cells: Option<&CellProblems>,
    cache: &Cache,
) -> Result<PointResult> {
    let p = spec.params();
    let hyp = p.validate();
    if !cfg.flags.allow_out_of_hypothesis && !hyp.all_hold() {
        return Ok(PointResult {
            spec: *spec,
            status: PointStatus::HypothesisFail,
            message: Some(format!("{} fail", hyp.failed().join(", "))),
            data: None,
        });
    }
    let key = point_key(cfg, spec);
    if let Some(r) = cache.load_result::<PointResult>(&key) {
        if r.spec == *spec && r.status == PointStatus::Ok {
            return Ok(r);
        }
    }
    if cfg.flags.skip_dns {
        return Err(HarnessError::MissingArtifacts(cache.result_path(&key)).into());
    }
    Ok(match compute_point(cfg, spec, cells, cache) {
        Ok(data) => PointResult {
            spec: *spec,
            status: PointStatus::Ok,
            message: None,
            data: Some(data),
        },
        Err(e) if e.downcast_ref::<slipflow::Error>().is_some() => PointResult {
            spec: *spec,
            status: PointStatus::Failed,
            message: Some(format!("{e:#}")),
            data: None,
        },
        Err(e) => return Err(e),
    })
}

/// All points the analyses need, without duplicates, in a fixed order.
pub fn sweep_points(cfg: &RunConfig) -> Vec<PointSpec> {
    let mut out: Vec<PointSpec> = Vec::new();
    let mut push = |s: PointSpec| {
        if !out.contains(&s) {
            out.push(s);
        }
    };
    let shape = cfg.geometry.shape;
    let a = &cfg.analysis;
    for regime in cfg.regimes() {
        for &eps in &cfg.parameters.epsilon {
            for &f in &cfg.parameters.force {
                push(PointSpec::new(shape, &regime, eps, f));
            }
            push(PointSpec::new(shape, &regime, eps, a.rate_force));
        }
        push(PointSpec::new(shape, &regime, a.saffman_epsilon, a.rate_force));
    }
    let slip_regime = slip_regime(cfg);
    for s in [shape, a.asymmetric_shape] {
        for &f in &a.closed_loop_forces {
            push(PointSpec::new(s, &slip_regime, a.slip_epsilon, f));
        }
    }
    out
}

fn slip_regime(cfg: &RunConfig) -> Regime {
    let eta = cfg.analysis.slip_eta;
    let p = slipflow::scaling::ScalingParams::from_eta(1.0, eta, 0.0);
    Regime {
        eta: Some(eta),
        delta: p.delta,
        gamma: p.gamma,
    }
}

pub fn run_points(
    cfg: &RunConfig,
    specs: &[PointSpec],
    cells: &CellProblems,
    cache: &Cache,
    jobs: Option<usize>,
) -> Result<Vec<PointResult>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n.max(1));
    }
    let pool = builder.build()?;
    pool.install(|| {
        specs
            .par_iter()
            .map(|s| {
                let layers = (s.shape == cfg.geometry.shape).then_some(cells);
                let r = resolve_point(cfg, s, layers, cache);
                if let Ok(r) = &r {
                    log_point(r);
                }
                r
            })
            .collect()
    })
}

fn log_point(r: &PointResult) {
    let s = &r.spec;
    let what = match (&r.status, r.ok()) {
        (PointStatus::Ok, Some(d)) => format!("ok, {} Picard iterations, slip {:.6e}", d.iterations, d.v1_eff),
        _ => format!("{:?}: {}", r.status, r.message.as_deref().unwrap_or("")),
    };
    eprintln!(
        "  point delta={:.4} gamma={:.4} eps={} F={}: {what}",
        s.delta, s.gamma, s.epsilon, s.force
    );
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRates {
    pub regime: Regime,
    pub hypotheses: HypothesisReport,
    pub theoretical: Rates,
    pub force: f64,
    pub apriori: Option<RateFit>,
    /// Fitted rates of U, U¹, U².
    pub orders: [Option<RateFit>; 3],
}

fn find<'a>(
    points: &'a [PointResult],
    shape: &InclusionShape,
    regime: &Regime,
    epsilon: f64,
    force: f64,
) -> Option<&'a PointResult> {
    points.iter().find(|r| r.spec.matches(shape, regime, epsilon, force))
}

pub fn regime_rates(cfg: &RunConfig, points: &[PointResult]) -> Vec<RegimeRates> {
    let f = cfg.analysis.rate_force;
    cfg.regimes()
        .into_iter()
        .map(|regime| {
            let norms: Vec<(f64, PointNorms)> = cfg
                .parameters
                .epsilon
                .iter()
                .filter_map(|&eps| {
                    let d = find(points, &cfg.geometry.shape, &regime, eps, f)?.ok()?;
                    Some((eps, d.norms?))
                })
                .collect();
            let fit = |get: &dyn Fn(&PointNorms) -> f64| {
                let pts: Vec<(f64, f64)> = norms.iter().map(|(e, n)| (*e, get(n))).collect();
                fit_rates(&pts).ok()
            };
            let p = regime.params(1.0, f);
            RegimeRates {
                regime,
                hypotheses: p.validate(),
                theoretical: p.rates(),
                force: f,
                apriori: fit(&|n| n.apriori.total()),
                orders: [0, 1, 2].map(|k| fit(&|n: &PointNorms| n.orders[k].total())),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlipAnalysis {
    pub label: String,
    pub shape: InclusionShape,
    pub epsilon: f64,
    pub eta: f64,
    pub height: f64,
    pub constants: CellConstants,
    pub samples: Vec<SlipSample>,
    pub dns_fit: Option<SlipFit>,
    /// −ε C1
    pub leading: f64,
    pub consistent: SlipPrediction,
    pub published: SlipPrediction,
    pub closed_loop: Option<SlipFit>,
    /// Relative errors of the closed-loop fit against the coefficients the
    /// samples were generated from.
    pub closed_loop_error: Option<[f64; 2]>,
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn slip_analysis(
    cfg: &RunConfig,
    label: &str,
    shape: InclusionShape,
    constants: &CellConstants,
    points: &[PointResult],
) -> Result<SlipAnalysis> {
    let a = &cfg.analysis;
    let regime = slip_regime(cfg);
    let p = regime.params(a.slip_epsilon, 1.0);
    let domain = build_grid_domain(&UnitCell::new(shape)?, a.slip_epsilon, p.delta, cfg.geometry.cells_per_period)?;
    let height = domain.fracture_height;
    let samples: Vec<SlipSample> = a
        .closed_loop_forces
        .iter()
        .filter_map(|&f| {
            let d = find(points, &shape, &regime, a.slip_epsilon, f)?.ok()?;
            Some(SlipSample {
                force: f,
                epsilon: a.slip_epsilon,
                eta: Some(a.slip_eta),
                v1_eff: d.v1_eff,
                shear_eff: d.shear_eff,
            })
        })
        .collect();
    let consistent = slip_prediction(constants, &p, height, cfg.solver.correction);
    let published = slip_prediction(
        constants,
        &p,
        height,
        slipflow::scaling::CounterflowCorrection::AsPublished,
    );
    let closed_loop = slip_regression(&closed_loop_samples(
        constants,
        &p,
        height,
        cfg.solver.correction,
        &a.closed_loop_forces,
    ))
    .ok();
    Ok(SlipAnalysis {
        label: label.to_string(),
        shape,
        epsilon: a.slip_epsilon,
        eta: a.slip_eta,
        height,
        constants: constants.clone(),
        dns_fit: slip_regression(&samples).ok(),
        samples,
        leading: -a.slip_epsilon * constants.c1,
        closed_loop_error: closed_loop
            .map(|f| [rel(f.a_lin, consistent.a_lin_pred), rel(f.a_quad, consistent.a_quad_taylor)]),
        closed_loop,
        consistent,
        published,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaffmanAnalysis {
    pub regime: Regime,
    pub force: f64,
    /// Residual of v = −εC1 s across ε.
    pub table: Option<SaffmanTable>,
    /// The row at the comparison ε.
    pub at_epsilon: Option<SaffmanRow>,
}

fn saffman_analysis(cfg: &RunConfig, c1: f64, points: &[PointResult]) -> Vec<SaffmanAnalysis> {
    let a = &cfg.analysis;
    let shape = cfg.geometry.shape;
    let mut eps_list = cfg.parameters.epsilon.clone();
    if !eps_list.contains(&a.saffman_epsilon) {
        eps_list.push(a.saffman_epsilon);
    }
    cfg.regimes()
        .into_iter()
        .map(|regime| {
            let samples: Vec<SlipSample> = eps_list
                .iter()
                .filter_map(|&eps| {
                    let d = find(points, &shape, &regime, eps, a.rate_force)?.ok()?;
                    Some(SlipSample {
                        force: a.rate_force,
                        epsilon: eps,
                        eta: regime.eta,
                        v1_eff: d.v1_eff,
                        shear_eff: d.shear_eff,
                    })
                })
                .collect();
            let lin = |eps: f64| -eps * c1;
            let at_epsilon = samples.iter().find(|s| s.epsilon == a.saffman_epsilon).map(|s| {
                let lp = lin(s.epsilon) * s.shear_eff;
                SaffmanRow {
                    epsilon: s.epsilon,
                    v1_eff: s.v1_eff,
                    linear_prediction: lp,
                    absolute: (s.v1_eff - lp).abs(),
                    relative: slipflow::analysis::linear_law_residual(s, lin(s.epsilon)),
                }
            });
            SaffmanAnalysis {
                regime,
                force: a.rate_force,
                table: saffman_check(&samples, regime.gamma, lin).ok(),
                at_epsilon,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: u8,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub config_hash: String,
    pub config: serde_json::Value,
    pub cell: CellStage,
    pub verification: VerificationStage,
    pub points: Vec<PointResult>,
    pub rates: Vec<RegimeRates>,
    pub slip: Vec<SlipAnalysis>,
    pub saffman: Vec<SaffmanAnalysis>,
    pub criteria: Vec<Verdict>,
}

impl Summary {
    pub fn failed_points(&self) -> usize {
        self.points.iter().filter(|p| p.status == PointStatus::Failed).count()
    }
}

/// The whole sweep: cell stage, reference problems, DNS points, analyses
/// and verdicts.
pub fn run_sweep(cfg: &RunConfig, cache: &Cache, jobs: Option<usize>) -> Result<Summary> {
    eprintln!("cell problems");
    let (cell, cells) = run_cell_stage(cfg)?;
    eprintln!("reference problems");
    let verification = run_verification().context("reference problems")?;
    let specs = sweep_points(cfg);
    eprintln!("{} DNS points", specs.len());
    let points = run_points(cfg, &specs, &cells, cache, jobs)?;
    let rates = regime_rates(cfg, &points);
    let slip = vec![
        slip_analysis(cfg, "default", cfg.geometry.shape, &cell.constants, &points)?,
        slip_analysis(cfg, "asymmetric", cfg.analysis.asymmetric_shape, &cell.asymmetric, &points)?,
    ];
    let saffman = saffman_analysis(cfg, cell.constants.c1, &points);
    let mut summary = Summary {
        config_hash: cfg.hash(),
        config: cfg.resolved(),
        cell,
        verification,
        points,
        rates,
        slip,
        saffman,
        criteria: Vec::new(),
    };
    summary.criteria = crate::criteria::evaluate(cfg, &summary);
    Ok(summary)
}

/// Points on the configured geometry keyed by (regime label, ε, F), used by
/// the CSV writers.
pub fn points_by_regime<'a>(
    cfg: &RunConfig,
    points: &'a [PointResult],
) -> BTreeMap<usize, Vec<&'a PointResult>> {
    let regimes = cfg.regimes();
    let mut out: BTreeMap<usize, Vec<&PointResult>> = BTreeMap::new();
    for p in points.iter().filter(|p| p.spec.shape == cfg.geometry.shape) {
        if let Some(k) = regimes.iter().position(|r| *r == p.spec.regime()) {
            out.entry(k).or_default().push(p);
        }
    }
    out
}
