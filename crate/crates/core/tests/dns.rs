use std::sync::OnceLock;

use slipflow::analysis::{slip_prediction, SlipSample};
use slipflow::boundary_layer::{solve_cell_problems, CellConstants};
use slipflow::dns::*;
use slipflow::geometry::{build_grid_domain, GridDomain, UnitCell};
use slipflow::saddle::PicardOptions;
use slipflow::scaling::{CounterflowCorrection, ScalingParams};
use slipflow::Error;

fn cell() -> UnitCell {
    UnitCell::disc(0.25).unwrap()
}

fn domain(eps: f64, eta: f64) -> GridDomain {
    let p = ScalingParams::from_eta(eps, eta, 1.0);
    build_grid_domain(&cell(), eps, p.delta, 32).unwrap()
}

fn constants() -> &'static CellConstants {
    static C: OnceLock<CellConstants> = OnceLock::new();
    C.get_or_init(|| {
        let slab = slipflow::geometry::build_bl_slab(&cell(), 5, 3.0, 32).unwrap();
        CellConstants::from_layers(&solve_cell_problems(&slab).unwrap())
    })
}

fn stokes() -> DnsOptions {
    DnsOptions {
        convection: false,
        ..DnsOptions::default()
    }
}

#[test]
fn stokes_flow_is_linear_in_the_force() {
    let d = domain(0.25, 0.5);
    let p = ScalingParams::from_eta(0.25, 0.5, 1.0);
    let a = run_dns(&p, &d, &stokes()).unwrap();
    let b = run_dns(&p.with_force(-2.0), &d, &stokes()).unwrap();
    let diff = b.field.axpy(2.0, &a.field).unwrap().max_abs_velocity();
    assert!(diff < 1e-10 * a.field.max_abs_velocity(), "{diff:e}");
}

#[test]
fn interface_shear_matches_corrected_poiseuille() {
    let (eps, eta) = (0.125, 0.5);
    let d = domain(eps, eta);
    let p = ScalingParams::from_eta(eps, eta, 1.0);
    let sol = run_dns(&p, &d, &DnsOptions::default()).unwrap();
    let tr = interface_trace(&sol).unwrap();
    let pred = slip_prediction(constants(), &p, d.fracture_height, CounterflowCorrection::Consistent);
    let s = pred.sample(&p, 1.0);
    assert!((tr.shear_mean - s.shear_eff).abs() < 0.02 * s.shear_eff, "{} vs {}", tr.shear_mean, s.shear_eff);
    // v = −εC1 s to leading order
    let lin = -eps * constants().c1 * tr.shear_mean;
    assert!((tr.slip_mean - lin).abs() < 1e-2 * lin, "{} vs {lin}", tr.slip_mean);
    // bare Poiseuille shear F H / (2μ) without the layer correction
    let bare = p.force * d.fracture_height / (2.0 * p.viscosity());
    assert!(tr.shear_mean < bare && tr.shear_mean > 0.5 * bare);
}

#[test]
fn momentum_budget_closes() {
    let d = domain(0.25, 0.9);
    let p = ScalingParams::from_eta(0.25, 0.9, 1.0);
    let sol = run_dns(&p, &d, &DnsOptions::default()).unwrap();
    let b = momentum_budget(&sol).unwrap();
    assert!(b.forcing > 0.0);
    assert!(b.imbalance().abs() < 1e-8 * b.forcing, "{b:?}");
    assert!(b.viscous > 0.0);
}

#[test]
fn fracture_mean_is_close_to_poiseuille_mean() {
    for eta in [0.5, 0.9] {
        let d = domain(0.125, eta);
        let p = ScalingParams::from_eta(0.125, eta, 1.0);
        let sol = run_dns(&p, &d, &DnsOptions::default()).unwrap();
        // ε^{2δ−γ} F / 12
        let pm = p.epsilon.powf(2.0 * p.delta - p.gamma) * p.force / 12.0;
        let ratio = sol.fracture_mean_velocity() / pm;
        assert!((0.5..1.5).contains(&ratio), "eta {eta}: ratio {ratio}");
        assert!(sol.stats.residual <= 1e-10);
    }
}

#[test]
fn pore_column_reproduces_the_full_width_solution() {
    let d = domain(0.25, 0.5);
    let p = ScalingParams::from_eta(0.25, 0.5, 1.0);
    let column = run_dns(&p, &d, &DnsOptions::default()).unwrap();
    let full = run_dns(&p, &d, &DnsOptions { full_width: true, ..DnsOptions::default() }).unwrap();
    assert_eq!(full.domain.grid.nx, 4 * column.domain.grid.nx);
    let tc = interface_trace(&column).unwrap();
    let tf = interface_trace(&full).unwrap();
    assert_eq!(tf.slip.len(), 4);
    for s in &tf.slip {
        assert!((s - tc.slip_mean).abs() < 1e-9 * tc.slip_mean.abs(), "{s} vs {}", tc.slip_mean);
    }
    assert!((tf.shear_mean - tc.shear_mean).abs() < 1e-9 * tc.shear_mean);
    let nc = column.norms(slipflow::saddle::Region::Fracture).unwrap();
    let nf = full.norms(slipflow::saddle::Region::Fracture).unwrap();
    assert!((nc.l2 - nf.l2).abs() < 1e-9 * nf.l2);
}

#[test]
fn reversing_the_force_reverses_the_slip_law_to_leading_order() {
    let d = domain(0.125, 0.5);
    let p = ScalingParams::from_eta(0.125, 0.5, 1.0);
    let fwd = interface_trace(&run_dns(&p, &d, &DnsOptions::default()).unwrap()).unwrap();
    let back = interface_trace(&run_dns(&p.with_force(-1.0), &d, &DnsOptions::default()).unwrap()).unwrap();
    let s = SlipSample { force: 1.0, epsilon: 0.125, eta: Some(0.5), v1_eff: fwd.slip_mean, shear_eff: fwd.shear_mean };
    assert!((fwd.slip_mean + back.slip_mean).abs() < 1e-6 * s.v1_eff.abs());
    assert!((fwd.shear_mean + back.shear_mean).abs() < 1e-6 * s.shear_eff.abs());
}

#[test]
fn out_of_hypothesis_parameters_are_gated() {
    let p = ScalingParams::new(0.25, 0.9, 1.0, 1.0);
    let d = build_grid_domain(&cell(), 0.25, 0.9, 32).unwrap();
    assert!(matches!(run_dns(&p, &d, &DnsOptions::default()), Err(Error::HypothesisViolated(_))));
    let opts = DnsOptions { allow_out_of_hypothesis: true, ..DnsOptions::default() };
    assert!(run_dns(&p, &d, &opts).is_ok());
}

#[test]
fn mismatched_domain_is_rejected() {
    let d = domain(0.25, 0.5);
    let p = ScalingParams::from_eta(0.125, 0.5, 1.0);
    assert!(matches!(run_dns(&p, &d, &DnsOptions::default()), Err(Error::GridMismatch(_))));
}

#[test]
fn picard_stops_at_the_iteration_cap() {
    let d = domain(0.25, 0.5);
    let p = ScalingParams::from_eta(0.25, 0.5, 1.0);
    let opts = DnsOptions {
        picard: PicardOptions { tol: 1e-15, max_iter: 1, ..PicardOptions::default() },
        ..DnsOptions::default()
    };
    assert!(matches!(run_dns(&p, &d, &opts), Err(Error::MaxIterExceeded { .. })));
}
