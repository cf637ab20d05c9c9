use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use slipflow::analysis::*;
use slipflow::boundary_layer::{solve_cell_problems, CellConstants, CellProblems};
use slipflow::geometry::{build_bl_slab, build_grid_domain, InclusionShape, UnitCell};
use slipflow::saddle::StaggeredField;
use slipflow::scaling::{ComposedApproximation, CounterflowCorrection, Order, ScalingParams};
use slipflow::Error;

fn ellipse() -> &'static (UnitCell, CellProblems) {
    static C: OnceLock<(UnitCell, CellProblems)> = OnceLock::new();
    C.get_or_init(|| {
        let cell = UnitCell::new(InclusionShape::Superellipse {
            half_width: 0.3,
            half_height: 0.15,
            exponent: 2.0,
            rotation: PI / 6.0,
        })
        .unwrap();
        let slab = build_bl_slab(&cell, 5, 3.0, 32).unwrap();
        let cells = solve_cell_problems(&slab).unwrap();
        (cell, cells)
    })
}

#[test]
fn weighted_norm_of_a_constant_fracture_field() {
    let p = ScalingParams::from_eta(0.125, 0.5, 1.0);
    let d = build_grid_domain(&UnitCell::disc(0.25).unwrap(), 0.125, p.delta, 32).unwrap();
    let g = d.grid.clone();
    let mut f = StaggeredField::zeros(g.clone());
    for j in d.porous_rows..g.ny {
        for i in 0..g.nx {
            if g.u_active(i, j) {
                f.u[j * g.nx + i] = 1.0;
            }
        }
    }
    let w = weighted_norm(&f, WeightSet::Corrector, &p).unwrap();
    assert_eq!(w.omega2, 0.0);
    let expected = p.epsilon.powf(1.0 - p.delta) * d.fracture_height.sqrt();
    assert!((w.omega1 - expected).abs() < 1e-12 * expected, "{} vs {expected}", w.omega1);
    let a = weighted_norm(&f, WeightSet::Apriori, &p).unwrap();
    assert!((a.omega1 / w.omega1 - p.epsilon.powf(-0.5)).abs() < 1e-12);
}

#[test]
fn second_order_adds_exactly_the_second_layer() {
    let (_, cells) = ellipse();
    let p = ScalingParams::from_eta(0.125, 0.5, 1.0);
    let h = 0.23;
    let one = ComposedApproximation::new(p, h, cells.first.clone(), Some(cells.second.clone()), Order::One).unwrap();
    let two = one.with_order(Order::Two).unwrap();
    assert_eq!(one.terms()[0], two.terms()[0]);
    let t = two.terms()[1];
    for (x1, x2) in [(0.01, 0.02), (0.4, 0.1), (0.77, -0.03), (0.5, 0.2)] {
        let (u1, v1) = one.velocity_at(x1, x2);
        let (u2, v2) = two.velocity_at(x1, x2);
        let (bu, bv) = cells.second.velocity_at(x1 / p.epsilon, x2 / p.epsilon);
        let du = t.coef * (bu - t.counterflow * x2.max(0.0) / h);
        assert!((u2 - u1 - du).abs() < 1e-15, "{} vs {du}", u2 - u1);
        assert!((v2 - v1 - t.coef * bv).abs() < 1e-15);
    }
}

#[test]
fn order_two_needs_the_second_layer() {
    let (_, cells) = ellipse();
    let p = ScalingParams::from_eta(0.125, 0.5, 1.0);
    assert!(matches!(
        ComposedApproximation::new(p, 0.2, cells.first.clone(), None, Order::Two),
        Err(Error::MissingSecondLayer)
    ));
}

#[test]
fn closed_loop_regression_recovers_the_generating_law() {
    let (cell, cells) = ellipse();
    let c = CellConstants::from_layers(cells);
    let p = ScalingParams::from_eta(0.125, 0.5, 1.0);
    let d = build_grid_domain(cell, 0.125, p.delta, 32).unwrap();
    for corr in [CounterflowCorrection::Consistent, CounterflowCorrection::AsPublished] {
        let pred = slip_prediction(&c, &p, d.fracture_height, corr);
        let s = closed_loop_samples(&c, &p, d.fracture_height, corr, &[0.25, 0.5, 1.0]);
        let fit = slip_regression(&s).unwrap();
        assert!((fit.a_lin - pred.a_lin_pred).abs() < 1e-10 * pred.a_lin_pred.abs());
        assert!((fit.a_quad - pred.a_quad_taylor).abs() < 1e-3 * pred.a_quad_taylor.abs());
    }
}

#[test]
fn consistent_and_published_corrections_bracket_the_leading_term() {
    let (cell, cells) = ellipse();
    let c = CellConstants::from_layers(cells);
    let p = ScalingParams::from_eta(0.125, 0.5, 1.0);
    let h = build_grid_domain(cell, 0.125, p.delta, 32).unwrap().fracture_height;
    let lead = -p.epsilon * c.c1;
    let cons = slip_prediction(&c, &p, h, CounterflowCorrection::Consistent).a_lin_pred;
    let publ = slip_prediction(&c, &p, h, CounterflowCorrection::AsPublished).a_lin_pred;
    assert!(cons < lead && lead < publ, "{cons} {lead} {publ}");
}

#[test]
fn saffman_check_needs_three_samples() {
    let s = SlipSample { force: 1.0, epsilon: 0.25, eta: Some(0.5), v1_eff: 1.0, shear_eff: 2.0 };
    assert!(matches!(
        saffman_check(&[s, s], 1.0, |_| 0.5),
        Err(Error::InsufficientPoints { got: 2, .. })
    ));
}

proptest! {
    #[test]
    fn rate_fit_is_exact_on_power_laws(rate in 0.2f64..4.0, c in 1e-6f64..1e3) {
        let pts: Vec<(f64, f64)> = [0.25, 0.125, 0.0625, 0.03125].iter().map(|&e: &f64| (e, c * e.powf(rate))).collect();
        let f = fit_rates(&pts).unwrap();
        prop_assert!((f.rate - rate).abs() < 1e-10);
        prop_assert!((f.intercept - c.ln()).abs() < 1e-8);
        prop_assert!(f.r_squared > 1.0 - 1e-12);
    }

    #[test]
    fn slip_regression_is_exact_on_quadratics(
        a in -1.0f64..1.0,
        b in -1.0f64..1.0,
        s0 in 0.1f64..2.0,
    ) {
        let samples: Vec<SlipSample> = [1.0, 2.0, 4.0, -1.0].iter().map(|k| {
            let s = k * s0;
            SlipSample { force: *k, epsilon: 0.1, eta: None, v1_eff: a * s + b * s * s, shear_eff: s }
        }).collect();
        let f = slip_regression(&samples).unwrap();
        prop_assert!((f.a_lin - a).abs() < 1e-9);
        prop_assert!((f.a_quad - b).abs() < 1e-9);
        prop_assert!(f.residual < 1e-9);
    }

    #[test]
    fn one_parameter_family_satisfies_the_hypotheses(eta in 0.01f64..1.49) {
        let p = ScalingParams::from_eta(0.125, eta, 1.0);
        let r = p.validate();
        prop_assert!(r.all_hold(), "{:?}", r);
        prop_assert!((r.get("H1").unwrap().margin - eta / 4.0).abs() < 1e-12);
        prop_assert!((r.get("H3").unwrap().margin - eta / 3.0).abs() < 1e-12);
    }

    #[test]
    fn admissible_exponents_order_the_rates(delta in 0.01f64..0.99, gamma in 0.01f64..1.49) {
        let p = ScalingParams::new(0.125, delta, gamma, 1.0);
        let r = p.rates();
        if p.validate().all_hold() {
            prop_assert!(r.apriori < r.order0);
            prop_assert!(r.order0 < r.order1);
            prop_assert!(r.order1 < r.order2);
        }
        // the steps are the hypothesis margins
        prop_assert!((r.order1 - r.order0 - (3.0 * delta - 2.0 * gamma)).abs() < 1e-12);
        prop_assert!((r.order2 - r.order1 - (2.0 * gamma + 1.0 - 4.0 * delta)).abs() < 1e-12);
    }

    #[test]
    fn linear_law_residual_vanishes_on_linear_samples(a in 0.01f64..1.0, s in 0.1f64..10.0) {
        let smp = SlipSample { force: 1.0, epsilon: 0.1, eta: None, v1_eff: a * s, shear_eff: s };
        prop_assert!(linear_law_residual(&smp, a) < 1e-14);
    }
}
