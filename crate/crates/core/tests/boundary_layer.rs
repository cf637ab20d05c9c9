use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use slipflow::boundary_layer::*;
use slipflow::geometry::{build_bl_slab, InclusionShape, UnitCell};
use slipflow::Error;

fn disc() -> &'static CellProblems {
    static C: OnceLock<CellProblems> = OnceLock::new();
    C.get_or_init(|| {
        let slab = build_bl_slab(&UnitCell::disc(0.25).unwrap(), 5, 3.0, 32).unwrap();
        solve_cell_problems(&slab).unwrap()
    })
}

fn tilted() -> InclusionShape {
    InclusionShape::Superellipse {
        half_width: 0.3,
        half_height: 0.15,
        exponent: 2.0,
        rotation: PI / 6.0,
    }
}

fn ellipse() -> &'static CellProblems {
    static C: OnceLock<CellProblems> = OnceLock::new();
    C.get_or_init(|| {
        let slab = build_bl_slab(&UnitCell::new(tilted()).unwrap(), 5, 3.0, 32).unwrap();
        solve_cell_problems(&slab).unwrap()
    })
}

#[test]
fn interface_flux_equals_minus_dirichlet_energy() {
    for cells in [disc(), ellipse()] {
        let c = &cells.first.constants;
        assert!(c.dirichlet_energy > 0.0);
        let gap = (c.trace_mean + c.dirichlet_energy).abs() / c.dirichlet_energy;
        assert!(gap < 1e-10, "gap {gap:e}");
    }
}

#[test]
fn stabilization_constant_is_negative() {
    assert!(disc().first.constants.far_velocity < 0.0);
    assert!(ellipse().first.constants.far_velocity < 0.0);
}

#[test]
fn layers_decay_exponentially() {
    let first = &disc().first;
    let above = fit_decay(first, Side::Above).unwrap();
    let pressure = fit_pressure_decay(first).unwrap();
    let below = fit_decay(first, Side::Below).unwrap();
    assert!(above.rate >= 0.9 * 2.0 * PI, "{above:?}");
    assert!(pressure.rate >= 0.9 * 2.0 * PI, "{pressure:?}");
    assert!(below.rate > 0.0);
    assert!(above.points >= MIN_DECAY_POINTS);
}

#[test]
fn mirror_symmetric_disc_has_vanishing_odd_constants() {
    let c = CellConstants::from_layers(disc());
    let scale = c.c1.abs();
    assert!(c.c_omega.abs() < 1e-9 * scale, "{}", c.c_omega);
    assert!(c.c11.abs() < 1e-9 * scale, "{}", c.c11);
}

#[test]
fn second_layer_trace_vanishes_for_any_shape() {
    // Testing the two layer problems against each other gives
    // ∫ β¹₁ = −∫ (β·∇)β·β = 0.
    for cells in [disc(), ellipse()] {
        let c = CellConstants::from_layers(cells);
        let second = &cells.second.constants;
        assert!(second.trace_mean.abs() < 1e-12 * c.c1.abs(), "{:e}", second.trace_mean);
        assert!(c.beta1_trace.abs() < 1e-6 * c.c1.abs(), "{:e}", c.beta1_trace);
    }
    let c = CellConstants::from_layers(ellipse());
    assert!(c.c11.abs() > 1e-10, "tilted shape should break the symmetry: {:e}", c.c11);
}

#[test]
fn first_layer_is_linear_in_the_jump() {
    let slab = &disc().first.slab;
    let r = solve_first_layer_with_jump(slab, -2.5).unwrap();
    let c1 = disc().first.constants.far_velocity;
    assert!((r.constants.far_velocity + 2.5 * c1).abs() < 1e-10 * c1.abs());
}

#[test]
fn layer_extension_is_constant_above_and_zero_below() {
    let first = &disc().first;
    let ny = first.field.grid.ny as isize;
    assert_eq!(first.u_extended(3, ny + 10), first.constants.far_velocity);
    assert_eq!(first.u_extended(3, -1), 0.0);
    let (u, _) = first.velocity_at(0.37, 50.0);
    assert_eq!(u, first.constants.far_velocity);
}

#[test]
fn truncation_is_harmless_on_the_tilted_shape() {
    let r = truncation_study(&UnitCell::new(tilted()).unwrap(), 5, 3.0, 32).unwrap();
    assert!(r.max_shift() <= TRUNCATION_TOL, "{r:?}");
}

#[test]
fn too_short_slab_reports_the_decay_window() {
    let slab = build_bl_slab(&UnitCell::disc(0.25).unwrap(), 3, 1.0, 32).unwrap();
    let r = solve_first_layer(&slab).unwrap();
    assert!(matches!(
        fit_decay(&r, Side::Above),
        Err(Error::InsufficientDecayWindow { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn c1_negative_for_any_admissible_disc(r in 0.08f64..0.42) {
        let slab = build_bl_slab(&UnitCell::disc(r).unwrap(), 4, 2.5, 32).unwrap();
        let first = solve_first_layer(&slab).unwrap();
        prop_assert!(first.constants.far_velocity < 0.0);
        let c = &first.constants;
        prop_assert!((c.trace_mean + c.dirichlet_energy).abs() < 1e-9 * c.dirichlet_energy);
    }
}
