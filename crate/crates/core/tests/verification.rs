use slipflow::geometry::InclusionShape;
use slipflow::verification::*;

#[test]
fn strip_with_stress_jump_is_exact() {
    for n in [8, 32] {
        let r = two_layer_strip(n).unwrap();
        assert!(r.max_error <= 1e-8, "{r:?}");
        assert!(r.residual <= 1e-10);
    }
}

#[test]
fn manufactured_solution_converges_at_second_order() {
    let runs: Vec<ReferenceRun> = [16, 32, 64].iter().map(|&n| manufactured_stokes(n).unwrap()).collect();
    for o in observed_orders(&runs) {
        assert!(o >= 1.8, "order {o}");
    }
    assert!(runs.iter().all(|r| r.residual <= 1e-10));
}

#[test]
fn shape_serialization_is_strict() {
    let s: InclusionShape = serde_json::from_str(r#"{"kind":"disc","radius":0.2}"#).unwrap();
    assert_eq!(s, InclusionShape::disc(0.2));
    assert!(serde_json::from_str::<InclusionShape>(r#"{"kind":"disc","radius":0.2,"r":1}"#).is_err());
    assert!(serde_json::from_str::<InclusionShape>(r#"{"kind":"blob"}"#).is_err());
}
