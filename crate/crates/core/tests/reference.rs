use hmlab::config::Method;
use hmlab::reference::{linf_error, reference_run_with, ReferenceOptions};
use hmlab::{Exec, InitialCondition, ReferenceWalls, SimConfig};

fn opts(walls: ReferenceWalls, margin_scale: f64) -> ReferenceOptions {
    ReferenceOptions {
        margin_scale,
        walls,
        exec: Exec::default(),
        ..ReferenceOptions::default()
    }
}

#[test]
fn a_wider_margin_does_not_change_the_reference() {
    for init in [
        InitialCondition::bump(10.0, [1.0, 1.0]),
        InitialCondition::bump(1.0, [1.0, 0.0]),
        InitialCondition::random(5),
    ] {
        let mut cfg = SimConfig::baseline(Method::Smart);
        cfg.init = init;
        for walls in [ReferenceWalls::AllSides, ReferenceWalls::Shared] {
            let a = reference_run_with(&cfg, &opts(walls, 1.0)).unwrap();
            let b = reference_run_with(&cfg, &opts(walls, 1.5)).unwrap();
            let d = linf_error(&a, &b).unwrap();
            assert!(d < 1e-12, "{walls:?}: {d:e}");
        }
    }
}

#[test]
fn references_are_deterministic_and_method_independent() {
    let cfg = SimConfig::baseline(Method::Berenger);
    let a = reference_run_with(&cfg, &opts(ReferenceWalls::Shared, 1.0)).unwrap();
    let b = reference_run_with(&cfg.with_method(Method::HmlV3), &opts(ReferenceWalls::Shared, 1.0)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn shrinking_the_margin_is_rejected() {
    let cfg = SimConfig::baseline(Method::Smart);
    let e = reference_run_with(&cfg, &opts(ReferenceWalls::AllSides, 0.9)).unwrap_err();
    assert_eq!(e.exit_code(), 1);
}
