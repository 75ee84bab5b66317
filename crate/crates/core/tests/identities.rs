use ergolab::error::Error;
use ergolab::experiments::*;
use ergolab::maps::{MapModel, ReferencePartition};

fn boole() -> (MapModel, ReferencePartition) {
    let map = MapModel::boole();
    let part = ReferencePartition::canonical(&map).unwrap();
    (map, part)
}

fn spec(s1: f64, s2: f64) -> DoubleLaplaceSpec {
    DoubleLaplaceSpec { s1, s2, ..DoubleLaplaceSpec::default() }
}

#[test]
fn suite_passes_on_boole() {
    let (map, part) = boole();
    let reports = identity_suite(&map, &part, 7).unwrap();
    assert_eq!(reports.len(), 5);
    for r in reports {
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn z_identity_at_zero_s2() {
    let (map, part) = boole();
    let r = double_laplace_check_z(&map, &part, &spec(0.5, 0.0)).unwrap();
    assert!(r.passed && r.rel_error < 1e-4, "{r:?}");
}

#[test]
fn z_rhs_decreases_in_s2() {
    let (map, part) = boole();
    let rhs: Vec<f64> = [0.0, 0.3, 1.0, 3.0]
        .iter()
        .map(|&s2| double_laplace_check_z(&map, &part, &spec(0.5, s2)).unwrap().rhs)
        .collect();
    assert!(rhs.windows(2).all(|w| w[1] < w[0]), "{rhs:?}");
}

#[test]
fn sy_identity_at_large_s2() {
    let (map, part) = boole();
    let r = double_laplace_check_sy(&map, &part, &spec(0.4, 10.0)).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn sa_identity_collapses_at_zero_sides() {
    let (map, part) = boole();
    let s = DoubleLaplaceSpec { s1: 0.5, sides: [0.0, 0.0], ..DoubleLaplaceSpec::default() };
    let r = double_laplace_check_sa(&map, &part, &s).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn sa_identity_is_side_symmetric() {
    let (map, part) = boole();
    let a = DoubleLaplaceSpec { s1: 0.5, sides: [0.2, 0.7], ..DoubleLaplaceSpec::default() };
    let b = DoubleLaplaceSpec { sides: [0.7, 0.2], ..a };
    let (ra, rb) = (
        double_laplace_check_sa(&map, &part, &a).unwrap(),
        double_laplace_check_sa(&map, &part, &b).unwrap(),
    );
    assert!((ra.rhs / rb.rhs - 1.0).abs() < 1e-12);
    assert!((ra.lhs / rb.lhs - 1.0).abs() < 1e-4);
}

#[test]
fn identities_hold_off_the_canonical_partition() {
    let map = MapModel::boole();
    let part = ReferencePartition::new(&map, 0.3, 0.65).unwrap();
    let z = double_laplace_check_z(&map, &part, &spec(0.5, 0.3)).unwrap();
    let sy = double_laplace_check_sy(&map, &part, &spec(0.4, 0.6)).unwrap();
    let sa = double_laplace_check_sa(&map, &part, &DoubleLaplaceSpec::default()).unwrap();
    assert!(z.passed && sy.passed && sa.passed, "{z:?} {sy:?} {sa:?}");
}

#[test]
fn tiny_laplace_variable_exceeds_the_budget() {
    let (map, part) = boole();
    let r = double_laplace_check_z(&map, &part, &spec(1e-5, 0.3));
    assert!(matches!(r, Err(Error::BudgetExceeded { .. })), "{r:?}");
}

#[test]
fn bad_laplace_variables_rejected() {
    let (map, part) = boole();
    assert!(double_laplace_check_z(&map, &part, &spec(0.0, 0.3)).is_err());
    assert!(double_laplace_check_sy(&map, &part, &spec(0.4, -1.0)).is_err());
}

#[test]
fn thaler_has_no_exact_identities() {
    let map = MapModel::thaler(2.0, 4.0).unwrap();
    let part = ReferencePartition::canonical(&map).unwrap();
    let r = double_laplace_check_z(&map, &part, &spec(0.5, 0.3));
    assert!(matches!(r, Err(Error::NoClosedFormDensity(_))));
}

#[test]
fn measure_preservation_on_random_intervals() {
    let map = MapModel::boole();
    assert!(measure_preservation_residual(&map, 1000, 3).unwrap() < 1e-10);
}
