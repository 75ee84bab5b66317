use ergolab::experiments::*;
use ergolab::maps::{MapModel, ReferencePartition};
use ergolab::sampling::CSequence;

fn boole() -> (MapModel, ReferencePartition) {
    let map = MapModel::boole();
    let part = ReferencePartition::canonical(&map).unwrap();
    (map, part)
}

#[test]
fn default_construction_diverges() {
    let (map, part) = boole();
    let spec = CounterexampleSpec { samples: 20_000, ..CounterexampleSpec::default() };
    let r = counterexample_experiment(&map, &part, &spec).unwrap();
    assert!((r.total_mass - 1.0).abs() < 1e-14);
    assert!(r.max_tail_error < 1e-9);
    for row in &r.rows {
        assert!((row.tail_levels - row.tail_target).abs() < 1e-12);
        // canonical partition: every n >= 2 is a level
        assert_eq!(row.n_k, row.k as u64 + 1);
    }
    assert!(r.monotone);
    assert!(r.final_ratio > 10.0, "{}", r.final_ratio);
}

#[test]
fn k_max_bounded_by_the_level_count() {
    let (map, part) = boole();
    let spec = CounterexampleSpec { k_max: 100_000, samples: 10, ..CounterexampleSpec::default() };
    assert!(counterexample_experiment(&map, &part, &spec).is_err());
}

#[test]
fn power_sequence_levels_are_exact() {
    let (map, part) = boole();
    let spec = CounterexampleSpec {
        c: CSequence::Power { theta: 0.5 },
        k_max: 10,
        samples: 1000,
        ..CounterexampleSpec::default()
    };
    let r = counterexample_experiment(&map, &part, &spec).unwrap();
    assert!(r.max_tail_error < 1e-9, "{}", r.max_tail_error);
}
