use ergolab::entrance::Component;
use ergolab::error::Error;
use ergolab::experiments::*;
use ergolab::invariant::Renewal;
use ergolab::maps::{MapModel, ReferencePartition};
use ergolab::orbitstats::OrbitEngine;
use ergolab::report::{estimates_csv, RunMeta};
use ergolab::sampling::{entrance_law, InitialLaw, Sampler};

fn boole() -> (MapModel, ReferencePartition, OrbitEngine) {
    let map = MapModel::boole();
    let part = ReferencePartition::canonical(&map).unwrap();
    let e = OrbitEngine::new(&map, &part);
    (map, part, e)
}

fn uniform() -> Sampler {
    let (_, _, e) = boole();
    Sampler::new(InitialLaw::uniform(0.2, 0.8).unwrap(), e).unwrap()
}

#[test]
fn records_independent_of_worker_count() {
    let s = uniform();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_records(&s, &[10, 1000], 500, 9).unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn ld_csv_is_byte_stable() {
    let s = uniform();
    let spec = LdSpec::new(Statistic::Z, vec![100, 1000], 0.3, 4000, 2);
    let meta = RunMeta { config_hash: "x".into(), seed: 2 };
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| estimates_csv(&meta, &ld_experiment(&s, &spec).unwrap().rows).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn return_times_follow_the_exact_tail() {
    let (map, part, e) = boole();
    let ren = Renewal::new(&map, &part).unwrap();
    let s = Sampler::new(entrance_law(&map, &part, 1, Component::Total).unwrap(), e).unwrap();
    let m = 20_000u64;
    for n in [1u64, 4, 16, 64] {
        let k = (0..m).filter(|&i| s.return_time(5, i, n).unwrap().exceeds(n)).count() as f64;
        let p = ren.return_tail(n) / ren.mu_y();
        let sd = (p * (1.0 - p) / m as f64).sqrt();
        assert!((k / m as f64 - p).abs() < 4.0 * sd.max(1e-4), "n={n}: {} vs {p}", k / m as f64);
    }
}

#[test]
fn entrance_draws_match_the_density() {
    let (map, part, e) = boole();
    let law = entrance_law(&map, &part, 64, Component::Total).unwrap();
    let InitialLaw::EntranceLaw(h) = &law else { unreachable!() };
    let h = h.clone();
    let s = Sampler::new(law, e.clone()).unwrap();
    let m = 4000u64;
    let mut z: Vec<f64> = (0..m).map(|i| ergolab::maps::boole_chart(s.sample(1, i).unwrap())).collect();
    z.sort_by(f64::total_cmp);
    let (lo, hi) = (h.approx().grid[0], *h.approx().grid.last().unwrap());
    let cdf = |t: f64| ergolab::quad::CompositeRule::new(4).integrate(|u| h.density(u), lo, t.clamp(lo, hi), 64);
    let ks = ergolab::stats::ks_distance(&z, cdf);
    assert!(ks < 1.63 / (m as f64).sqrt(), "KS {ks}");
}

#[test]
fn shifted_law_agrees_at_large_n() {
    let s = uniform();
    let (_, _, e) = boole();
    let shifted = Sampler::new(InitialLaw::uniform(0.2, 0.8).unwrap().shifted(5), e).unwrap();
    let spec = LdSpec::new(Statistic::Z, vec![1000, 20_000], 0.3, 20_000, 4);
    let a = ld_experiment(&s, &spec).unwrap();
    let b = ld_experiment(&shifted, &spec).unwrap();
    assert!(a.rows[1].overlaps(&b.rows[1]), "{:?} {:?}", a.rows[1], b.rows[1]);
}

#[test]
fn ld_guards() {
    let s = uniform();
    let few = LdSpec::new(Statistic::Z, vec![1000], 0.3, 10, 1);
    assert!(matches!(ld_experiment(&s, &few), Err(Error::InsufficientEvents { .. })));
    let bad = LdSpec::new(Statistic::Z, vec![1000], 1.2, 1000, 1);
    assert!(matches!(ld_experiment(&s, &bad), Err(Error::InvalidParameter(_))));
    let empty = LdSpec::new(Statistic::Z, vec![], 0.3, 1000, 1);
    assert!(ld_experiment(&s, &empty).is_err());
}

#[test]
fn sharp_tier_ratio_near_target_small_scale() {
    let (map, part, e) = boole();
    let s = Sampler::new(entrance_law(&map, &part, 512, Component::Total).unwrap(), e).unwrap();
    let r = ld_experiment(&s, &LdSpec::new(Statistic::Z, vec![1000, 10_000], 0.3, 20_000, 8)).unwrap();
    let last = r.rows.last().unwrap().ratio;
    assert!((last / r.target - 1.0).abs() < 0.1, "{last}");
}

#[test]
fn arcsine_cdfs_at_desk_scale() {
    let s = uniform();
    let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
    for st in [Statistic::Z, Statistic::SA0, Statistic::SY] {
        let spec = CdfSpec { statistic: st, n: 10_000, samples: 2000, seed: 12, t_grid: grid.clone() };
        let t = cdf_experiment(&s, &spec).unwrap();
        assert!(t.ks < 0.06, "{st:?}: {}", t.ks);
        assert!(t.rows.windows(2).all(|w| w[1].empirical >= w[0].empirical));
    }
}

#[test]
fn thaler_has_no_darling_kac_comparator() {
    let map = MapModel::thaler(2.0, 4.0).unwrap();
    let part = ReferencePartition::canonical(&map).unwrap();
    let s = Sampler::new(InitialLaw::uniform(0.2, 0.8).unwrap(), OrbitEngine::new(&map, &part)).unwrap();
    let spec = CdfSpec { statistic: Statistic::SY, n: 100, samples: 10, seed: 1, t_grid: vec![0.5] };
    assert!(matches!(cdf_experiment(&s, &spec), Err(Error::NoClosedFormDensity(_))));
}
