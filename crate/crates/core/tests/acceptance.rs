use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use ergolab::entrance::Component;
use ergolab::experiments::*;
use ergolab::invariant::Renewal;
use ergolab::maps::{MapModel, ReferencePartition};
use ergolab::orbitstats::OrbitEngine;
use ergolab::report::{estimates_csv, table_csv, RunMeta};
use ergolab::sampling::{entrance_law, InitialLaw, Sampler};
use ergolab::specfun::{
    lamperti_cdf_closed, lamperti_cdf_integral, mittag_leffler_cdf, mittag_leffler_laplace_check,
};
use ergolab::stats::log_grid;

const SEED: u64 = 20_240_601;

type Outcome = Result<(bool, String), String>;

struct Harness {
    failures: usize,
}

impl Harness {
    fn run(&mut self, id: u32, name: &str, f: impl FnOnce() -> Outcome) {
        let t = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !ok {
            self.failures += 1;
        }
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {id} ({name}) [{:.1}s]: {detail}", t.elapsed().as_secs_f64());
    }
}

fn boole() -> (MapModel, ReferencePartition) {
    let map = MapModel::boole();
    let part = ReferencePartition::canonical(&map).unwrap();
    (map, part)
}

fn meta() -> RunMeta {
    RunMeta { config_hash: "acceptance".into(), seed: SEED }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn identities() -> Outcome {
    let (map, part) = boole();
    let reports = identity_suite(&map, &part, SEED).map_err(s)?;
    let ok = reports.iter().all(|r| r.passed);
    let detail = reports
        .iter()
        .map(|r| format!("{}={:.2e}(<{:.0e})", r.name, r.value, r.tolerance))
        .collect::<Vec<_>>()
        .join(" ");
    Ok((ok, detail))
}

fn special_functions() -> Outcome {
    let mut ml = 0.0f64;
    for i in 0..=120 {
        let t = i as f64 * 0.05;
        ml = ml.max((mittag_leffler_cdf(0.5, t).map_err(s)? - statrs::function::erf::erf(t / 2.0)).abs());
    }
    let mut lamperti = 0.0f64;
    for alpha in [0.1, 0.3, 0.5, 0.7, 0.9] {
        for b in [0.2, 0.5, 1.0, 2.0, 5.0] {
            for j in 1..=9 {
                let t = j as f64 / 10.0;
                let d = lamperti_cdf_closed(alpha, b, t).map_err(s)? - lamperti_cdf_integral(alpha, b, t).map_err(s)?;
                lamperti = lamperti.max(d.abs());
            }
        }
    }
    let mut arcsine = 0.0f64;
    for j in 0..=100 {
        let t = j as f64 / 100.0;
        let d = lamperti_cdf_closed(0.5, 1.0, t).map_err(s)? - 2.0 / PI * t.sqrt().asin();
        arcsine = arcsine.max(d.abs());
    }
    let mut laplace = 0.0f64;
    for lambda in [0.1, 0.5, 1.0, 2.0, 5.0] {
        for alpha in [0.3, 0.5, 0.8] {
            let (a, b) = mittag_leffler_laplace_check(alpha, lambda).map_err(s)?;
            laplace = laplace.max((a - b).abs());
        }
    }
    let ok = ml < 1e-8 && lamperti < 1e-8 && arcsine < 1e-10 && laplace < 1e-8;
    Ok((
        ok,
        format!("ML-erf {ml:.1e} lamperti {lamperti:.1e} arcsine {arcsine:.1e} ML-laplace {laplace:.1e}"),
    ))
}

fn renewal_constants() -> Outcome {
    let (map, part) = boole();
    let ren = Renewal::new(&map, &part).map_err(s)?;
    let mu = (ren.mu_y() - 2f64.sqrt()).abs();
    let table = ren.wandering_table(1_000_000).map_err(s)?;
    let fit = table.fit(1000, 1_000_000, 40).map_err(s)?;
    let q: Vec<f64> = [1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&x: &f64| ren.q_laplace(x).map(|v| v * x.sqrt()))
        .collect::<Result<_, _>>()
        .map_err(s)?;
    let qmax = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let qmin = q.iter().cloned().fold(f64::INFINITY, f64::min);
    let spread = qmax / qmin - 1.0;
    let beta = table.beta_hat(1_000_000);
    let ok = mu < 1e-12 && (0.48..=0.52).contains(&fit.slope) && spread < 0.03 && (beta - 0.5).abs() < 0.01;
    Ok((
        ok,
        format!(
            "|μ(Y)-√2|={mu:.1e} slope={:.4} Q√s spread={:.2}% β̂0={beta:.4}",
            fit.slope,
            100.0 * spread
        ),
    ))
}

fn uniform_sampler() -> Result<Sampler, String> {
    let (map, part) = boole();
    let law = InitialLaw::uniform(0.2, 0.8).map_err(s)?;
    Sampler::new(law, OrbitEngine::new(&map, &part)).map_err(s)
}

fn limit_laws(out: &mut Vec<(String, String)>) -> Outcome {
    let sampler = uniform_sampler()?;
    let t_grid: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    let mut ok = true;
    let mut detail = Vec::new();
    for stat in [Statistic::SY, Statistic::Z, Statistic::SA0] {
        let grid = if stat == Statistic::SY { t_grid.iter().map(|t| 3.0 * t).collect() } else { t_grid.clone() };
        let spec = CdfSpec { statistic: stat, n: 100_000, samples: 10_000, seed: SEED, t_grid: grid };
        let table = cdf_experiment(&sampler, &spec).map_err(s)?;
        ok &= table.ks <= 0.05;
        detail.push(format!("KS({})={:.4}", stat.name(), table.ks));
        out.push((format!("cdf_{}", stat.name()), table_csv(&meta(), &table.rows).map_err(s)?));
    }
    Ok((ok, detail.join(" ")))
}

const LD_GRID: [u64; 3] = [1000, 10_000, 100_000];

fn ld_plateau(out: &mut Vec<(String, String)>) -> Outcome {
    let (map, part) = boole();
    let engine = OrbitEngine::new(&map, &part);
    let h512 = |c| entrance_law(&map, &part, 512, c);
    let sharp = [
        (Statistic::Z, h512(Component::Total).map_err(s)?),
        (Statistic::SY, entrance_law(&map, &part, 1, Component::Total).map_err(s)?),
        (Statistic::SA0, h512(Component::Side0).map_err(s)?),
    ];
    let mut ok = true;
    let mut detail = Vec::new();
    for (stat, law) in sharp {
        let sampler = Sampler::new(law, engine.clone()).map_err(s)?;
        let r = ld_experiment(&sampler, &LdSpec::new(stat, LD_GRID.to_vec(), 0.3, 100_000, SEED)).map_err(s)?;
        let last = r.rows.last().unwrap().ratio;
        let pass = (last / r.target - 1.0).abs() <= 0.2 && r.plateau.spread < 0.25;
        ok &= pass;
        detail.push(format!(
            "sharp {}: ratio {:.4} (target {:.4}) spread {:.1}%",
            stat.name(),
            last,
            r.target,
            100.0 * r.plateau.spread
        ));
        out.push((format!("ld_sharp_{}", stat.name()), estimates_csv(&meta(), &r.rows).map_err(s)?));
    }
    let sampler = uniform_sampler()?;
    for stat in [Statistic::Z, Statistic::SY, Statistic::SA0] {
        let r = ld_experiment(&sampler, &LdSpec::new(stat, LD_GRID.to_vec(), 0.3, 100_000, SEED)).map_err(s)?;
        let ratios_ok = r.rows.iter().all(|x| x.ratio.is_finite() && x.ratio > 0.0);
        ok &= ratios_ok && r.plateau.spread < 0.40;
        detail.push(format!(
            "bounded {}: C1={:.4} C2={:.4} spread {:.1}%",
            stat.name(),
            r.plateau.min,
            r.plateau.max,
            100.0 * r.plateau.spread
        ));
        out.push((format!("ld_bounded_{}", stat.name()), estimates_csv(&meta(), &r.rows).map_err(s)?));
    }
    Ok((ok, detail.join("; ")))
}

fn counterexample(out: &mut Vec<(String, String)>) -> Outcome {
    let (map, part) = boole();
    let spec = CounterexampleSpec { seed: SEED, ..CounterexampleSpec::default() };
    let r = counterexample_experiment(&map, &part, &spec).map_err(s)?;
    let target_20 = r.rows[19].tail_target.recip();
    let mass_err = (r.total_mass - 1.0).abs();
    let ok = mass_err < 1e-14 && r.max_tail_error < 1e-9 && r.monotone && r.final_ratio > 10.0 && target_20 > 10.0;
    let rows: Vec<EstimateCI> = r.rows.iter().map(|x| x.estimate).collect();
    out.push(("counterexample".into(), estimates_csv(&meta(), &rows).map_err(s)?));
    Ok((
        ok,
        format!(
            "mass err {mass_err:.1e}, tail err {:.1e}, c(N_20)^(-α/2)={target_20:.2}, monotone={}, final ratio {:.3}",
            r.max_tail_error, r.monotone, r.final_ratio
        ),
    ))
}

fn thaler(out: &mut Vec<(String, String)>) -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [1.5, 2.0, 3.0] {
        let map = MapModel::thaler(p, 2f64.powf(p)).map_err(s)?;
        let rows = thaler_asymptotics_check(&map, &[100_000]).map_err(s)?;
        let part = ReferencePartition::canonical(&map).map_err(s)?;
        let law = InitialLaw::uniform(part.c0, part.c1).map_err(s)?;
        let sampler = Sampler::new(law, OrbitEngine::new(&map, &part)).map_err(s)?;
        let tail = thaler_tail_experiment(&sampler, &log_grid(100, 100_000, 13), 100_000, SEED).map_err(s)?;
        let ratio_err = (rows[0].ratio - 1.0).abs();
        let slope_err = (tail.slope + 1.0 / p).abs();
        ok &= ratio_err < 0.05 && slope_err < 0.05;
        detail.push(format!(
            "p={p}: |ratio-1|={ratio_err:.1e} slope={:.4} (target {:.4})",
            tail.slope,
            -1.0 / p
        ));
        out.push((format!("thaler_tail_p{p}"), table_csv(&meta(), &tail.tail).map_err(s)?));
    }
    Ok((ok, detail.join("; ")))
}

fn write_outputs(outputs: &[(String, String)]) {
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    if std::fs::create_dir_all(&dir).is_ok() {
        for (name, body) in outputs {
            let _ = std::fs::write(dir.join(format!("{name}.csv")), body);
        }
    }
}

fn main() -> ExitCode {
    let mut h = Harness { failures: 0 };
    let mut outputs = Vec::new();
    h.run(1, "exact identities", identities);
    h.run(2, "special functions", special_functions);
    h.run(3, "renewal constants", renewal_constants);
    h.run(4, "limit laws", || limit_laws(&mut outputs));
    h.run(5, "large-deviation plateau", || ld_plateau(&mut outputs));
    h.run(6, "counterexample", || counterexample(&mut outputs));
    h.run(7, "Thaler family", || thaler(&mut outputs));
    write_outputs(&outputs);
    h.run(8, "reproducibility", || {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().map_err(s)?;
        let mut again = Vec::new();
        pool.install(|| -> Result<(), String> {
            limit_laws(&mut again)?;
            ld_plateau(&mut again)?;
            counterexample(&mut again)?;
            thaler(&mut again)?;
            Ok(())
        })?;
        let same = again.len() == outputs.len()
            && again.iter().zip(&outputs).all(|(a, b)| a == b);
        let baseline = rayon::current_num_threads();
        Ok((same, format!("{} CSV files, {baseline} vs 3 workers, byte-identical={same}", outputs.len())))
    });
    if h.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
