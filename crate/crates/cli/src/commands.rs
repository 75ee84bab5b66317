use anyhow::{bail, Context, Result};
use ergolab::entrance::{Component, Entrance};
use ergolab::experiments::*;
use ergolab::invariant::Renewal;
use ergolab::maps::{MapModel, ReferencePartition};
use ergolab::orbitstats::{simulate_orbit, OrbitEngine};
use ergolab::report::{estimates_csv, json_summary, table_csv};
use ergolab::sampling::{entrance_law, CSequence, InitialLaw, Sampler};
use ergolab::specfun::LimitLaw;
use ergolab::stats::log_grid;
use serde::Serialize;
use serde_json::json;

use crate::output::Output;
use crate::{Cli, Cmd, Common, ComponentArg, LawArgs, LawKind, LawName, MapKind, StatArg};

fn build_map(c: &Common) -> Result<MapModel> {
    Ok(match c.map {
        MapKind::Boole => MapModel::boole(),
        MapKind::Thaler => MapModel::thaler(c.p, c.k0.unwrap_or(2f64.powf(c.p)))?,
    })
}

fn build_partition(map: &MapModel, spec: &str) -> Result<ReferencePartition> {
    if spec == "canonical" {
        return Ok(ReferencePartition::canonical(map)?);
    }
    let parts: Vec<f64> = spec
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("partition must be `canonical` or `c0,c1`, got `{spec}`"))?;
    let [c0, c1] = parts[..] else {
        bail!("partition must be `canonical` or `c0,c1`, got `{spec}`");
    };
    Ok(ReferencePartition::new(map, c0, c1)?)
}

fn build_law(args: &LawArgs, map: &MapModel, part: &ReferencePartition) -> Result<InitialLaw> {
    let component = match args.component {
        ComponentArg::Total => Component::Total,
        ComponentArg::Side0 => Component::Side0,
        ComponentArg::Side1 => Component::Side1,
    };
    let law = match args.law {
        LawKind::Uniform => InitialLaw::uniform(args.a, args.b)?,
        LawKind::Entrance => entrance_law(map, part, args.entrance_n, component)?,
        LawKind::Y => entrance_law(map, part, 1, Component::Total)?,
    };
    Ok(if args.shift > 0 { law.shifted(args.shift) } else { law })
}

fn statistic(s: StatArg, lambda: f64) -> Statistic {
    match s {
        StatArg::Z => Statistic::Z,
        StatArg::Sy => Statistic::SY,
        StatArg::Sa0 => Statistic::SA0,
        StatArg::Sa1 => Statistic::SA1,
        StatArg::Weighted => Statistic::Weighted { lambda },
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    out: Output,
    name: &'static str,
}

impl Ctx<'_> {
    fn csv(&self, suffix: &str, body: String) -> Result<()> {
        self.out.write(&format!("{}{suffix}.csv", self.name), &body)
    }

    fn finish<T: Serialize>(&self, passed: Option<bool>, report: &T) -> Result<bool> {
        let body = json!({ "command": self.name, "spec": &self.cli.cmd, "report": report });
        self.out.write(&format!("{}.json", self.name), &json_summary(&self.out.meta, passed, &body)?)?;
        if passed == Some(false) {
            eprintln!("{}: check failed", self.name);
        }
        Ok(passed.unwrap_or(true))
    }
}

pub fn dispatch(cli: &Cli) -> Result<bool> {
    let c = &cli.common;
    let name = cli.cmd.name();
    let ctx = Ctx { cli, out: Output::new(cli, c.seed, c.out.clone())?, name };
    match &cli.cmd {
        Cmd::DumpCdf { law, alpha, b, points } => return dump_cdf(&ctx, *law, *alpha, *b, *points),
        Cmd::PlotScript => {
            ctx.out.write("plot_results.py", PLOT_SCRIPT)?;
            return Ok(true);
        }
        _ => {}
    }
    let map = build_map(c)?;
    let part = build_partition(&map, &c.partition)?;
    let seed = c.seed;
    match &cli.cmd {
        Cmd::Simulate { x0, n } => simulate(&ctx, &map, &part, x0, n),
        Cmd::Wandering { n_max, fit_lo, fit_hi, rows } => {
            wandering(&ctx, &map, &part, *n_max, *fit_lo, fit_hi.unwrap_or(*n_max), *rows)
        }
        Cmd::VerifyIdentities => verify_identities(&ctx, &map, &part, seed),
        Cmd::Dk { n, samples, law, max_ks } => {
            let sampler = Sampler::new(build_law(law, &map, &part)?, OrbitEngine::new(&map, &part))?;
            let t_grid = (0..=60).map(|i| i as f64 * 0.05).collect();
            let spec = CdfSpec { statistic: Statistic::SY, n: *n, samples: *samples, seed, t_grid };
            cdf(&ctx, &sampler, &spec, *max_ks)
        }
        Cmd::Arcsine { statistic: st, n, samples, law, max_ks } => {
            let statistic = match st {
                StatArg::Z | StatArg::Sa0 | StatArg::Sa1 => self::statistic(*st, 1.0),
                _ => bail!("arcsine laws cover z, sa0 and sa1"),
            };
            let sampler = Sampler::new(build_law(law, &map, &part)?, OrbitEngine::new(&map, &part))?;
            let t_grid = (0..=50).map(|i| i as f64 * 0.02).collect();
            let spec = CdfSpec { statistic, n: *n, samples: *samples, seed, t_grid };
            cdf(&ctx, &sampler, &spec, *max_ks)
        }
        Cmd::Ld {
            statistic: st,
            lambda,
            theta,
            theta_tilde,
            n,
            samples,
            min_expected,
            law,
            max_spread,
            ratio_band,
        } => {
            let spec = LdSpec {
                statistic: statistic(*st, *lambda),
                n_grid: n.clone(),
                c: CSequence::Power { theta: *theta },
                theta_tilde: theta_tilde.unwrap_or(*theta),
                samples: *samples,
                seed,
                min_expected: *min_expected,
            };
            let sampler = Sampler::new(build_law(law, &map, &part)?, OrbitEngine::new(&map, &part))?;
            ld(&ctx, &sampler, &spec, *max_spread, *ratio_band)
        }
        Cmd::ThalerAsymptotics {
            n,
            tail_samples,
            tail_lo,
            tail_hi,
            tail_points,
            max_ratio_error,
            max_slope_error,
        } => {
            let tail = (*tail_samples > 0).then(|| (log_grid(*tail_lo, *tail_hi, *tail_points), *tail_samples));
            thaler(&ctx, &map, &part, n, tail, seed, *max_ratio_error, *max_slope_error)
        }
        Cmd::Counterexample { rate, alpha, k_max, samples, min_final_ratio } => {
            let spec = CounterexampleSpec {
                c: CSequence::Exponential { rate: *rate },
                alpha: *alpha,
                k_max: *k_max,
                samples: *samples,
                seed,
            };
            counterexample(&ctx, &map, &part, &spec, *min_final_ratio)
        }
        Cmd::DumpCdf { .. } | Cmd::PlotScript => unreachable!(),
    }
}

#[derive(Serialize)]
struct SimRow {
    x0: f64,
    n: u64,
    s_y: u64,
    z_y: u64,
    s_a0: u64,
    s_a1: u64,
}

fn simulate(ctx: &Ctx, map: &MapModel, part: &ReferencePartition, x0: &[f64], n: &[u64]) -> Result<bool> {
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &x in x0 {
        let s = simulate_orbit(map, part, x, n)?;
        rows.extend(s.records.iter().map(|r| SimRow { x0: x, n: r.n, s_y: r.s_y, z_y: r.z_y, s_a0: r.s_a0, s_a1: r.s_a1 }));
        summaries.push(s);
    }
    ctx.csv("", table_csv(&ctx.out.meta, &rows)?)?;
    ctx.finish(None, &summaries)
}

#[derive(Serialize)]
struct WanderingRow {
    n: u64,
    mu_yn: f64,
    mu_yn_a0: f64,
    mu_yn_a1: f64,
    w: f64,
    w_a0: f64,
    w_a1: f64,
    beta_hat: f64,
}

fn wandering(
    ctx: &Ctx,
    map: &MapModel,
    part: &ReferencePartition,
    n_max: u64,
    fit_lo: u64,
    fit_hi: u64,
    rows: usize,
) -> Result<bool> {
    let ren = Renewal::new(map, part)?;
    let table = ren.wandering_table(n_max as usize)?;
    let fit = table.fit(fit_lo as usize, fit_hi as usize, 40)?;
    let out: Vec<WanderingRow> = log_grid(1, n_max, rows)
        .into_iter()
        .map(|n| {
            let i = n as usize;
            WanderingRow {
                n,
                mu_yn: table.mu_yn[i],
                mu_yn_a0: table.mu_yn_a0[i],
                mu_yn_a1: table.mu_yn_a1[i],
                w: table.w[i],
                w_a0: table.w_a0[i],
                w_a1: table.w_a1[i],
                beta_hat: table.beta_hat(i),
            }
        })
        .collect();
    ctx.csv("", table_csv(&ctx.out.meta, &out)?)?;
    ctx.finish(
        None,
        &json!({
            "mu_y": ren.mu_y(),
            "fit": fit,
            "alpha_hat": 1.0 - fit.slope,
            "beta0_hat": table.beta_hat(n_max as usize),
        }),
    )
}

fn verify_identities(ctx: &Ctx, map: &MapModel, part: &ReferencePartition, seed: u64) -> Result<bool> {
    let mut reports = identity_suite(map, part, seed)?;
    let yn = Entrance::new(map, part)?.check_identity_yn(5, 20, 5e-3)?;
    for (name, value, tolerance) in [
        ("yn-inside", yn.inside, 5e-3),
        ("yn-outside", yn.outside, 5e-3),
        ("yn-integrated", yn.integrated_rel, 1e-4),
    ] {
        reports.push(IdentityReport { name: name.into(), value, tolerance, passed: value < tolerance });
    }
    for r in &reports {
        println!("{:<22} {:.3e} (< {:.0e}) {}", r.name, r.value, r.tolerance, if r.passed { "ok" } else { "FAILED" });
    }
    ctx.csv("", table_csv(&ctx.out.meta, &reports)?)?;
    ctx.finish(Some(reports.iter().all(|r| r.passed)), &reports)
}

fn cdf(ctx: &Ctx, sampler: &Sampler, spec: &CdfSpec, max_ks: Option<f64>) -> Result<bool> {
    let table = cdf_experiment(sampler, spec)?;
    println!("KS distance {:.4}", table.ks);
    ctx.csv("", table_csv(&ctx.out.meta, &table.rows)?)?;
    ctx.finish(max_ks.map(|m| table.ks <= m), &table)
}

fn ld(ctx: &Ctx, sampler: &Sampler, spec: &LdSpec, max_spread: Option<f64>, band: Option<f64>) -> Result<bool> {
    let r = ld_experiment(sampler, spec)?;
    for row in &r.rows {
        println!("n={:<8} count={:<7} ratio={:.4}", row.n, row.count, row.ratio);
    }
    println!("target {:.4}, plateau spread {:.1}%", r.target, 100.0 * r.plateau.spread);
    let last = r.rows.last().expect("nonempty grid").ratio;
    let checks: Vec<bool> = [
        max_spread.map(|m| r.plateau.spread < m),
        band.map(|b| (last / r.target - 1.0).abs() <= b),
    ]
    .into_iter()
    .flatten()
    .collect();
    ctx.csv("", estimates_csv(&ctx.out.meta, &r.rows)?)?;
    ctx.finish((!checks.is_empty()).then(|| checks.iter().all(|&c| c)), &r)
}

#[allow(clippy::too_many_arguments)]
fn thaler(
    ctx: &Ctx,
    map: &MapModel,
    part: &ReferencePartition,
    n: &[u64],
    tail: Option<(Vec<u64>, u64)>,
    seed: u64,
    max_ratio_error: Option<f64>,
    max_slope_error: Option<f64>,
) -> Result<bool> {
    let rows = thaler_asymptotics_check(map, n)?;
    ctx.csv("", table_csv(&ctx.out.meta, &rows)?)?;
    let last = rows.last().expect("nonempty grid");
    println!("f_0^n(1)/u_0^-1(n) at n={}: {:.6}", last.n, last.ratio);
    let mut checks = Vec::new();
    if let Some(m) = max_ratio_error {
        checks.push((last.ratio - 1.0).abs() < m);
    }
    let tail = match tail {
        Some((grid, samples)) => {
            let law = InitialLaw::uniform(part.c0, part.c1)?;
            let sampler = Sampler::new(law, OrbitEngine::new(map, part))?;
            let t = thaler_tail_experiment(&sampler, &grid, samples, seed)?;
            println!("tail slope {:.4} (α = {:.4})", t.slope, t.alpha);
            ctx.csv("-tail", table_csv(&ctx.out.meta, &t.tail)?)?;
            if let Some(m) = max_slope_error {
                checks.push((t.slope + t.alpha).abs() < m);
            }
            Some(t)
        }
        None => None,
    };
    ctx.finish(
        (!checks.is_empty()).then(|| checks.iter().all(|&c| c)),
        &json!({ "rows": rows, "tail": tail }),
    )
}

#[derive(Serialize)]
struct CounterRow {
    k: usize,
    n_k: u64,
    c: f64,
    tail_target: f64,
    tail_levels: f64,
    tail_quadrature: f64,
    count: u64,
    #[serde(rename = "M")]
    samples: u64,
    estimate: f64,
    ci_lo: f64,
    ci_hi: f64,
    theory: f64,
    ratio: f64,
}

fn counterexample(
    ctx: &Ctx,
    map: &MapModel,
    part: &ReferencePartition,
    spec: &CounterexampleSpec,
    min_final_ratio: Option<f64>,
) -> Result<bool> {
    let r = counterexample_experiment(map, part, spec)?;
    let rows: Vec<CounterRow> = r
        .rows
        .iter()
        .map(|x| CounterRow {
            k: x.k,
            n_k: x.n_k,
            c: x.c,
            tail_target: x.tail_target,
            tail_levels: x.tail_levels,
            tail_quadrature: x.tail_quadrature,
            count: x.estimate.count,
            samples: x.estimate.samples,
            estimate: x.estimate.estimate,
            ci_lo: x.estimate.ci_lo,
            ci_hi: x.estimate.ci_hi,
            theory: x.estimate.theory,
            ratio: x.estimate.ratio,
        })
        .collect();
    println!(
        "mass {:.16}, tail error {:.2e}, monotone {}, final ratio {:.4}",
        r.total_mass, r.max_tail_error, r.monotone, r.final_ratio
    );
    let mut passed = (r.total_mass - 1.0).abs() < 1e-14 && r.max_tail_error < 1e-9;
    if let Some(m) = min_final_ratio {
        passed &= r.monotone && r.final_ratio > m;
    }
    ctx.csv("", table_csv(&ctx.out.meta, &rows)?)?;
    ctx.finish(Some(passed), &r)
}

fn dump_cdf(ctx: &Ctx, name: LawName, alpha: f64, b: f64, points: usize) -> Result<bool> {
    let law = match name {
        LawName::MittagLeffler => LimitLaw::MittagLeffler { alpha },
        LawName::DynkinLamperti => LimitLaw::DynkinLamperti { alpha },
        LawName::Lamperti => LimitLaw::Lamperti { alpha, b },
        LawName::DarlingKac => LimitLaw::DarlingKacBoole,
    };
    if points < 2 {
        bail!("points must be >= 2");
    }
    let (lo, hi) = law.support_hint();
    let rows = (0..points)
        .map(|i| {
            let t = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            Ok((t, law.cdf(t)?))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    #[derive(Serialize)]
    struct Row {
        t: f64,
        cdf: f64,
    }
    let rows: Vec<Row> = rows.into_iter().map(|(t, cdf)| Row { t, cdf }).collect();
    ctx.csv("", table_csv(&ctx.out.meta, &rows)?)?;
    ctx.finish(None, &law)
}

const PLOT_SCRIPT: &str = include_str!("plot_results.py");
