//! `ergolab`: batch front end for the renewal, limit-law and
//! large-deviation experiments.
//!
//! Exit codes: 0 when every configured check passes, 2 when a check fails,
//! 1 on any error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod config;
mod output;

#[derive(Parser, Serialize)]
#[command(name = "ergolab", version, about, args_override_self = true)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Serialize)]
struct Common {
    /// Flat TOML file of defaults (top-level keys and a section per subcommand)
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Master seed
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads (default: all cores); never changes the output
    #[arg(long, global = true)]
    #[serde(skip)]
    workers: Option<usize>,
    /// Output directory
    #[arg(long, global = true, env = "ERGOLAB_OUT", default_value = ".")]
    #[serde(skip)]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = MapKind::Boole)]
    map: MapKind,
    /// Thaler order `p > 1`
    #[arg(long, global = true, default_value_t = 2.0)]
    p: f64,
    /// Thaler left constant (default `2^p`, the symmetric map)
    #[arg(long, global = true)]
    k0: Option<f64>,
    /// `canonical` or `c0,c1`
    #[arg(long, global = true, default_value = "canonical")]
    partition: String,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum MapKind {
    Boole,
    Thaler,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LawKind {
    /// Lebesgue-uniform on `[a, b]`
    Uniform,
    /// Entrance density `H_n` (Boole)
    Entrance,
    /// `μ` restricted to `Y`, normalized (Boole)
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ComponentArg {
    Total,
    Side0,
    Side1,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StatArg {
    Z,
    Sy,
    Sa0,
    Sa1,
    /// `λ S^{A_0}`
    Weighted,
}

#[derive(Args, Serialize, Clone)]
struct LawArgs {
    #[arg(long, value_enum, default_value_t = LawKind::Uniform)]
    law: LawKind,
    #[arg(long, default_value_t = 0.2)]
    a: f64,
    #[arg(long, default_value_t = 0.8)]
    b: f64,
    /// `n` of the entrance density
    #[arg(long, default_value_t = 512)]
    entrance_n: u64,
    #[arg(long, value_enum, default_value_t = ComponentArg::Total)]
    component: ComponentArg,
    /// Push the law forward by `T^k`
    #[arg(long, default_value_t = 0)]
    shift: u64,
}

fn count(s: &str) -> Result<u64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("not a number: {s}"))?;
    if !(v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v < 1.8e19) {
        return Err(format!("not a nonnegative integer: {s}"));
    }
    Ok(v as u64)
}

fn unit_open(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(v > 0.0 && v < 1.0) {
        return Err(format!("must lie in (0, 1), got {v}"));
    }
    Ok(v)
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Cmd {
    /// Orbit statistics at checkpoints for explicit starting points
    Simulate {
        #[arg(long, value_delimiter = ',', required = true)]
        x0: Vec<f64>,
        #[arg(long, value_delimiter = ',', value_parser = count, default_value = "10,100,1000")]
        n: Vec<u64>,
    },
    /// Renewal tables, wandering-rate fit and side weights (Boole)
    Wandering {
        #[arg(long, value_parser = count, default_value = "1e6")]
        n_max: u64,
        #[arg(long, value_parser = count, default_value = "1e3")]
        fit_lo: u64,
        /// Right end of the fit window (default `n-max`)
        #[arg(long, value_parser = count)]
        fit_hi: Option<u64>,
        /// Rows written to the CSV, log-spaced
        #[arg(long, default_value_t = 60)]
        rows: usize,
    },
    /// Measure preservation, entrance and double Laplace identities (Boole)
    VerifyIdentities,
    /// Darling–Kac law of `π S^Y_n / (2√n)`
    Dk {
        #[arg(long, value_parser = count, default_value = "1e5")]
        n: u64,
        #[arg(long, value_parser = count, default_value = "1e4")]
        samples: u64,
        #[command(flatten)]
        law: LawArgs,
        /// Fail (exit 2) when the KS distance exceeds this
        #[arg(long)]
        max_ks: Option<f64>,
    },
    /// Arcsine laws of `Z_n / n` and `S^{A_i}_n / n`
    Arcsine {
        #[arg(long, value_enum, default_value_t = StatArg::Z)]
        statistic: StatArg,
        #[arg(long, value_parser = count, default_value = "1e5")]
        n: u64,
        #[arg(long, value_parser = count, default_value = "1e4")]
        samples: u64,
        #[command(flatten)]
        law: LawArgs,
        #[arg(long)]
        max_ks: Option<f64>,
    },
    /// Small-ball probabilities against the large-deviation rates
    Ld {
        #[arg(long, value_enum, default_value_t = StatArg::Z)]
        statistic: StatArg,
        /// `λ` of the weighted statistic
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// `c(n) = n^{-θ}`
        #[arg(long, value_parser = unit_open, default_value_t = 0.3)]
        theta: f64,
        /// `c̃(n) = a(n)^{-θ'}` for `S^Y` (default `θ`)
        #[arg(long, value_parser = unit_open)]
        theta_tilde: Option<f64>,
        #[arg(long, value_delimiter = ',', value_parser = count, default_value = "1e3,1e4,1e5")]
        n: Vec<u64>,
        #[arg(long, value_parser = count, default_value = "1e5")]
        samples: u64,
        #[arg(long, default_value_t = 25.0)]
        min_expected: f64,
        #[command(flatten)]
        law: LawArgs,
        /// Fail when the plateau spread exceeds this
        #[arg(long)]
        max_spread: Option<f64>,
        /// Fail when `|ratio/target - 1|` at the largest `n` exceeds this
        #[arg(long)]
        ratio_band: Option<f64>,
    },
    /// `f_0^n(1)` against `u_0^{-1}(n)` and the return-time tail exponent
    ThalerAsymptotics {
        #[arg(long, value_delimiter = ',', value_parser = count, default_value = "1e2,1e3,1e4,1e5")]
        n: Vec<u64>,
        /// Monte Carlo samples for the tail (0 skips it)
        #[arg(long, value_parser = count, default_value = "1e5")]
        tail_samples: u64,
        #[arg(long, value_parser = count, default_value = "1e2")]
        tail_lo: u64,
        #[arg(long, value_parser = count, default_value = "1e5")]
        tail_hi: u64,
        #[arg(long, default_value_t = 13)]
        tail_points: usize,
        #[arg(long)]
        max_ratio_error: Option<f64>,
        #[arg(long)]
        max_slope_error: Option<f64>,
    },
    /// Law whose small-ball ratio diverges (Boole)
    Counterexample {
        /// `c(n) = e^{-rate n}`
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
        #[arg(long, value_parser = unit_open, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 20)]
        k_max: usize,
        #[arg(long, value_parser = count, default_value = "1e5")]
        samples: u64,
        #[arg(long)]
        min_final_ratio: Option<f64>,
    },
    /// Tables of the limit-law CDFs
    DumpCdf {
        #[arg(long, value_enum, default_value_t = LawName::Lamperti)]
        law: LawName,
        #[arg(long, value_parser = unit_open, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Write a matplotlib script that plots the CSVs in the output directory
    PlotScript,
}

#[derive(Debug, Clone, Copy, PartialEq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum LawName {
    MittagLeffler,
    DynkinLamperti,
    Lamperti,
    DarlingKac,
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Simulate { .. } => "simulate",
            Cmd::Wandering { .. } => "wandering",
            Cmd::VerifyIdentities => "verify-identities",
            Cmd::Dk { .. } => "dk",
            Cmd::Arcsine { .. } => "arcsine",
            Cmd::Ld { .. } => "ld",
            Cmd::ThalerAsymptotics { .. } => "thaler-asymptotics",
            Cmd::Counterexample { .. } => "counterexample",
            Cmd::DumpCdf { .. } => "dump-cdf",
            Cmd::PlotScript => "plot-script",
        }
    }
}

const SUBCOMMANDS: [&str; 10] = [
    "simulate",
    "wandering",
    "verify-identities",
    "dk",
    "arcsine",
    "ld",
    "thaler-asymptotics",
    "counterexample",
    "dump-cdf",
    "plot-script",
];

/// Command line with the config file's flags spliced in right after the
/// subcommand name; flags also given explicitly are dropped from the file's set.
fn effective_args(args: Vec<String>) -> Result<(Vec<String>, Option<String>)> {
    let config = args
        .iter()
        .position(|a| a == "--config")
        .and_then(|i| args.get(i + 1).cloned())
        .or_else(|| args.iter().find_map(|a| a.strip_prefix("--config=").map(str::to_string)));
    let Some(path) = config else { return Ok((args, None)) };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let Some(pos) = args.iter().position(|a| SUBCOMMANDS.contains(&a.as_str())) else {
        return Ok((args, Some(text)));
    };
    let flags = config::flags_for(&text, &args[pos]).with_context(|| format!("in {path}"))?;
    let given = |flag: &str| args.iter().any(|a| a == flag || a.starts_with(&format!("{flag}=")));
    let mut out = args[..=pos].to_vec();
    let mut skip = false;
    for f in flags {
        if f.starts_with("--") {
            skip = given(&f);
        }
        if !skip {
            out.push(f);
        }
    }
    out.extend_from_slice(&args[pos + 1..]);
    Ok((out, Some(text)))
}

fn run() -> Result<bool> {
    let (args, text) = effective_args(std::env::args().collect())?;
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            e.print()?;
            std::process::exit(0);
        }
        Err(e) => {
            let line = text.as_deref().and_then(|t| {
                let arg = e.get(clap::error::ContextKind::InvalidArg)?.to_string();
                let flag = arg.split_whitespace().next()?.to_string();
                config::source_line(t, &flag)
            });
            let msg = e.to_string();
            let msg = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            return Err(match line {
                Some(l) => anyhow::anyhow!("{msg} (config line {l})"),
                None => anyhow::anyhow!("{msg}"),
            });
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.common.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool.build().context("building the worker pool")?;
    let name = cli.cmd.name();
    pool.install(|| commands::dispatch(&cli)).with_context(|| format!("{name} failed"))
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
