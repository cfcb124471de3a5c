use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num::rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use ellcan::elliptic::Preset;
use ellcan::geometry::stab::{k_stab, k_stab_closed_form, stab_ell};
use ellcan::geometry::{hilb2_model, Slope};
use ellcan::klcanon::{canonical_basis, minus_v_opposite, transition, transition_closed_form, xi_classes, BarData};
use ellcan::numeric::OracleConfig;
use ellcan::report::{CheckOutcome, Status};
use ellcan::series::Lattice;
use ellcan::suites::{run_suite, Suite, SuiteConfig, SuiteRun};

#[derive(Parser)]
#[command(name = "ellcan", version, about = "Verify elliptic and K-theoretic canonical bases for Hilb^2(C^2)")]
struct Cli {
    /// Exponent lattice denominator, a multiple of 48.
    #[arg(long, global = true, default_value_t = 48)]
    denominator: i64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites ("all" runs every suite).
    Verify(VerifyArgs),
    /// Print the K-theoretic stable basis at a slope.
    Limits {
        #[arg(long)]
        slope: String,
    },
    /// Print the canonical basis at a slope and its transition matrices.
    Canonical {
        #[arg(long)]
        slope: String,
    },
    /// Print the partition of canonical-basis labels into classes.
    Classes {
        #[arg(long, default_value_t = 3)]
        window: i64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(required_unless_present = "list_suites")]
    suites: Vec<String>,
    #[arg(long)]
    list_suites: bool,
    /// Target q-order, e.g. 2 or 5/2.
    #[arg(long, default_value = "3")]
    order: String,
    /// Coefficient presets; minimal and theta when omitted.
    #[arg(long)]
    preset: Vec<String>,
    /// Slopes p/q replacing the suite defaults.
    #[arg(long)]
    slope: Vec<String>,
    #[arg(long, default_value_t = OracleConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = OracleConfig::default().points)]
    points: usize,
    #[arg(long, default_value_t = OracleConfig::default().qmag)]
    qmag: f64,
    #[arg(long, default_value_t = OracleConfig::default().tol)]
    tol: f64,
    /// Write the JSON report here ("-" for stdout).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Serialize)]
struct Row<'a> {
    suite: &'a str,
    #[serde(flatten)]
    outcome: &'a CheckOutcome,
    elapsed_ms: u128,
}

#[derive(Serialize)]
struct Report<'a> {
    denominator: i64,
    order: String,
    presets: Vec<String>,
    slopes: Vec<String>,
    seed: u64,
    passed: bool,
    results: Vec<Row<'a>>,
}

fn parse_ratio(s: &str, what: &str) -> Result<Ratio<i64>> {
    s.trim().parse::<Ratio<i64>>().map_err(|e| anyhow::anyhow!("invalid {what} {s:?}: {e}"))
}

fn parse_slope(lat: Lattice, s: &str) -> Result<Slope> {
    let r = parse_ratio(s, "slope")?;
    Ok(Slope::new(lat, r)?)
}

fn suites_from(names: &[String]) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for n in names {
        if n == "all" {
            out.extend(Suite::ALL);
        } else {
            out.push(n.parse()?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ELLCAN_THREADS") {
        let n: usize = v.parse().with_context(|| format!("ELLCAN_THREADS={v:?} is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skip => "SKIP",
    }
}

fn verify(lat: Lattice, args: &VerifyArgs) -> Result<ExitCode> {
    if args.list_suites {
        for s in Suite::ALL {
            println!("{s}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let suites = suites_from(&args.suites)?;
    let order = lat.from_ratio(parse_ratio(&args.order, "order")?).context("order is not on the lattice")?;
    if order <= 0 {
        bail!("order must be positive");
    }
    let presets: Vec<Preset> = if args.preset.is_empty() {
        Preset::VALID.to_vec()
    } else {
        args.preset.iter().map(|p| p.parse()).collect::<std::result::Result<_, _>>()?
    };
    let slopes = args.slope.iter().map(|s| parse_slope(lat, s)).collect::<Result<Vec<_>>>()?;
    let cfg = SuiteConfig {
        lattice: lat,
        order,
        presets: presets.clone(),
        slopes,
        numeric: OracleConfig { seed: args.seed, points: args.points, qmag: args.qmag, tol: args.tol },
    };

    let runs: Vec<SuiteRun> = suites.par_iter().map(|s| run_suite(*s, &cfg)).collect();
    let rows: Vec<Row> = runs
        .iter()
        .flat_map(|r| r.outcomes.iter().map(move |o| Row { suite: &r.suite, outcome: o, elapsed_ms: r.elapsed_ms }))
        .collect();
    let passed = rows.iter().all(|r| r.outcome.passed());

    let to_stdout = args.json.as_deref().is_some_and(|p| p.as_os_str() == "-");
    if !to_stdout {
        let mut out = std::io::stdout().lock();
        for r in &rows {
            let o = r.outcome;
            write!(out, "{}  {:<13} {}", status_word(o.status), r.suite, o.check)?;
            if let Some(ord) = &o.order {
                write!(out, "  (order {ord})")?;
            }
            if !o.detail.is_empty() && o.status != Status::Pass {
                write!(out, "  {}", o.detail)?;
            }
            writeln!(out)?;
            if o.status == Status::Fail && !o.residual_sample.is_empty() {
                writeln!(out, "      residual: {}", o.residual_sample.join(" + "))?;
            }
        }
        let count = |s| rows.iter().filter(|r| r.outcome.status == s).count();
        writeln!(out, "{} checks: {} passed, {} failed, {} skipped", rows.len(), count(Status::Pass), count(Status::Fail), count(Status::Skip))?;
    }
    if let Some(path) = &args.json {
        let report = Report {
            denominator: lat.den(),
            order: args.order.clone(),
            presets: presets.iter().map(|p| p.to_string()).collect(),
            slopes: cfg.slopes.iter().map(|s| s.to_string()).collect(),
            seed: args.seed,
            passed,
            results: rows,
        };
        let text = serde_json::to_string_pretty(&report)? + "\n";
        if to_stdout {
            print!("{text}");
        } else {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    let lat = Lattice::new(cli.denominator).context("denominator must be a positive multiple of 48")?;
    match &cli.command {
        Command::Verify(args) => verify(lat, args),
        Command::Limits { slope } => {
            let s = parse_slope(lat, slope)?;
            let k = k_stab(&hilb2_model(), &stab_ell(lat), s)?;
            println!("s = {s}, m = {}, {:?}", s.floor(), s.kind());
            println!("{k}");
            println!("matches closed form: {}", k == k_stab_closed_form(s));
            Ok(ExitCode::SUCCESS)
        }
        Command::Canonical { slope } => {
            let s = parse_slope(lat, slope)?;
            let e = canonical_basis(s)?;
            let bd = BarData::at_slope(&hilb2_model(), &stab_ell(lat), s)?;
            println!("s = {s}, m = {}, {:?}", s.floor(), s.kind());
            println!("E:\n{e}");
            // the computed transitions are unreduced, so print the closed forms they equal
            for (label, stab, opposite) in [("E^-1 S", bd.s_plus.clone(), false), ("E^-1 (-v S^-)", minus_v_opposite(&bd), true)] {
                let closed = transition_closed_form(s, opposite);
                println!("{label} (matches closed form: {}):\n{closed}", transition(&e, &stab)? == closed);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classes { window } => {
            let xi = xi_classes(&hilb2_model(), lat, *window)?;
            for (i, c) in xi.classes.iter().enumerate() {
                let iota = xi.iota[i].map_or("-".to_string(), |p| p.to_string());
                let sample: Vec<String> = c.iter().filter(|l| l.m == 0).take(8).map(|l| l.to_string()).collect();
                println!("class {i} -> {iota}: {} labels, e.g. {}", c.len(), sample.join(", "));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
