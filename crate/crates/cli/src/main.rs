use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polyech::complex::{ComplexSpec, GradedComplex};
use polyech::homology::{homology_reports, stabilize_degrees, HomologyReport};
use polyech::path::AdmissiblePath;
use polyech::verify::{self, Config, Status, SuiteReport};

#[derive(Parser)]
#[command(name = "polyech", version, about = "Chain complexes of lattice-polygon paths and their homology")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// Path enumeration.
    Paths {
        #[command(subcommand)]
        command: PathsCommand,
    },
    /// Complex construction.
    Complex {
        #[command(subcommand)]
        command: ComplexCommand,
    },
    /// Integer homology of a complex spec.
    Homology {
        #[arg(long)]
        spec: PathBuf,
        /// Inclusive range `a..b`.
        #[arg(long, value_parser = parse_range)]
        degrees: (i64, i64),
        /// Treat the spec as the first stage of a growing family.
        #[arg(long)]
        stabilize: bool,
        /// Stage limit for `--stabilize`.
        #[arg(long, default_value_t = 6)]
        max_stages: usize,
        /// Consecutive isomorphisms required by `--stabilize`.
        #[arg(long, default_value_t = 2)]
        window: usize,
        /// Seconds allowed for `--stabilize`.
        #[arg(long, default_value_t = 120)]
        budget: u64,
    },
    /// Run a verification suite, or `all`.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Seconds allowed per stabilization check.
        #[arg(long, default_value_t = 300)]
        budget: u64,
        /// Count flagged checks as failures.
        #[arg(long)]
        strict: bool,
    },
}

#[derive(Subcommand)]
enum PathsCommand {
    /// Every path lying to the left of the given one.
    Enumerate {
        #[arg(long)]
        below: PathBuf,
    },
}

#[derive(Subcommand)]
enum ComplexCommand {
    /// Write boundary matrices (triplet text) and bases (JSON) to a directory.
    Build {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_range(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {s}"));
    }
    Ok((a, b))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(header.to_vec())];
    out.push(line(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for r in rows {
        out.push(line(r.iter().map(String::as_str).collect()));
    }
    out.join("\n")
}

fn paths_enumerate(below: &Path, format: Format) -> Result<()> {
    let lam: AdmissiblePath = read_json(below)?;
    let paths = lam.enumerate_below()?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&paths)?),
        Format::Table => {
            let rows: Vec<Vec<String>> = paths
                .iter()
                .map(|p| vec![p.num_edges().to_string(), p.hull_lattice_points().len().to_string(), p.to_string()])
                .collect();
            println!("{}", table(&["edges", "points", "path"], &rows));
            println!("{} paths", paths.len());
        }
    }
    Ok(())
}

fn complex_build(spec: &Path, out: &Path, format: Format) -> Result<()> {
    let spec: ComplexSpec = read_json(spec)?;
    let cx = GradedComplex::build(&spec)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let mut summary = Vec::new();
    for d in cx.degrees() {
        let basis = cx.basis(d);
        fs::write(out.join(format!("basis_{d}.json")), serde_json::to_string(basis)?)?;
        let nnz = match cx.boundary(d) {
            Some(m) => {
                fs::write(out.join(format!("boundary_{d}.txt")), m.to_triplets())?;
                m.nnz()
            }
            None => 0,
        };
        summary.push(json!({ "degree": d, "rank": basis.len(), "boundary_nnz": nnz }));
    }
    fs::write(out.join("spec.json"), serde_json::to_string_pretty(&spec)?)?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
        Format::Table => {
            let rows: Vec<Vec<String>> = summary
                .iter()
                .map(|s| vec![s["degree"].to_string(), s["rank"].to_string(), s["boundary_nnz"].to_string()])
                .collect();
            println!("{}", table(&["degree", "rank", "boundary nnz"], &rows));
        }
    }
    Ok(())
}

/// The `k`-th stage of the family starting at `spec`.
fn grow(spec: &ComplexSpec, k: usize) -> Result<ComplexSpec> {
    let k = k as i64;
    Ok(match spec.clone() {
        ComplexSpec::Bar { n, diameter, degrees } => ComplexSpec::Bar { n, diameter: diameter + k, degrees },
        ComplexSpec::Xaxis { n, m, degrees, j } => ComplexSpec::Xaxis { n, m: m + 2 * k, degrees, j },
        ComplexSpec::Periodic { n, gamma, heights, length, degrees } => {
            ComplexSpec::Periodic { n, gamma, heights, length: length + 2 * k, degrees }
        }
        _ => bail!("--stabilize needs a bar, xaxis or periodic spec"),
    })
}

fn homology_cmd(
    spec: &Path,
    (lo, hi): (i64, i64),
    stabilize: bool,
    max_stages: usize,
    window: usize,
    budget: u64,
    format: Format,
) -> Result<()> {
    let spec: ComplexSpec = read_json(spec)?;
    let degrees: Vec<i64> = (lo..=hi).collect();
    let (reports, stages): (Vec<HomologyReport>, Option<Vec<Value>>) = if stabilize {
        grow(&spec, 0)?;
        let family = |k: usize| grow(&spec, k).expect("checked above");
        let st = stabilize_degrees(family, &degrees, window, max_stages, Duration::from_secs(budget))?;
        let reports = degrees
            .iter()
            .zip(&st)
            .map(|(&d, s)| HomologyReport {
                degree: d,
                rank: s.group.rank,
                torsion: s.group.torsion.clone(),
                partial: !s.stabilized,
                spec: Some(grow(&spec, s.stage).expect("checked above")),
            })
            .collect();
        let stages =
            st.iter().map(|s| json!({ "stage": s.stage, "stabilized": s.stabilized, "trend": s.trend })).collect();
        (reports, Some(stages))
    } else {
        let cx = GradedComplex::build(&spec)?;
        (homology_reports(&cx, degrees)?, None)
    };
    match format {
        Format::Json => match stages {
            Some(st) => {
                let v: Vec<Value> = reports
                    .iter()
                    .zip(st)
                    .map(|(r, s)| {
                        let mut v = serde_json::to_value(r).expect("serializable");
                        v["stabilization"] = s;
                        v
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&v)?);
            }
            None => println!("{}", serde_json::to_string_pretty(&reports)?),
        },
        Format::Table => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    let g = polyech::homology::HomologyGroup { rank: r.rank, torsion: r.torsion.clone() };
                    vec![
                        r.degree.to_string(),
                        r.rank.to_string(),
                        g.to_string(),
                        if r.partial { "yes" } else { "no" }.into(),
                    ]
                })
                .collect();
            println!("{}", table(&["degree", "rank", "group", "partial"], &rows));
        }
    }
    Ok(())
}

fn print_report(report: &SuiteReport, format: Format) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report)?),
        Format::Table => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    let status = match c.status {
                        Status::Pass => "pass",
                        Status::Fail => "FAIL",
                        Status::Flagged => "flagged",
                    };
                    vec![c.id.clone(), status.to_string(), c.description.clone()]
                })
                .collect();
            println!("{}", table(&["check", "status", "description"], &rows));
            println!(
                "suite {} seed {}: {} checks, {} failed, {} flagged",
                report.suite,
                report.seed,
                report.checks.len(),
                report.failed,
                report.flagged
            );
        }
    }
    Ok(())
}

fn init_threads() -> Result<()> {
    if let Ok(s) = std::env::var("POLYECH_THREADS") {
        let n: usize = s.trim().parse().with_context(|| format!("POLYECH_THREADS={s:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    init_threads()?;
    match cli.command {
        Command::Paths { command: PathsCommand::Enumerate { below } } => paths_enumerate(&below, cli.format)?,
        Command::Complex { command: ComplexCommand::Build { spec, out } } => complex_build(&spec, &out, cli.format)?,
        Command::Homology { spec, degrees, stabilize, max_stages, window, budget } => {
            homology_cmd(&spec, degrees, stabilize, max_stages, window, budget, cli.format)?
        }
        Command::Verify { suite, seed, budget, strict } => {
            if suite != "all" && !verify::SUITES.contains(&suite.as_str()) {
                bail!("unknown suite {suite:?}; expected one of {} or all", verify::SUITES.join(", "));
            }
            let cfg = Config { seed, budget: Duration::from_secs(budget), strict };
            let report = verify::run_suite(&suite, &cfg)?;
            print_report(&report, cli.format)?;
            return Ok(report.exit_status);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
