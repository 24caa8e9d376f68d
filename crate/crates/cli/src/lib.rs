//! Command-line driver: fixture registry, check suite and reports.

// `!(x > 0.0)` is how NaN gets rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod fixture;
pub mod manifest;
pub mod output;
pub mod suite;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

pub use error::{CliError, Exit};
use fixture::{Fixture, Registry};
use manifest::Manifest;
use output::{write_atomic, Report};
use suite::{Section, Settings};

#[derive(Debug, Parser)]
#[command(name = "isogap", version, about = "Isoperimetric, spectral and concentration constants")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Builtin fixture name or key=value fixture file; repeatable.
    #[arg(long, global = true)]
    pub fixture: Vec<String>,
    /// Named fixture set from the manifest.
    #[arg(long, global = true)]
    pub fixture_set: Option<String>,
    /// Grid spacing override.
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Seed of the random test functions and Monte Carlo volumes.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Directory for JSON and CSV outputs.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Treat tracked-band warnings as failures.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Print the JSON report instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Manifest with fixture sets, bands and pins, replacing the builtin one.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// The four constants, bounds and their checks.
    Constants,
    /// Profile curve as CSV with concavity verdicts.
    Profile {
        /// Exponent for the concavity test of I^power.
        #[arg(long, default_value_t = 1.0)]
        power: f64,
    },
    /// Semigroup estimates on grid heat flows.
    Semigroup,
    /// Stability under going up and down, push-forward and tensorization.
    Stability,
    /// Classical lower bounds against the measured constants.
    Bounds,
    /// The full check suite.
    Verify {
        /// Write a manifest with pins taken from this run.
        #[arg(long, hide = true)]
        update_pins: Option<PathBuf>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants => "constants",
            Command::Profile { .. } => "profile",
            Command::Semigroup => "semigroup",
            Command::Stability => "stability",
            Command::Bounds => "bounds",
            Command::Verify { .. } => "verify",
        }
    }
}

/// Result of a run: the report, extra text for stdout and the exit status.
pub struct Outcome {
    pub report: Report,
    pub stdout: String,
    pub exit: Exit,
}

fn fixtures(common: &Common, manifest: &Manifest, default_set: Option<&str>) -> Result<Vec<Fixture>, CliError> {
    let mut reg = Registry::builtin();
    let mut out = Vec::new();
    for arg in &common.fixture {
        out.extend(reg.lookup(arg)?);
    }
    if let Some(set) = common.fixture_set.as_deref().or(if common.fixture.is_empty() { default_set } else { None }) {
        for name in manifest.set(set)? {
            out.push(reg.resolve(name)?);
        }
    }
    Ok(out)
}

fn config_text(cli: &Cli, fixtures: &[Fixture], manifest: &Manifest) -> String {
    let c = &cli.common;
    let mut s = format!("command={}\nseed={}\nh={:?}\nstrict={}\n", cli.command.name(), c.seed, c.h, c.strict);
    if let Command::Profile { power } = &cli.command {
        let _ = writeln!(s, "power={power}");
    }
    for f in fixtures {
        let _ = write!(s, "[{}]\n{}", f.name, f.canonical());
    }
    s.push_str("[manifest]\n");
    s.push_str(&manifest.text);
    s
}

fn per_fixture<F>(fixtures: &[Fixture], f: F) -> Result<Vec<Section>, CliError>
where
    F: Fn(&Fixture) -> Result<Vec<Section>, CliError> + Sync,
{
    let parts: Vec<Result<Vec<Section>, CliError>> = fixtures.par_iter().map(&f).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let c = &cli.common;
    if let Some(h) = c.h {
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::Config(format!("--h must be positive, got {h}")));
        }
    }
    let manifest = match &c.manifest {
        Some(p) => Manifest::load(p)?,
        None => Manifest::builtin(),
    };
    let default_set = matches!(cli.command, Command::Verify { .. }).then_some("full");
    let fxs = fixtures(c, &manifest, default_set)?;
    let needs_fixture = !matches!(cli.command, Command::Stability | Command::Verify { .. });
    if needs_fixture && fxs.is_empty() {
        return Err(CliError::Config("no fixture given; use --fixture or --fixture-set".into()));
    }
    let st = Settings { seed: c.seed, h: c.h };
    let mut stdout = String::new();
    let sections = match &cli.command {
        Command::Constants | Command::Bounds => per_fixture(&fxs, |f| {
            let (cs, k) = suite::constants_section(f, &st)?;
            Ok(vec![cs, suite::bounds_section(f, &st, &k)?])
        })?,
        Command::Profile { power } => {
            if !(*power > 0.0) {
                return Err(CliError::Config(format!("--power must be positive, got {power}")));
            }
            let mut out = Vec::new();
            for f in &fxs {
                let curve = suite::profile_curve(f)?
                    .ok_or_else(|| CliError::Config(format!("{}: no profile computation for this fixture", f.name)))?;
                if c.out.is_none() && !c.json {
                    if fxs.len() > 1 {
                        let _ = writeln!(stdout, "# {}", f.name);
                    }
                    stdout.push_str(&curve.to_csv());
                }
                out.push(suite::profile_section(f, &curve, &[*power])?);
            }
            out
        }
        Command::Semigroup => per_fixture(&fxs, |f| Ok(vec![suite::semigroup_section(f, &st)?]))?,
        Command::Stability => {
            let mut out = vec![suite::stability_section(&st)?];
            for f in &fxs {
                out.extend(suite::tensorization_section(f, &st)?);
            }
            out
        }
        Command::Verify { .. } => {
            let mut out = per_fixture(&fxs, |f| suite::fixture_sections(f, &st))?;
            out.push(suite::stability_section(&st)?);
            out
        }
    };
    let names: Vec<String> = fxs.iter().map(|f| f.name.clone()).collect();
    let config = config_text(cli, &fxs, &manifest);
    let report = Report::new(cli.command.name(), &config, c.seed, c.h, names.clone(), sections, &manifest, c.strict);

    if let Command::Verify { update_pins: Some(path) } = &cli.command {
        write_atomic(path, &manifest.with_pins(&report.tracked_values()))?;
    }
    if let Some(dir) = &c.out {
        std::fs::create_dir_all(dir)?;
        let mut scopes: Vec<&str> = report.sections.iter().map(|s| s.scope.as_str()).collect();
        scopes.dedup();
        for scope in scopes {
            write_atomic(&dir.join(format!("{scope}.json")), &report.scoped(scope).to_json())?;
        }
        for s in report.sections.iter().filter(|s| s.part == "profile") {
            if let Some(csv) = s.data.get("csv").and_then(|v| v.as_str()) {
                write_atomic(&dir.join(format!("{}.csv", s.scope)), csv)?;
            }
        }
        write_atomic(&dir.join("report.json"), &report.to_json())?;
    }
    if c.json {
        stdout.push_str(&report.to_json());
    }
    let exit = if report.summary.pass { Exit::Pass } else { Exit::Assertion };
    Ok(Outcome { report, stdout, exit })
}
