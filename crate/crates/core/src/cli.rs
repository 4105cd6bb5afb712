//! Command-line scenario runner.
//!
//! Exit codes: 0 success, 1 failed certificate or violated check, 2 invalid input.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::counterexample::{Counterexample, CounterexampleConfig};
use crate::dual::DualDomain;
use crate::endo::Endo;
use crate::error::{Error, Result};
use crate::group::GroupSpec;
use crate::heyde::{self, Decomposition, DifferenceReport, MembershipReport, Report};
use crate::measure::{FiniteMeasure, MeasureRecord};
use crate::sweep::{run_sweep, write_csv, SweepConfig, SweepSummary};
use crate::torus::{GaussianParams, TorusCharFn, TorusRecord};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "heyde", version, about = "Heyde-type characterization checks on finite groups and tori")]
pub struct Cli {
    /// JSON configuration for the chosen command.
    #[arg(long, global = true, env = "HEYDE_CONFIG")]
    pub config: Option<PathBuf>,
    /// Random seed (sweep).
    #[arg(long, global = true, env = "HEYDE_SEED")]
    pub seed: Option<u64>,
    /// Residual tolerance for check-symmetry, sweep, decompose and membership.
    #[arg(long, global = true, env = "HEYDE_TOLERANCE")]
    pub tolerance: Option<f64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, env = "HEYDE_OUT")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and certify the torus counterexample.
    Counterexample,
    /// Compare the characteristic-function and brute-force symmetry tests.
    CheckSymmetry,
    /// Randomized sweep over all small finite abelian groups.
    Sweep {
        /// Also write per-case rows as CSV.
        #[arg(long, env = "HEYDE_CSV")]
        csv: Option<PathBuf>,
    },
    /// Derive A from a pair, check the difference equations and decompose A.
    Decompose,
    /// Test membership of one measure in Γ(X) * M¹(G).
    Membership,
}

/// A measure given by masses (finite), stored coefficients or Gaussian parameters (torus).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureInput {
    Masses {
        masses: Vec<f64>,
        #[serde(default)]
        signed: bool,
    },
    Coefficients(TorusRecord),
    Gaussian { gaussian: GaussianParams, radius: i64 },
}

/// A measure resolved against its group.
pub enum Resolved {
    Finite(FiniteMeasure<f64>),
    Torus(TorusCharFn),
}

impl MeasureInput {
    pub fn resolve(&self, group: &GroupSpec) -> Result<Resolved> {
        match (self, group) {
            (MeasureInput::Masses { masses, signed }, GroupSpec::Finite { .. }) => Ok(Resolved::Finite(
                FiniteMeasure::try_from(MeasureRecord { group: group.clone(), masses: masses.clone(), signed: *signed })?,
            )),
            (MeasureInput::Coefficients(r), GroupSpec::Torus { dim }) if r.dim == *dim => {
                Ok(Resolved::Torus(TorusCharFn::try_from(r.clone())?))
            }
            (MeasureInput::Gaussian { gaussian, radius }, GroupSpec::Torus { dim }) if gaussian.dim() == *dim => {
                let g = GaussianParams::new(gaussian.a.clone(), gaussian.shift.clone())?;
                Ok(Resolved::Torus(g.to_charfn(*radius)?))
            }
            _ => Err(Error::Config("measure does not match the group".into())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub group: GroupSpec,
    pub alpha: Vec<Vec<i64>>,
    pub mu1: MeasureInput,
    pub mu2: MeasureInput,
    /// `(u, v)` box half-width on tori.
    #[serde(default = "default_window")]
    pub window: i64,
    /// Shift range for the difference equations on tori.
    #[serde(default = "default_shift_radius")]
    pub shift_radius: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipConfig {
    pub group: GroupSpec,
    pub measure: MeasureInput,
    /// `u, v` range over `2Z^d ∩ [-radius, radius]^d` on tori.
    #[serde(default = "default_membership_radius")]
    pub radius: i64,
}

fn default_window() -> i64 {
    3
}
fn default_shift_radius() -> i64 {
    1
}
fn default_membership_radius() -> i64 {
    2
}

#[derive(Serialize)]
struct SymmetryOutput<'a> {
    group: &'a GroupSpec,
    alpha: Vec<Vec<i64>>,
    charfn: Report,
    brute_force: Option<Report>,
    agree: bool,
    symmetric: bool,
}

#[derive(Serialize)]
struct DecomposeOutput<'a> {
    group: &'a GroupSpec,
    alpha: Vec<Vec<i64>>,
    a: Vec<(Vec<i64>, f64)>,
    differences: DifferenceReport,
    decomposition: Decomposition,
    certified: bool,
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    config: &'a SweepConfig,
    summary: &'a SweepSummary,
    violations: &'a [crate::sweep::CaseRow],
}

fn read_config<T: for<'de> Deserialize<'de>>(path: Option<&Path>) -> Result<Option<T>> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map(Some).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn require<T>(c: Option<T>, what: &str) -> Result<T> {
    c.ok_or_else(|| Error::Config(format!("{what} needs --config")))
}

fn emit(out: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Config(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pair_parts(cfg: &PairConfig) -> Result<(Endo, Resolved, Resolved)> {
    let alpha = Endo::from_rows(&cfg.group, cfg.alpha.clone())?;
    Ok((alpha, cfg.mu1.resolve(&cfg.group)?, cfg.mu2.resolve(&cfg.group)?))
}

fn check_symmetry(cli: &Cli) -> Result<i32> {
    let cfg: PairConfig = require(read_config(cli.config.as_deref())?, "check-symmetry")?;
    let (alpha, m1, m2) = pair_parts(&cfg)?;
    let (charfn, brute) = match (&m1, &m2) {
        (Resolved::Finite(a), Resolved::Finite(b)) => {
            let tol = cli.tolerance.unwrap_or(heyde::FINITE_TOL);
            let dom = DualDomain::Finite(a.group().clone());
            let c = heyde::check_symmetry_charfn(&heyde::charfn_table(a), &heyde::charfn_table(b), &alpha, &dom, tol)?;
            (c, Some(heyde::brute_force_conditional_symmetry(a, b, &alpha, tol)?))
        }
        (Resolved::Torus(a), Resolved::Torus(b)) => {
            let tol = cli.tolerance.unwrap_or(heyde::TORUS_TOL);
            let dom = DualDomain::Window { dim: a.dim(), radius: cfg.window };
            (heyde::check_symmetry_charfn(a, b, &alpha, &dom, tol)?, None)
        }
        _ => return Err(Error::Config("mu1 and mu2 must live on the same group".into())),
    };
    let agree = brute.as_ref().map_or(true, |b| b.verdict == charfn.verdict);
    let out = SymmetryOutput {
        group: &cfg.group,
        alpha: alpha.matrix().rows(),
        symmetric: charfn.verdict,
        charfn,
        brute_force: brute,
        agree,
    };
    emit(cli.out.as_deref(), &out)?;
    Ok(if agree { EXIT_OK } else { EXIT_FAILED })
}

fn decompose(cli: &Cli) -> Result<i32> {
    let cfg: PairConfig = require(read_config(cli.config.as_deref())?, "decompose")?;
    let (alpha, m1, m2) = pair_parts(&cfg)?;
    let (psi, tol) = match (&m1, &m2) {
        (Resolved::Finite(a), Resolved::Finite(b)) => {
            let dom = DualDomain::Finite(a.group().clone());
            (heyde::derive_a_b(&heyde::charfn_table(a), &heyde::charfn_table(b), &alpha, &dom)?, cli.tolerance.unwrap_or(1e-10))
        }
        (Resolved::Torus(a), Resolved::Torus(b)) => {
            let dom = DualDomain::Window { dim: a.dim(), radius: cfg.window };
            (heyde::derive_a_b(a, b, &alpha, &dom)?, cli.tolerance.unwrap_or(heyde::TORUS_TOL))
        }
        _ => return Err(Error::Config("mu1 and mu2 must live on the same group".into())),
    };
    let differences = heyde::verify_eq9_eq10(&psi.a, &alpha, cfg.shift_radius, tol)?;
    let decomposition = heyde::decompose_a(&psi.a, tol)?;
    let certified = differences.mixed.verdict
        && differences.repeated.as_ref().map_or(true, |r| r.verdict)
        && decomposition.certified;
    let out = DecomposeOutput {
        group: &cfg.group,
        alpha: alpha.matrix().rows(),
        a: psi.a.defined().collect(),
        differences,
        decomposition,
        certified,
    };
    emit(cli.out.as_deref(), &out)?;
    Ok(if certified { EXIT_OK } else { EXIT_FAILED })
}

fn membership(cli: &Cli) -> Result<i32> {
    let cfg: MembershipConfig = require(read_config(cli.config.as_deref())?, "membership")?;
    let report: MembershipReport = match cfg.measure.resolve(&cfg.group)? {
        Resolved::Finite(m) => heyde::membership_finite(&m)?,
        Resolved::Torus(f) => heyde::membership_torus(&f, cfg.radius, cli.tolerance.unwrap_or(heyde::TORUS_TOL))?,
    };
    emit(cli.out.as_deref(), &report)?;
    Ok(EXIT_OK)
}

fn counterexample(cli: &Cli) -> Result<i32> {
    let cfg: CounterexampleConfig = read_config(cli.config.as_deref())?.unwrap_or_default();
    let cert = Counterexample::build(&cfg)?.certify();
    eprint!("{}", cert.summary());
    emit(cli.out.as_deref(), &cert)?;
    Ok(if cert.valid { EXIT_OK } else { EXIT_FAILED })
}

fn sweep(cli: &Cli, csv: Option<&Path>) -> Result<i32> {
    let mut cfg: SweepConfig = read_config(cli.config.as_deref())?.unwrap_or_default();
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tolerance {
        cfg.tolerance = t;
    }
    let result = run_sweep(&cfg)?;
    if let Some(p) = csv {
        let f = std::fs::File::create(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
        write_csv(&result.rows, f)?;
    }
    let s = &result.summary;
    eprintln!(
        "groups {}  automorphisms {}  cases {}  symmetric {}  oracle agreement {}/{}  {}",
        s.groups,
        s.automorphisms,
        s.cases,
        s.symmetric_cases,
        s.oracle_agreement,
        s.cases,
        if s.passed { "PASS" } else { "FAIL" }
    );
    emit(cli.out.as_deref(), &SweepOutput { config: &result.config, summary: s, violations: &result.violations })?;
    Ok(if s.passed { EXIT_OK } else { EXIT_FAILED })
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let outcome = match &cli.command {
        Command::Counterexample => counterexample(cli),
        Command::CheckSymmetry => check_symmetry(cli),
        Command::Sweep { csv } => sweep(cli, csv.as_deref()),
        Command::Decompose => decompose(cli),
        Command::Membership => membership(cli),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}
