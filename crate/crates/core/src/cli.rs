//! Command-line front end. `main.rs` only parses arguments and sets up the thread
//! pool; everything else lives here so it can be driven from tests.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.
//! Data goes to stdout (or `--output`), diagnostics to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{LatticeKind, LatticeSpec};
use crate::oracle::{enumerate_bounded, OracleBounds};
use crate::quadrature::{self, MomentBatch};
use crate::series::{self, MultiIndex};
use crate::verify::{self, GridPolicy, Tolerances, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "closedwalk", version, about = "Closed-walk series of tight-binding partition functions")]
pub struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true, env = "CLOSEDWALK_THREADS")]
    pub threads: Option<usize>,

    /// Directory that relative `--output` paths are resolved against.
    #[arg(long, global = true, env = "CLOSEDWALK_OUTPUT_DIR")]
    pub output_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Taylor coefficients from the closed-form walk sums.
    Coeffs(CoeffsArgs),
    /// Brute-force closed-walk tally of one length.
    Oracle(OracleArgs),
    /// Dispersion moments on uniform reciprocal-cell grids.
    Moments(MomentsArgs),
    /// Cross-check exact series, walk oracle and quadrature.
    Verify(VerifyArgs),
    /// Square-rational test of the bcc coefficients.
    Conjecture(ConjectureArgs),
    /// Ring with complex hopping: Fourier coefficients in the phase and the φ = π/2 identity.
    AppendixB(AppendixBArgs),
    /// Print a built-in lattice description as JSON.
    Lattice(LatticeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Args)]
pub struct LatticeSelect {
    /// Built-in lattice name.
    #[arg(long)]
    pub lattice: Option<String>,
    /// Ring size for chain-nn-finite.
    #[arg(long = "pbc")]
    pub pbc: Option<usize>,
}

impl LatticeSelect {
    fn spec(&self) -> Result<LatticeSpec> {
        let name = self.lattice.as_deref().ok_or_else(|| Error::Parse("--lattice is required".into()))?;
        LatticeSpec::by_name(name, self.pbc)
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub select: LatticeSelect,
    #[arg(long)]
    pub max_order: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub select: LatticeSelect,
    /// Lattice description file (JSON) instead of `--lattice`.
    #[arg(long, conflicts_with = "lattice")]
    pub lattice_file: Option<PathBuf>,
    /// Walk length.
    #[arg(long)]
    pub n: u32,
    /// Raise the enumeration bound for every dimension.
    #[arg(long)]
    pub bound: Option<u32>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub select: LatticeSelect,
    #[arg(long, conflicts_with = "lattice")]
    pub lattice_file: Option<PathBuf>,
    #[arg(long)]
    pub max_order: u32,
    /// `auto` (alias-free `n h + 1`) or a fixed number of nodes per axis.
    #[arg(long, default_value = "auto")]
    pub grid: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub select: LatticeSelect,
    /// Verify every built-in lattice (chain-nn-finite uses `--pbc`, default 6).
    #[arg(long, conflicts_with = "lattice")]
    pub all: bool,
    #[arg(long)]
    pub max_order: u32,
    #[arg(long, default_value = "auto")]
    pub grid: String,
    #[arg(long, default_value_t = 1e-9)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub zero_tol: f64,
    /// Also check the chain-nnn coefficient recurrence up to `--max-order`.
    #[arg(long)]
    pub recurrence: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConjectureArgs {
    #[arg(long, default_value_t = 30)]
    pub n_max: u32,
    /// Orders up to this bound must be squares; beyond it results are only reported.
    #[arg(long, default_value_t = 30)]
    pub assert_max: u32,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AppendixBArgs {
    #[arg(long = "pbc")]
    pub pbc: usize,
    #[arg(long)]
    pub rho: f64,
    /// Largest Fourier index `d` to tabulate (default `2 Λ`).
    #[arg(long)]
    pub d_max: Option<u32>,
    #[arg(long, default_value_t = quadrature::DEFAULT_PHI_NODES)]
    pub phi_nodes: usize,
    /// Walk-length truncation of the series side.
    #[arg(long, default_value_t = 30)]
    pub max_length: u32,
    /// Check the φ = π/2 identity (even ring sizes only).
    #[arg(long)]
    pub phi_half: bool,
    #[arg(long, default_value_t = 25)]
    pub nu_max: u32,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    #[command(flatten)]
    pub select: LatticeSelect,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Runs a parsed command, writing data to `stdout` unless an output file is given.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> i32 {
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    let dir = cli.output_dir.as_deref();
    match &cli.command {
        Command::Coeffs(a) => cmd_coeffs(a, dir, stdout),
        Command::Oracle(a) => cmd_oracle(a, dir, stdout),
        Command::Moments(a) => cmd_moments(a, dir, stdout),
        Command::Verify(a) => cmd_verify(a, dir, stdout),
        Command::Conjecture(a) => cmd_conjecture(a, dir, stdout),
        Command::AppendixB(a) => cmd_appendix_b(a, dir, stdout),
        Command::Lattice(a) => {
            let spec = a.select.spec()?;
            emit(&spec.to_json()?, a.output.as_deref(), dir, stdout)?;
            Ok(EXIT_OK)
        }
    }
}

fn emit(text: &str, output: Option<&Path>, dir: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(path) => {
            let path = match dir {
                Some(d) if path.is_relative() => d.join(path),
                _ => path.to_path_buf(),
            };
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, text)?;
            eprintln!("wrote {}", path.display());
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn parse_grid(text: &str) -> Result<GridPolicy> {
    if text == "auto" {
        return Ok(GridPolicy::Auto);
    }
    match text.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(GridPolicy::Fixed(n)),
        _ => Err(Error::InvalidGrid(format!("`{text}` is neither `auto` nor a positive integer"))),
    }
}

fn load_spec(select: &LatticeSelect, file: Option<&Path>) -> Result<LatticeSpec> {
    match file {
        Some(path) => LatticeSpec::from_json(&std::fs::read_to_string(path)?),
        None => select.spec(),
    }
}

pub fn cmd_coeffs(a: &CoeffsArgs, dir: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let spec = a.select.spec()?;
    let s = series::for_spec(&spec, a.max_order)?;
    let text = match a.out.format {
        Format::Json => s.to_json()?,
        Format::Csv => s.to_csv()?,
        Format::Table => s.to_table(),
    };
    emit(&text, a.out.output.as_deref(), dir, stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_oracle(a: &OracleArgs, dir: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let spec = load_spec(&a.select, a.lattice_file.as_deref())?;
    let bounds = match a.bound {
        Some(b) => OracleBounds { one_dim: b, two_dim: b, three_dim: b },
        None => OracleBounds::default(),
    };
    let tally = enumerate_bounded(&spec, a.n, &bounds)?;
    let text = match a.out.format {
        Format::Json => json(&tally.to_document())?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["lattice", "length", "index", "count"])?;
            for e in tally.to_document().counts {
                let idx: Vec<String> = e.index.iter().map(u32::to_string).collect();
                w.write_record([tally.lattice.clone(), a.n.to_string(), idx.join(";"), e.count])?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?).map_err(|e| Error::Parse(e.to_string()))?
        }
        Format::Table => {
            let mut t = format!("# {} closed walks of length {}\n", tally.lattice, a.n);
            for (idx, c) in &tally.counts {
                t.push_str(&format!("{:<16} {}\n", idx.to_string(), c));
            }
            t.push_str(&format!("total            {}\n", tally.total()));
            t
        }
    };
    emit(&text, a.out.output.as_deref(), dir, stdout)?;
    Ok(EXIT_OK)
}

pub fn cmd_moments(a: &MomentsArgs, dir: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let spec = load_spec(&a.select, a.lattice_file.as_deref())?;
    let policy = parse_grid(&a.grid)?;
    let results = MultiIndex::all_up_to(spec.hopping_count, a.max_order)
        .iter()
        .map(|idx| quadrature::moment(&spec, idx, policy.resolve(&spec, idx)?))
        .collect::<Result<Vec<_>>>()?;
    let batch = MomentBatch { lattice: spec.name.to_string(), results };
    let text = match a.out.format {
        Format::Json => batch.to_json()?,
        Format::Csv => batch.to_csv()?,
        Format::Table => {
            let mut t = format!("# {} dispersion moments\n", batch.lattice);
            for r in &batch.results {
                t.push_str(&format!("{:<16} N={:<4} {:>24.15e} {}\n", r.index.to_string(), r.grid, r.value, if r.estimated_exact { "exact" } else { "approx" }));
            }
            t
        }
    };
    emit(&text, a.out.output.as_deref(), dir, stdout)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct VerifyOutput {
    passed: bool,
    reports: Vec<VerificationReport>,
    recurrence: Option<verify::RecurrenceReport>,
}

pub fn cmd_verify(a: &VerifyArgs, dir: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    if !(a.rel_tol > 0.0) || !(a.zero_tol > 0.0) {
        return Err(Error::Parse("tolerances must be positive".into()));
    }
    let tolerances = Tolerances { relative: a.rel_tol, zero: a.zero_tol };
    let policy = parse_grid(&a.grid)?;
    let specs: Vec<LatticeSpec> = if a.all {
        LatticeKind::ALL
            .iter()
            .map(|&k| LatticeSpec::builtin(k, Some(a.select.pbc.unwrap_or(6))))
            .collect::<Result<_>>()?
    } else {
        vec![a.select.spec()?]
    };
    let bounds = OracleBounds::default();
    let reports = specs
        .iter()
        .map(|s| verify::verify_identity(s, a.max_order, policy, tolerances, &bounds))
        .collect::<Result<Vec<_>>>()?;
    let recurrence = a.recurrence.then(|| verify::verify_recurrence(a.max_order));
    let passed = reports.iter().all(VerificationReport::passed) && recurrence.as_ref().is_none_or(|r| r.passed());
    for r in &reports {
        eprintln!(
            "{}: checked {} passed {} failed {}",
            r.lattice, r.summary.checked, r.summary.passed, r.summary.failed
        );
    }
    if let Some(r) = &recurrence {
        eprintln!("chain-nnn recurrence: checked {} violations {}", r.checked, r.violations.len());
    }
    let out = VerifyOutput { passed, reports, recurrence };
    let text = match a.out.format {
        Format::Json => json(&out)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["lattice", "index", "exact", "oracle", "numeric", "grid", "abs_error", "rel_error", "pass"])?;
            for rep in &out.reports {
                for r in &rep.records {
                    let idx: Vec<String> = r.index.iter().map(u32::to_string).collect();
                    w.write_record([
                        rep.lattice.clone(),
                        idx.join(";"),
                        r.exact.clone(),
                        r.oracle.clone().unwrap_or_default(),
                        format!("{:e}", r.numeric),
                        r.grid.to_string(),
                        format!("{:e}", r.abs_error),
                        format!("{:e}", r.rel_error),
                        r.pass.to_string(),
                    ])?;
                }
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?).map_err(|e| Error::Parse(e.to_string()))?
        }
        Format::Table => {
            let mut t = String::new();
            for rep in &out.reports {
                t.push_str(&format!("# {} (max order {})\n", rep.lattice, rep.max_order));
                for r in &rep.records {
                    let idx: Vec<String> = r.index.iter().map(u32::to_string).collect();
                    t.push_str(&format!(
                        "{:<10} {:>20} oracle={:<12} rel_err={:.2e} {}\n",
                        format!("({})", idx.join(",")),
                        r.exact,
                        r.oracle.as_deref().unwrap_or("-"),
                        r.rel_error,
                        if r.pass { "ok" } else { "FAIL" }
                    ));
                }
            }
            if let Some(r) = &out.recurrence {
                t.push_str(&format!("# recurrence: {} checked, {} violations\n", r.checked, r.violations.len()));
            }
            t
        }
    };
    emit(&text, a.out.output.as_deref(), dir, stdout)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_conjecture(a: &ConjectureArgs, dir: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    let records = verify::check_square_conjecture(a.n_max);
    let failed: Vec<u32> = records.iter().filter(|r| r.n <= a.assert_max && !r.is_square).map(|r| r.n).collect();
    for r in records.iter().filter(|r| r.n > a.assert_max && !r.is_square) {
        eprintln!("note: B_{} = {} is not a rational square (beyond the asserted range)", r.n, r.value);
    }
    let text = match a.out.format {
        Format::Json => json(&records)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &records {
                w.serialize(r)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Error::Parse(e.to_string()))?).map_err(|e| Error::Parse(e.to_string()))?
        }
        Format::Table => records
            .iter()
            .map(|r| format!("{:>3} {:>40} {:<6} {}\n", r.n, r.value, r.is_square, r.root.as_deref().unwrap_or("-")))
            .collect(),
    };
    emit(&text, a.out.output.as_deref(), dir, stdout)?;
    if !failed.is_empty() {
        eprintln!("not squares: {failed:?}");
        return Ok(EXIT_FAILED);
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct FourierRecord {
    d: u32,
    quadrature: f64,
    series: f64,
    abs_error: f64,
    selection_zero: bool,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct AppendixBOutput {
    pbc_size: usize,
    rho: f64,
    phi_nodes: usize,
    tolerance: f64,
    coefficients: Vec<FourierRecord>,
    /// `|Z(ρ, φ = π) - Z_series(ξ = ρ)|`: the complex case reduces to the real one.
    phi_pi_residual: f64,
    phi_half_residual: Option<f64>,
    passed: bool,
}

pub fn cmd_appendix_b(a: &AppendixBArgs, dir: Option<&Path>, stdout: &mut dyn Write) -> Result<i32> {
    if !(a.tol > 0.0) {
        return Err(Error::Parse("tolerance must be positive".into()));
    }
    let ring = a.pbc;
    let d_max = a.d_max.unwrap_or(2 * ring as u32);
    let coefficients = (0..=d_max)
        .map(|d| -> Result<FourierRecord> {
            let q = quadrature::complex_fourier_a(ring, a.rho, d, a.phi_nodes)?;
            let s = quadrature::complex_fourier_a_series(ring, a.rho, d, a.max_length)?;
            let selection_zero = d as usize % ring != 0;
            let abs_error = (q - s).abs();
            let pass = abs_error <= a.tol && (!selection_zero || q.abs() <= a.tol);
            Ok(FourierRecord { d, quadrature: q, series: s, abs_error, selection_zero, pass })
        })
        .collect::<Result<Vec<_>>>()?;
    let real = series::chain_finite(ring, a.max_length)?;
    let phi_pi_residual = (quadrature::complex_ring_ksum(ring, a.rho, std::f64::consts::PI)? - real.evaluate(&[a.rho])).abs();
    let phi_half_residual = if a.phi_half { Some(quadrature::phi_half_identity_check(ring, a.rho, a.nu_max)?) } else { None };
    let passed = coefficients.iter().all(|c| c.pass)
        && phi_pi_residual <= a.tol
        && phi_half_residual.is_none_or(|r| r <= a.tol);
    let out = AppendixBOutput {
        pbc_size: ring,
        rho: a.rho,
        phi_nodes: a.phi_nodes,
        tolerance: a.tol,
        coefficients,
        phi_pi_residual,
        phi_half_residual,
        passed,
    };
    let text = match a.out.format {
        Format::Json | Format::Csv => json(&out)?,
        Format::Table => {
            let mut t = format!("# ring {} rho {}\n", ring, a.rho);
            for c in &out.coefficients {
                t.push_str(&format!("a_{:<3} {:>22.15e} {:>22.15e} {}\n", c.d, c.quadrature, c.series, if c.pass { "ok" } else { "FAIL" }));
            }
            t.push_str(&format!("phi=pi residual   {:.3e}\n", out.phi_pi_residual));
            if let Some(r) = out.phi_half_residual {
                t.push_str(&format!("phi=pi/2 residual {r:.3e}\n"));
            }
            t
        }
    };
    emit(&text, a.out.output.as_deref(), dir, stdout)?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}
