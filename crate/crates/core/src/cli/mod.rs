//! Command-line surface.
//!
//! Exit codes: 0 success, 2 bad input, 3 singular stripped matrix,
//! 4 grid verification failed, 5 eigensolver did not converge,
//! 6 output not writable, 1 internal error.

mod figure;
mod request;
mod table;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use figure::{write_figure_bundle, FigureBundle};
pub use request::{parse_coefficients, parse_drop_powers, parse_targets, DialRequest, TargetEntry};
pub use table::{format_float, Cell, Table};

use crate::error::{AlgebraError, GridError, ParseError};
use crate::exactalg::{
    default_drop_powers, determinant, determinant_closed_form, dial, dial_partial, format_rational, rational_to_f64,
    EnergyMatrix, PolynomialHamiltonian,
};
use crate::gridverify::{verify_dialled, GridSpec, Stencil, VerificationReport};
use crate::oscillator::oscillator_energy;
use crate::spectrum::{evaluate_spectrum, ordering_report, LevelRecord, OrderingReport};

/// Levels evaluated when the caller does not say.
pub const DEFAULT_LEVELS: usize = 9;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Singular(AlgebraError),
    #[error("grid verification failed")]
    VerificationFailed,
    #[error(transparent)]
    NonConvergence(GridError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Singular(_) => 3,
            CliError::VerificationFailed => 4,
            CliError::NonConvergence(_) => 5,
            CliError::Io { .. } => 6,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<AlgebraError> for CliError {
    fn from(e: AlgebraError) -> Self {
        match e {
            AlgebraError::Singular { .. } | AlgebraError::SingularStripped { .. } => CliError::Singular(e),
            AlgebraError::Consistency { .. } => CliError::Internal(e.to_string()),
            other => CliError::Parse(other.to_string()),
        }
    }
}

impl From<GridError> for CliError {
    fn from(e: GridError) -> Self {
        match e {
            GridError::InvalidSpec(_) | GridError::TooManyEigenpairs { .. } => CliError::Parse(e.to_string()),
            GridError::NonConvergence { .. } | GridError::Residual { .. } => CliError::NonConvergence(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum StencilArg {
    Second,
    #[default]
    Fourth,
}

impl From<StencilArg> for Stencil {
    fn from(s: StencilArg) -> Self {
        match s {
            StencilArg::Second => Stencil::SecondOrder,
            StencilArg::Fourth => Stencil::FourthOrder,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spectral-dial",
    version,
    about = "Dial up point spectra of polynomial oscillator Hamiltonians"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct CoeffArgs {
    /// Coefficients a_1,a_2,... (fractions or decimals), or power:coefficient pairs
    #[arg(long, allow_hyphen_values = true)]
    pub coeffs: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the polynomial whose levels take the given energies
    Dial {
        /// Energies E_0,E_1,... or level:energy pairs
        #[arg(
            long,
            allow_hyphen_values = true,
            conflicts_with = "request",
            required_unless_present = "request"
        )]
        targets: Option<String>,
        /// JSON dial request file
        #[arg(long)]
        request: Option<PathBuf>,
        /// Powers of h to remove from the full problem
        #[arg(long, allow_hyphen_values = true)]
        drop_powers: Option<String>,
        /// Number of levels in the induced spectrum
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Evaluate the spectrum of a polynomial and its node ordering
    Spectrum {
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long)]
        levels: Option<usize>,
    },
    /// Check the spectrum on a discretized grid
    Verify {
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long, default_value_t = DEFAULT_LEVELS)]
        levels: usize,
        #[arg(long, default_value_t = GridSpec::DEFAULT_POINTS)]
        grid_points: usize,
        #[arg(long, default_value_t = GridSpec::DEFAULT_HALF_WIDTH)]
        half_width: f64,
        #[arg(long, value_enum, default_value_t = StencilArg::Fourth)]
        stencil: StencilArg,
    },
    /// Write spectrum, cross-section and eigenfunction data files
    Figure {
        #[command(flatten)]
        coeffs: CoeffArgs,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Determinant of the N x N energy matrix next to its closed form
    Det {
        #[arg(value_parser = clap::value_parser!(u32).range(1..))]
        size: u32,
    },
}

fn default_levels(h: &PolynomialHamiltonian, at_least: usize) -> usize {
    let highest = h.terms().last().map_or(0, |(p, _)| *p as usize);
    highest.max(at_least).max(DEFAULT_LEVELS)
}

fn check_levels(levels: usize) -> Result<usize, CliError> {
    if levels == 0 {
        return Err(CliError::Parse("--levels must be at least 1".into()));
    }
    Ok(levels)
}

pub fn coefficient_table(h: &PolynomialHamiltonian) -> Table {
    let mut t = Table::new("coefficients", &["power", "coefficient", "decimal"]);
    for (p, a) in h.terms() {
        t.push(vec![(*p).into(), format_rational(a).into(), rational_to_f64(a).into()]);
    }
    t
}

pub fn spectrum_table(records: &[LevelRecord]) -> Table {
    let mut t = Table::new("spectrum", &["n", "h_n", "E_n", "E_n_decimal", "node_count"]);
    for r in records {
        t.push(vec![
            r.n.0.into(),
            format_rational(&oscillator_energy(r.n)).into(),
            format_rational(&r.energy).into(),
            rational_to_f64(&r.energy).into(),
            r.node_count.into(),
        ]);
    }
    t
}

pub fn ordering_tables(records: &[LevelRecord], report: &OrderingReport) -> Vec<Table> {
    let mut order = Table::new("ordering", &["rank", "n", "E_n"]);
    for (rank, n) in report.ascending_permutation.iter().enumerate() {
        order.push(vec![
            rank.into(),
            n.0.into(),
            format_rational(&records[n.0 as usize].energy).into(),
        ]);
    }
    let mut violations = Table::new("violations", &["n", "n_next"]);
    for (a, b) in &report.violations {
        violations.push(vec![a.0.into(), b.0.into()]);
    }
    let mut summary = Table::new(
        "summary",
        &["ground_level", "sturm_liouville_ordered", "violation_count"],
    );
    summary.push(vec![
        report.ground_level().map_or(0, |n| n.0).into(),
        report.is_sturm_liouville_ordered.into(),
        report.violations.len().into(),
    ]);
    vec![order, violations, summary]
}

fn spectrum_tables(h: &PolynomialHamiltonian, levels: usize) -> Vec<Table> {
    let records = evaluate_spectrum(h, levels);
    let report = ordering_report(&records);
    let mut tables = vec![spectrum_table(&records)];
    tables.extend(ordering_tables(&records, &report));
    tables
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn verification_tables(report: &VerificationReport) -> Vec<Table> {
    let mut checks = Table::new(
        "verification",
        &[
            "rank",
            "grid_energy",
            "node_count",
            "matched_level",
            "analytic_energy",
            "analytic_decimal",
            "abs_deviation",
            "rel_deviation",
            "within_tolerance",
        ],
    );
    for c in &report.checks {
        checks.push(vec![
            c.rank.into(),
            c.grid_energy.into(),
            c.node_count.into(),
            c.matched_level.0.into(),
            format_rational(&c.analytic_energy).into(),
            rational_to_f64(&c.analytic_energy).into(),
            c.abs_deviation.into(),
            c.rel_deviation.into(),
            c.within_tolerance.into(),
        ]);
    }
    let mut summary = Table::new(
        "verification_summary",
        &[
            "passed",
            "grid_points",
            "half_width",
            "stencil_order",
            "node_sequence",
            "expected_permutation",
            "node_order_checked",
            "node_order_matches",
            "bounded_below",
        ],
    );
    summary.push(vec![
        report.passed.into(),
        report.spec.points().into(),
        report.spec.half_width().into(),
        (report.spec.stencil().order() as usize).into(),
        join(&report.node_sequence).into(),
        join(report.expected_permutation.iter().map(|n| n.0)).into(),
        report.node_order_checked.into(),
        report.node_order_matches.into(),
        report.bounded_below.into(),
    ]);
    let mut warnings = Table::new("warnings", &["warning"]);
    for w in &report.warnings {
        warnings.push(vec![w.as_str().into()]);
    }
    vec![checks, summary, warnings]
}

fn emit<W: Write>(tables: &[Table], format: Format, mut out: W) -> Result<(), CliError> {
    let io_err = |source| CliError::Io {
        path: "<stdout>".into(),
        source,
    };
    match format {
        Format::Csv => table::write_tables_csv(tables, &mut out).map_err(io_err),
        Format::Json => {
            let mut text = serde_json::to_string_pretty(&table::tables_to_json(tables))
                .map_err(|e| CliError::Internal(e.to_string()))?;
            text.push('\n');
            out.write_all(text.as_bytes()).map_err(io_err)
        }
    }
}

fn run_dial(
    targets: Option<String>,
    request: Option<PathBuf>,
    drop_powers: Option<String>,
    levels: Option<usize>,
) -> Result<Vec<Table>, CliError> {
    let (target, drops) = match (targets, request) {
        (Some(inline), _) => (
            parse_targets(&inline)?,
            drop_powers.as_deref().map(parse_drop_powers).transpose()?,
        ),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
            let req: DialRequest =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            let cli_drops = drop_powers.as_deref().map(parse_drop_powers).transpose()?;
            let target = req.to_target()?;
            (target, cli_drops.or(req.drop_powers))
        }
        (None, None) => return Err(CliError::Parse("either --targets or --request is required".into())),
    };
    let h = match &drops {
        Some(d) => dial_partial(&target, d)?,
        None if target.is_contiguous() => dial(&target)?,
        None => dial_partial(&target, &default_drop_powers(&target))?,
    };
    let last_level = target.levels().last().map_or(0, |n| n.0 as usize + 1);
    let levels = check_levels(levels.unwrap_or_else(|| default_levels(&h, last_level)))?;

    let mut tables = vec![coefficient_table(&h)];
    let mut assigned = Table::new("targets", &["n", "E_n"]);
    for (n, e) in target.iter() {
        assigned.push(vec![n.0.into(), format_rational(e).into()]);
    }
    tables.push(assigned);
    tables.extend(spectrum_tables(&h, levels));
    Ok(tables)
}

fn run_verify(h: &PolynomialHamiltonian, levels: usize, spec: GridSpec) -> Result<(Vec<Table>, bool), CliError> {
    let report = verify_dialled(h, &spec, check_levels(levels)?)?;
    Ok((verification_tables(&report), report.passed))
}

fn run_det(size: u32) -> Vec<Table> {
    let m = EnergyMatrix::full(size as usize);
    let det = determinant(&m);
    let closed = determinant_closed_form(size as usize);
    let mut t = Table::new("determinant", &["N", "determinant", "closed_form", "equal"]);
    t.push(vec![
        size.into(),
        format_rational(&det).into(),
        format_rational(&closed).into(),
        (det == closed).into(),
    ]);
    vec![t]
}

/// Runs a parsed command, writing results to `out`.
pub fn execute<W: Write>(cli: Cli, mut out: W) -> Result<(), CliError> {
    let format = cli.format;
    match cli.command {
        Command::Dial {
            targets,
            request,
            drop_powers,
            levels,
        } => emit(&run_dial(targets, request, drop_powers, levels)?, format, out),
        Command::Spectrum { coeffs, levels } => {
            let h = parse_coefficients(&coeffs.coeffs)?;
            let levels = check_levels(levels.unwrap_or_else(|| default_levels(&h, 0)))?;
            emit(&spectrum_tables(&h, levels), format, out)
        }
        Command::Verify {
            coeffs,
            levels,
            grid_points,
            half_width,
            stencil,
        } => {
            let h = parse_coefficients(&coeffs.coeffs)?;
            let spec = GridSpec::with_stencil(half_width, grid_points, stencil.into())?;
            let (tables, passed) = run_verify(&h, levels, spec)?;
            emit(&tables, format, &mut out)?;
            if passed {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
        Command::Figure {
            coeffs,
            levels,
            out: dir,
        } => {
            let h = parse_coefficients(&coeffs.coeffs)?;
            let levels = check_levels(levels.unwrap_or_else(|| default_levels(&h, 0)))?;
            let bundle = FigureBundle::new(&h, levels)?;
            let written = write_figure_bundle(&bundle, &dir, format)?;
            let mut t = Table::new("files", &["path"]);
            for p in written {
                t.push(vec![p.display().to_string().into()]);
            }
            emit(&[t], Format::Csv, out)
        }
        Command::Det { size } => emit(&run_det(size), format, out),
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = io::stdout();
    match execute(cli, stdout.lock()) {
        Ok(()) => 0,
        Err(CliError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            if !matches!(e, CliError::VerificationFailed) {
                eprintln!("error: {e}");
            } else {
                eprintln!("verification failed");
            }
            e.exit_code()
        }
    }
}
