//! Command-line front end for `potkern-core`.
//!
//! Three subcommands, all writing CSV to `--out` or stdout:
//!
//! * `kernel`: one kernel column `k(z, a)` on a lattice, at explicit
//!   points or on the boundary nodes.
//! * `verify`: the identity, reconstruction, Poisson and dependence
//!   suites as a report with one row per check.
//! * `plotdata`: Green's function, Ahlfors modulus or harmonic measure on a
//!   rectangular lattice, `NaN` outside the domain.
//!
//! [`run`] never panics; every failure becomes a one-line
//! `error: cause=<token> ...` on stderr and an exit status.

use std::io::Write;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use potkern_core::classical::Classical;
use potkern_core::geometry::{contains, sample_boundary, BoundaryGrid};
use potkern_core::hardy::{self, build_hardy_basis, BoundaryFunction, Weight, WeightTag, DEFAULT_ORDER};
use potkern_core::potential::{green, harmonic_measure, poisson_weight, DirichletSolver, GreenFunction, KernelStencil};
use potkern_core::verify::{self, interior_points, SuiteRow, Tolerances, Workspace, INNER_FRACTION};
use potkern_core::C64;

pub mod input;

use input::{load_domain, parse_complex, parse_weight, LoadedDomain, WeightSpec};

/// Exit status of a run with every check passing.
pub const EXIT_OK: i32 = 0;
/// A suite ran to completion and at least one check failed.
pub const EXIT_SUITE_FAILURE: i32 = 1;
/// Bad flags, files or points.
pub const EXIT_INPUT: i32 = 2;
/// The numerics broke down.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse complex number `{0}` (expected a+bi)")]
    BadComplex(String),
    #[error("bad domain spec: {0}")]
    BadDomainSpec(String),
    #[error("bad weight: {0}")]
    BadWeight(String),
    #[error("weight is not strictly positive (minimum {0:e})")]
    WeightNotPositive(f64),
    #[error("bad tolerance override `{0}` (expected --tol:<check>=<value>)")]
    BadTolerance(String),
    #[error("{0}: {1}")]
    Io(String, String),
    #[error(transparent)]
    Core(#[from] potkern_core::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn cause(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::BadComplex(_) => "bad-complex",
            CliError::BadDomainSpec(_) => "bad-domain-spec",
            CliError::BadWeight(_) => "bad-weight",
            CliError::WeightNotPositive(_) => "weight-not-positive",
            CliError::BadTolerance(_) => "bad-tolerance",
            CliError::Io(..) => "io",
            CliError::Core(e) => e.cause(),
            CliError::Internal(_) => "internal",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => EXIT_NUMERICAL,
            CliError::Internal(_) => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "potkern", version, about = "Kernel functions of potential theory on planar domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one kernel column k(z, a).
    Kernel(KernelArgs),
    /// Run verification suites and write a report.
    Verify(VerifyArgs),
    /// Sample a scalar field on a rectangular lattice.
    Plotdata(PlotArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// Catalog domain (disc, ellipse:B, annulus:R, three_connected:R1,R2) or a JSON domain file.
    #[arg(long)]
    pub domain: String,
    /// Boundary nodes per curve (even, at least 16).
    #[arg(long, default_value_t = 256)]
    pub nodes: usize,
    /// Order of the Hardy-space basis.
    #[arg(long = "basis-order", default_value_t = DEFAULT_ORDER)]
    pub basis_order: usize,
    /// `unit`, `poisson:<a+bi>` or an expression such as `2+cos(t)`.
    #[arg(long, default_value = "unit", allow_hyphen_values = true)]
    pub weight: String,
    /// Output file (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Szego,
    Garabedian,
    Bergman,
    Lambda,
    Sigma,
    #[value(name = "weighted_garabedian")]
    WeightedGarabedian,
    Ahlfors,
    Green,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct PointArgs {
    /// N×N cell-centred lattice over the bounding box; points where the
    /// kernel cannot be evaluated are skipped.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Explicit evaluation point (repeatable).
    #[arg(long = "z", allow_hyphen_values = true)]
    pub z: Vec<String>,
    /// Boundary nodes.
    #[arg(long)]
    pub boundary: bool,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kernel: KernelKind,
    /// Second argument of the kernel (default: interior point of largest clearance).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[command(flatten)]
    pub points: PointArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Reconstruction,
    Poisson,
    Dependence,
    All,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    /// Base point (default: interior point of largest clearance).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Second point for the Poisson quotient check.
    #[arg(long, allow_hyphen_values = true)]
    pub a1: Option<String>,
    /// Largest degree tried by the dependence detector.
    #[arg(long = "max-degree", default_value_t = 4)]
    pub max_degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Field {
    Green,
    #[value(name = "ahlfors_modulus")]
    AhlforsModulus,
    #[value(name = "harmonic_measure")]
    HarmonicMeasure,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub field: Field,
    /// Lattice points per side.
    #[arg(long, default_value_t = 64)]
    pub resolution: usize,
    /// Pole of Green's function or base point of the Ahlfors map.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Boundary curve of the harmonic measure (1 is the outer curve; default 2, or 1 on simply connected domains).
    #[arg(long)]
    pub index: Option<usize>,
}

/// Validated inputs shared by the subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub domain: LoadedDomain,
    pub nodes: usize,
    pub order: usize,
    pub weight: WeightSpec,
    pub out: Option<PathBuf>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn new(common: &Common, tolerances: Tolerances) -> Result<Self, CliError> {
        if common.nodes < 16 || !common.nodes.is_multiple_of(2) {
            return Err(CliError::Usage(format!("--nodes must be even and at least 16, got {}", common.nodes)));
        }
        if common.basis_order == 0 {
            return Err(CliError::Usage("--basis-order must be positive".into()));
        }
        let weight = parse_weight(&common.weight)?;
        let domain = load_domain(&common.domain)?;
        if let WeightSpec::Poisson(a0) = weight {
            interior(&domain, a0)?;
        }
        Ok(RunConfig { domain, nodes: common.nodes, order: common.basis_order, weight, out: common.out.clone(), tolerances })
    }

    fn grid(&self) -> Result<Arc<BoundaryGrid>, CliError> {
        Ok(Arc::new(sample_boundary(&self.domain.domain, self.nodes)?))
    }

    /// `None` for the unit weight.
    fn weight(&self, grid: &Arc<BoundaryGrid>) -> Result<Option<Weight>, CliError> {
        let w = match &self.weight {
            WeightSpec::Unit => return Ok(None),
            WeightSpec::Poisson(a0) => poisson_weight(&DirichletSolver::new(grid)?, *a0),
            WeightSpec::Expr { text, expr } => Weight::from_fn(grid, WeightTag::Custom(text.clone()), |_, t, _| expr.eval(t)),
        };
        match w {
            Ok(w) => Ok(Some(w)),
            Err(potkern_core::Error::NonPositiveWeight { min }) if !matches!(self.weight, WeightSpec::Poisson(_)) => Err(CliError::WeightNotPositive(min)),
            Err(e) => Err(e.into()),
        }
    }

    fn weighted_basis(&self, grid: &Arc<BoundaryGrid>) -> Result<hardy::HardyBasis, CliError> {
        let w = self.weight(grid)?.unwrap_or_else(|| Weight::unit(grid));
        Ok(build_hardy_basis(grid, &w, self.order)?)
    }
}

fn interior(domain: &LoadedDomain, p: C64) -> Result<C64, CliError> {
    if contains(&domain.domain, p)? {
        Ok(p)
    } else {
        Err(potkern_core::Error::PointNotInterior(p).into())
    }
}

fn point_or_default(domain: &LoadedDomain, a: &Option<String>) -> Result<C64, CliError> {
    match a {
        Some(s) => interior(domain, parse_complex(s)?),
        None => Ok(interior_points(&domain.domain, 1, INNER_FRACTION)?[0]),
    }
}

/// Full double precision, 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self, CliError> {
        let mut t = Table { w: csv::Writer::from_writer(Vec::new()) };
        t.row(header.iter().map(|s| s.to_string()))?;
        Ok(t)
    }

    fn row(&mut self, fields: impl IntoIterator<Item = String>) -> Result<(), CliError> {
        self.w.write_record(fields.into_iter().collect::<Vec<_>>()).map_err(|e| CliError::Internal(e.to_string()))
    }

    fn finish(self) -> Result<Vec<u8>, CliError> {
        self.w.into_inner().map_err(|e| CliError::Internal(e.to_string()))
    }
}

/// One kernel column `k(·, a)`.
enum Column {
    Function(BoundaryFunction),
    Stencil(KernelStencil, bool),
    Green(GreenFunction),
}

impl Column {
    fn eval(&self, z: C64) -> Result<C64, potkern_core::Error> {
        match self {
            Column::Function(f) => f.eval(z),
            Column::Stencil(s, false) => s.bergman(z),
            Column::Stencil(s, true) => s.lambda(z),
            Column::Green(g) => g.value(z).map(|v| C64::new(v, 0.0)),
        }
    }

    fn boundary(&self, grid: &BoundaryGrid) -> Vec<C64> {
        match self {
            Column::Function(f) => f.samples().to_vec(),
            Column::Stencil(s, lambda) => {
                let (k, l) = s.boundary();
                if *lambda {
                    l
                } else {
                    k
                }
            }
            Column::Green(_) => vec![C64::new(0.0, 0.0); grid.len()],
        }
    }
}

fn column(cfg: &RunConfig, grid: &Arc<BoundaryGrid>, kind: KernelKind, a: C64) -> Result<Column, CliError> {
    let classical = || Classical::new(grid, cfg.order);
    Ok(match kind {
        KernelKind::Szego => Column::Function(classical()?.szego(a)?),
        KernelKind::Garabedian => Column::Function(classical()?.garabedian(a)?),
        KernelKind::Ahlfors => Column::Function(classical()?.ahlfors(a)?.map.samples),
        KernelKind::Sigma => Column::Function(hardy::sigma(&cfg.weighted_basis(grid)?, a)?),
        KernelKind::WeightedGarabedian => Column::Function(hardy::weighted_garabedian(&cfg.weighted_basis(grid)?, a)?),
        KernelKind::Bergman => Column::Stencil(KernelStencil::new(&DirichletSolver::new(grid)?, a)?, false),
        KernelKind::Lambda => Column::Stencil(KernelStencil::new(&DirichletSolver::new(grid)?, a)?, true),
        KernelKind::Green => Column::Green(green(&DirichletSolver::new(grid)?, a)?),
    })
}

/// Cell-centred `n × n` lattice over the bounding box, row by row from the bottom.
fn cell_lattice(domain: &LoadedDomain, n: usize) -> Vec<C64> {
    let (x0, x1, y0, y1) = domain.domain.bounding_box();
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        for ix in 0..n {
            let x = x0 + (x1 - x0) * (ix as f64 + 0.5) / n as f64;
            let y = y0 + (y1 - y0) * (iy as f64 + 0.5) / n as f64;
            out.push(C64::new(x, y));
        }
    }
    out
}

pub fn cmd_kernel(cfg: &RunConfig, args: &KernelArgs) -> Result<Vec<u8>, CliError> {
    let explicit: Vec<C64> = args.points.z.iter().map(|s| parse_complex(s)).collect::<Result<_, _>>()?;
    if args.points.grid == Some(0) {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    let a = point_or_default(&cfg.domain, &args.a)?;
    for z in &explicit {
        interior(&cfg.domain, *z)?;
    }
    let grid = cfg.grid()?;
    let col = column(cfg, &grid, args.kernel, a)?;
    let mut table = Table::new(&["z_re", "z_im", "w_re", "w_im", "value_re", "value_im"])?;
    let mut emit = |z: C64, v: C64| table.row([num(z.re), num(z.im), num(a.re), num(a.im), num(v.re), num(v.im)]);
    if args.points.boundary {
        for (z, v) in grid.nodes.iter().zip(col.boundary(&grid)) {
            emit(*z, v)?;
        }
    } else if let Some(n) = args.points.grid {
        for z in cell_lattice(&cfg.domain, n) {
            match contains(&cfg.domain.domain, z) {
                Ok(true) => {}
                Ok(false) => continue,
                Err(e) if !e.is_numerical() => continue,
                Err(e) => return Err(e.into()),
            }
            match col.eval(z) {
                Ok(v) if v.re.is_finite() && v.im.is_finite() => emit(z, v)?,
                Ok(_) => {}
                Err(e) if !e.is_numerical() => {}
                Err(e) => return Err(e.into()),
            }
        }
    } else {
        for z in explicit {
            emit(z, col.eval(z)?)?;
        }
    }
    table.finish()
}

/// Report rows and the exit status they imply.
pub struct VerifyOutcome {
    pub rows: Vec<SuiteRow>,
    pub csv: Vec<u8>,
}

impl VerifyOutcome {
    pub fn first_failure(&self) -> Option<&SuiteRow> {
        self.rows.iter().find(|r| !r.pass)
    }
}

pub fn cmd_verify(cfg: &RunConfig, args: &VerifyArgs) -> Result<VerifyOutcome, CliError> {
    let base = args.a.as_deref().map(parse_complex).transpose()?;
    let a1 = args.a1.as_deref().map(parse_complex).transpose()?;
    for p in base.iter().chain(&a1) {
        interior(&cfg.domain, *p)?;
    }
    if args.max_degree == 0 {
        return Err(CliError::Usage("--max-degree must be positive".into()));
    }
    let grid = cfg.grid()?;
    let weight = cfg.weight(&grid)?;
    let ws = Workspace::new(&cfg.domain.label, grid, weight, cfg.order, base)?;
    let tols = &cfg.tolerances;
    let want = |s: Suite| args.suite == s || args.suite == Suite::All;
    let mut rows = Vec::new();
    if want(Suite::Identities) {
        rows.extend(verify::identity_suite(&ws, tols)?);
    }
    if want(Suite::Reconstruction) {
        rows.extend(verify::reconstruction_suite(&ws, tols)?);
    }
    if want(Suite::Poisson) {
        rows.extend(verify::poisson_suite(&ws, tols, a1)?);
    }
    if want(Suite::Dependence) {
        rows.extend(verify::dependence_suite(&ws, tols, args.max_degree)?);
    }
    let mut table = Table::new(&["check", "domain", "weight", "value", "bound", "tolerance", "pass", "note"])?;
    for r in &rows {
        table.row([
            r.check.clone(),
            r.domain.clone(),
            r.weight.clone(),
            num(r.value),
            r.bound.symbol().to_string(),
            num(r.tolerance),
            if r.pass { "PASS" } else { "FAIL" }.to_string(),
            r.note.clone(),
        ])?;
    }
    Ok(VerifyOutcome { rows, csv: table.finish()? })
}

pub fn cmd_plotdata(cfg: &RunConfig, args: &PlotArgs) -> Result<Vec<u8>, CliError> {
    if args.resolution < 2 {
        return Err(CliError::Usage("--resolution must be at least 2".into()));
    }
    let n = cfg.domain.domain.connectivity();
    let index = args.index.unwrap_or(if n > 1 { 2 } else { 1 });
    if index == 0 || index > n {
        return Err(CliError::Usage(format!("--index must lie in 1..={n}")));
    }
    let grid = cfg.grid()?;
    let solver = DirichletSolver::new(&grid)?;
    let field: Box<dyn Fn(C64) -> Result<f64, potkern_core::Error>> = match args.field {
        Field::Green => {
            let g = green(&solver, point_or_default(&cfg.domain, &args.a)?)?;
            Box::new(move |z| g.value(z))
        }
        Field::AhlforsModulus => {
            let f = Classical::new(&grid, cfg.order)?.ahlfors(point_or_default(&cfg.domain, &args.a)?)?.map;
            Box::new(move |z| f.eval(z).map(|v| v.norm()))
        }
        Field::HarmonicMeasure => {
            let h = harmonic_measure(&solver, index)?.solution;
            Box::new(move |z| h.eval(z))
        }
    };
    let (x0, x1, y0, y1) = cfg.domain.domain.bounding_box();
    let r = args.resolution;
    let mut table = Table::new(&["x", "y", "value"])?;
    for iy in 0..r {
        for ix in 0..r {
            let z = C64::new(x0 + (x1 - x0) * ix as f64 / (r - 1) as f64, y0 + (y1 - y0) * iy as f64 / (r - 1) as f64);
            let inside = match contains(&cfg.domain.domain, z) {
                Ok(b) => b,
                Err(e) if !e.is_numerical() => false,
                Err(e) => return Err(e.into()),
            };
            let v = if inside {
                match field(z) {
                    Ok(v) if v.is_finite() => v,
                    Ok(_) => f64::NAN,
                    Err(e) if !e.is_numerical() => f64::NAN,
                    Err(e) => return Err(e.into()),
                }
            } else {
                f64::NAN
            };
            table.row([num(z.re), num(z.im), num(v)])?;
        }
    }
    table.finish()
}

/// Removes `--tol:<check>=<value>` arguments, which clap cannot express.
pub fn extract_tolerances(args: Vec<String>) -> Result<(Vec<String>, Tolerances), CliError> {
    let mut tols = Tolerances::new();
    let mut rest = Vec::with_capacity(args.len());
    for a in args {
        match a.strip_prefix("--tol:") {
            Some(spec) => {
                let (id, v) = spec.split_once('=').ok_or_else(|| CliError::BadTolerance(a.clone()))?;
                let v: f64 = v.parse().map_err(|_| CliError::BadTolerance(a.clone()))?;
                if id.is_empty() || !v.is_finite() || v < 0.0 {
                    return Err(CliError::BadTolerance(a.clone()));
                }
                tols.set(id, v);
            }
            None => rest.push(a),
        }
    }
    Ok((rest, tols))
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, bytes).map_err(|e| CliError::Io(p.display().to_string(), e.to_string())),
        None => stdout.write_all(bytes).map_err(|e| CliError::Io("stdout".into(), e.to_string())),
    }
}

fn dispatch(args: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let (args, tols) = extract_tolerances(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand) {
                let _ = write!(stdout, "{e}");
                return Ok(if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand { EXIT_INPUT } else { EXIT_OK });
            }
            let text = e.to_string();
            let msg: Vec<&str> = text.lines().take_while(|l| !l.starts_with("Usage:")).map(str::trim).filter(|l| !l.is_empty()).collect();
            return Err(CliError::Usage(msg.join(" ").trim_start_matches("error: ").to_string()));
        }
    };
    match &cli.command {
        Command::Kernel(k) => {
            let cfg = RunConfig::new(&k.common, tols)?;
            let bytes = cmd_kernel(&cfg, k)?;
            write_output(&cfg.out, &bytes, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Plotdata(p) => {
            let cfg = RunConfig::new(&p.common, tols)?;
            let bytes = cmd_plotdata(&cfg, p)?;
            write_output(&cfg.out, &bytes, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify(v) => {
            let cfg = RunConfig::new(&v.common, tols)?;
            let outcome = cmd_verify(&cfg, v)?;
            write_output(&cfg.out, &outcome.csv, stdout)?;
            match outcome.first_failure() {
                None => Ok(EXIT_OK),
                Some(r) => {
                    let failed = outcome.rows.iter().filter(|r| !r.pass).count();
                    let _ = writeln!(
                        stderr,
                        "fail: check={} domain={} value={:e} bound={} tolerance={:e} failed={failed}",
                        r.check,
                        r.domain,
                        r.value,
                        r.bound.symbol(),
                        r.tolerance
                    );
                    Ok(EXIT_SUITE_FAILURE)
                }
            }
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit status.
pub fn run(args: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    let result = panic::catch_unwind(AssertUnwindSafe(|| dispatch(args, stdout, stderr)));
    panic::set_hook(hook);
    let result = result.unwrap_or_else(|p| {
        let msg = p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_default();
        Err(CliError::Internal(msg))
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(stderr, "error: cause={} {msg}", e.cause());
            e.exit_code()
        }
    }
}
