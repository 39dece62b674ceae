//! Command implementations behind the `helicore` binary.
//!
//! Every command writes its report to the supplied writer and returns the
//! process exit code: 0 success, 1 a failed check, 2 invalid input,
//! 3 a numerical blow-up during integration.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use helicore::curvature::{
    sectional_biinv, sectional_rightinv, sectional_rightinv_eigen, EIGEN_TOL,
};
use helicore::dynamics::{beltrami_check, evolve_with, EvolveConfig};
use helicore::fields::hodge_decompose;
use helicore::forms::{eta_partial, l2_inner, l2_norm, EtaReport};
use helicore::io::{
    format_f64, read_snapshot, save_field, snapshot_path, write_atomic, write_diagnostics_csv,
    FieldSnapshot, FieldSpec, InitSpec, RunConfig,
};
use helicore::suite::{run_identity_suite, validate_suite_args};
use helicore::{Error, GridSpec, SpectralVectorField};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;

/// Grid size used when neither `--n` nor a snapshot fixes it.
pub const DEFAULT_N: usize = 32;

#[derive(Debug, Parser)]
#[command(
    name = "helicore",
    version,
    about = "Pseudo-spectral Euler dynamics and curvature on the 3-torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the operator identity suite on random band-limited fields.
    Check(CheckArgs),
    /// Integrate the vorticity equation with RK4.
    Evolve(EvolveArgs),
    /// Sectional curvature tables for a pair of fields.
    Curvature(CurvatureArgs),
    /// Signed curl spectrum and the η partial sum.
    Spectrum(SpectrumArgs),
    /// Hodge component norms of a field.
    Decompose(DecomposeArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, default_value_t = DEFAULT_N)]
    pub n: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub band: usize,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// JSON run configuration; excludes the other flags.
    #[arg(long, conflicts_with_all = ["n", "init", "dt", "steps", "record_every", "snapshot_every", "out"])]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Initial vorticity, e.g. `abc:1,1,1` or `random:3,2`.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub record_every: Option<usize>,
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    /// Output prefix: writes `OUT.csv` and `OUT_stepNNNNNN.hfd`.
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long)]
    pub x: String,
    #[arg(long)]
    pub y: String,
    #[arg(long)]
    pub n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub s: f64,
    #[arg(long)]
    pub kmax: usize,
    /// Defaults to the smallest admissible grid.
    #[arg(long)]
    pub n: Option<usize>,
    /// Also write the multiplicity table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub field: String,
    #[arg(long)]
    pub n: Option<usize>,
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Blowup { .. } => EXIT_BLOWUP,
        _ => EXIT_INVALID,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return e.exit_code();
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(out, "error: {msg}");
        return EXIT_INVALID;
    }
    let result = match &cli.command {
        Command::Check(a) => cmd_check(a.n, a.seed, a.band, out),
        Command::Evolve(a) => cmd_evolve(a, out),
        Command::Curvature(a) => cmd_curvature(a, out),
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Decompose(a) => cmd_decompose(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            error_code(&e)
        }
    }
}

/// Caps the global rayon pool at `HELICORE_THREADS` when set.
fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("HELICORE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("HELICORE_THREADS={v:?} is not a positive integer"))?;
    // a pool built earlier in the same process is kept
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e)
}

pub fn cmd_check(n: usize, seed: u64, band: usize, out: &mut dyn Write) -> helicore::Result<i32> {
    validate_suite_args(n, band)?;
    let checks = run_identity_suite(n, seed, band)?;
    let width = checks
        .iter()
        .map(|c| c.name.chars().count())
        .max()
        .unwrap_or(8);
    writeln!(out, "identity suite: n = {n}, seed = {seed}, band = {band}").map_err(io_err)?;
    writeln!(
        out,
        "{:<width$}  {:>12}  {:>9}  result",
        "identity", "residual", "threshold"
    )
    .map_err(io_err)?;
    let mut failed = 0;
    for c in &checks {
        let verdict = if c.passed() { "PASS" } else { "FAIL" };
        if !c.passed() {
            failed += 1;
        }
        let pad = width - c.name.chars().count();
        writeln!(
            out,
            "{}{}  {:>12.3e}  {:>9.0e}  {verdict}",
            c.name,
            " ".repeat(pad),
            c.residual,
            c.threshold
        )
        .map_err(io_err)?;
    }
    writeln!(out, "{} of {} passed", checks.len() - failed, checks.len()).map_err(io_err)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAIL })
}

/// Initial field of an `evolve` run, already validated.
struct EvolvePlan {
    grid: GridSpec,
    x0: SpectralVectorField,
    cfg: EvolveConfig,
    out: String,
}

fn plan_from_flags(a: &EvolveArgs) -> helicore::Result<EvolvePlan> {
    let need = |what: &str| Error::InvalidArgument(format!("evolve needs --{what} or --config"));
    let init = a.init.as_deref().ok_or_else(|| need("init"))?;
    let dt = a.dt.ok_or_else(|| need("dt"))?;
    let steps = a.steps.ok_or_else(|| need("steps"))?;
    let out = a.out.clone().ok_or_else(|| need("out"))?;
    let spec = FieldSpec::from_str(init)?;
    let n = resolve_n(a.n, &[&spec])?;
    match spec {
        FieldSpec::Init(init) => plan_from_config(RunConfig {
            n,
            init,
            dt,
            steps,
            record_every: a.record_every.unwrap_or(1),
            snapshot_every: a.snapshot_every.unwrap_or(0),
            out,
        }),
        beltrami => {
            let grid = GridSpec::new(n)?;
            let cfg = EvolveConfig::new(dt, steps)
                .record_every(a.record_every.unwrap_or(1))
                .snapshot_every(a.snapshot_every.unwrap_or(0));
            cfg.validate()?;
            if out.is_empty() {
                return Err(Error::InvalidArgument("out prefix is empty".into()));
            }
            let x0 = beltrami.build(grid)?;
            Ok(EvolvePlan { grid, x0, cfg, out })
        }
    }
}

fn plan_from_config(rc: RunConfig) -> helicore::Result<EvolvePlan> {
    rc.validate()?;
    let grid = rc.grid()?;
    let x0 = rc.init.build(grid)?;
    Ok(EvolvePlan {
        grid,
        x0,
        cfg: rc.evolve_config(),
        out: rc.out,
    })
}

pub fn cmd_evolve(a: &EvolveArgs, out: &mut dyn Write) -> helicore::Result<i32> {
    let plan = match &a.config {
        Some(path) => plan_from_config(RunConfig::load(path)?)?,
        None => plan_from_flags(a)?,
    };
    let prefix = plan.out.clone();
    let mut written = Vec::new();
    let (_, series) = evolve_with(&plan.x0, &plan.cfg, |step, x| {
        let p = snapshot_path(&prefix, step);
        save_field(&p, x)?;
        written.push(p);
        Ok(())
    })?;
    let csv = PathBuf::from(format!("{prefix}.csv"));
    write_diagnostics_csv(&csv, &series)?;

    let last = series.rows.last().expect("step 0 is always recorded");
    writeln!(
        out,
        "evolved n = {}, dt = {}, steps = {}, t = {}",
        plan.grid.n(),
        plan.cfg.dt,
        plan.cfg.steps,
        format_f64(last.t)
    )
    .map_err(io_err)?;
    writeln!(out, "energy drift   {:.3e}", series.energy_drift()).map_err(io_err)?;
    writeln!(out, "helicity drift {:.3e}", series.helicity_drift()).map_err(io_err)?;
    writeln!(
        out,
        "final stationarity residual {:.3e}",
        last.stationarity_residual
    )
    .map_err(io_err)?;
    writeln!(out, "final max divergence {:.3e}", last.max_divergence).map_err(io_err)?;
    writeln!(out, "csv: {} ({} rows)", csv.display(), series.rows.len()).map_err(io_err)?;
    for p in &written {
        writeln!(out, "snapshot: {}", p.display()).map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

/// `--n` if given, else the resolution of the first snapshot spec, else
/// [`DEFAULT_N`].
fn resolve_n(n: Option<usize>, specs: &[&FieldSpec]) -> helicore::Result<usize> {
    if let Some(n) = n {
        return Ok(n);
    }
    for spec in specs {
        if let FieldSpec::Init(InitSpec::File { path }) = spec {
            return Ok(read_snapshot(Path::new(path))?.grid.n());
        }
    }
    Ok(DEFAULT_N)
}

/// Builds a field in its sampled form, so generator specs and snapshot files
/// of the same field give bit-identical reports.
fn build_sampled(spec: &FieldSpec, grid: GridSpec) -> helicore::Result<SpectralVectorField> {
    let f = spec.build(grid)?;
    match spec {
        FieldSpec::Init(InitSpec::File { .. }) => Ok(f),
        _ => FieldSnapshot::from_field(&f).to_field(),
    }
}

pub fn cmd_curvature(a: &CurvatureArgs, out: &mut dyn Write) -> helicore::Result<i32> {
    let (sx, sy) = (FieldSpec::from_str(&a.x)?, FieldSpec::from_str(&a.y)?);
    let grid = GridSpec::new(resolve_n(a.n, &[&sx, &sy])?)?;
    let x = build_sampled(&sx, grid)?;
    let y = build_sampled(&sy, grid)?;
    let w = |out: &mut dyn Write, label: &str, v: f64| {
        writeln!(out, "{label:<28} {}", format_f64(v)).map_err(io_err)
    };

    writeln!(out, "X = {}, Y = {}, n = {}", a.x, a.y, grid.n()).map_err(io_err)?;
    let raw = sectional_biinv(&x, &y, false)?;
    writeln!(out, "bi-invariant K0 (pair as given)").map_err(io_err)?;
    w(out, "  1/4 <[X,Y],[X,Y]>", raw.form_value)?;
    w(out, "  1/4 int g([X,Y], Y x X)", raw.cross_value)?;
    writeln!(out, "  agreement {:.3e}", raw.agreement()).map_err(io_err)?;
    match sectional_biinv(&x, &y, true) {
        Ok(k) => {
            let signs = k.signs.expect("normalized pair carries signs");
            writeln!(
                out,
                "bi-invariant K0 (orthonormalized, signs {:+} {:+})",
                signs[0], signs[1]
            )
            .map_err(io_err)?;
            w(out, "  1/4 <[X,Y],[X,Y]>", k.form_value)?;
            w(out, "  1/4 int g([X,Y], Y x X)", k.cross_value)?;
            writeln!(out, "  agreement {:.3e}", k.agreement()).map_err(io_err)?;
        }
        Err(e) => writeln!(out, "normalization: not available ({e})").map_err(io_err)?,
    }

    let r = sectional_rightinv(&x, &y)?;
    writeln!(out, "right-invariant curvature, five-term form").map_err(io_err)?;
    for (i, t) in r.terms.iter().enumerate() {
        w(out, &format!("  term {}", i + 1), *t)?;
    }
    w(out, "  total", r.total())?;

    let (bx, by) = (beltrami_check(&x)?, beltrami_check(&y)?);
    let eigen = |(lam, res): (f64, f64)| res <= EIGEN_TOL * lam.abs().max(1.0);
    if eigen(bx) && eigen(by) {
        let e = sectional_rightinv_eigen(&x, &y, bx.0, by.0)?;
        writeln!(
            out,
            "right-invariant curvature, eigenfield form (lambda = {}, mu = {})",
            format_f64(bx.0),
            format_f64(by.0)
        )
        .map_err(io_err)?;
        for (i, t) in e.terms.iter().enumerate() {
            w(out, &format!("  term {}", i + 1), *t)?;
        }
        w(out, "  total", e.total())?;
        writeln!(
            out,
            "  difference from five-term form {:.3e}",
            (e.total() - r.total()).abs()
        )
        .map_err(io_err)?;
    } else {
        writeln!(
            out,
            "eigenfield form skipped: curl eigen-residuals {:.3e} (X), {:.3e} (Y)",
            bx.1, by.1
        )
        .map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

fn spectrum_csv(report: &EtaReport) -> String {
    let mut s = String::from("norm_sq,lattice_count,positive,negative\n");
    for m in &report.multiplicity_table {
        s.push_str(&format!(
            "{},{},{},{}\n",
            m.norm_sq, m.lattice_count, m.positive, m.negative
        ));
    }
    s
}

pub fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> helicore::Result<i32> {
    if a.kmax == 0 {
        return Err(Error::InvalidArgument(
            "kmax must be positive (empty spectrum)".into(),
        ));
    }
    let n = match a.n {
        Some(n) => n,
        None => (2 * a.kmax).max(helicore::grid::MIN_RESOLUTION),
    };
    let grid = GridSpec::new(n)?;
    let report = eta_partial(a.s, a.kmax, &grid)?;
    writeln!(
        out,
        "curl spectrum: s = {}, kmax = {}, n = {n}",
        a.s, a.kmax
    )
    .map_err(io_err)?;
    writeln!(out, "{:>8} {:>8} {:>8} {:>8}", "|k|^2", "vectors", "+", "-").map_err(io_err)?;
    for m in &report.multiplicity_table {
        writeln!(
            out,
            "{:>8} {:>8} {:>8} {:>8}",
            m.norm_sq, m.lattice_count, m.positive, m.negative
        )
        .map_err(io_err)?;
    }
    writeln!(
        out,
        "positive {} negative {}",
        report.positive_count, report.negative_count
    )
    .map_err(io_err)?;
    writeln!(out, "eta partial sum {}", format_f64(report.eta_partial)).map_err(io_err)?;
    if let Some(path) = &a.csv {
        write_atomic(path, spectrum_csv(&report).as_bytes())?;
        writeln!(out, "csv: {}", path.display()).map_err(io_err)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_decompose(a: &DecomposeArgs, out: &mut dyn Write) -> helicore::Result<i32> {
    let spec = FieldSpec::from_str(&a.field)?;
    let grid = GridSpec::new(resolve_n(a.n, &[&spec])?)?;
    let x = build_sampled(&spec, grid)?;
    let h = hodge_decompose(&x);
    let rows = [
        ("total", l2_norm(&x)),
        ("gradient", l2_norm(&h.gradient)),
        ("exact (curl)", l2_norm(&h.exact)),
        ("harmonic (mean)", l2_norm(&h.harmonic)),
    ];
    writeln!(
        out,
        "Hodge decomposition of {} on n = {}",
        a.field,
        grid.n()
    )
    .map_err(io_err)?;
    for (name, v) in rows {
        writeln!(out, "{name:<16} {}", format_f64(v)).map_err(io_err)?;
    }
    let cross = l2_inner(&h.gradient, &h.exact)?.abs();
    writeln!(out, "|(gradient, exact)| {:.3e}", cross).map_err(io_err)?;
    Ok(EXIT_OK)
}
