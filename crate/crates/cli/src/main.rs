use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use isogeo4::curve::CurveError;
use isogeo4::family::{builtin_examples, FamilyError, HypersurfaceFamily, Tolerances, DEFAULT_SAMPLES, BUILTIN_NAMES};
use isogeo4::io::{self as sio, CsvTable, OutputPaths, Scene};
use isogeo4::projection::{self, Axis, GridSpec, ProjectionError, DEFAULT_VOLUME_GRID};
use isogeo4::validator::{self, Thresholds};

const SCHEMA_HELP: &str = "Scene files are TOML; the schema is documented in the guide \
(book/src/scenes.md) and annotated examples live in scenes/.\n\n\
Exit codes: 0 success, 1 validation failure, 2 usage or schema error, 3 numeric degeneracy.\n\
ISOGEO4_THREADS caps worker threads (0 or unset = one per core).";

#[derive(Parser)]
#[command(name = "isogeo4", version, about = "Hypersurface families in R^4 with a prescribed isogeodesic", after_help = SCHEMA_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Frenet frame and curvatures along the curve, as CSV.
    #[command(after_help = SCHEMA_HELP)]
    Frenet(FrenetArgs),
    /// Check that the curve is an isogeodesic of the family member.
    #[command(after_help = SCHEMA_HELP)]
    Validate(ValidateArgs),
    /// Mesh a projected slice as OBJ, with the curve as a polyline.
    #[command(after_help = SCHEMA_HELP)]
    Surface(SurfaceArgs),
    /// Projected samples of the full parameter grid, as CSV.
    #[command(after_help = SCHEMA_HELP)]
    Volume(VolumeArgs),
    /// List the built-in families.
    Examples,
}

#[derive(Args)]
struct Source {
    /// Scene file (TOML).
    #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
    scene: Option<PathBuf>,
    /// Built-in family: example1, example2 or example3.
    #[arg(long)]
    builtin: Option<String>,
    /// Override the anchor t0.
    #[arg(long, allow_negative_numbers = true)]
    t0: Option<f64>,
    /// Override the anchor q0.
    #[arg(long, allow_negative_numbers = true)]
    q0: Option<f64>,
}

#[derive(Args)]
struct FrenetArgs {
    #[command(flatten)]
    source: Source,
    /// Number of uniform samples over the curve domain.
    #[arg(long, default_value_t = DEFAULT_SAMPLES, conflicts_with = "s")]
    samples: usize,
    /// Explicit parameter values, comma separated (constant expressions allowed).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    s: Vec<String>,
    /// Output CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Bound on quantities that must vanish.
    #[arg(long, default_value_t = Tolerances::default().eps_zero)]
    eps_zero: f64,
    /// Relative floor for quantities that must not vanish.
    #[arg(long, default_value_t = Tolerances::default().eps_nonzero)]
    eps_nonzero: f64,
    /// Bound on the collinearity defect 1 - |cos(n, N)|.
    #[arg(long, default_value_t = Thresholds::default().collinearity)]
    collinearity_tol: f64,
    /// Bound on the tangential part of r''.
    #[arg(long, default_value_t = Thresholds::default().tangential)]
    tangential_tol: f64,
    /// Bound on |P(s, t0, q0) - r(s)|.
    #[arg(long, default_value_t = Thresholds::default().isoparam)]
    isoparam_tol: f64,
    /// Sweep t0 over these values (comma separated).
    #[arg(long, value_delimiter = ',')]
    sweep_t0: Vec<String>,
    /// Sweep q0 over these values (comma separated).
    #[arg(long, value_delimiter = ',')]
    sweep_q0: Vec<String>,
    /// Report CSV (default: the scene's output.report, if any).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SurfaceArgs {
    #[command(flatten)]
    source: Source,
    /// Parameter held fixed, e.g. `q=0.125` or `t=1`.
    #[arg(long)]
    fix: Option<String>,
    /// Coordinate removed by the projection: x, y, z or w.
    #[arg(long)]
    drop: Option<Axis>,
    /// Samples along s [default: scene grid, else 65].
    #[arg(long)]
    n_s: Option<usize>,
    /// Samples along t [default: scene grid, else 17].
    #[arg(long)]
    n_t: Option<usize>,
    /// Samples along q [default: scene grid, else 17].
    #[arg(long)]
    n_q: Option<usize>,
    /// Output OBJ (default: the scene's output.mesh, else standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VolumeArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    drop: Option<Axis>,
    #[arg(long, default_value_t = DEFAULT_VOLUME_GRID.0)]
    n_s: usize,
    #[arg(long, default_value_t = DEFAULT_VOLUME_GRID.1)]
    n_t: usize,
    #[arg(long, default_value_t = DEFAULT_VOLUME_GRID.2)]
    n_q: usize,
    /// Output CSV (default: the scene's output.table, else standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Validation,
    Usage(String),
    Numeric(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation => 1,
            Failure::Usage(_) | Failure::Io(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

impl From<FamilyError> for Failure {
    fn from(e: FamilyError) -> Failure {
        match e {
            FamilyError::Curve(CurveError::DegenerateFrame { .. } | CurveError::Eval(_)) | FamilyError::Eval(_) => {
                Failure::Numeric(e.to_string())
            }
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<ProjectionError> for Failure {
    fn from(e: ProjectionError) -> Failure {
        match e {
            ProjectionError::Family(f) => f.into(),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::Io(e.to_string())
    }
}

/// A family plus whatever defaults its scene file carried.
struct Loaded {
    family: HypersurfaceFamily,
    grid: Option<GridSpec>,
    axis: Option<Axis>,
    output: OutputPaths,
}

fn load(src: &Source) -> Result<Loaded, Failure> {
    let mut loaded = match (&src.scene, &src.builtin) {
        (_, Some(name)) => {
            let family = isogeo4::family::builtin(name).ok_or_else(|| {
                Failure::Usage(format!("unknown builtin `{name}` (available: {})", BUILTIN_NAMES.join(", ")))
            })?;
            Loaded { family, grid: None, axis: None, output: OutputPaths::default() }
        }
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let Scene { family, grid, axis, output } =
                sio::load_scene(&text).map_err(|e| Failure::Usage(format!("{}:\n{e}", path.display())))?;
            Loaded { family, grid: Some(grid), axis: Some(axis), output }
        }
        (None, None) => return Err(Failure::Usage("a scene file or --builtin is required".into())),
    };
    if src.t0.is_some() || src.q0.is_some() {
        let p = loaded.family.params();
        let (t0, q0) = (src.t0.unwrap_or(p.t0), src.q0.unwrap_or(p.q0));
        loaded.family = loaded.family.with_anchor(t0, q0).map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(loaded)
}

fn constants(values: &[String], flag: &str) -> Result<Vec<f64>, Failure> {
    values
        .iter()
        .map(|v| sio::constant(v.trim()).map_err(|e| Failure::Usage(format!("--{flag} `{v}`: {e}"))))
        .collect()
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_csv(table: &CsvTable, path: Option<&Path>) -> Result<(), Failure> {
    let mut out = sink(path)?;
    sio::write_csv(table, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Summary lines go to stderr when the artifact itself is on stdout.
fn note(to_stdout: bool, line: &str) {
    if to_stdout {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn frenet(args: &FrenetArgs) -> Result<(), Failure> {
    let loaded = load(&args.source)?;
    let curve = loaded.family.curve();
    let s_values = if args.s.is_empty() {
        if args.samples < 2 {
            return Err(Failure::Usage("--samples must be at least 2".into()));
        }
        curve.domain().samples(args.samples)
    } else {
        constants(&args.s, "s")?
    };
    let rows: Vec<_> = s_values.iter().map(|&s| (s, curve.frenet_apparatus(s))).collect();
    emit_csv(&sio::frenet_table(&rows), args.out.as_deref())?;

    let bad: Vec<&CurveError> = rows.iter().filter_map(|(_, r)| r.as_ref().err()).collect();
    if let Some(e) = bad.iter().find(|e| !matches!(e, CurveError::DegenerateFrame { .. } | CurveError::Eval(_))) {
        return Err(Failure::Usage(e.to_string()));
    }
    for e in &bad {
        eprintln!("warning: {e}");
    }
    if !rows.is_empty() && bad.len() == rows.len() {
        return Err(Failure::Numeric(bad[0].to_string()));
    }
    if let Some(out) = &args.out {
        println!("frenet: {} rows ({} degenerate) -> {}", rows.len(), bad.len(), out.display());
    }
    Ok(())
}

fn validate(args: &ValidateArgs) -> Result<(), Failure> {
    if args.samples < 2 {
        return Err(Failure::Usage("--samples must be at least 2".into()));
    }
    let loaded = load(&args.source)?;
    let f = &loaded.family;
    let thresholds = Thresholds {
        isoparam: args.isoparam_tol,
        collinearity: args.collinearity_tol,
        tangential: args.tangential_tol,
        phi: Tolerances { eps_zero: args.eps_zero, eps_nonzero: args.eps_nonzero },
    };
    let report_path = args.report.clone().or(loaded.output.report.clone());

    if !args.sweep_t0.is_empty() || !args.sweep_q0.is_empty() {
        let p = f.params();
        let t0s = if args.sweep_t0.is_empty() { vec![p.t0] } else { constants(&args.sweep_t0, "sweep-t0")? };
        let q0s = if args.sweep_q0.is_empty() { vec![p.q0] } else { constants(&args.sweep_q0, "sweep-q0")? };
        let grid = validator::anchor_grid(&t0s, &q0s);
        let rows = validator::sweep_anchor(f, &grid, args.samples, &thresholds)?;
        let mut table = CsvTable::new(["t0", "q0", "verdict", "reasons"]);
        for r in &rows {
            println!("{}", r.report.summary_line(&format!("t0={} q0={}", r.t0, r.q0)));
            let reasons: Vec<&str> = r.report.verdict.reasons().iter().map(|x| x.code()).collect();
            let verdict = if r.report.passed() { "pass" } else { "fail" };
            table.push(vec![r.t0.into(), r.q0.into(), verdict.into(), reasons.join(";").as_str().into()]);
        }
        if let Some(path) = &report_path {
            emit_csv(&table, Some(path))?;
        }
        return if rows.iter().all(|r| r.report.passed()) { Ok(()) } else { Err(Failure::Validation) };
    }

    let report = validator::validate(f, args.samples, &thresholds)?;
    let conditions = f.check_conditions(args.samples, &thresholds.phi);
    let label = args.source.builtin.clone().unwrap_or_else(|| {
        args.source.scene.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
    });
    println!("{}", report.summary_line(&label));
    let conditions_pass = match &conditions {
        Ok(c) => {
            let failed: Vec<&str> = c.failures().map(|e| e.name).collect();
            if failed.is_empty() {
                println!("conditions ({}): pass", c.check);
            } else {
                println!("conditions ({}): fail {}", c.check, failed.join(","));
            }
            c.passed()
        }
        Err(FamilyError::HypothesisViolated { kind, detail }) => {
            println!("conditions (type {kind}): hypothesis violated: {detail}");
            false
        }
        Err(e) => return Err(e.clone().into()),
    };
    if let Some(path) = &report_path {
        emit_csv(&sio::validation_table(&report), Some(path))?;
    }
    if report.passed() && conditions_pass {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn surface(args: &SurfaceArgs) -> Result<(), Failure> {
    let loaded = load(&args.source)?;
    let scene_fixed = loaded.grid.and_then(|g| g.fixed);
    let fixed = match &args.fix {
        Some(text) => sio::parse_fixed(text).map_err(|e| Failure::Usage(format!("--fix: {e}")))?,
        None => scene_fixed.ok_or_else(|| Failure::Usage("--fix <s|t|q>=<value> is required".into()))?,
    };
    let base = loaded.grid.filter(|g| g.fixed.is_some()).unwrap_or(GridSpec::slice(fixed.0, fixed.1));
    let grid = GridSpec {
        n_s: args.n_s.unwrap_or(base.n_s),
        n_t: args.n_t.unwrap_or(base.n_t),
        n_q: args.n_q.unwrap_or(base.n_q),
        fixed: Some(fixed),
    };
    let axis = args.drop.or(loaded.axis).unwrap_or(Axis::W);
    let mesh = projection::slice_to_mesh(&loaded.family, &grid, axis)?;

    let out = args.out.clone().or(loaded.output.mesh.clone());
    let mut w = sink(out.as_deref())?;
    sio::write_obj(&mesh, &mut w)?;
    w.flush()?;
    let (param, value) = fixed;
    note(
        out.is_some(),
        &format!(
            "surface: {param}={value} drop {axis}: {} vertices, {} triangles, polyline {}{}",
            mesh.vertex_count(),
            mesh.triangle_count(),
            mesh.marked_polyline.len(),
            out.map(|p| format!(" -> {}", p.display())).unwrap_or_default()
        ),
    );
    Ok(())
}

fn volume(args: &VolumeArgs) -> Result<(), Failure> {
    let loaded = load(&args.source)?;
    let grid = GridSpec { n_s: args.n_s, n_t: args.n_t, n_q: args.n_q, fixed: None };
    let axis = args.drop.or(loaded.axis).unwrap_or(Axis::W);
    let rows = projection::sample_volume(&loaded.family, &grid, axis)?;
    let out = args.out.clone().or(loaded.output.table.clone());
    emit_csv(&sio::volume_table(&rows), out.as_deref())?;
    note(
        out.is_some(),
        &format!(
            "volume: {}x{}x{} drop {axis}: {} rows{}",
            grid.n_s,
            grid.n_t,
            grid.n_q,
            rows.len(),
            out.map(|p| format!(" -> {}", p.display())).unwrap_or_default()
        ),
    );
    Ok(())
}

fn examples() {
    for (name, f) in builtin_examples() {
        let p = f.params();
        println!(
            "{name}\ttype {}\ts in {}\tt0={} q0={}",
            f.marching().kind().label(),
            f.curve().domain(),
            p.t0,
            p.q0
        );
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("ISOGEO4_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("ISOGEO4_THREADS must be a non-negative integer, got `{value}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Frenet(a) => frenet(a),
        Command::Validate(a) => validate(a),
        Command::Surface(a) => surface(a),
        Command::Volume(a) => volume(a),
        Command::Examples => {
            examples();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Validation => {}
                Failure::Usage(m) | Failure::Io(m) => eprintln!("error: {m}"),
                Failure::Numeric(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
