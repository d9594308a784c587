use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use flatcone::coverings::{build_slit_covering, covering_metrics, verify_covering_bounds, CoveringEvidence, SlitSpec};
use flatcone::cylinders::{detect_cylinders, systole};
use flatcone::invariants::{
    counting_function, default_basepoint, delta_xi_hdim, entropy_estimate, packing_density, rho_lower_bound,
};
use flatcone::surface::{
    parse_cycles, parse_document, serialize_surface, validate_description, validate_surface, Document, ValidationMode,
};
use flatcone::sweep::{sweep_csv, sweep_stretch, SweepConfig};
use flatcone::unfolding::SaddleCatalog;
use flatcone::{format_float, FlatError, Surface, Vector};

const EXIT_VALIDATION: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "flatcone", version, about = "Invariants of flat surfaces glued from polygons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check gluings, cone angles and Gauss-Bonnet.
    Validate {
        file: PathBuf,
        /// Accept cone angles that are not integer multiples of π.
        #[arg(long)]
        lenient: bool,
    },
    /// Area, genus, cone points, shortest saddle connection and systole.
    Info {
        file: PathBuf,
        /// Search length for the systole.
        #[arg(long, default_value_t = 2.0)]
        cutoff: f64,
    },
    /// Counting function as CSV and the fitted entropy.
    Entropy {
        file: PathBuf,
        #[arg(long)]
        rmax: f64,
        #[arg(long)]
        grid: f64,
        /// Vertex class of the basepoint; defaults to the first cone point.
        #[arg(long)]
        basepoint: Option<usize>,
        /// Fraction of samples used for the fit.
        #[arg(long, default_value_t = 0.5)]
        window: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maximal cylinders.
    Cylinders {
        file: PathBuf,
        #[arg(long = "min-height")]
        min_height: Option<f64>,
        #[arg(long = "max-circ", default_value_t = 2.0)]
        max_circ: f64,
    },
    /// Packing density and the derived hyperbolicity bounds.
    Packing {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Branched coverings.
    #[command(subcommand)]
    Cover(CoverCommand),
    /// Invariants along the stretch family of a surface.
    Sweep {
        file: PathBuf,
        /// Comma-separated stretch factors, each at least 1.
        #[arg(long, value_delimiter = ',', required = true)]
        lambdas: Vec<f64>,
        #[arg(long)]
        rmax: f64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        grid: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Length bound for the systole and loop searches.
        #[arg(long, default_value_t = 2.0)]
        cutoff: f64,
    },
}

#[derive(Subcommand)]
enum CoverCommand {
    /// Cut a slit and reglue sheets across it.
    Slit(SlitArgs),
}

#[derive(Args)]
struct SlitArgs {
    file: PathBuf,
    /// Slit endpoints x0,y0,x1,y1; defaults to the `slit` lines of the file.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    seg: Option<Vec<f64>>,
    #[arg(long)]
    sheets: Option<usize>,
    /// Monodromy in cycle notation; cyclic by default.
    #[arg(long)]
    perm: Option<String>,
    /// Polygon id holding the slit; defaults to the first that contains it.
    #[arg(long)]
    polygon: Option<i64>,
    /// Where to write the cover; defaults to `<file>.cover.fsf`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Also check the tree count of the cover up to this radius.
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    grid: f64,
}

enum Outcome {
    Ok,
    Failed,
    Partial,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(EXIT_VALIDATION),
        Ok(Outcome::Partial) => ExitCode::from(EXIT_BUDGET),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<FlatError>() {
        Some(FlatError::BudgetExhausted { .. }) => EXIT_BUDGET,
        Some(FlatError::InvalidParameter(_) | FlatError::InvalidSlit(_) | FlatError::MissingInput(_)) => EXIT_USAGE,
        _ => EXIT_VALIDATION,
    }
}

fn read_document(path: &Path) -> anyhow::Result<Document<f64>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(parse_document(&text)?)
}

fn load(path: &Path) -> anyhow::Result<Surface> {
    Ok(Surface::new(read_document(path)?.surface)?)
}

fn f(x: f64) -> String {
    format_float(x)
}

fn run(command: Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Validate { file, lenient } => validate(&file, lenient),
        Command::Info { file, cutoff } => info(&file, cutoff),
        Command::Entropy { file, rmax, grid, basepoint, window, out } => {
            entropy(&file, rmax, grid, basepoint, window, out.as_deref())
        }
        Command::Cylinders { file, min_height, max_circ } => cylinders(&file, min_height, max_circ),
        Command::Packing { file, tol } => packing(&file, tol),
        Command::Cover(CoverCommand::Slit(args)) => cover_slit(args),
        Command::Sweep { file, lambdas, rmax, out, grid, tol, cutoff } => {
            let base = load(&file)?;
            let mut cfg = SweepConfig::new(rmax);
            cfg.grid = grid;
            cfg.packing_tol = tol;
            cfg.curve_cutoff = cutoff;
            let rows = sweep_stretch(&base, &lambdas, &cfg)?;
            fs::write(&out, sweep_csv(&rows)).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            if rows.iter().any(|r| !r.exhaustive) {
                eprintln!("some rows hit the counting budget and are partial");
                return Ok(Outcome::Partial);
            }
            Ok(Outcome::Ok)
        }
    }
}

fn validate(file: &Path, lenient: bool) -> anyhow::Result<Outcome> {
    let mode = if lenient { ValidationMode::Lenient } else { ValidationMode::Strict };
    let doc = match read_document(file) {
        Ok(d) => d,
        Err(e) if e.downcast_ref::<FlatError>().is_some() => {
            println!("FAIL {e}");
            return Ok(Outcome::Failed);
        }
        Err(e) => return Err(e),
    };
    let report = match Surface::new(doc.surface.clone()) {
        Ok(s) => validate_surface(&s, mode),
        Err(_) => validate_description(&doc.surface, mode, 1e-9),
    };
    println!("area {}", f(report.area));
    println!("euler_characteristic {}", report.euler_characteristic);
    println!("genus {}", report.genus);
    println!("gauss_bonnet_residual {:e}", report.gauss_bonnet_residual);
    for c in &report.cones {
        println!("cone {} angle {}pi{}", c.class, f(c.multiple), if c.regular { " regular" } else { "" });
    }
    for msg in &report.failures {
        println!("FAIL {msg}");
    }
    if report.passed() {
        println!("OK");
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Failed)
    }
}

fn info(file: &Path, cutoff: f64) -> anyhow::Result<Outcome> {
    let s = load(file)?;
    println!("polygons {}", s.polygons().len());
    println!("area {}", f(s.area()));
    println!("genus {}", s.genus());
    println!("euler_characteristic {}", s.euler_characteristic());
    for c in s.cone_points() {
        println!("cone {} angle {}pi", c.class, f(c.multiple()));
    }
    let catalog = SaddleCatalog::build(&s, cutoff)?;
    match catalog.shortest() {
        Some(sc) => println!("shortest_saddle_connection {}", f(sc.length)),
        None => println!("shortest_saddle_connection none within {}", f(cutoff)),
    }
    match systole(&s, cutoff) {
        Ok(r) => println!("systole {} {:?}", f(r.length), r.kind),
        Err(FlatError::CutoffExceeded { .. }) => println!("systole none within {}", f(cutoff)),
        Err(e) => return Err(e.into()),
    }
    Ok(Outcome::Ok)
}

fn entropy(
    file: &Path,
    rmax: f64,
    grid: f64,
    basepoint: Option<usize>,
    window: f64,
    out: Option<&Path>,
) -> anyhow::Result<Outcome> {
    let s = load(file)?;
    let bp = basepoint.unwrap_or_else(|| default_basepoint(&s));
    let table = counting_function(&s, bp, rmax, grid)?;
    let csv = table.to_csv();
    match out {
        Some(p) => fs::write(p, &csv).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{csv}"),
    }
    match entropy_estimate(&table, window) {
        Ok(e) => eprintln!(
            "e_hat {} residual {} tail_slope_max {} window [{}, {}] samples {}",
            f(e.e_hat),
            f(e.residual),
            f(e.tail_slope_max),
            f(e.window_start),
            f(e.window_end),
            e.window_samples
        ),
        Err(e) => eprintln!("no entropy fit: {e}"),
    }
    if table.exhaustive {
        Ok(Outcome::Ok)
    } else {
        eprintln!("counting budget exhausted; table stops at R = {}", f(*table.radii.last().unwrap()));
        Ok(Outcome::Partial)
    }
}

fn cylinders(file: &Path, min_height: Option<f64>, max_circ: f64) -> anyhow::Result<Outcome> {
    let s = load(file)?;
    let h = min_height.unwrap_or(s.tolerance());
    let cyls = detect_cylinders(&s, h, max_circ)?;
    println!("angle,circumference,height,area,maximal");
    for c in &cyls {
        println!("{},{},{},{},{}", f(c.angle()), f(c.circumference), f(c.height), f(c.area()), c.maximal);
    }
    Ok(Outcome::Ok)
}

fn packing(file: &Path, tol: f64) -> anyhow::Result<Outcome> {
    let s = load(file)?;
    let p = packing_density(&s, tol)?;
    println!("rho {}", f(p.rho));
    println!("rho_upper {}", f(p.rho + p.tolerance));
    println!("point {} {} {}", p.point.polygon, f(p.point.position.x), f(p.point.position.y));
    let angles: Vec<f64> = s.singularities().iter().map(|&c| s.cone_points()[c].angle).collect();
    if let Ok(lb) = rho_lower_bound(&angles) {
        println!("rho_lower_bound_area_one {}", f(lb));
    }
    let b = delta_xi_hdim((p.rho, p.rho + p.tolerance), 0.0)?;
    println!("delta {} {}", f(b.delta.0), f(b.delta.1));
    println!("xi {} {}", f(b.xi.0), f(b.xi.1));
    Ok(Outcome::Ok)
}

fn cover_slit(args: SlitArgs) -> anyhow::Result<Outcome> {
    let doc = read_document(&args.file)?;
    let base = Surface::new(doc.surface.clone())?;
    let slits = match &args.seg {
        Some(seg) => {
            if seg.len() != 4 {
                bail!(FlatError::InvalidParameter(format!("--seg needs 4 numbers, got {}", seg.len())));
            }
            let (a, b) = (Vector::new(seg[0], seg[1]), Vector::new(seg[2], seg[3]));
            let polygon = match args.polygon {
                Some(id) => base.description().polygon_index(id).ok_or(FlatError::UnknownPolygon(id))?,
                None => base
                    .polygons()
                    .iter()
                    .position(|p| {
                        flatcone::polygon::contains(&p.vertices, a, 1e-12)
                            && flatcone::polygon::contains(&p.vertices, b, 1e-12)
                    })
                    .ok_or_else(|| FlatError::InvalidSlit("no polygon contains the segment".into()))?,
            };
            let n = args.sheets.context("--sheets is required with --seg")?;
            let perm = match &args.perm {
                Some(text) => parse_cycles(text, n).map_err(FlatError::InvalidSlit)?,
                None => SlitSpec::cyclic(polygon, a, b, n).perm,
            };
            vec![SlitSpec { polygon, start: a, end: b, sheets: n, perm }]
        }
        None => {
            if doc.slits.is_empty() {
                bail!(FlatError::MissingInput("no --seg given and the file has no slit lines".into()));
            }
            doc.slits.iter().map(|l| SlitSpec::from_line(&base, l)).collect::<Result<Vec<_>, _>>()?
        }
    };
    let cover = build_slit_covering(&base, &slits)?;
    let out = args.out.clone().unwrap_or_else(|| args.file.with_extension("cover.fsf"));
    fs::write(&out, serialize_surface(cover.surface.description()))
        .with_context(|| format!("writing {}", out.display()))?;

    let m = covering_metrics(&cover)?;
    let mut report = String::new();
    writeln!(report, "cover {}", out.display())?;
    writeln!(report, "sheets {}", m.sheets)?;
    writeln!(report, "area {}", f(cover.surface.area()))?;
    writeln!(report, "genus {}", cover.surface.genus())?;
    for b in &m.branch_points {
        writeln!(report, "branch_point class {} slit {} endpoint {} order {} angle {}pi", b.class, b.slit, b.endpoint, b.order, f(b.angle / std::f64::consts::PI))?;
    }
    writeln!(report, "k {}", m.k())?;
    writeln!(report, "l_b {}", if m.l_b_defined { f(m.l_b) } else { "inf".into() })?;
    writeln!(report, "lambda {}", m.lambda)?;

    let mut evidence = CoveringEvidence {
        rho_base: Some(packing_density(&base, args.tol)?),
        rho_cover: Some(packing_density(&cover.surface, args.tol)?),
        ..Default::default()
    };
    if slits.len() == 1 {
        evidence.slit_length = Some(slits[0].length());
    }
    let mut partial = false;
    if let (Some(rmax), Some(b)) = (args.rmax, m.branch_points.first()) {
        let table = counting_function(&cover.surface, b.class, rmax, args.grid)?;
        partial = !table.exhaustive;
        if let Ok(e) = entropy_estimate(&table, 0.5) {
            evidence.e_hat_cover = Some(e.e_hat);
        }
        evidence.cover_table = Some(table);
    }
    let r = verify_covering_bounds(&m, &evidence)?;
    writeln!(report, "rho_base {}", f(r.rho_base))?;
    writeln!(report, "rho_cover {}", f(r.rho_cover))?;
    if let Some(t) = r.entropy_target {
        writeln!(report, "entropy_target {}", f(t))?;
    }
    for c in &r.checks {
        let verdict = if c.holds { "PASS" } else { "FAIL" };
        writeln!(report, "{verdict} {}: measured {} bound {}", c.name, f(c.measured), f(c.bound))?;
    }
    print!("{report}");
    Ok(if !r.all_hold() {
        Outcome::Failed
    } else if partial {
        Outcome::Partial
    } else {
        Outcome::Ok
    })
}
