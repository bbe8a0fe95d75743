//! The `steklov` command-line tool.
//!
//! Every subcommand writes one table, as CSV (default) or JSON, to `--out` or
//! standard output. Exit status: 0 on success, 2 for invalid input, 3 when an
//! internal check fails, 1 for I/O errors.

pub mod config;
pub mod table;

use crate::boxspec::{self, BoxCylinder, SpectralFamily};
use crate::counting;
use crate::error::Error;
use crate::fd::{BoundaryPartition, Grid2D, SteklovProblem};
use crate::profile;
use crate::weyl::{self, BoundaryData, ConvergenceReport};
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use table::{Cell, Table};

pub use table::Table as OutputTable;

#[derive(Debug, Parser)]
#[command(name = "steklov", version, about = "Biharmonic Steklov spectra on boxes and rectangles")]
pub struct Cli {
    /// TOML file with one table per subcommand; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct BoxArgs {
    /// Base sides l_1,...,l_{n-1}.
    #[arg(long)]
    pub sides: String,

    /// Height l_n.
    #[arg(long)]
    pub height: f64,

    /// Density on the Steklov face.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
}

#[derive(Debug, Subcommand)]
#[command(args_override_self = true, allow_negative_numbers = true)]
pub enum Command {
    /// Tabulate the profile function t(s).
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Profile {
        /// Arguments, as start:stop:step or a comma list.
        #[arg(long, default_value = "0.5:20:0.5")]
        s: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form Steklov eigenvalues of a box.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    BoxSpectrum {
        #[command(flatten)]
        geometry: BoxArgs,
        #[arg(long, default_value = "dirichlet")]
        family: String,
        /// Number of eigenvalues.
        #[arg(short = 'K', long = "modes")]
        k: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Counting functions of both lateral families against the Weyl term.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Count {
        #[command(flatten)]
        geometry: BoxArgs,
        /// Accepted for symmetry with the other commands; both families are
        /// always counted.
        #[arg(long)]
        family: Option<String>,
        /// start:stop:step or a comma list.
        #[arg(long)]
        tau_grid: String,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Convergence of counts or eigenvalues towards the Weyl prediction.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    WeylCheck {
        #[command(flatten)]
        geometry: BoxArgs,
        #[arg(long, default_value = "neumann")]
        family: String,
        /// Compare counts on this tau grid.
        #[arg(long)]
        tau_grid: Option<String>,
        /// Compare eigenvalues at these indices (start:stop[:step] or list).
        #[arg(long)]
        k_range: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Finite-difference eigenvalues on a rectangle.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Solve2d {
        /// Rectangle AxB.
        #[arg(long)]
        rect: String,
        /// Cells on the shorter side (square cells), or NXxNY.
        #[arg(long)]
        grid: String,
        /// face=condition list, e.g. bottom=steklov:1,top=hardnu.
        #[arg(long)]
        faces: String,
        /// Number of eigenvalues.
        #[arg(short = 'K', long = "modes")]
        k: usize,
        /// Also write interior and boundary fields of the first mode here.
        #[arg(long)]
        export_fields: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Errors surfaced by [`run`].
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(#[from] clap::Error),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => e.exit_code(),
            CliError::Core(e) if e.is_caller_error() => 2,
            CliError::Core(_) => 3,
            CliError::Io { .. } => 1,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Result of one invocation.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// The rendered table.
    pub bytes: Vec<u8>,
    /// Where it was written, if not to standard output.
    pub out: Option<PathBuf>,
    pub warnings: Vec<String>,
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("--{key}: '{x}' is not a number")))
        })
        .collect()
}

/// `start:stop:step` (inclusive) or a comma list.
pub fn parse_grid(key: &str, s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => parse_list(key, s),
        3 => {
            let v = parse_list(key, &parts.join(","))?;
            let (start, stop, step) = (v[0], v[1], v[2]);
            if !(step > 0.0 && stop >= start && (stop - start) / step < 1e7) {
                return Err(Error::Config(format!(
                    "--{key}: need step > 0 and stop >= start, got {s}"
                )));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(Error::Config(format!("--{key}: expected start:stop:step or a list, got {s}"))),
    }
}

/// `start:stop[:step]` (inclusive) or a comma list of positive integers.
pub fn parse_index_range(key: &str, s: &str) -> Result<Vec<usize>, Error> {
    let int = |x: &str| {
        x.trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("--{key}: '{x}' is not a non-negative integer")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(int).collect(),
        2 | 3 => {
            let start = int(parts[0])?;
            let stop = int(parts[1])?;
            let step = if parts.len() == 3 { int(parts[2])? } else { 1 };
            if step == 0 || stop < start {
                return Err(Error::Config(format!("--{key}: invalid range {s}")));
            }
            Ok((start..=stop).step_by(step).collect())
        }
        _ => Err(Error::Config(format!("--{key}: invalid range {s}"))),
    }
}

fn parse_pair<T: std::str::FromStr>(key: &str, s: &str) -> Result<(T, T), Error> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::Config(format!("--{key}: expected AxB, got {s}")))?;
    let p = |x: &str| {
        x.trim()
            .parse::<T>()
            .map_err(|_| Error::Config(format!("--{key}: cannot parse '{x}'")))
    };
    Ok((p(a)?, p(b)?))
}

fn make_box(g: &BoxArgs) -> Result<BoxCylinder, Error> {
    BoxCylinder::new(parse_list("sides", &g.sides)?, g.height, g.rho)
}

struct Report {
    table: Table,
    extras: Map<String, Value>,
    warnings: Vec<String>,
    fields: Option<(PathBuf, Table)>,
}

impl Report {
    fn new(table: Table) -> Self {
        Self {
            table,
            extras: Map::new(),
            warnings: Vec::new(),
            fields: None,
        }
    }
}

fn profile_table(s: &str) -> Result<Report, Error> {
    let mut t = Table::new(["s", "t", "branch"]);
    for s in parse_grid("s", s)? {
        let e = profile::t_profile_eval(s)?;
        let branch = match e.branch {
            profile::Branch::Series => "series",
            profile::Branch::Direct => "direct",
            profile::Branch::Asymptotic => "asymptotic",
        };
        t.push(vec![s.into(), e.value.into(), branch.into()]);
    }
    Ok(Report::new(t))
}

fn spectrum_table(g: &BoxArgs, family: &str, k: usize) -> Result<Report, Error> {
    let bx = make_box(g)?;
    let family: SpectralFamily = family.parse()?;
    let modes = boxspec::spectrum(&bx, family, k)?;
    let d = bx.base_sides().len();
    let mut cols = vec!["k".to_string(), "lambda".into(), "family".into()];
    cols.extend((1..=d).map(|i| format!("m_{i}")));
    let mut t = Table::new(cols);
    for (i, m) in modes.iter().enumerate() {
        let mut row = vec![Cell::from(i + 1), m.lambda.into(), family.name().into()];
        row.extend(m.m.iter().map(|&x| Cell::from(x)));
        t.push(row);
    }
    let mut r = Report::new(t);
    r.warnings = bx.warnings();
    Ok(r)
}

fn count_table(g: &BoxArgs, family: Option<&str>, tau_grid: &str) -> Result<Report, Error> {
    let bx = make_box(g)?;
    if let Some(f) = family {
        f.parse::<SpectralFamily>()?;
    }
    let taus = parse_grid("tau-grid", tau_grid)?;
    let c = counting::counting_curve(&bx, &taus)?;
    let mut t = Table::new(["tau", "A0", "Af", "weyl_pred", "ratio0", "ratioF"]);
    for i in 0..taus.len() {
        t.push(vec![
            c.taus[i].into(),
            c.counts0[i].into(),
            c.counts_f[i].into(),
            c.weyl[i].into(),
            c.ratios0[i].into(),
            c.ratios_f[i].into(),
        ]);
    }
    let mut r = Report::new(t);
    r.warnings = bx.warnings();
    Ok(r)
}

fn report_table(x_name: &str, rep: &ConvergenceReport) -> Report {
    let mut t = Table::new([x_name, "exact", "predicted", "ratio"]);
    for i in 0..rep.abscissae.len() {
        let x: Cell = if x_name == "k" {
            Cell::Int(rep.abscissae[i] as i64)
        } else {
            rep.abscissae[i].into()
        };
        t.push(vec![x, rep.exact[i].into(), rep.predicted[i].into(), rep.ratio[i].into()]);
    }
    let mut r = Report::new(t);
    r.extras.insert("trend".into(), rep.trend.name().into());
    r.extras.insert(
        "fit_c".into(),
        rep.fit_c
            .and_then(serde_json::Number::from_f64)
            .map_or(Value::Null, Value::Number),
    );
    r
}

fn weyl_table(
    g: &BoxArgs,
    family: &str,
    tau_grid: Option<&str>,
    k_range: Option<&str>,
) -> Result<Report, Error> {
    let bx = make_box(g)?;
    let family: SpectralFamily = family.parse()?;
    let mut r = match (tau_grid, k_range) {
        (Some(grid), None) => {
            let taus = parse_grid("tau-grid", grid)?;
            report_table("tau", &weyl::convergence_report_counts(&bx, family, &taus)?)
        }
        (None, Some(range)) => {
            let ks = parse_index_range("k-range", range)?;
            let kmax = ks.iter().copied().max().unwrap_or(0);
            if kmax == 0 {
                return Err(Error::domain("--k-range must contain indices >= 1"));
            }
            let spec: Vec<f64> = boxspec::spectrum(&bx, family, kmax)?
                .iter()
                .map(|m| m.lambda * bx.rho())
                .collect();
            let data = BoundaryData::for_box(&bx)?;
            report_table("k", &weyl::convergence_report_eigenvalues(&spec, &data, &ks)?)
        }
        _ => {
            return Err(Error::Config(
                "weyl-check needs exactly one of --tau-grid and --k-range".into(),
            ))
        }
    };
    r.warnings = bx.warnings();
    Ok(r)
}

fn solve_table(
    rect: &str,
    grid: &str,
    faces: &str,
    k: usize,
    export: Option<&Path>,
) -> Result<Report, Error> {
    let (a, b): (f64, f64) = parse_pair("rect", rect)?;
    let grid = if grid.contains(['x', 'X']) {
        let (nx, ny): (usize, usize) = parse_pair("grid", grid)?;
        Grid2D::new(a, b, nx, ny)?
    } else {
        let n = grid
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Config(format!("--grid: expected N or NXxNY, got {grid}")))?;
        Grid2D::with_short_side_cells(a, b, n)?
    };
    let part: BoundaryPartition = faces.parse()?;
    let problem = SteklovProblem::new(grid, part)?;
    let spec = problem.spectrum(k)?;
    let mut t = Table::new(["k", "lambda", "rayleigh_residual"]);
    for i in 0..spec.eigenvalues.len() {
        t.push(vec![
            (i + 1).into(),
            spec.eigenvalues[i].into(),
            spec.rayleigh_residuals[i].into(),
        ]);
    }
    let mut r = Report::new(t);
    r.extras.insert("nx".into(), grid.nx().into());
    r.extras.insert("ny".into(), grid.ny().into());
    r.extras.insert("asymmetry_norm".into(), json!(spec.asymmetry_norm));
    r.extras.insert("orthogonality_defect".into(), json!(spec.orthogonality_defect));
    r.extras.insert("multiplicities".into(), json!(spec.multiplicities()));
    if let Some(path) = export {
        let f = problem.mode_fields(&spec.boundary_modes[0])?;
        let mut ft = Table::new(["kind", "x", "y", "w", "u", "u_nu"]);
        for j in 1..grid.ny() {
            for i in 1..grid.nx() {
                let idx = grid.interior_index(i, j);
                ft.push(vec![
                    "interior".into(),
                    (i as f64 * grid.hx()).into(),
                    (j as f64 * grid.hy()).into(),
                    f.w[idx].into(),
                    f.u[idx].into(),
                    "".into(),
                ]);
            }
        }
        for (node, (w, nu)) in grid
            .boundary_nodes()
            .iter()
            .zip(f.boundary.iter().zip(&f.normal))
        {
            ft.push(vec![
                node.face.name().into(),
                node.x.into(),
                node.y.into(),
                (*w).into(),
                0.0.into(),
                (*nu).into(),
            ]);
        }
        r.fields = Some((path.to_path_buf(), ft));
    }
    Ok(r)
}

/// Locates the subcommand name and any `--config` path without a full parse.
fn prescan(args: &[OsString]) -> (Option<(usize, String)>, Option<PathBuf>) {
    let cmd = Cli::command();
    let mut sub = None;
    let mut config = None;
    let mut i = 1;
    while i < args.len() {
        let a = args[i].to_string_lossy();
        if a == "--config" {
            config = args.get(i + 1).map(PathBuf::from);
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else if sub.is_none() && cmd.find_subcommand(a.as_ref()).is_some() {
            sub = Some((i, a.to_string()));
        }
        i += 1;
    }
    (sub, config)
}

fn echo(name: &str, matches: &ArgMatches) -> Map<String, Value> {
    let cmd = Cli::command();
    let sub = cmd.find_subcommand(name).expect("parsed subcommand exists");
    let mut out = Map::new();
    for arg in sub.get_arguments() {
        let id = arg.get_id().as_str();
        if matches!(id, "out" | "config" | "help" | "version") {
            continue;
        }
        if let Ok(Some(raw)) = matches.try_get_raw(id) {
            if let Some(last) = raw.last() {
                out.insert(id.to_string(), Value::from(last.to_string_lossy().as_ref()));
            }
        }
    }
    out
}

fn render(report: &Report, format: Format, command: &str, config: Map<String, Value>) -> Vec<u8> {
    match format {
        Format::Csv => report.table.to_csv_string().into_bytes(),
        Format::Json => {
            let mut meta = Map::new();
            meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
            meta.insert("command".into(), command.into());
            meta.insert("config".into(), Value::Object(config));
            for (k, v) in &report.extras {
                meta.insert(k.clone(), v.clone());
            }
            if !report.warnings.is_empty() {
                meta.insert("warnings".into(), json!(report.warnings));
            }
            let mut s = serde_json::to_string_pretty(&report.table.to_json(Value::Object(meta)))
                .expect("JSON values serialize");
            s.push('\n');
            s.into_bytes()
        }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output file if one was requested.
pub fn run<I, T>(args: I) -> Result<Outcome, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let (sub, config) = prescan(&args);
    if let (Some((pos, name)), Some(path)) = (&sub, &config) {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let extra = config::flags_from_config(&text, &Cli::command(), name)?;
        let tail = args.split_off(pos + 1);
        args.extend(extra);
        args.extend(tail);
    }

    let matches = Cli::command().try_get_matches_from(&args)?;
    let cli = Cli::from_arg_matches(&matches)?;
    let (name, sub_matches) = matches.subcommand().expect("subcommand is required");
    let config_echo = echo(name, sub_matches);

    let (report, output) = match &cli.command {
        Command::Profile { s, output } => (profile_table(s)?, output),
        Command::BoxSpectrum {
            geometry,
            family,
            k,
            output,
        } => (spectrum_table(geometry, family, *k)?, output),
        Command::Count {
            geometry,
            family,
            tau_grid,
            output,
        } => (count_table(geometry, family.as_deref(), tau_grid)?, output),
        Command::WeylCheck {
            geometry,
            family,
            tau_grid,
            k_range,
            output,
        } => (
            weyl_table(geometry, family, tau_grid.as_deref(), k_range.as_deref())?,
            output,
        ),
        Command::Solve2d {
            rect,
            grid,
            faces,
            k,
            export_fields,
            output,
        } => (
            solve_table(rect, grid, faces, *k, export_fields.as_deref())?,
            output,
        ),
    };

    let bytes = render(&report, output.format, name, config_echo);
    if let Some(path) = &output.out {
        std::fs::write(path, &bytes).map_err(io_err(path))?;
    }
    if let Some((path, fields)) = &report.fields {
        std::fs::write(path, fields.to_csv_string()).map_err(io_err(path))?;
    }
    Ok(Outcome {
        bytes,
        out: output.out.clone(),
        warnings: report.warnings,
    })
}

/// Entry point for the binary; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    use std::io::Write;
    match run(args) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if outcome.out.is_none() {
                let mut stdout = std::io::stdout().lock();
                if stdout.write_all(&outcome.bytes).and_then(|_| stdout.flush()).is_err() {
                    return 1;
                }
            }
            0
        }
        Err(CliError::Usage(e)) => {
            let code = e.exit_code();
            let _ = e.print();
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
