mod config;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::parser::ValueSource;
use clap::{ArgMatches, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use cylpack::bounds::{r_hex, rule_of_thumb};
use cylpack::slice::{slice_svg, SliceExport, SvgOptions};
use cylpack::verify::{self, Suite, VerifyOptions};
use cylpack::{
    capped_bound, conjectured_density, density, gen_hexagonal_parallel, gen_laminated_perturbed, has_end_near,
    is_valid_packing, make_table, mixed_length_bound, read_packing, truncate_rearrange, uncapped_bound,
    write_packing, DirichletSlice, Error, Packing, SliceConfig,
};

use config::FileConfig;

#[derive(Parser, Debug)]
#[command(name = "cylpack", version, about = "Density bounds and Dirichlet slices for cylinder packings")]
struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads; does not change any numeric output.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
    /// Seed for randomized generators and suites.
    #[arg(long, global = true, env = "CYLPACK_SEED")]
    seed: Option<u64>,
    /// Omit run metadata (timestamps) from outputs.
    #[arg(long, global = true)]
    reproducible: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a density bound.
    Bound {
        #[arg(long, value_parser = positive, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = ShapeArg::Uncapped)]
        shape: ShapeArg,
    },
    /// Reproduce the reference table of bounds.
    Table {
        /// Add rule-of-thumb and conjectured-density columns.
        #[arg(long)]
        extended: bool,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
    /// Generate a packing file.
    Pack {
        #[arg(value_enum)]
        generator: Generator,
        /// Cylinder length
        #[arg(long, value_parser = positive, allow_negative_numbers = true, default_value_t = 20.0)]
        t: f64,
        /// Container radius
        #[arg(long = "R", value_parser = positive, allow_negative_numbers = true, default_value_t = 40.0)]
        r: f64,
        /// Rotation bound for laminated blocks.
        #[arg(long, value_parser = nonnegative, default_value_t = 0.0)]
        eps: f64,
        /// Generate uncapped cylinders (hexagonal only).
        #[arg(long)]
        uncapped: bool,
        /// Output file; standard output when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compute the Dirichlet slice at a point of an axis.
    Slice {
        /// Packing file.
        packing: PathBuf,
        /// Cylinder index.
        #[arg(long, short)]
        i: usize,
        /// Axis parameter in [0, 1].
        #[arg(long, short, value_parser = unit_interval, default_value_t = 0.5)]
        s: f64,
        /// Relative area tolerance.
        #[arg(long, value_parser = positive, default_value_t = 1e-9)]
        tol: f64,
        /// Write the slice as SVG
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
        /// Write the boundary samples and events as JSON.
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: SuiteArg,
        /// Random packings in the qualified suite [default: 200]
        #[arg(long)]
        packings: Option<usize>,
        /// Protected points per packing [default: 10]
        #[arg(long)]
        points: Option<usize>,
        /// Two-cylinder configurations in the angle suite [default: 500]
        #[arg(long)]
        angle_configs: Option<usize>,
        /// Monte Carlo samples per cell in the identity suite [default: 10000000]
        #[arg(long)]
        mc_samples: Option<u64>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ShapeArg {
    Capped,
    Uncapped,
    Mixed,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Generator {
    Hex,
    Laminate,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SuiteArg {
    Extremal,
    ThreeBall,
    Qualified,
    Angle,
    Identity,
    Dominance,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Extremal => Suite::Extremal,
            SuiteArg::ThreeBall => Suite::ThreeBall,
            SuiteArg::Qualified => Suite::Qualified,
            SuiteArg::Angle => Suite::Angle,
            SuiteArg::Identity => Suite::Identity,
            SuiteArg::Dominance => Suite::Dominance,
            SuiteArg::All => Suite::All,
        }
    }
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a nonnegative number, got `{s}`")),
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("expected a number in [0, 1], got `{s}`")),
    }
}

/// Failure with its exit code.
#[derive(Debug)]
enum Failure {
    Verify,
    Usage(String),
    Generation(String),
    Input(String),
    Output(String),
    BrokenPipe,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::BrokenPipe => 0,
            Failure::Verify | Failure::Output(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Generation(_) => 3,
            Failure::Input(_) => 4,
        }
    }
}

/// Write failures. A closed pipe (as with `| head`) ends the run quietly.
trait OutputError {
    fn broken_pipe(&self) -> bool;
}

impl OutputError for io::Error {
    fn broken_pipe(&self) -> bool {
        self.kind() == io::ErrorKind::BrokenPipe
    }
}

impl OutputError for serde_json::Error {
    fn broken_pipe(&self) -> bool {
        self.io_error_kind() == Some(io::ErrorKind::BrokenPipe)
    }
}

impl OutputError for csv::Error {
    fn broken_pipe(&self) -> bool {
        matches!(self.kind(), csv::ErrorKind::Io(e) if e.kind() == io::ErrorKind::BrokenPipe)
    }
}

impl OutputError for cylpack::Error {
    fn broken_pipe(&self) -> bool {
        false
    }
}

fn out_err<E: OutputError + std::fmt::Display>(e: E) -> Failure {
    if e.broken_pipe() {
        Failure::BrokenPipe
    } else {
        Failure::Output(e.to_string())
    }
}

/// Global settings after merging flags, the config file and the
/// environment.
struct Settings {
    seed: u64,
    reproducible: bool,
    file: FileConfig,
}

fn settings(cli: &Cli, m: &ArgMatches) -> Result<Settings, Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    // flag, then config file, then CYLPACK_SEED, then 0
    let from_flag = m.value_source("seed") == Some(ValueSource::CommandLine);
    let seed = match (from_flag, file.get::<u64>("seed").map_err(Failure::Usage)?) {
        (true, _) | (false, None) => cli.seed.unwrap_or(0),
        (false, Some(s)) => s,
    };
    let jobs = match cli.jobs {
        Some(j) => Some(j as usize),
        None => file.get::<usize>("jobs").map_err(Failure::Usage)?,
    };
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Failure::Usage("jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    let reproducible = cli.reproducible || file.get::<bool>("reproducible").map_err(Failure::Usage)?.unwrap_or(false);
    Ok(Settings {
        seed,
        reproducible,
        file,
    })
}

fn print_json<T: Serialize>(v: &T) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(out_err)?;
    writeln!(out).map_err(out_err)
}

fn cmd_bound(t: f64, shape: ShapeArg) -> Result<(), Failure> {
    let b = match shape {
        ShapeArg::Capped => capped_bound(t),
        ShapeArg::Uncapped => uncapped_bound(t),
        ShapeArg::Mixed => mixed_length_bound(t).map_err(|e| Failure::Usage(e.to_string()))?,
    };
    print_json(&json!({
        "t": t,
        "shape": b.shape,
        "bound": b.bound,
        "trivial": b.trivial,
        "raw": b.raw,
        "formula": b.formula_id,
        "rule_of_thumb": rule_of_thumb(t),
        "conjectured": conjectured_density(t),
    }))
}

fn cmd_table(extended: bool, format: TableFormat) -> Result<(), Failure> {
    let rows = make_table();
    if format == TableFormat::Json {
        let v: Vec<_> = rows
            .iter()
            .map(|r| {
                let mut o = json!({
                    "item": r.label,
                    "t": r.t,
                    "shape": r.shape,
                    "bound": r.bound,
                    "printed": r.printed,
                    "trivial": r.trivial,
                    "flagged": r.flagged,
                });
                if extended {
                    o["rule_of_thumb"] = json!(r.rule_of_thumb);
                    o["conjectured"] = json!(r.conjectured);
                }
                o
            })
            .collect();
        return print_json(&v);
    }
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    let mut header = vec!["item", "t", "bound", "value", "printed", "flagged"];
    if extended {
        header.extend(["rule_of_thumb", "conjectured"]);
    }
    w.write_record(&header).map_err(out_err)?;
    for r in &rows {
        let mut rec = vec![
            r.label.to_string(),
            format!("{}", r.t),
            format!("{:.4}", r.bound),
            format!("{}", r.bound),
            format!("{}", r.printed),
            r.flagged.to_string(),
        ];
        if extended {
            rec.push(format!("{:.4}", r.rule_of_thumb));
            rec.push(format!("{:.4}", r.conjectured));
        }
        w.write_record(&rec).map_err(out_err)?;
    }
    w.flush().map_err(out_err)
}

fn generation_error(e: Error) -> Failure {
    match e {
        Error::Domain(m) => Failure::Usage(m),
        other => Failure::Generation(other.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_pack(
    generator: Generator,
    t: f64,
    r: f64,
    eps: f64,
    uncapped: bool,
    out: Option<&Path>,
    seed: u64,
) -> Result<(), Failure> {
    let p = match generator {
        Generator::Hex => gen_hexagonal_parallel(t, r, !uncapped),
        Generator::Laminate if uncapped => {
            return Err(Failure::Usage("laminated packings are capped".into()));
        }
        Generator::Laminate => gen_laminated_perturbed(t, r, eps, seed),
    }
    .map_err(generation_error)?;
    if p.is_empty() {
        return Err(Failure::Generation(format!("no cylinder fits in B({r})")));
    }
    let summary = json!({
        "generator": match generator { Generator::Hex => "hex", Generator::Laminate => "laminate" },
        "capped": p.capped,
        "n": p.len(),
        "t": t,
        "R": r,
        "valid": is_valid_packing(&p).valid,
        "density": density(&p, r, r),
        "density_inner": density(&p, r - r_hex(), r),
    });
    match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            write_packing(&p, &mut w).map_err(out_err)?;
            writeln!(w).map_err(out_err)?;
            w.flush().map_err(out_err)?;
            print_json(&summary)
        }
        None => {
            let mut o = io::stdout().lock();
            write_packing(&p, &mut o).map_err(out_err)?;
            writeln!(o).map_err(out_err)?;
            eprintln!("{}", serde_json::to_string(&summary).map_err(out_err)?);
            Ok(())
        }
    }
}

fn read_packing_file(path: &Path) -> Result<Packing, Failure> {
    let f = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    read_packing(BufReader::new(f)).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Output(format!("{}: {e}", path.display())))
}

fn metadata(reproducible: bool) -> Option<String> {
    if reproducible {
        return None;
    }
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Some(format!("cylpack {} generated at unix time {secs}", env!("CARGO_PKG_VERSION")))
}

#[allow(clippy::too_many_arguments)]
fn cmd_slice(
    path: &Path,
    i: usize,
    s: f64,
    tol: f64,
    svg: Option<&Path>,
    json_out: Option<&Path>,
    reproducible: bool,
) -> Result<(), Failure> {
    let p = read_packing_file(path)?;
    if i >= p.len() {
        return Err(Failure::Usage(format!("cylinder index {i} out of range (packing has {})", p.len())));
    }
    let x = p.cylinders[i].axis.at(s);
    let slice = DirichletSlice::new(&p, i, x, &SliceConfig { area_tol: tol, ..SliceConfig::default() })
        .map_err(|e| Failure::Input(e.to_string()))?;
    let area = slice.area(tol).map_err(|e| Failure::Input(e.to_string()))?;
    let hex = cylpack::bounds::hex_area();
    let end_near = has_end_near(&p, x);
    let steps = if end_near {
        None
    } else {
        truncate_rearrange(&slice).ok().map(|r| {
            json!({
                "area_truncated": r.area_dstar,
                "area_rearranged": r.area_dstarstar,
                "pieces": r.pieces.len(),
                "vertices": r.vertices.len(),
            })
        })
    };
    if let Some(path) = svg {
        let rmax = slice.samples.iter().map(|r| r.r).fold(0.0, f64::max).min(3.0);
        let opts = SvgOptions {
            scale: 0.45 * 512.0 / rmax.max(1.5),
            metadata: metadata(reproducible),
            ..SvgOptions::default()
        };
        write_file(path, &slice_svg(&slice, &opts))?;
    }
    if let Some(path) = json_out {
        let text = serde_json::to_string_pretty(&SliceExport::new(&slice, area)).map_err(out_err)?;
        write_file(path, &(text + "\n"))?;
    }
    print_json(&json!({
        "cylinder": i,
        "s": s,
        "x": x.to_array(),
        "area": area,
        "qualified": area - hex > tol * hex,
        "has_end_near": end_near,
        "events": slice.events.len(),
        "steps": steps,
    }))
}

fn cmd_verify(suite: Suite, opts: &VerifyOptions, format: ReportFormat) -> Result<(), Failure> {
    let reports = verify::run(suite, opts);
    let passed = reports.iter().all(|r| r.passed);
    match format {
        ReportFormat::Json => print_json(&reports)?,
        ReportFormat::Text => {
            let mut o = io::stdout().lock();
            for r in &reports {
                writeln!(o, "suite {}: {}", r.suite, if r.passed { "PASS" } else { "FAIL" }).map_err(out_err)?;
                for c in &r.checks {
                    writeln!(
                        o,
                        "  {} {}: value {:.12e}, limit {:.12e}, margin {:.3e}",
                        if c.passed { "ok  " } else { "FAIL" },
                        c.name,
                        c.value,
                        c.limit,
                        c.margin
                    )
                    .map_err(out_err)?;
                    if let (false, Some(w)) = (c.passed, &c.witness) {
                        writeln!(o, "    witness: {w}").map_err(out_err)?;
                    }
                }
            }
        }
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn run(cli: Cli, m: &ArgMatches) -> Result<(), Failure> {
    let st = settings(&cli, m)?;
    match cli.command {
        Command::Bound { t, shape } => cmd_bound(t, shape),
        Command::Table { extended, format } => cmd_table(extended, format),
        Command::Pack {
            generator,
            t,
            r,
            eps,
            uncapped,
            out,
        } => cmd_pack(generator, t, r, eps, uncapped, out.as_deref(), st.seed),
        Command::Slice {
            packing,
            i,
            s,
            tol,
            svg,
            json,
        } => cmd_slice(&packing, i, s, tol, svg.as_deref(), json.as_deref(), st.reproducible),
        Command::Verify {
            suite,
            packings,
            points,
            angle_configs,
            mc_samples,
            format,
        } => {
            let d = VerifyOptions::default();
            let pick = |flag: Option<usize>, key: &str, def: usize| -> Result<usize, Failure> {
                Ok(match flag {
                    Some(v) => v,
                    None => st.file.get::<usize>(key).map_err(Failure::Usage)?.unwrap_or(def),
                })
            };
            let mc_samples = match mc_samples {
                Some(v) => v,
                None => st.file.get::<u64>("mc_samples").map_err(Failure::Usage)?.unwrap_or(d.mc_samples),
            };
            let opts = VerifyOptions {
                seed: st.seed,
                packings: pick(packings, "packings", d.packings)?,
                points: pick(points, "points", d.points)?,
                angle_configs: pick(angle_configs, "angle_configs", d.angle_configs)?,
                mc_samples,
                ..d
            };
            cmd_verify(suite.into(), &opts, format)
        }
    }
}

fn main() -> ExitCode {
    let matches = match Cli::command().try_get_matches() {
        Ok(m) => m,
        Err(e) => e.exit(),
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::BrokenPipe => {}
                Failure::Verify => eprintln!("cylpack: verification failed"),
                Failure::Usage(m) | Failure::Generation(m) | Failure::Input(m) | Failure::Output(m) => {
                    eprintln!("cylpack: {m}")
                }
            }
            ExitCode::from(f.code())
        }
    }
}
