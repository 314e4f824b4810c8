//! `permutangle`: datasets and checks for the R12 correlation measure.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;

use permutangle::experiments::{
    self, perturbation_campaign, scatter, verify, CampaignConfig, FigureConfig, PerturbationKind, Region,
};
use permutangle::families::{self, closed_form_measures, numeric_measures, Curve, FamilySpec, State};
use permutangle::measures::MeasureRecord;
use permutangle::Error;

#[derive(Debug, Parser)]
#[command(
    name = "permutangle",
    version,
    about = "Permutation-based correlation measure R12 and companion entanglement measures"
)]
struct Cli {
    /// Output format for records and curves.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for sampling (default: hardware parallelism).
    #[arg(long, env = "PERMUTANGLE_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form and numeric measures of one family member.
    Measure {
        /// Family tag, e.g. werner, mems1, canonical3.
        #[arg(long)]
        family: String,
        /// Parameters as k=v pairs separated by commas, e.g. p=0.5.
        #[arg(long, default_value = "")]
        params: String,
    },
    /// Measures of Haar-random states: dims 2,2 or 2,2,k with k in 2..=4.
    Sample {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// An analytic boundary curve as (r12, y) rows.
    Curve {
        /// Curve tag, e.g. cr_rank4, nr_rank3.
        #[arg(long)]
        id: String,
        #[arg(long, default_value_t = experiments::CURVE_POINTS)]
        points: usize,
        /// Start of the parameter grid (default depends on the curve).
        #[arg(long)]
        from: Option<f64>,
        /// End of the parameter grid (default 1).
        #[arg(long)]
        to: Option<f64>,
    },
    /// Perturbation campaign around a boundary family.
    Perturb {
        /// ansatz1_fig4, werner_fig5 or mems1_fig8.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0.51)]
        eps: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Scatter, curves and metadata of one figure (1 to 11) written to a directory.
    Figure {
        #[arg(long)]
        id: u8,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Sample count (default: the figure's own).
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 20_240_917)]
        seed: u64,
        #[arg(long, default_value_t = 0.51)]
        eps: f64,
        #[arg(long, default_value_t = experiments::CURVE_POINTS)]
        points: usize,
    },
    /// Checks a record file against a region; exits 1 if a must-hold region is violated.
    Verify {
        /// Region tag, e.g. prop2, cr_rank3, nr_rank2_lower.
        #[arg(long)]
        region: String,
        /// Record file; JSON if it ends in .json or --format json is given, CSV otherwise.
        #[arg(long)]
        input: PathBuf,
    },
}

enum Failure {
    /// Bad arguments or parameters outside their domain.
    Usage(String),
    Violation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn campaign(n: usize, seed: u64, threads: Option<usize>) -> CampaignConfig {
    CampaignConfig { n, seed, threads }
}

fn emit_records(cli: &Cli, records: &[MeasureRecord]) -> Result<(), Failure> {
    let mut out = open_output(cli.output.as_deref())?;
    match cli.format {
        Format::Csv => experiments::write_records_csv(&mut out, records)?,
        Format::Json => {
            experiments::write_records_json(&mut out, records)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn measure(cli: &Cli, family: &str, params: &str) -> Result<(), Failure> {
    let spec = FamilySpec::parse(family, params)?;
    let state = families::make_state(&spec)?;
    let closed = closed_form_measures(&spec)?;
    let numeric = numeric_measures(&state)?;
    let (diff, field) = closed.max_difference(&numeric);
    let record = match &state {
        State::Pure(psi) if psi.dims() == [2, 2, 2] => MeasureRecord::from_three_qubit(psi, family)?,
        _ => MeasureRecord::from_state(&state.pair()?, None, family)?,
    };
    let mut out = open_output(cli.output.as_deref())?;
    match cli.format {
        Format::Json => {
            let doc = json!({
                "spec": spec,
                "record": record,
                "closed_form": closed,
                "numeric": numeric,
                "max_abs_diff": diff,
                "max_abs_diff_field": field,
            });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let cell = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
            writeln!(out, "measure,closed_form,numeric,abs_diff")?;
            let closed_fields = serde_json::to_value(closed)?;
            let numeric_fields = serde_json::to_value(numeric)?;
            for name in ["c12", "n12", "r12", "tau", "c13", "c23", "r13", "r23"] {
                let a = closed_fields[name].as_f64();
                let b = numeric_fields[name].as_f64();
                if a.is_none() && b.is_none() {
                    continue;
                }
                let d = a.zip(b).map(|(a, b)| (a - b).abs());
                writeln!(out, "{name},{},{},{}", cell(a), cell(b), cell(d))?;
            }
            writeln!(out, "rank,,{},", record.rank)?;
            writeln!(out, "max_abs_diff,,,{}", cell(Some(diff)))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn curve(cli: &Cli, id: &str, points: usize, from: Option<f64>, to: Option<f64>) -> Result<(), Failure> {
    let curve = Curve::parse(id)?;
    if points == 0 {
        return Err(Failure::Usage("--points must be at least 1".into()));
    }
    let (lo, hi) = curve.default_domain();
    let grid = families::linspace(from.unwrap_or(lo), to.unwrap_or(hi), points);
    let rows = families::boundary_curve(curve, &grid)?;
    let y = if curve.is_negativity() { "n12" } else { "c12" };
    let mut out = open_output(cli.output.as_deref())?;
    match cli.format {
        Format::Csv => experiments::write_curve_csv(&mut out, ["r12", y], &rows)?,
        Format::Json => {
            let doc = json!({ "curve": curve.tag(), "columns": ["r12", y], "points": rows });
            serde_json::to_writer(&mut out, &doc)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_records(cli: &Cli, input: &Path) -> Result<Vec<MeasureRecord>, Failure> {
    let file = BufReader::new(File::open(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?);
    let json = cli.format == Format::Json || input.extension().is_some_and(|e| e == "json");
    Ok(if json {
        experiments::read_records_json(file)?
    } else {
        experiments::read_records_csv(file)?
    })
}

fn verify_region(cli: &Cli, region: &str, input: &Path) -> Result<(), Failure> {
    let region = Region::parse(region)?;
    let records = read_records(cli, input)?;
    let report = verify(&records, region)?;
    let mut out = open_output(cli.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    if region.must_hold() && report.violations > 0 {
        return Err(Failure::Violation);
    }
    Ok(())
}

fn figure(cli: &Cli, fig: u8, out_dir: &Path, config: FigureConfig) -> Result<(), Failure> {
    let summary = experiments::figure_dataset(fig, &config, out_dir)?;
    let mut out = open_output(cli.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &summary)?;
    writeln!(out)?;
    out.flush()?;
    if summary.regions.iter().any(|r| r.must_hold && r.violations > 0) {
        return Err(Failure::Violation);
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if cli.threads == Some(0) {
        return Err(Failure::Usage("thread count must be at least 1".into()));
    }
    match &cli.command {
        Command::Measure { family, params } => measure(cli, family, params),
        Command::Sample { dims, n, seed } => emit_records(cli, &scatter(dims, &campaign(*n, *seed, cli.threads))?),
        Command::Curve { id, points, from, to } => curve(cli, id, *points, *from, *to),
        Command::Perturb { kind, eps, n, seed } => {
            let kind = PerturbationKind::parse(kind)?;
            emit_records(
                cli,
                &perturbation_campaign(kind, *eps, &campaign(*n, *seed, cli.threads))?,
            )
        }
        Command::Figure {
            id,
            out,
            n,
            seed,
            eps,
            points,
        } => figure(
            cli,
            *id,
            out,
            FigureConfig {
                n: *n,
                seed: *seed,
                epsilon: *eps,
                threads: cli.threads,
                points: *points,
            },
        ),
        Command::Verify { region, input } => verify_region(cli, region, input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Violation) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
    }
}
