use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dimerlab::aggregate::{connected_sum, pressure_series, sums_table, Activity, CacheDir};
use dimerlab::display::{Cell, Format, Table, VALUE_DP};
use dimerlab::enumerate::{enumerate_trees, resume, EnumerationJob, PatternTally, Reduction};
use dimerlab::oracle::{self, Geometry};
use dimerlab::precision::Decimal;
use dimerlab::series;
use dimerlab::verify::{run_all, VerifyOptions};
use dimerlab::weight::{table_weight, Ursell, WeightFunctional, WeightTable};
use dimerlab::Error;

#[derive(Parser)]
#[command(name = "dimerlab", version, about = "Dimer cluster enumeration and the 1/d series for lambda_d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate s-dimer trees and write a pattern tally.
    Enumerate(EnumerateArgs),
    /// Connected sum of one tally under a weight.
    Aggregate(AggregateArgs),
    /// Pressure coefficients b_1..b_order from cached tallies.
    Pressure(PressureArgs),
    /// Reference tables.
    Tables(TablesArgs),
    /// Overview of the A and B approximants for one dimension.
    Series(DimArgs),
    /// Independent exact references.
    Oracle(OracleArgs),
    /// Convergence diagnostics for d = 2 or 3.
    Diagnostics(DimArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Tsv => Format::Tsv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// Output tally (default: the cache directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    /// Prefix tasks between checkpoints; 0 disables them.
    #[arg(long, default_value_t = 256)]
    checkpoint_interval: usize,
    /// Continue an interrupted run from its checkpoint file.
    #[arg(long, value_name = "FILE")]
    resume: Option<PathBuf>,
    /// Hyperoctahedral reduction of prefix orbits.
    #[arg(long, value_enum, default_value = "on")]
    reduction: Toggle,
    #[arg(long, default_value_t = 0)]
    anchor_axis: usize,
    #[arg(long, hide = true)]
    stop_after_checkpoints: Option<usize>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
}

#[derive(Args)]
struct AggregateArgs {
    /// Tally file (default: the most advanced complete tally in the cache).
    #[arg(long)]
    tally: Option<PathBuf>,
    /// `ursell` or `table:<path>`.
    #[arg(long, default_value = "ursell")]
    weight: String,
    #[arg(long, default_value = "f", value_parser = parse_activity)]
    activity: Activity,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
}

#[derive(Args)]
struct PressureArgs {
    #[arg(long)]
    d: usize,
    #[arg(long)]
    order: usize,
    #[arg(long, default_value = "ursell")]
    weight: String,
    /// Enumerate missing tallies into the cache instead of failing.
    #[arg(long)]
    compute: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableKind {
    Jbar,
    JbarGeneral,
    ASeries,
    BReference,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(value_enum)]
    kind: TableKind,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
}

#[derive(Args)]
struct DimArgs {
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    which: OracleCommand,
    #[arg(long, value_enum, default_value = "tsv", global = true)]
    format: FormatArg,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Catalan's constant over pi.
    Lambda2,
    /// Perfect matchings of an m × n grid or torus.
    Count {
        #[arg(long, default_value = "open", value_parser = parse_geometry)]
        geometry: Geometry,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
    },
    /// Per-site entropy of L × L tori.
    Entropy {
        #[arg(long, value_delimiter = ',', default_value = "4,6,8,10,12")]
        sizes: Vec<usize>,
    },
    /// Monomer-dimer pressure coefficients (d = 1 or 2).
    PressureOracle {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        order: usize,
    },
    /// Whether a value lies within the published lambda_3 bounds.
    Bounds {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Skip the s >= 5 enumerations.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_activity(s: &str) -> Result<Activity, String> {
    s.parse()
}

fn parse_geometry(s: &str) -> Result<Geometry, String> {
    s.parse()
}

enum Failure {
    Usage(String),
    Compute(Error),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDimension(_)
            | Error::InvalidAxis { .. }
            | Error::CapExceeded { .. }
            | Error::OutOfRange { .. }
            | Error::WindowTooSmall { .. }
            | Error::OddSites(_) => Failure::Usage(e.to_string()),
            other => Failure::Compute(other),
        }
    }
}

type Outcome = Result<(), Failure>;

fn weight_from_spec(spec: &str) -> Result<Box<dyn WeightFunctional>, Failure> {
    if spec == "ursell" {
        return Ok(Box::new(Ursell::new()));
    }
    if let Some(path) = spec.strip_prefix("table:") {
        let table = WeightTable::read(path.as_ref())?;
        return Ok(Box::new(table_weight(table).with_name(spec)));
    }
    Err(Failure::Usage(format!(
        "unknown weight {spec:?} (expected ursell or table:<path>)"
    )))
}

fn emit(table: &Table, format: FormatArg) {
    print!("{}", table.render(format.into()));
}

fn tally_summary(path: &std::path::Path, t: &PatternTally) -> Table {
    let mut table = Table::new(["path", "d", "s", "status", "reduction", "patterns", "trees"]);
    table.push(vec![
        Cell::Text(path.display().to_string()),
        Cell::Int(t.d as i64),
        Cell::Int(t.s as i64),
        Cell::Text(if t.is_complete() { "complete" } else { "checkpoint" }.into()),
        Cell::Text(t.reduction.to_string()),
        Cell::Int(t.counts.len() as i64),
        Cell::Text(t.total().to_string()),
    ]);
    table
}

fn cmd_enumerate(a: EnumerateArgs) -> Outcome {
    let from_file = match &a.resume {
        Some(p) => Some(PatternTally::read(p)?),
        None => None,
    };
    let (d, s) = match (&from_file, a.d, a.s) {
        (_, Some(d), Some(s)) => (d, s),
        (Some(t), None, None) => (t.d, t.s),
        _ => return Err(Failure::Usage("--d and --s are required unless --resume is given".into())),
    };
    let mut job = EnumerationJob::new(d, s);
    job.threads = a.threads;
    job.checkpoint_interval = a.checkpoint_interval;
    job.reduction = match a.reduction {
        Toggle::On => Reduction::Hyperoctahedral,
        Toggle::Off => Reduction::None,
    };
    job.anchor_axis = a.anchor_axis;
    job.stop_after_checkpoints = a.stop_after_checkpoints;
    if let Some(t) = &from_file {
        // settings stored in the checkpoint win over defaults
        job.reduction = t.reduction;
        job.anchor_axis = t.anchor_axis;
    }
    let path = match (&a.resume, &a.out) {
        (Some(r), Some(o)) if r != o => {
            return Err(Failure::Usage("--out must match --resume when both are given".into()))
        }
        (Some(r), _) => r.clone(),
        (None, Some(o)) => o.clone(),
        (None, None) => {
            let cache = CacheDir::from_env();
            std::fs::create_dir_all(&cache.dir).map_err(|e| Error::io(&cache.dir, e))?;
            cache.path_for(d, s)
        }
    };
    job.output = Some(path.clone());
    let tally = match &a.resume {
        Some(_) => resume(&path, &job)?,
        None => enumerate_trees(&job)?,
    };
    emit(&tally_summary(&path, &tally), a.format);
    Ok(())
}

fn cmd_aggregate(a: AggregateArgs) -> Outcome {
    let w = weight_from_spec(&a.weight)?;
    let path = match a.tally {
        Some(p) => p,
        None => {
            let cache = CacheDir::from_env();
            cache.latest()?.ok_or_else(|| {
                Failure::Usage(format!(
                    "no complete tally in {}; pass --tally or run enumerate first",
                    cache.dir.display()
                ))
            })?
        }
    };
    let tally = PatternTally::read(&path)?;
    let sum = connected_sum(&tally, w.as_ref(), a.activity)?;
    emit(&sums_table(&[sum]), a.format);
    Ok(())
}

fn cmd_pressure(a: PressureArgs) -> Outcome {
    let w = weight_from_spec(&a.weight)?;
    let mut cache = CacheDir::from_env();
    cache.compute_missing = a.compute;
    cache.threads = a.threads;
    let sums = pressure_series(a.d, a.order, w.as_ref(), &cache).map_err(|e| match e {
        Error::MissingTally { d, s } => Failure::Compute(Error::OutOfRange {
            what: "tally cache",
            detail: format!(
                "missing tally for d={d}, s={s} in {} (run enumerate, or pass --compute)",
                cache.dir.display()
            ),
        }),
        other => other.into(),
    })?;
    emit(&sums_table(&sums), a.format);
    Ok(())
}

fn merge(tables: Vec<Table>) -> Table {
    let mut it = tables.into_iter();
    let mut first = it.next().expect("at least one table");
    for t in it {
        first.rows.extend(t.rows);
    }
    first
}

fn cmd_tables(a: TablesArgs) -> Outcome {
    let table = match a.kind {
        TableKind::Jbar => {
            let t = series::jbar_table();
            match a.d {
                Some(d) => Table {
                    rows: t
                        .rows
                        .into_iter()
                        .filter(|r| matches!(r[0], Cell::Int(x) if x == d as i64))
                        .collect(),
                    columns: t.columns,
                },
                None => t,
            }
        }
        TableKind::JbarGeneral => series::jbar_general_table(a.d)?,
        TableKind::ASeries => match a.d {
            Some(d) => series::a_series_table(d)?,
            None => merge(vec![series::a_series_table(2)?, series::a_series_table(3)?]),
        },
        TableKind::BReference => series::b_reference_table(a.d)?,
    };
    emit(&table, a.format);
    Ok(())
}

fn cmd_oracle(a: OracleArgs) -> Outcome {
    let table = match a.which {
        OracleCommand::Lambda2 => {
            let l = oracle::lambda2_constant();
            let mut t = Table::new(["constant", "value", "rounded", "error_bound"]);
            t.push(vec![
                Cell::Text("lambda2".into()),
                Cell::Fixed(l.value.clone(), 30),
                Cell::Fixed(l.value, 5),
                Cell::Text(format!("{:.3e}", Decimal::from_rational(&l.error, 60).to_f64())),
            ]);
            t
        }
        OracleCommand::Count { geometry, m, n } => {
            let c = oracle::count_matchings_2d(geometry, m, n)?;
            let mut t = Table::new(["geometry", "m", "n", "count"]);
            t.push(vec![
                Cell::Text(c.geometry.to_string()),
                Cell::Int(m as i64),
                Cell::Int(n as i64),
                Cell::Text(c.count.to_string()),
            ]);
            t
        }
        OracleCommand::Entropy { sizes } => {
            let e = oracle::per_site_entropy_2d(&sizes)?;
            let mut t = Table::new(["size", "count", "entropy", "error"]);
            for r in e.rows {
                t.push(vec![
                    Cell::Int(r.size as i64),
                    Cell::Text(r.count.to_string()),
                    Cell::Fixed(r.entropy, VALUE_DP),
                    Cell::Fixed(r.error, VALUE_DP),
                ]);
            }
            eprintln!("monotone approach: {}", e.monotone);
            t
        }
        OracleCommand::PressureOracle { d, order } => {
            let p = oracle::monomer_dimer_pressure_oracle(d, order)?;
            let mut t = Table::new(["d", "k", "coefficient", "decimal"]);
            for (k, c) in p.coefficients.iter().enumerate() {
                t.push(vec![
                    Cell::Int(d as i64),
                    Cell::Int(k as i64 + 1),
                    Cell::Fraction(c.clone()),
                    Cell::Text(dimerlab::display::rational_fixed(c, VALUE_DP)),
                ]);
            }
            t
        }
        OracleCommand::Bounds { x } => {
            let v = oracle::parse_decimal(&x)?;
            let (lo, hi) = series::lambda3_bounds();
            let mut t = Table::new(["x", "lower", "upper", "inside"]);
            t.push(vec![
                Cell::Text(x),
                Cell::Text(dimerlab::display::rational_fixed(&lo, 6)),
                Cell::Text(dimerlab::display::rational_fixed(&hi, 6)),
                Cell::Bool(oracle::lambda3_bounds_check(&v)),
            ]);
            t
        }
    };
    emit(&table, a.format);
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Outcome {
    let outcomes = run_all(&VerifyOptions {
        quick: a.quick,
        threads: a.threads,
        scratch: None,
    });
    for o in &outcomes {
        println!("{}", o.line());
        for (name, _) in o.checks.iter().filter(|c| !c.1) {
            println!("    not met: {name}");
        }
    }
    if outcomes.iter().any(|o| o.failed()) {
        Err(Failure::Verify)
    } else {
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Aggregate(a) => cmd_aggregate(a),
        Command::Pressure(a) => cmd_pressure(a),
        Command::Tables(a) => cmd_tables(a),
        Command::Series(a) => series::series_overview(a.d)
            .map(|t| emit(&t, a.format))
            .map_err(Failure::from),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Diagnostics(a) => series::diagnostics(a.d)
            .map(|t| emit(&t.to_table(), a.format))
            .map_err(Failure::from),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Verify) => {
            eprintln!("verification failed");
            ExitCode::from(3)
        }
    }
}
