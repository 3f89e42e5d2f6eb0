//! `shimura`: invariants, Hasse-principle criteria, the exceptional-set sweep and the X^14
//! local-points oracle from the command line.
//!
//! Exit codes: 0 success or proved, 1 inconclusive, 2 input error, 3 certificate failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shimura_core::arith::{factor_squarefree, make_level, ShimuraLevel};
use shimura_core::criterion::{
    check_x0, check_x1, check_xd, default_max_product, exceptional_sweep, verdicts_x0, CriterionError,
    InconclusiveReason, Outcome, SweepReport, Verdict,
};
use shimura_core::invariants::{elliptic_counts, CurveInvariants};
use shimura_core::localbounds::{local_profile_x0, mloc_x1_divisor, LocalProfile};
use shimura_core::localpoints::{density_scan, DensityReport, LocalOracle, LocalVerdict, QuadraticFieldSpec};
use shimura_core::Exec;

/// Version stamped into every JSON document and matching the files under `schema/`.
const OUTPUT_SCHEMA_VERSION: u32 = 1;

const EXIT_INCONCLUSIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CERTIFICATE: u8 = 3;

#[derive(Parser)]
#[command(name = "shimura", version, about = "Shimura-curve invariants and Hasse-principle criteria")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Genus, elliptic points, gonality bound and local m-invariant bounds of X^D_0(N).
    Invariants {
        #[command(flatten)]
        level: LevelArgs,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Apply the criterion to X^D, X^D_0(N) or X^D_1(N). Exit 0 if proved, 1 if inconclusive.
    Check {
        #[arg(value_enum)]
        curve: Curve,
        #[arg(long = "D")]
        d: u64,
        #[arg(long = "N")]
        n: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Check X^D_0(N) for every level with D·N up to a bound and report the exceptional set.
    Sweep {
        #[arg(long, default_value_t = default_max_product())]
        max_product: u64,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        workers: Workers,
    },
    /// Local points on X^14 over quadratic fields.
    X14 {
        #[command(subcommand)]
        command: X14Command,
    },
}

#[derive(Subcommand)]
enum X14Command {
    /// Place-by-place local solvability over Q(√m).
    Local {
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
        #[arg(long, value_enum, default_value_t = X14Format::Table)]
        format: X14Format,
    },
    /// Scan all squarefree m with |m| ≤ bound and compare with the sign/7 predicate.
    Density {
        #[arg(long, default_value_t = 100_000)]
        bound: u64,
        #[arg(long, value_enum, default_value_t = X14Format::Table)]
        format: X14Format,
        #[command(flatten)]
        workers: Workers,
    },
}

#[derive(Args)]
struct LevelArgs {
    #[arg(long = "D")]
    d: u64,
    #[arg(long = "N", default_value_t = 1)]
    n: u64,
}

#[derive(Args)]
struct Workers {
    /// Worker threads; 0 lets rayon decide.
    #[arg(long, env = "SHIMURA_WORKERS", default_value_t = 0)]
    workers: usize,
}

impl Workers {
    fn run<R: Send>(&self, job: impl FnOnce() -> R + Send) -> Result<R, Failure> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Failure::input(format!("cannot start worker pool: {e}")))?;
        Ok(pool.install(job))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum X14Format {
    Table,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    Xd,
    X0,
    X1,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<CriterionError> for Failure {
    fn from(e: CriterionError) -> Self {
        let code = match e {
            CriterionError::IncompleteSearchRegion { .. } => EXIT_CERTIFICATE,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(format!("i/o error: {e}"))
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::input(format!("csv error: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::input(format!("json error: {e}"))
    }
}

/// Writes `body` as a JSON object tagged with `kind` and, unless it carries its own, the
/// output schema version.
fn write_json<T: Serialize>(out: &mut dyn Write, kind: &'static str, body: &T) -> Result<(), Failure> {
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), OUTPUT_SCHEMA_VERSION.into());
    doc.insert("kind".into(), kind.into());
    match serde_json::to_value(body)? {
        serde_json::Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("value".into(), other);
        }
    }
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct InvariantsDoc {
    invariants: CurveInvariants,
    local_profile: LocalProfile,
    mloc_x0: String,
    mloc_x1_divides: u128,
}

#[derive(Serialize)]
struct VerdictRow {
    #[serde(rename = "D")]
    d: u64,
    #[serde(rename = "N")]
    n: u64,
    e2: u64,
    e3: u64,
    genus: u64,
    gonality_num: i128,
    gonality_den: i128,
    verdict: &'static str,
    reason: String,
}

impl VerdictRow {
    fn new(v: &Verdict) -> Self {
        let (e2, e3) = elliptic_counts(&v.level);
        let (verdict, reason) = match &v.outcome {
            Outcome::Proved { .. } => ("proved", String::new()),
            Outcome::Inconclusive { reason } => ("inconclusive", reason_tag(*reason).to_string()),
        };
        VerdictRow {
            d: v.level.d().value(),
            n: v.level.n().value(),
            e2,
            e3,
            genus: v.genus_used,
            gonality_num: v.gonality_bound.numer(),
            gonality_den: v.gonality_bound.denom(),
            verdict,
            reason,
        }
    }
}

fn reason_tag(r: InconclusiveReason) -> &'static str {
    match r {
        InconclusiveReason::BelowRotgerThreshold => "below_rotger_threshold",
        InconclusiveReason::GonalityBoundTooSmall => "gonality_bound_too_small",
        InconclusiveReason::DegenerateGenusBound => "degenerate_genus_bound",
    }
}

fn write_csv<T: Serialize>(out: &mut dyn Write, rows: impl IntoIterator<Item = T>) -> Result<(), Failure> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_level(d: u64, n: u64) -> Result<ShimuraLevel, Failure> {
    make_level(d, n).map_err(|e| Failure::input(format!("invalid level (D={d}, N={n}): {e}")))
}

fn cmd_invariants(args: &LevelArgs, format: Format, out: &mut dyn Write) -> Result<u8, Failure> {
    let level = parse_level(args.d, args.n)?;
    let invariants = CurveInvariants::compute(&level).map_err(|e| Failure::input(e.to_string()))?;
    let profile = local_profile_x0(&level);
    let mloc_x0 = match profile.mloc_exact {
        Some(m) => format!("m_loc(X0) = {m}"),
        None => format!("m_loc(X0) divides {}", profile.mloc_divides),
    };
    let doc = InvariantsDoc {
        invariants,
        local_profile: profile,
        mloc_x0,
        mloc_x1_divides: mloc_x1_divisor(&level),
    };
    match format {
        Format::Json => write_json(out, "invariants", &doc)?,
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                #[serde(rename = "D")]
                d: u64,
                #[serde(rename = "N")]
                n: u64,
                e2: u64,
                e3: u64,
                genus: u64,
                sigma_lower: String,
                genus1_lower: Option<u64>,
                gonality_num: i128,
                gonality_den: i128,
            }
            let inv = &doc.invariants;
            write_csv(
                out,
                [Row {
                    d: args.d,
                    n: args.n,
                    e2: inv.e2,
                    e3: inv.e3,
                    genus: inv.genus0,
                    sigma_lower: String::from(inv.sigma_lower),
                    genus1_lower: inv.genus1_lower,
                    gonality_num: inv.gonality_lower.numer(),
                    gonality_den: inv.gonality_lower.denom(),
                }],
            )?;
        }
        Format::Table => {
            let inv = &doc.invariants;
            writeln!(out, "level            {}", inv.level)?;
            writeln!(out, "e2, e3           {}, {}", inv.e2, inv.e3)?;
            writeln!(out, "genus X0         {}", inv.genus0)?;
            writeln!(out, "sigma lower      {}", inv.sigma_lower)?;
            match inv.genus1_lower {
                Some(g) => writeln!(out, "genus X1 lower   {g}")?,
                None => writeln!(out, "genus X1 lower   none (genus X0 < 2)")?,
            }
            writeln!(out, "gonality lower   {} (~{:.4})", inv.gonality_lower, inv.gonality_lower.to_f64())?;
            writeln!(out, "place  reduction          m_v")?;
            for b in doc.local_profile.bounds.values() {
                let reduction = b.reduction.map_or("-".to_string(), |r| format!("{r:?}"));
                let m = match b.m_v_exact {
                    Some(m) => format!("= {m}"),
                    None => format!("<= {}", b.m_v_upper),
                };
                writeln!(out, "{:<6} {:<18} {m}", b.place.to_string(), reduction)?;
            }
            writeln!(out, "other places: {}", doc.local_profile.other_places)?;
            writeln!(out, "{}", doc.mloc_x0)?;
            writeln!(out, "m_loc(X1) divides {}", doc.mloc_x1_divides)?;
        }
    }
    Ok(0)
}

fn cmd_check(
    curve: Curve,
    d: u64,
    n: Option<u64>,
    format: Format,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    let verdict = match curve {
        Curve::Xd => {
            if n.is_some_and(|n| n != 1) {
                return Err(Failure::input("X^D takes no level N"));
            }
            let d = factor_squarefree(d).map_err(|e| Failure::input(format!("invalid D={d}: {e}")))?;
            check_xd(&d)?
        }
        Curve::X0 => check_x0(&parse_level(d, n.unwrap_or(1))?)?,
        Curve::X1 => check_x1(&parse_level(d, n.unwrap_or(1))?)?,
    };
    match format {
        Format::Json => write_json(out, "verdict", &verdict)?,
        Format::Csv => write_csv(out, [VerdictRow::new(&verdict)])?,
        Format::Table => {
            writeln!(out, "curve            {:?} at {}", verdict.curve, verdict.level)?;
            match &verdict.outcome {
                Outcome::Proved { witness_degree } => {
                    writeln!(out, "outcome          proved, witness degree {witness_degree}")?
                }
                Outcome::Inconclusive { reason } => {
                    writeln!(out, "outcome          inconclusive ({})", reason_tag(*reason))?
                }
            }
            writeln!(out, "genus used       {}", verdict.genus_used)?;
            writeln!(out, "gonality bound   {}", verdict.gonality_bound)?;
            writeln!(out, "threshold        {}", verdict.threshold)?;
        }
    }
    Ok(if verdict.outcome.is_proved() { 0 } else { EXIT_INCONCLUSIVE })
}

fn cmd_sweep(
    max_product: u64,
    path: Option<&PathBuf>,
    format: Format,
    workers: &Workers,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    if max_product < 6 {
        return Err(Failure::input("--max-product must be at least 6"));
    }
    let report: SweepReport = workers.run(|| exceptional_sweep(max_product, Exec::Parallel))??;
    let mut sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(&mut *out),
    };
    match format {
        Format::Json => write_json(&mut *sink, "sweep", &report)?,
        Format::Csv => {
            let verdicts = workers.run(|| verdicts_x0(max_product, Exec::Parallel))??;
            write_csv(&mut *sink, verdicts.iter().map(VerdictRow::new))?;
        }
        Format::Table => {
            writeln!(sink, "{:>8} {:>8} {:>4} {:>4} {:>6}", "D", "N", "e2", "e3", "genus")?;
            for e in &report.inconclusive_pairs {
                let l = &e.verdict.level;
                writeln!(
                    sink,
                    "{:>8} {:>8} {:>4} {:>4} {:>6}",
                    l.d(),
                    l.n(),
                    e.e2,
                    e.e3,
                    e.verdict.genus_used
                )?;
            }
        }
    }
    sink.flush()?;
    drop(sink);
    let summary = format!(
        "explicit C = {} ({}); {} inconclusive of {} levels with D*N <= {}",
        report.explicit_c,
        report.explicit_c_note,
        report.inconclusive_pairs.len(),
        report.levels_checked,
        max_product
    );
    if path.is_some() {
        writeln!(out, "{summary}")?;
    } else {
        eprintln!("{summary}");
    }
    Ok(0)
}

fn cmd_x14_local(m: i64, format: X14Format, out: &mut dyn Write) -> Result<u8, Failure> {
    let k = QuadraticFieldSpec::new(m).map_err(|e| Failure::input(e.to_string()))?;
    let oracle = LocalOracle::x14().map_err(|e| Failure::input(e.to_string()))?;
    let verdict: LocalVerdict = oracle.breakdown(k);
    match format {
        X14Format::Json => write_json(out, "x14_local", &verdict)?,
        X14Format::Table => {
            writeln!(out, "field                 {k}")?;
            writeln!(out, "everywhere locally    {}", verdict.solvable)?;
            writeln!(out, "below  completion              places  points")?;
            for p in &verdict.places {
                let completion = match p.completion {
                    shimura_core::localpoints::Completion::Real => "R".to_string(),
                    shimura_core::localpoints::Completion::Complex => "C".to_string(),
                    shimura_core::localpoints::Completion::PAdic(d) => d.to_string(),
                };
                writeln!(out, "{:<6} {:<23} {:>6}  {}", p.below, completion, p.places, p.solvable)?;
            }
            writeln!(out, "other places: {}", verdict.other_places)?;
        }
    }
    Ok(0)
}

fn cmd_x14_density(
    bound: u64,
    format: X14Format,
    workers: &Workers,
    out: &mut dyn Write,
) -> Result<u8, Failure> {
    if bound < 100 {
        return Err(Failure::input("--bound must be at least 100"));
    }
    let report: DensityReport =
        workers.run(|| density_scan(bound, Exec::Parallel))?.map_err(|e| Failure::input(e.to_string()))?;
    match format {
        X14Format::Json => write_json(out, "x14_density", &report)?,
        X14Format::Table => {
            writeln!(out, "squarefree m, |m| <= {}: {}", report.bound, report.count_squarefree)?;
            writeln!(
                out,
                "everywhere locally solvable: {} ({:.6})",
                report.count_solvable,
                report.ratio.to_f64()
            )?;
            writeln!(
                out,
                "predicate m < 0, 7 does not divide m: {} ({:.6})",
                report.predicate_count,
                report.predicate_ratio.to_f64()
            )?;
            for r in &report.references {
                writeln!(
                    out,
                    "  vs {} = {}: predicate off by {:.6}, oracle off by {:.6}",
                    r.label,
                    r.value,
                    r.predicate_distance.to_f64(),
                    r.oracle_distance.to_f64()
                )?;
            }
            writeln!(
                out,
                "verdict depends only on sign and square classes: {}",
                report.class_function_holds
            )?;
            writeln!(out, "mismatches: {}", report.mismatches.len())?;
            for mm in report.mismatches.iter().take(20) {
                writeln!(out, "  m = {:>7}  oracle {}  predicate {}", mm.m, mm.oracle, mm.predicate)?;
            }
            if report.mismatches.len() > 20 {
                writeln!(
                    out,
                    "  ... ({} more; use --format json for the full list)",
                    report.mismatches.len() - 20
                )?;
            }
        }
    }
    Ok(0)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<u8, Failure> {
    match cli.command {
        Command::Invariants { level, format } => cmd_invariants(&level, format, out),
        Command::Check { curve, d, n, format } => cmd_check(curve, d, n, format, out),
        Command::Sweep { max_product, out: path, format, workers } => {
            cmd_sweep(max_product, path.as_ref(), format, &workers, out)
        }
        Command::X14 { command: X14Command::Local { m, format } } => cmd_x14_local(m, format, out),
        Command::X14 { command: X14Command::Density { bound, format, workers } } => {
            cmd_x14_density(bound, format, &workers, out)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let _ = out.flush();
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
