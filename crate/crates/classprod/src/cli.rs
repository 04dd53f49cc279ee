//! Command-line front end and report emission for all engines, plus the
//! reproduction driver for the published minima.
//!
//! Exit codes: 0 success, 1 malformed input, 2 budget refusal,
//! 3 reproduction or verification mismatch.

use crate::bounds::{self, BoundsError, TraceSetReport};
use crate::canonical;
use crate::classgroup::{
    EtaReport, Group, GroupData, GroupError, GroupFamily, MinScanReport, DEFAULT_BUDGET,
};
use crate::field::{Field, FieldError};
use crate::matrices::{Mat, MatError};
use crate::polyring::{self, Poly, PolyError};
use crate::verify::{self, Suite, SuiteOutcome};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::io::Write;
use std::str::FromStr;

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "classprod",
    version,
    about = "Exact conjugacy-class products in GL(n,q) and SL(n,q) over small finite fields",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    format: Format,
    /// Seed for every randomized suite; identical configs give
    /// byte-identical reports.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (falls back to CLASSPROD_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Cap on enumerated group elements.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args, Debug)]
struct GroupArgs {
    /// Group family: GL or SL.
    #[arg(long)]
    group: String,
    /// Field literal p^m, e.g. 3^1 or 2^2.
    #[arg(long)]
    field: String,
    /// Matrix dimension.
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Show a field's coordinates and modulus.
    Field {
        #[arg(long)]
        field: String,
    },
    /// Invariant factors of a matrix.
    Canon {
        #[arg(long)]
        field: String,
        /// Matrix literal, rows separated by ';', entries by ','.
        #[arg(long)]
        a: String,
    },
    /// List the conjugacy classes of a group.
    Classes {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Exact eta and/or the certified lower bound for a class pair.
    Eta {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Compute only the exact value (enumerates the group).
        #[arg(long, conflicts_with = "bound_only")]
        exact: bool,
        /// Compute only the certified bound (no enumeration).
        #[arg(long)]
        bound_only: bool,
    },
    /// Certified trace-set lower bound with witnesses.
    Bound {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Minimum eta over all non-central class pairs.
    MinScan {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Seeded oracle suites for the closed forms and counting lemmas.
    Verify {
        /// One of fieldsize, xysoln, generalcase, main1, main2.
        #[arg(long)]
        suite: String,
        #[arg(long)]
        field: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
    },
    /// Recompute the reference minima and compare.
    Reproduce {
        /// Include the q in {8, 9, 11, 13} scans.
        #[arg(long)]
        long: bool,
    },
}

enum CliError {
    Malformed(String),
    Budget(String),
    Mismatch(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Mismatch(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Malformed(m) | CliError::Budget(m) | CliError::Mismatch(m) => m,
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Malformed(e.to_string())
    }
}
impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::Malformed(e.to_string())
    }
}
impl From<MatError> for CliError {
    fn from(e: MatError) -> Self {
        CliError::Malformed(e.to_string())
    }
}
impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Malformed(other.to_string()),
        }
    }
}
impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        CliError::Malformed(e.to_string())
    }
}
impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            // Downstream closed the pipe; not an input error.
            std::process::exit(0);
        }
        CliError::Malformed(format!("I/O error: {e}"))
    }
}

/// Entry point used by the binary: parses std::env args, writes to stdout.
pub fn run_from_env() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let mut stdout = std::io::stdout();
    run(&args, &mut stdout)
}

/// Parses and runs a full command line; returns the process exit code.
/// Output assembly is single-threaded and deterministic.
pub fn run<W: Write + Send>(args: &[String], out: &mut W) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, not malformed input.
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            eprintln!("{e}");
            return 1;
        }
    };
    let threads = cli.threads.or_else(|| {
        std::env::var("CLASSPROD_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let result = match threads {
        Some(t) if t > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .expect("thread pool construction");
            pool.install(|| dispatch(&cli, out))
        }
        _ => dispatch(&cli, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn parse_group(args: &GroupArgs) -> Result<Group, CliError> {
    let family = GroupFamily::from_str(&args.group)?;
    let field = Field::from_literal(&args.field)?;
    Ok(Group::new(family, args.n, field)?)
}

fn parse_matrix(group: &Group, literal: &str) -> Result<Mat, CliError> {
    let m = Mat::parse(group.field(), literal)?;
    if m.n() != group.n() {
        return Err(CliError::Malformed(format!(
            "matrix `{literal}` has dimension {}, expected {}",
            m.n(),
            group.n()
        )));
    }
    Ok(m)
}

fn csv_escape(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

fn emit_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report serialization");
    writeln!(out, "{text}")?;
    Ok(())
}

fn dispatch<W: Write>(cli: &Cli, out: &mut W) -> Result<(), CliError> {
    match &cli.command {
        Command::Field { field } => {
            let f = Field::from_literal(field)?;
            #[derive(Serialize)]
            struct FieldReport {
                p: u32,
                m: u32,
                q: u32,
                modulus: String,
            }
            let report = FieldReport {
                p: f.p(),
                m: f.m(),
                q: f.q(),
                modulus: f.modulus_literal(),
            };
            match cli.format {
                Format::Json => emit_json(out, &report)?,
                Format::Csv => {
                    writeln!(out, "p,m,q,modulus")?;
                    writeln!(
                        out,
                        "{},{},{},{}",
                        report.p,
                        report.m,
                        report.q,
                        csv_escape(&report.modulus)
                    )?;
                }
                Format::Table => {
                    writeln!(
                        out,
                        "field: GF({}^{}) = GF({})",
                        report.p, report.m, report.q
                    )?;
                    writeln!(out, "modulus: {}", report.modulus)?;
                }
            }
        }
        Command::Canon { field, a } => {
            let f = Field::from_literal(field)?;
            let m = Mat::parse(&f, a)?;
            let id = canonical::class_id(&f, &m);
            #[derive(Serialize)]
            struct CanonReport {
                field: String,
                modulus: String,
                matrix: String,
                invariant_factors: Vec<Vec<u32>>,
            }
            let report = CanonReport {
                field: f.literal(),
                modulus: f.modulus_literal(),
                matrix: m.to_string(),
                invariant_factors: id.encodings(),
            };
            match cli.format {
                Format::Json => emit_json(out, &report)?,
                Format::Csv => {
                    writeln!(out, "index,factor")?;
                    for (i, factor) in id.factors().iter().enumerate() {
                        writeln!(out, "{},{}", i, csv_escape(&factor.to_string()))?;
                    }
                }
                Format::Table => {
                    writeln!(
                        out,
                        "field: GF({}) modulus: {}",
                        report.field, report.modulus
                    )?;
                    for (i, factor) in id.factors().iter().enumerate() {
                        writeln!(out, "f{}: {}", i + 1, factor)?;
                    }
                }
            }
        }
        Command::Classes { group } => {
            let g = parse_group(group)?;
            let data = GroupData::build(&g, cli.budget)?;
            #[derive(Serialize)]
            struct ClassRow {
                rep: String,
                size: u64,
                key: crate::classgroup::ClassKey,
                central: bool,
            }
            #[derive(Serialize)]
            struct ClassesReport {
                group: crate::classgroup::GroupDesc,
                count: usize,
                classes: Vec<ClassRow>,
            }
            let rows: Vec<ClassRow> = data
                .classes()
                .iter()
                .map(|c| ClassRow {
                    rep: g.decode(c.rep).to_string(),
                    size: c.size(),
                    key: c.key.clone(),
                    central: c.central,
                })
                .collect();
            let report = ClassesReport {
                group: crate::classgroup::GroupDesc::of(&g),
                count: rows.len(),
                classes: rows,
            };
            match cli.format {
                Format::Json => emit_json(out, &report)?,
                Format::Csv => {
                    writeln!(out, "index,rep,size,key,central")?;
                    for (i, row) in report.classes.iter().enumerate() {
                        writeln!(
                            out,
                            "{},{},{},{},{}",
                            i,
                            csv_escape(&row.rep),
                            row.size,
                            csv_escape(&row.key.to_string()),
                            row.central
                        )?;
                    }
                }
                Format::Table => {
                    writeln!(out, "group: {} order: {}", g, g.order())?;
                    writeln!(out, "classes: {}", report.count)?;
                    for (i, row) in report.classes.iter().enumerate() {
                        writeln!(
                            out,
                            "{:>4}  size {:>8}  {}  rep {}{}",
                            i,
                            row.size,
                            row.key,
                            row.rep,
                            if row.central { "  (central)" } else { "" }
                        )?;
                    }
                }
            }
        }
        Command::Eta {
            group,
            a,
            b,
            exact,
            bound_only,
        } => {
            let g = parse_group(group)?;
            let am = parse_matrix(&g, a)?;
            let bm = parse_matrix(&g, b)?;
            let report = eta_report(&g, &am, &bm, *exact, *bound_only, cli.budget)?;
            report.assert_invariants();
            emit_eta(out, cli.format, &report)?;
        }
        Command::Bound { group, a, b } => {
            let g = parse_group(group)?;
            let am = parse_matrix(&g, a)?;
            let bm = parse_matrix(&g, b)?;
            let bound = bounds::certified_lower_bound(&g, &am, &bm)?;
            emit_bound(out, cli.format, &bound.trace_report)?;
        }
        Command::MinScan { group } => {
            let g = parse_group(group)?;
            let data = GroupData::build(&g, cli.budget)?;
            let report = g.min_scan(&data)?;
            emit_min_scan(out, cli.format, &report)?;
        }
        Command::Verify {
            suite,
            field,
            trials,
        } => {
            let f = Field::from_literal(field)?;
            let suite = Suite::from_str(suite).map_err(CliError::Malformed)?;
            let outcome = verify::run_suite(&f, suite, *trials, cli.seed);
            emit_suite(out, cli.format, &outcome)?;
            if !outcome.passed() {
                return Err(CliError::Mismatch(format!(
                    "suite {} reported {} mismatches",
                    outcome.suite, outcome.mismatches
                )));
            }
        }
        Command::Reproduce { long } => {
            let rows = reproduce_rows(*long, cli.budget)?;
            emit_reproduce(out, cli.format, &rows)?;
            if rows.iter().any(|r| !r.pass) {
                return Err(CliError::Mismatch("reproduction mismatch".to_string()));
            }
        }
    }
    Ok(())
}

fn eta_report(
    g: &Group,
    a: &Mat,
    b: &Mat,
    exact_only: bool,
    bound_only: bool,
    budget: u64,
) -> Result<EtaReport, CliError> {
    let bound = if exact_only {
        None
    } else {
        Some(bounds::certified_lower_bound(g, a, b)?)
    };
    if bound_only {
        return Ok(bound.expect("bound computed").eta_report);
    }
    let data = GroupData::build(g, budget)?;
    let mut report = g.eta_exact(&data, a, b)?;
    if let Some(bound) = bound {
        report.lower_bound = bound.eta_report.lower_bound;
        report.bound_path = bound.eta_report.bound_path;
        report.trace_set_size = bound.eta_report.trace_set_size;
    }
    Ok(report)
}

fn emit_eta<W: Write>(out: &mut W, format: Format, report: &EtaReport) -> Result<(), CliError> {
    match format {
        Format::Json => emit_json(out, report)?,
        Format::Csv => {
            writeln!(
                out,
                "family,n,q,modulus,class_a,class_b,eta_exact,lower_bound,bound_path,trace_set_size"
            )?;
            let opt = |v: Option<u64>| v.map_or(String::new(), |x| x.to_string());
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                report.group.family,
                report.group.n,
                report.group.q,
                csv_escape(&report.group.modulus),
                csv_escape(&report.class_a.to_string()),
                csv_escape(&report.class_b.to_string()),
                opt(report.eta_exact),
                opt(report.lower_bound),
                csv_escape(report.bound_path.as_deref().unwrap_or("")),
                opt(report.trace_set_size),
            )?;
        }
        Format::Table => {
            writeln!(
                out,
                "group: {}({},{}) modulus: {}",
                report.group.family, report.group.n, report.group.q, report.group.modulus
            )?;
            writeln!(out, "class_a: {}", report.class_a)?;
            writeln!(out, "class_b: {}", report.class_b)?;
            if let Some(v) = report.eta_exact {
                writeln!(out, "eta_exact: {v}")?;
            }
            if let Some(v) = report.lower_bound {
                writeln!(out, "lower_bound: {v}")?;
            }
            if let Some(p) = &report.bound_path {
                writeln!(out, "bound_path: {p}")?;
            }
            if let Some(v) = report.trace_set_size {
                writeln!(out, "trace_set_size: {v}")?;
            }
        }
    }
    Ok(())
}

fn emit_bound<W: Write>(
    out: &mut W,
    format: Format,
    report: &TraceSetReport,
) -> Result<(), CliError> {
    match format {
        Format::Json => emit_json(out, report)?,
        Format::Csv => {
            writeln!(
                out,
                "field,modulus,family,lemma_path,swapped,floor,size,trace,kind,params,n"
            )?;
            for w in &report.witnesses {
                let params: Vec<String> =
                    w.conjugator.params.iter().map(|p| p.to_string()).collect();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    report.field,
                    csv_escape(&report.modulus),
                    csv_escape(&report.family),
                    report.lemma_path,
                    report.swapped,
                    report.floor,
                    report.size,
                    w.trace,
                    w.conjugator.kind,
                    csv_escape(&params.join(",")),
                    w.conjugator.n
                )?;
            }
        }
        Format::Table => {
            writeln!(
                out,
                "field: GF({}) modulus: {}",
                report.field, report.modulus
            )?;
            writeln!(out, "family: {}", report.family)?;
            writeln!(
                out,
                "lemma_path: {}{}",
                report.lemma_path,
                if report.swapped { " (swapped)" } else { "" }
            )?;
            writeln!(out, "floor: {}", report.floor)?;
            writeln!(out, "size: {}", report.size)?;
            for w in &report.witnesses {
                let params: Vec<String> =
                    w.conjugator.params.iter().map(|p| p.to_string()).collect();
                writeln!(
                    out,
                    "trace {:>6}  via {}({}) in dim {}",
                    w.trace,
                    w.conjugator.kind,
                    params.join(","),
                    w.conjugator.n
                )?;
            }
        }
    }
    Ok(())
}

fn emit_min_scan<W: Write>(
    out: &mut W,
    format: Format,
    report: &MinScanReport,
) -> Result<(), CliError> {
    match format {
        Format::Json => emit_json(out, report)?,
        Format::Csv => {
            writeln!(out, "class_a,class_b,eta,is_min")?;
            for row in &report.table {
                let is_min = row.eta == report.min
                    && row.class_a == report.argmin.0
                    && row.class_b == report.argmin.1;
                writeln!(
                    out,
                    "{},{},{},{}",
                    csv_escape(&row.class_a.to_string()),
                    csv_escape(&row.class_b.to_string()),
                    row.eta,
                    is_min
                )?;
            }
        }
        Format::Table => {
            writeln!(
                out,
                "group: {}({},{}) modulus: {}",
                report.group.family, report.group.n, report.group.q, report.group.modulus
            )?;
            writeln!(out, "min: {}", report.min)?;
            writeln!(out, "argmin: [{}] x [{}]", report.argmin.0, report.argmin.1)?;
            for row in &report.table {
                writeln!(
                    out,
                    "eta {:>6}  [{}] x [{}]",
                    row.eta, row.class_a, row.class_b
                )?;
            }
        }
    }
    Ok(())
}

fn emit_suite<W: Write>(
    out: &mut W,
    format: Format,
    outcome: &SuiteOutcome,
) -> Result<(), CliError> {
    match format {
        Format::Json => emit_json(out, outcome)?,
        Format::Csv => {
            writeln!(out, "suite,field,modulus,trials,seed,checks,mismatches")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                outcome.suite,
                outcome.field,
                csv_escape(&outcome.modulus),
                outcome.trials,
                outcome.seed,
                outcome.checks,
                outcome.mismatches
            )?;
        }
        Format::Table => {
            writeln!(
                out,
                "suite={} field={} modulus={} trials={} seed={} checks={} mismatches={} {}",
                outcome.suite,
                outcome.field,
                outcome.modulus,
                outcome.trials,
                outcome.seed,
                outcome.checks,
                outcome.mismatches,
                if outcome.passed() { "PASS" } else { "FAIL" }
            )?;
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
struct ReproRow {
    name: String,
    expected: u64,
    got: u64,
    pass: bool,
}

fn min_of(family: GroupFamily, n: usize, p: u32, m: u32, budget: u64) -> Result<u64, CliError> {
    let g = Group::new(family, n, Field::new(p, m).map_err(CliError::from)?)?;
    let data = GroupData::build(&g, budget)?;
    Ok(g.min_scan(&data)?.min)
}

/// The fixed reproduction suite: published min(GL(2,q)) values, min(GL(3,3)),
/// and the eta of the distinguished GF(4) pair in both GL and SL.
fn reproduce_rows(long: bool, budget: u64) -> Result<Vec<ReproRow>, CliError> {
    let mut rows = Vec::new();
    let push_min = |name: &str,
                    family,
                    n,
                    p,
                    m,
                    expected: u64,
                    rows: &mut Vec<ReproRow>|
     -> Result<(), CliError> {
        let got = min_of(family, n, p, m, budget)?;
        rows.push(ReproRow {
            name: name.to_string(),
            expected,
            got,
            pass: got == expected,
        });
        Ok(())
    };
    push_min("min(GL(2,3))", GroupFamily::Gl, 2, 3, 1, 2, &mut rows)?;
    push_min("min(GL(2,4))", GroupFamily::Gl, 2, 2, 2, 3, &mut rows)?;
    push_min("min(GL(2,5))", GroupFamily::Gl, 2, 5, 1, 4, &mut rows)?;
    push_min("min(GL(2,7))", GroupFamily::Gl, 2, 7, 1, 6, &mut rows)?;
    push_min("min(GL(3,3))", GroupFamily::Gl, 3, 3, 1, 4, &mut rows)?;
    if long {
        push_min("min(GL(2,8))", GroupFamily::Gl, 2, 2, 3, 7, &mut rows)?;
        push_min("min(GL(2,9))", GroupFamily::Gl, 2, 3, 2, 8, &mut rows)?;
        push_min("min(GL(2,11))", GroupFamily::Gl, 2, 11, 1, 10, &mut rows)?;
        push_min("min(GL(2,13))", GroupFamily::Gl, 2, 13, 1, 12, &mut rows)?;
    }
    // The distinguished pair over GF(4): a transvection against the
    // companion of x^2 - wx + 1, in both GL and SL.
    let field = Field::new(2, 2).map_err(CliError::from)?;
    let w = polyring::find_w_irreducible(&field)?;
    let quad = Poly::from_coeffs(&field, vec![field.one(), field.neg(w), field.one()]);
    let a = Mat::parse(&field, "1,1;0,1")?;
    let b = Mat::companion(&field, &quad)?;
    for family in [GroupFamily::Gl, GroupFamily::Sl] {
        let g = Group::new(family, 2, field.clone())?;
        let data = GroupData::build(&g, budget)?;
        let got = g.eta_exact(&data, &a, &b)?.eta_exact.unwrap();
        rows.push(ReproRow {
            name: format!("eta({}(2,4) transvection, companion pair)", family.name()),
            expected: 3,
            got,
            pass: got == 3,
        });
    }
    Ok(rows)
}

fn emit_reproduce<W: Write>(
    out: &mut W,
    format: Format,
    rows: &[ReproRow],
) -> Result<(), CliError> {
    match format {
        Format::Json => emit_json(out, &rows)?,
        Format::Csv => {
            writeln!(out, "name,expected,got,pass")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{}",
                    csv_escape(&r.name),
                    r.expected,
                    r.got,
                    r.pass
                )?;
            }
        }
        Format::Table => {
            for r in rows {
                writeln!(
                    out,
                    "{:<44} expected {:>3}  got {:>3}  {}",
                    r.name,
                    r.expected,
                    r.got,
                    if r.pass { "PASS" } else { "FAIL" }
                )?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let argv: Vec<String> = std::iter::once("classprod".to_string())
            .chain(args.iter().map(|s| s.to_string()))
            .collect();
        let mut buf = Vec::new();
        let code = run(&argv, &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn field_subcommand() {
        let (code, out) = run_args(&["field", "--field", "3^2"]);
        assert_eq!(code, 0);
        assert!(out.contains("GF(9)"));
        assert!(out.contains("1,0,1"));
    }

    #[test]
    fn malformed_input_is_exit_one() {
        let (code, _) = run_args(&["field", "--field", "4^1"]);
        assert_eq!(code, 1);
        let (code, _) = run_args(&[
            "eta", "--group", "XX", "--field", "3^1", "--n", "2", "--a", "1,1;0,1", "--b",
            "1,1;0,1",
        ]);
        assert_eq!(code, 1);
        let (code, _) = run_args(&["canon", "--field", "3^1", "--a", "1,1;0"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn budget_refusal_is_exit_two() {
        let (code, _) = run_args(&[
            "classes", "--group", "GL", "--field", "2^1", "--n", "2", "--budget", "3",
        ]);
        assert_eq!(code, 2);
    }

    #[test]
    fn eta_subcommand_reports_both_routes() {
        let (code, out) = run_args(&[
            "eta", "--group", "GL", "--field", "3^1", "--n", "2", "--a", "1,1;0,1", "--b",
            "1,1;0,1", "--format", "json",
        ]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["eta_exact"].as_u64().unwrap() >= 2);
        assert!(v["lower_bound"].as_u64().unwrap() >= 2);
        assert!(v["lower_bound"].as_u64().unwrap() <= v["eta_exact"].as_u64().unwrap());
    }

    #[test]
    fn eta_bound_only_skips_enumeration() {
        // A deliberately tiny budget: fine because --bound-only never
        // enumerates the group.
        let (code, out) = run_args(&[
            "eta",
            "--group",
            "GL",
            "--field",
            "5^1",
            "--n",
            "2",
            "--a",
            "1,1;0,1",
            "--b",
            "1,1;0,1",
            "--bound-only",
            "--budget",
            "1",
            "--format",
            "json",
        ]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["eta_exact"].is_null());
        assert!(v["lower_bound"].as_u64().unwrap() >= 4);
    }

    #[test]
    fn json_reports_are_byte_identical_across_runs() {
        let args = [
            "min-scan", "--group", "GL", "--field", "3^1", "--n", "2", "--format", "json",
        ];
        let (c1, out1) = run_args(&args);
        let (c2, out2) = run_args(&args);
        assert_eq!(c1, 0);
        assert_eq!(c2, 0);
        assert_eq!(out1, out2);
    }

    #[test]
    fn csv_and_json_numeric_content_agree() {
        let base = [
            "eta", "--group", "GL", "--field", "3^1", "--n", "2", "--a", "1,1;0,1", "--b",
            "0,2;1,0",
        ];
        let mut json_args: Vec<&str> = base.to_vec();
        json_args.extend(["--format", "json"]);
        let (_, json_out) = run_args(&json_args);
        let v: serde_json::Value = serde_json::from_str(&json_out).unwrap();
        let mut csv_args: Vec<&str> = base.to_vec();
        csv_args.extend(["--format", "csv"]);
        let (_, csv_out) = run_args(&csv_args);
        let data_line = csv_out.lines().nth(1).unwrap();
        assert!(data_line.contains(&format!(",{},", v["eta_exact"].as_u64().unwrap())));
        assert!(data_line.contains(&v["lower_bound"].as_u64().unwrap().to_string()));
    }

    #[test]
    fn verify_subcommand_passes() {
        for suite in ["fieldsize", "xysoln", "generalcase", "main1", "main2"] {
            let (code, out) = run_args(&[
                "verify", "--suite", suite, "--field", "3^1", "--trials", "25", "--seed", "7",
            ]);
            assert_eq!(code, 0, "suite {suite}: {out}");
            assert!(out.contains("mismatches=0"));
        }
        let (code, _) = run_args(&["verify", "--suite", "bogus", "--field", "3^1"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn reproduce_default_passes() {
        let (code, out) = run_args(&["reproduce"]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("min(GL(3,3))"));
        assert!(!out.contains("FAIL"));
        assert!(
            !out.contains("min(GL(2,13))"),
            "q=13 is gated behind --long"
        );
    }

    #[test]
    fn bound_subcommand_emits_witnesses() {
        let (code, out) = run_args(&[
            "bound", "--group", "SL", "--field", "3^1", "--n", "2", "--a", "1,1;0,1", "--b",
            "1,2;0,1", "--format", "json",
        ]);
        assert_eq!(code, 0, "{out}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["lemma_path"], "main1-ii-mirror");
        assert!(v["witnesses"].as_array().unwrap().len() >= 2);
    }
}
