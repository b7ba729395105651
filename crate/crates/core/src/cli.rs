//! Command-line surface: `coeffs`, `verify`, `factor`, `demo`, `limit`,
//! `integrals`.
//!
//! Exit codes: 0 on success, 1 when a verification check fails or a command
//! hits a runtime error (bad input file, non-convergence), 2 on usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::carleman::{carleman_demo, gap_for, read_sequence, refinement_factor_exact};
use crate::coeffs::{b_recurrence, coefficient_bound, CoefficientTable, Source};
use crate::error::{Error, Result};
use crate::quadrature::{lemma2_diagnostic, lemma2_from_table, remark_integrals, QuadratureConfig};
use crate::rational::BigRational;
use crate::report::{fmt_f64, VerificationReport};
use crate::verify::{run_verification, Tolerances, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "carleman-coeffs", version, about = "Coefficients b_n of (1+1/x)^x = e(1 - Σ b_n/(x+1)^n)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TextFormat {
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Decimal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print b_1..b_N with the bound 1/(n(n+1))
    Coeffs {
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
        #[arg(long, value_enum, default_value_t = TableFormat::Table)]
        format: TableFormat,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Significant digits in decimal mode
        #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
        digits: u64,
    },
    /// Run every check and print a JSON report; exits 1 if any check fails
    Verify {
        #[arg(long, default_value_t = 200)]
        max_n: usize,
        #[arg(long, default_value_t = 20)]
        quad_max: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Verify coefficients read from an exact-mode CSV (`n,p/q[,bound]`)
        /// instead of computing them
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Refinement factor F_m(x) = 1 - Σ_{k≤m} b_k/(x+1)^k and its gap
    Factor {
        /// Positive rational: decimal (`0.5`) or `p/q`
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        terms: u64,
        #[arg(long, value_enum, default_value_t = TextFormat::Table)]
        format: TextFormat,
    },
    /// Both sides of the refined Carleman inequality over a finite sequence
    Demo {
        /// Single-column CSV of nonnegative numbers, no header
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        terms: u64,
        #[arg(long, value_enum, default_value_t = TextFormat::Table)]
        format: TextFormat,
    },
    /// L(n) = n ∫ s^n h(s) ds, which tends to -1
    Limit {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_enum, default_value_t = TextFormat::Table)]
        format: TextFormat,
    },
    /// ∫g, ∫g·s, ∫g/s and ∫g/(1-s) against their closed forms
    Integrals {
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = TextFormat::Json)]
        format: TextFormat,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILURE
        }
    }
}

enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

fn execute(command: Command, out: &mut dyn Write) -> std::result::Result<i32, CliError> {
    match command {
        Command::Coeffs { max_n, format, mode, digits } => {
            let table = b_recurrence(max_n as usize)?;
            write!(out, "{}", render_coefficients(&table, format, mode, digits as usize))?;
            Ok(EXIT_OK)
        }
        Command::Verify { max_n, quad_max, tol, table } => {
            let config = VerifyConfig::new(max_n, quad_max, tol).map_err(|e| CliError::Usage(e.to_string()))?;
            let table = match table {
                Some(path) => load_table(&path)?,
                None => b_recurrence(max_n)?,
            };
            let report = run_verification(&config, &table)?;
            writeln!(out, "{}", report.to_json())?;
            Ok(report.exit_code())
        }
        Command::Factor { x, terms, format } => {
            let x = BigRational::parse_exact(&x).map_err(|e| CliError::Usage(e.to_string()))?;
            if !x.is_positive() {
                return Err(CliError::Usage("--x must be positive".into()));
            }
            let table = b_recurrence(terms as usize)?;
            let factor = refinement_factor_exact(&x, terms as usize, &table)?;
            let gap = gap_for(&factor);
            match format {
                TextFormat::Json => {
                    let value = json!({
                        "x": factor.x.to_string(),
                        "terms": factor.terms,
                        "factor_exact": factor.exact_value.to_string(),
                        "factor": fmt_f64(factor.float_value),
                        "compound": fmt_f64(gap.compound),
                        "weighted_e": fmt_f64(gap.weighted_e),
                        "gap": fmt_f64(gap.gap),
                        "tail_bound": fmt_f64(gap.tail_bound),
                        "holds": gap.gap > 0.0,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json"))?;
                }
                TextFormat::Table => {
                    writeln!(out, "x            = {}", factor.x)?;
                    writeln!(out, "terms        = {}", factor.terms)?;
                    writeln!(out, "F_m(x)       = {} ≈ {}", factor.exact_value, fmt_f64(factor.float_value))?;
                    writeln!(out, "(1+1/x)^x    = {}", fmt_f64(gap.compound))?;
                    writeln!(out, "e*F_m(x)     = {}", fmt_f64(gap.weighted_e))?;
                    writeln!(out, "gap          = {:e}", gap.gap)?;
                    writeln!(out, "tail bound   = {:e}", gap.tail_bound)?;
                    writeln!(out, "(1+1/x)^x < e*F_m(x): {}", gap.gap > 0.0)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Demo { seq, terms, format } => {
            let a = read_sequence(&seq)?;
            let table = b_recurrence(terms as usize)?;
            let report = carleman_demo(&a, terms as usize, &table)?;
            match format {
                TextFormat::Json => {
                    let value = json!({
                        "length": report.length,
                        "terms": report.terms,
                        "lhs": fmt_f64(report.lhs),
                        "rhs": fmt_f64(report.rhs),
                        "ratio": fmt_f64(report.ratio),
                        "holds": report.holds,
                        "note": report.note,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json"))?;
                }
                TextFormat::Table => {
                    writeln!(out, "N     = {}", report.length)?;
                    writeln!(out, "terms = {}", report.terms)?;
                    writeln!(out, "LHS   = {}", fmt_f64(report.lhs))?;
                    writeln!(out, "RHS   = {}", fmt_f64(report.rhs))?;
                    writeln!(out, "ratio = {}", fmt_f64(report.ratio))?;
                    writeln!(out, "LHS < RHS: {}", report.holds)?;
                    writeln!(out, "({})", report.note)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Limit { n, format } => {
            let n = n as usize;
            let result = lemma2_diagnostic(n, &QuadratureConfig::default())?;
            let table = b_recurrence(n + 1)?;
            let from_table = lemma2_from_table(&table, n)?;
            match format {
                TextFormat::Json => {
                    let value = json!({
                        "n": n,
                        "value": fmt_f64(result.value),
                        "distance_to_limit": fmt_f64((result.value + 1.0).abs()),
                        "from_exact_table": fmt_f64(from_table),
                        "error_estimate": fmt_f64(result.error_estimate),
                        "levels_used": result.levels_used,
                        "converged": result.converged,
                    });
                    writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("json"))?;
                }
                TextFormat::Table => {
                    writeln!(out, "L({n})            = {}", fmt_f64(result.value))?;
                    writeln!(out, "|L({n}) + 1|      = {:e}", (result.value + 1.0).abs())?;
                    writeln!(out, "-n^2 e b_(n+1)   = {}", fmt_f64(from_table))?;
                    writeln!(out, "error estimate   = {:e}", result.error_estimate)?;
                    writeln!(out, "converged        = {}", result.converged)?;
                }
            }
            Ok(if result.converged { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Integrals { tol, format } => {
            if !(tol > 0.0 && tol.is_finite()) {
                return Err(CliError::Usage("--tol must be positive".into()));
            }
            let tols = Tolerances::from_base(tol);
            let report = VerificationReport::new(remark_integrals(
                &tols.quadrature(),
                tols.moment,
                tols.reciprocal,
            ));
            match format {
                TextFormat::Json => writeln!(out, "{}", report.to_json())?,
                TextFormat::Table => {
                    for c in &report.checks {
                        let values = c.values.as_ref().expect("integral checks carry values");
                        writeln!(
                            out,
                            "{:<30} {:<5} value={} expected={}",
                            c.name,
                            format!("{:?}", c.status).to_lowercase(),
                            values["value"],
                            values["expected"]
                        )?;
                    }
                }
            }
            Ok(report.exit_code())
        }
    }
}

/// Renders `n, b_n, 1/(n(n+1))` rows. CSV has no header row.
pub fn render_coefficients(table: &CoefficientTable, format: TableFormat, mode: Mode, digits: usize) -> String {
    let show = |r: &BigRational| match mode {
        Mode::Exact => r.to_string(),
        Mode::Decimal => r.to_decimal(digits),
    };
    let rows: Vec<(usize, String, String)> =
        table.iter().map(|(n, b)| (n, show(b), show(&coefficient_bound(n)))).collect();
    match format {
        TableFormat::Csv => rows.iter().map(|(n, b, bound)| format!("{n},{b},{bound}\n")).collect(),
        TableFormat::Json => {
            let items: Vec<_> = rows
                .iter()
                .map(|(n, b, bound)| json!({ "n": n, "b_n": b, "bound": bound }))
                .collect();
            format!("{}\n", serde_json::to_string_pretty(&items).expect("json"))
        }
        TableFormat::Table => {
            let wb = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(3);
            let wn = rows.last().map_or(1, |r| r.0.to_string().len()).max(1);
            let mut s = format!("{:>wn$}  {:<wb$}  1/(n(n+1))\n", "n", "b_n");
            for (n, b, bound) in &rows {
                s.push_str(&format!("{n:>wn$}  {b:<wb$}  {bound}\n"));
            }
            s
        }
    }
}

/// Reads the exact-mode CSV written by `coeffs --mode exact --format csv`.
/// Rows must be numbered 1, 2, 3, ...; any third column is ignored.
pub fn parse_table_csv<R: std::io::Read>(reader: R) -> Result<CoefficientTable> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        if record.len() < 2 {
            return Err(Error::Parse(format!("line {line}: expected `n,p/q`")));
        }
        let n: usize = record[0]
            .parse()
            .map_err(|_| Error::Parse(format!("line {line}: bad index {:?}", &record[0])))?;
        if n != line {
            return Err(Error::Parse(format!("line {line}: expected index {line}, found {n}")));
        }
        let value: BigRational = record[1]
            .parse()
            .map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        values.push(value);
    }
    CoefficientTable::from_values(values, Source::External)
        .map_err(|_| Error::Parse("coefficient file has no rows".into()))
}

pub fn load_table(path: &std::path::Path) -> Result<CoefficientTable> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_table_csv(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("carleman-coeffs").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn coeffs_exact_csv() {
        let (code, out, _) = run_args(&["coeffs", "--max-n", "3", "--mode", "exact", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out, "1,1/2,1/2\n2,1/24,1/6\n3,1/48,1/12\n");
    }

    #[test]
    fn coeffs_decimal() {
        let (code, out, _) =
            run_args(&["coeffs", "--max-n", "1", "--mode", "decimal", "--digits", "4", "--format", "csv"]);
        assert_eq!(code, 0);
        assert_eq!(out, "1,0.5000,0.5000\n");
    }

    #[test]
    fn coeffs_zero_is_usage_error() {
        let (code, _, err) = run_args(&["coeffs", "--max-n", "0"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(!err.is_empty());
    }

    #[test]
    fn coeffs_json_and_table() {
        let (_, out, _) = run_args(&["coeffs", "--max-n", "2", "--format", "json"]);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v[1]["b_n"], "1/24");
        assert_eq!(v[1]["bound"], "1/6");
        let (_, out, _) = run_args(&["coeffs", "--max-n", "2"]);
        assert!(out.lines().next().unwrap().contains("b_n"));
        assert!(out.contains("1/24"));
    }

    #[test]
    fn exact_csv_parses_back() {
        let table = b_recurrence(30).unwrap();
        let text = render_coefficients(&table, TableFormat::Csv, Mode::Exact, 15);
        let back = parse_table_csv(text.as_bytes()).unwrap();
        assert!(back.same_values(&table));
        assert_eq!(back.source(), Source::External);
    }

    #[test]
    fn table_csv_errors() {
        assert!(parse_table_csv("".as_bytes()).is_err());
        assert!(parse_table_csv("2,1/2\n".as_bytes()).is_err());
        assert!(parse_table_csv("1,abc\n".as_bytes()).is_err());
        assert!(parse_table_csv("1\n".as_bytes()).is_err());
    }

    #[test]
    fn verify_quad_max_above_max_n_is_usage_error() {
        let (code, _, err) = run_args(&["verify", "--max-n", "10", "--quad-max", "20"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("usage error"));
    }

    #[test]
    fn factor_at_one() {
        let (code, out, _) = run_args(&["factor", "--x", "1", "--terms", "6", "--format", "json"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["compound"], "2.0");
        let weighted: f64 = v["weighted_e"].as_str().unwrap().parse().unwrap();
        assert!(weighted > 2.0);
        assert_eq!(v["holds"], true);
    }

    #[test]
    fn factor_rejects_nonpositive() {
        assert_eq!(run_args(&["factor", "--x", "0"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["factor", "--x", "-1/2"]).0, EXIT_USAGE);
        assert_eq!(run_args(&["factor", "--x", "abc"]).0, EXIT_USAGE);
    }

    #[test]
    fn limit_plain() {
        let (code, out, _) = run_args(&["limit", "--n", "10"]);
        assert_eq!(code, 0);
        assert!(out.contains("L(10)"));
    }

    #[test]
    fn demo_missing_file() {
        let (code, _, err) = run_args(&["demo", "--seq", "/nonexistent/ones.csv"]);
        assert_eq!(code, EXIT_FAILURE);
        assert!(err.contains("/nonexistent/ones.csv"));
    }

    #[test]
    fn integrals_report() {
        let (code, out, _) = run_args(&["integrals"]);
        assert_eq!(code, 0);
        let report = VerificationReport::from_json(&out).unwrap();
        assert_eq!(report.summary.passed, 4);
    }
}
