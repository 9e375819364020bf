//! Command-line front end. The binary is a thin wrapper around [`run`].

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::dissection::{
    check_pair_numeric, prove_pair, verify_certificate, PairVerdict, QuadExponent,
    VanishingCertificate,
};
use crate::error::Error;
use crate::qexpr::parse;
use crate::report::Exact;
use crate::series::TruncatedSeries;
use crate::vanish::{
    grid_search, scan_signs, scan_vanishing, write_grid_csv, ProgressionReport, SignReport,
};

pub const DEFAULT_CHECK_ORDER: usize = 1000;
pub const DEFAULT_SEARCH_ORDER: usize = 2000;

/// Exit status: success or a positive verdict.
pub const EXIT_OK: i32 = 0;
/// Exit status: the check ran and came out negative.
pub const EXIT_NEGATIVE: i32 = 1;
/// Exit status: bad input (parse errors, violated preconditions).
pub const EXIT_INPUT: i32 = 2;
/// Exit status: reading or writing a file failed.
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qvanish",
    version,
    about = "Exact q-series expansion and vanishing-coefficient checks"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Truncation order N (coefficients 0..=N).
    #[arg(short = 'N', long = "order", global = true)]
    pub order: Option<usize>,
    /// Emit JSON instead of the human-readable form.
    #[arg(long, global = true)]
    pub json: bool,
    /// Write the output to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coefficients of an expression.
    Expand { expr: String },
    /// Compare two expressions coefficient by coefficient.
    VerifyIdentity { lhs: String, rhs: String },
    /// Report which residue classes mod k have only zero coefficients.
    CheckVanishing {
        expr: String,
        #[arg(short, long, value_parser = clap::value_parser!(u64).range(2..))]
        k: u64,
    },
    /// Report the eventual sign of each residue class mod p.
    Signs {
        expr: String,
        #[arg(short, long, value_parser = clap::value_parser!(u64).range(1..))]
        p: u64,
    },
    /// Search for a substitution certificate for H_{k,l}(S1 - q^e S2) = 0.
    ProvePair {
        /// First exponent form, `am,bm[:alt],an,bn[:alt]`.
        #[arg(long)]
        q1: String,
        /// Second exponent form.
        #[arg(long)]
        q2: String,
        /// Power of q in front of the second sum.
        #[arg(long, default_value_t = 0)]
        e: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long)]
        l: u64,
        /// Largest absolute entry tried in the change of variables.
        #[arg(long, default_value_t = 3)]
        bound: i64,
        /// Also write the certificate text to this file.
        #[arg(long, value_name = "PATH")]
        save: Option<PathBuf>,
    },
    /// Scan every a/b family for one t and write CSV rows for the hits.
    Search {
        #[arg(long, value_parser = clap::value_parser!(u64).range(5..))]
        t: u64,
        /// Moduli to scan, as multiples of t.
        #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2])]
        multiples: Vec<u64>,
    },
}

enum Failure {
    Input(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit status. Reports go to `stdout` unless `--out` is given;
/// diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut buffer = Vec::new();
    let status = match execute(&cli, &mut buffer) {
        Ok(status) => status,
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_IO;
        }
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &buffer),
        None => stdout.write_all(&buffer),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_IO;
    }
    status
}

fn execute(cli: &Cli, out: &mut Vec<u8>) -> Result<i32, Failure> {
    let g = &cli.global;
    let check_order = g.order.unwrap_or(DEFAULT_CHECK_ORDER);
    match &cli.command {
        Command::Expand { expr } => {
            let series = eval(expr, check_order)?;
            if g.json {
                let coeffs: Vec<Exact> = series.coeffs().iter().map(Exact).collect();
                emit_json(out, &coeffs)?;
            } else {
                for (n, c) in series.coeffs().iter().enumerate() {
                    writeln!(out, "{n}: {c}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::VerifyIdentity { lhs, rhs } => {
            let left = eval(lhs, check_order)?;
            let right = eval(rhs, check_order)?;
            let diff = first_difference(&left, &right);
            if g.json {
                let body = match diff {
                    None => {
                        json!({ "equal": true, "order": check_order, "first_difference": null })
                    }
                    Some(n) => json!({
                        "equal": false,
                        "order": check_order,
                        "first_difference": n,
                        "lhs": Exact(&left.coeffs()[n]),
                        "rhs": Exact(&right.coeffs()[n]),
                    }),
                };
                emit_json(out, &body)?;
            } else {
                match diff {
                    None => writeln!(out, "EQUAL up to N={check_order}")?,
                    Some(n) => writeln!(
                        out,
                        "DIFFERENT at index {n}: lhs={} rhs={}",
                        left.coeffs()[n],
                        right.coeffs()[n]
                    )?,
                }
            }
            Ok(if diff.is_none() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::CheckVanishing { expr, k } => {
            let series = eval(expr, check_order)?;
            let report = scan_vanishing(&series, *k as usize, check_order, expr);
            if g.json {
                emit_json(out, &report)?;
            } else {
                write_progression(out, &report)?;
            }
            Ok(if report.any_vanishing() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Signs { expr, p } => {
            let series = eval(expr, check_order)?;
            let report = scan_signs(&series, *p as usize, check_order);
            if g.json {
                emit_json(out, &report)?;
            } else {
                write_signs(out, &report)?;
            }
            Ok(EXIT_OK)
        }
        Command::ProvePair {
            q1,
            q2,
            e,
            k,
            l,
            bound,
            save,
        } => {
            let order = g.order.unwrap_or(DEFAULT_SEARCH_ORDER);
            let q1: QuadExponent = q1.parse()?;
            let q2: QuadExponent = q2.parse()?;
            let (k, l) = (*k as usize, *l as usize % *k as usize);
            let cert = prove_pair(&q1, &q2, *e, k, l, *bound)?;
            let numeric = check_pair_numeric(&q1, &q2, *e, k, l, order)?;
            if let (Some(c), Some(path)) = (&cert, save) {
                std::fs::write(path, c.to_text())?;
            }
            write_pair(out, g.json, cert.as_ref(), &numeric)?;
            Ok(if cert.is_some() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            })
        }
        Command::Search { t, multiples } => {
            let order = g.order.unwrap_or(DEFAULT_SEARCH_ORDER);
            if multiples.contains(&0) {
                return Err(Failure::Input("moduli multiples must be positive".into()));
            }
            let hits = grid_search(*t, order, multiples)?;
            if g.json {
                emit_json(out, &hits)?;
            } else {
                write_grid_csv(&hits, &mut *out).map_err(|e| Failure::Io(e.to_string()))?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn eval(text: &str, order: usize) -> Result<TruncatedSeries, Failure> {
    let expr = parse(text).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(expr.eval(order)?)
}

fn first_difference(a: &TruncatedSeries, b: &TruncatedSeries) -> Option<usize> {
    a.coeffs().iter().zip(b.coeffs()).position(|(x, y)| x != y)
}

fn emit_json<T: Serialize + ?Sized>(out: &mut Vec<u8>, value: &T) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(())
}

fn write_progression(out: &mut Vec<u8>, report: &ProgressionReport) -> std::io::Result<()> {
    writeln!(
        out,
        "{} mod {} up to N={}",
        report.description, report.modulus, report.order
    )?;
    for v in &report.residues {
        match v.first_nonzero {
            None => writeln!(
                out,
                "  residue {:>3}: all zero ({})",
                v.residue, v.proof_status
            )?,
            Some(n) => writeln!(out, "  residue {:>3}: nonzero at {n}", v.residue)?,
        }
    }
    Ok(())
}

fn write_signs(out: &mut Vec<u8>, report: &SignReport) -> std::io::Result<()> {
    writeln!(out, "period {} up to N={}", report.period, report.order)?;
    for r in &report.residues {
        let from = r
            .stabilization_index
            .map(|n| format!(" from {n}"))
            .unwrap_or_default();
        writeln!(
            out,
            "  residue {:>3}: {}{from} ({} examined)",
            r.residue, r.sign, r.examined
        )?;
    }
    let zeros: Vec<String> = report
        .exceptional_zeros
        .iter()
        .map(usize::to_string)
        .collect();
    writeln!(out, "exceptional zeros: {{{}}}", zeros.join(", "))
}

fn write_pair(
    out: &mut Vec<u8>,
    as_json: bool,
    cert: Option<&VanishingCertificate>,
    numeric: &PairVerdict,
) -> Result<(), Failure> {
    let check = cert.map(verify_certificate);
    if as_json {
        let body = json!({
            "certificate": cert,
            "certificate_valid": check.as_ref().map(|c| c.is_valid()),
            "numeric": numeric,
        });
        return emit_json(out, &body);
    }
    match (cert, &check) {
        (Some(c), Some(check)) => {
            writeln!(out, "FOUND (certificate re-verified: {})", check.is_valid())?;
            out.extend_from_slice(c.to_text().as_bytes());
        }
        _ => writeln!(out, "NOT FOUND")?,
    }
    match numeric.first_violation {
        None => writeln!(out, "numeric check: vanishes up to N={}", numeric.order)?,
        Some(n) => writeln!(
            out,
            "numeric check: nonzero at index {n} (value {})",
            numeric.value.as_ref().expect("value accompanies the index")
        )?,
    }
    Ok(())
}
