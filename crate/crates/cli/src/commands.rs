use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use wkb_core::descent::{
    all_trivial, any_failed, check_lien_isomorphism, compute_lien_3cocycle, verify_covering, LienData, Report,
};
use wkb_core::quantize::{apply_automorphism, quantize_map, recognize_inner, QuantizeError};
use wkb_core::{Order, WkbSymbol};

use crate::doc::{
    from_json, BuildError, CoveringDoc, DocError, LienDoc, LienIsoDoc, MapSpecDoc, RecordDoc, SymbolDoc,
};
use crate::parse::parse_symbol;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "wkb", version, about = "Exact WKB symbol calculus and descent-data verification")]
pub struct Cli {
    /// Number of (x, u) variable pairs for expression arguments.
    #[arg(long, global = true, default_value_t = 1)]
    pub dim: usize,
    /// Truncation window: keep orders tau^j with j >= -depth.
    #[arg(long, global = true, default_value_t = 6)]
    pub depth: u32,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Star product A * B.
    Star {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Two-sided star inverse.
    Invert {
        #[arg(allow_hyphen_values = true)]
        p: String,
    },
    /// Star square root of an order-0 symbol with positive square principal part.
    Sqrt {
        #[arg(allow_hyphen_values = true)]
        p: String,
        /// Take the root with negative principal symbol.
        #[arg(long)]
        negative: bool,
    },
    /// Transpose anti-involution.
    Adjoint {
        #[arg(allow_hyphen_values = true)]
        p: String,
    },
    /// Order and principal symbol.
    Order {
        #[arg(allow_hyphen_values = true)]
        p: String,
    },
    /// Quantize a symplectic map spec into an automorphism record.
    Quantize { mapfile: PathBuf },
    /// Apply a record to a symbol.
    Apply {
        record: PathBuf,
        #[arg(allow_hyphen_values = true)]
        p: String,
    },
    /// Recognize a record above the identity as inner.
    Recognize { record: PathBuf },
    /// Verify the descent data of a covering.
    Descent { coverfile: PathBuf },
    /// Compute the 3-cocycle of abstract lien data.
    Lien3 { datafile: PathBuf },
    /// Check an isomorphism of liens.
    Lieniso { a: PathBuf, b: PathBuf, isofile: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }
}

enum Failure {
    Input(String),
    Verification { stdout: String, message: String },
}

impl Failure {
    fn verification(message: impl ToString) -> Self {
        Failure::Verification {
            stdout: String::new(),
            message: message.to_string(),
        }
    }
}

impl From<DocError> for Failure {
    fn from(e: DocError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        match e {
            BuildError::Input(d) => Failure::Input(d.to_string()),
            BuildError::Verification(m) => Failure::verification(m),
        }
    }
}

type CmdResult = Result<String, Failure>;

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                Outcome::ok(rendered)
            };
        }
    };
    match execute(&cli) {
        Ok(stdout) => Outcome::ok(stdout),
        Err(Failure::Input(msg)) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(Failure::Verification { stdout, message }) => Outcome {
            code: EXIT_VERIFICATION,
            stdout,
            stderr: format!("verification failed: {message}\n"),
        },
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn symbol_out(cli: &Cli, s: &WkbSymbol) -> String {
    match cli.output {
        OutputFormat::Text => format!("{s}\n"),
        OutputFormat::Json => json(&SymbolDoc::from_symbol(s)),
    }
}

fn operand(cli: &Cli, text: &str) -> Result<WkbSymbol, Failure> {
    parse_symbol(text, cli.dim, cli.depth).map_err(|e| Failure::Input(format!("'{text}': {e}")))
}

fn load_record(path: &Path) -> Result<wkb_core::quantize::AutomorphismRecord, Failure> {
    Ok(from_json::<RecordDoc>(&read(path)?, "record")?.to_record()?)
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    summary: String,
    reports: &'a [Report],
}

/// Renders reports and maps a failing verdict to the verification exit.
fn reports_out(cli: &Cli, reports: &[Report], trivial_summary: &str) -> CmdResult {
    let failed = reports.iter().filter(|r| r.verdict == wkb_core::descent::ReportVerdict::Fail).count();
    let summary = if failed > 0 {
        format!("{failed} checks failed")
    } else if all_trivial(reports) {
        trivial_summary.to_string()
    } else {
        let n = reports.len() - reports.iter().filter(|r| r.verdict == wkb_core::descent::ReportVerdict::Pass).count();
        format!("all checks pass; {n} nontrivial defects")
    };
    let stdout = match cli.output {
        OutputFormat::Text => {
            let mut s = String::new();
            for r in reports {
                writeln!(s, "{r}").unwrap();
            }
            writeln!(s, "{summary}").unwrap();
            s
        }
        OutputFormat::Json => json(&ReportDoc {
            summary: summary.clone(),
            reports,
        }),
    };
    if any_failed(reports) {
        Err(Failure::Verification { stdout, message: summary })
    } else {
        Ok(stdout)
    }
}

fn load_lien(path: &Path) -> Result<LienData, Failure> {
    let text = read(path)?;
    let value: serde_json::Value = from_json(&text, "lien data")?;
    if value.get("transitions").is_some() {
        let cov = from_json::<CoveringDoc>(&text, "covering")?.to_covering()?;
        LienData::from_covering(&cov).map_err(Failure::verification)
    } else {
        Ok(from_json::<LienDoc>(&text, "lien data")?.to_lien()?)
    }
}

fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Star { a, b } => {
            let p = operand(cli, a)?;
            let q = operand(cli, b)?;
            Ok(symbol_out(cli, &p.star(&q).expect("same dimension")))
        }
        Command::Invert { p } => {
            let p = operand(cli, p)?;
            let inv = p.invert().map_err(|e| Failure::Input(e.to_string()))?;
            Ok(symbol_out(cli, &inv))
        }
        Command::Sqrt { p, negative } => {
            let p = operand(cli, p)?;
            let q = p
                .square_root(if *negative { -1 } else { 1 })
                .map_err(|e| Failure::Input(e.to_string()))?;
            Ok(symbol_out(cli, &q))
        }
        Command::Adjoint { p } => Ok(symbol_out(cli, &operand(cli, p)?.adjoint())),
        Command::Order { p } => {
            let info = operand(cli, p)?.order_and_principal();
            Ok(match cli.output {
                OutputFormat::Text => format!("{info}\n"),
                OutputFormat::Json => {
                    let principal = match info.order {
                        Order::MinusInfinity => None,
                        Order::Finite(_) => Some(info.principal.to_string()),
                    };
                    json(&serde_json::json!({ "order": info.order.to_string(), "principal": principal }))
                }
            })
        }
        Command::Quantize { mapfile } => {
            let spec = from_json::<MapSpecDoc>(&read(mapfile)?, "map spec")?.to_spec()?;
            let rec = quantize_map(&spec, cli.depth).map_err(|e| match e {
                QuantizeError::NotSymplectic(_) | QuantizeError::BadSpec(_) => Failure::Input(e.to_string()),
                other => Failure::verification(other),
            })?;
            Ok(match cli.output {
                OutputFormat::Json => json(&RecordDoc::from_record(&rec)),
                OutputFormat::Text => {
                    let mut s = String::new();
                    for (i, x) in rec.x_images.iter().enumerate() {
                        writeln!(s, "X{} = {x}", i + 1).unwrap();
                    }
                    for (i, u) in rec.u_images.iter().enumerate() {
                        writeln!(s, "U{} = {u}", i + 1).unwrap();
                    }
                    writeln!(s, "c = {}", wkb_core::poly::format_rational(&rec.c)).unwrap();
                    writeln!(s, "primitive = {}", rec.primitive).unwrap();
                    s
                }
            })
        }
        Command::Apply { record, p } => {
            let rec = load_record(record)?;
            let sym = parse_symbol(p, rec.dim, rec.depth).map_err(|e| Failure::Input(format!("'{p}': {e}")))?;
            let out = apply_automorphism(&rec, &sym).map_err(Failure::verification)?;
            Ok(symbol_out(cli, &out))
        }
        Command::Recognize { record } => {
            let rec = load_record(record)?;
            let r = recognize_inner(&rec).map_err(Failure::verification)?;
            Ok(match cli.output {
                OutputFormat::Json => json(&serde_json::json!({
                    "inner": SymbolDoc::from_symbol(&r.inner),
                    "unitary": r.unitary.as_ref().map(SymbolDoc::from_symbol),
                    "c": wkb_core::poly::format_rational(&rec.c),
                    "note": r.central_ambiguity_note,
                })),
                OutputFormat::Text => {
                    let mut s = format!("P = {}\n", r.inner);
                    if let Some(u) = &r.unitary {
                        writeln!(s, "unitary P = {u}").unwrap();
                    }
                    writeln!(s, "c = {}", wkb_core::poly::format_rational(&rec.c)).unwrap();
                    writeln!(s, "note: {}", r.central_ambiguity_note).unwrap();
                    s
                }
            })
        }
        Command::Descent { coverfile } => {
            let cov = from_json::<CoveringDoc>(&read(coverfile)?, "covering")?.to_covering()?;
            let report = verify_covering(&cov).map_err(Failure::verification)?;
            reports_out(cli, &report.reports(), "all defects trivial")
        }
        Command::Lien3 { datafile } => {
            let data = load_lien(datafile)?;
            let cocycle = compute_lien_3cocycle(&data).map_err(Failure::verification)?;
            reports_out(cli, &cocycle.reports(), "effective: all c = 1")
        }
        Command::Lieniso { a, b, isofile } => {
            let la = load_lien(a)?;
            let lb = load_lien(b)?;
            let depth = la
                .isos
                .values()
                .map(|r| r.depth)
                .min()
                .unwrap_or(cli.depth);
            let iso = from_json::<LienIsoDoc>(&read(isofile)?, "lien iso")?.to_iso(la.dim, la.size, depth)?;
            let check = check_lien_isomorphism(&la, &lb, &iso).map_err(Failure::verification)?;
            reports_out(cli, &check.reports(), "effective: all d = 1")
        }
    }
}
