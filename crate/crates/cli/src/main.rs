//! `noncong`: certifies odd square-free integers as non-congruent numbers via
//! class-number criteria, with range scans, reference-table checks, and
//! density reports.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use noncong::quant::{empirical_scan, predicted_count};
use noncong::theorems::FamilyKind;
use noncong_cli::{
    build_report, check_tables, render_report_text, scan, scan_row_csv, selftest,
    verdict_exit_code, Format, ReportOptions, MAX_SCAN, SCAN_CSV_HEADER,
};

#[derive(Parser)]
#[command(
    name = "noncong",
    about = "Certifies square-free integers as non-congruent numbers",
    long_about = "Certifies odd square-free integers as non-congruent numbers through \
                  2-Selmer ranks (Monsky matrices) and 2-class-group invariants \
                  (class numbers, 4-rank, 8-rank criteria).\n\
                  Exit codes for `report`: 0 = non-congruent (unconditional), \
                  10 = non-congruent conditional on finite Sha[2], 20 = inconclusive, \
                  30 = not applicable, 1 = error."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "5557")]
    F5557,
    #[value(name = "553")]
    F553,
}

#[derive(Subcommand)]
enum Command {
    /// Certificate for one integer, with Selmer data, kernel set, and root number
    Report {
        n: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Also run the Tunnell lattice-count check
        #[arg(long)]
        tunnell: bool,
        /// Search integral witnesses for each kernel pair up to this bound
        #[arg(long)]
        witness_bound: Option<u64>,
        /// Run the Waterhouse ternary-form 8-rank cross-check with this
        /// initial search cap (0 = automatic)
        #[arg(long)]
        ternary_cap: Option<u64>,
        /// Class-number work budget (bound on |D|)
        #[arg(long, default_value_t = noncong::classgroup::DEFAULT_CLASS_BUDGET)]
        budget_h: u64,
    },
    /// Certify every family member n <= max, as CSV/JSON/text rows sorted by n
    Scan {
        /// Residue family: 5557 (q = 7 mod 8, t odd) or 553 (q = 3 mod 8, t even)
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Number of primes = 5 (mod 8)
        #[arg(long)]
        t: usize,
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[arg(long, default_value_t = noncong::classgroup::DEFAULT_CLASS_BUDGET)]
        budget_h: u64,
    },
    /// Recompute the bundled reference tables; nonzero exit on any mismatch
    Tables {
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Empirical vs predicted density of certified members (q = 7 mod 8 family)
    Density {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        max: u64,
        /// Recorded in the report for reproducibility
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Quick internal consistency checks; exit 0 when all pass
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Report { n, format, tunnell, witness_bound, ternary_cap, budget_h } => {
            let opts = ReportOptions {
                class_budget: budget_h,
                tunnell,
                witness_bound,
                ternary_cap,
                ..Default::default()
            };
            let doc = build_report(n, &opts).map_err(|e| e.to_string())?;
            match format.into() {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())?)
                }
                _ => print!("{}", render_report_text(&doc)),
            }
            Ok(ExitCode::from(verdict_exit_code(doc.certificate.verdict) as u8))
        }
        Command::Scan { family, t, max, jobs, format, budget_h } => {
            let kind = match family {
                FamilyArg::F5557 => FamilyKind::F5557,
                FamilyArg::F553 => FamilyKind::F553,
            };
            let parity_ok = match kind {
                FamilyKind::F5557 => t % 2 == 1,
                _ => t >= 2 && t % 2 == 0,
            };
            if !parity_ok {
                return Err(format!("t = {t} has the wrong parity for this family"));
            }
            if max > MAX_SCAN {
                return Err(format!("max = {max} exceeds the scan budget {MAX_SCAN}"));
            }
            let rows = scan(kind, t, max, jobs, budget_h);
            match format.into() {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&rows).map_err(|e| e.to_string())?)
                }
                _ => {
                    println!("{SCAN_CSV_HEADER}");
                    for row in &rows {
                        println!("{}", scan_row_csv(row));
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Tables { format } => {
            let checks = check_tables();
            let bad = checks.iter().filter(|c| !c.ok).count();
            match format.into() {
                Format::Json => {
                    println!("{}", serde_json::to_string_pretty(&checks).map_err(|e| e.to_string())?)
                }
                _ => {
                    for c in &checks {
                        println!(
                            "{} n = {:<12} {}",
                            if c.ok { "pass" } else { "FAIL" },
                            c.n,
                            if c.ok { c.set.clone() } else { format!("{}: {}", c.set, c.detail) }
                        );
                    }
                    println!("{} of {} rows match", checks.len() - bad, checks.len());
                }
            }
            Ok(if bad == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Density { t, max, seed } => {
            let report = empirical_scan(t, max, seed).map_err(|e| e.to_string())?;
            let check = predicted_count(t, max as f64).map_err(|e| e.to_string())?;
            debug_assert!((report.predicted - check).abs() < 1e-9);
            println!("family q = 7 (mod 8), t = {t}, up to {max}");
            println!("empirical members with 8-rank zero: {}", report.empirical);
            println!("predicted (asymptotic): {:.1}", report.predicted);
            println!("ratio: {:.4}", report.ratio);
            println!("seed: {}", report.seed);
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest => {
            let failures = selftest();
            if failures.is_empty() {
                println!("selftest: all checks passed");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("selftest: {} checks failed", failures.len());
                Ok(ExitCode::from(1))
            }
        }
    }
}
