use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hmvol_cli::commands::{analyze, catalog, oracle, parse_range, AnalyzeOptions, CliError};
use hmvol_cli::report;
use hmvol_core::density::Convention;
use hmvol_core::findex::GroupTag;

#[derive(Parser)]
#[command(name = "hmvol", version, about = "Hirzebruch-Mumford volumes of orthogonal groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local densities, volumes and cusp form growth of one lattice.
    Analyze {
        /// Lattice expression, e.g. "2*U + 2*E8(-1) + <-2>".
        expr: String,
        /// Group tag: O, O+, SO+, O~+ or SO~+. Repeatable.
        #[arg(long = "group", value_parser = parse_tag)]
        groups: Vec<GroupTag>,
        /// Number of spinor genera in the genus.
        #[arg(long)]
        gsp: Option<u64>,
        #[arg(long)]
        json: bool,
        /// Verify every local density against the counting oracle (rank <= 3).
        #[arg(long)]
        oracle_check: bool,
        /// Digits after the point in the numeric echo.
        #[arg(long, default_value_t = 20)]
        precision: usize,
    },
    /// Engine volumes against closed forms for a named family.
    Catalog {
        /// II, T, L, K or N.
        family: String,
        /// Values of m, e.g. "0..2" or "0,2".
        #[arg(long, default_value = "0")]
        m: String,
        /// Values of d, e.g. "1..10".
        #[arg(long, default_value = "1..10")]
        d: String,
        #[arg(long)]
        json: bool,
    },
    /// Local density formula against the congruence count at depths r and r+1.
    Oracle {
        expr: String,
        p: u64,
        r: u32,
        #[arg(long, value_enum, default_value_t = ConventionArg::Literal)]
        convention: ConventionArg,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Literal,
    QuadraticDiagonal,
}

fn parse_tag(s: &str) -> Result<GroupTag, String> {
    GroupTag::parse(s).ok_or_else(|| format!("unknown group '{s}', expected O, O+, SO+, O~+ or SO~+"))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Analyze { expr, groups, gsp, json, oracle_check, precision } => {
            let a = analyze(&expr, &AnalyzeOptions { groups, gsp, oracle_check })?;
            if json {
                print_json(&report::analysis_json(&a, precision));
            } else {
                print!("{}", report::analysis_text(&a, precision));
            }
            Ok(())
        }
        Command::Catalog { family, m, d, json } => {
            let rows = catalog(&family, &parse_range(&m)?, &parse_range(&d)?)?;
            if json {
                print_json(&report::catalog_json(&rows));
            } else {
                print!("{}", report::catalog_text(&rows));
            }
            let bad = rows.iter().filter(|r| !r.matches()).count();
            if bad > 0 {
                return Err(CliError::Mismatch(format!("{bad} of {} rows differ from the closed form", rows.len())));
            }
            Ok(())
        }
        Command::Oracle { expr, p, r, convention, json } => {
            let convention = match convention {
                ConventionArg::Literal => Convention::Literal,
                ConventionArg::QuadraticDiagonal => Convention::QuadraticDiagonal,
            };
            let row = oracle(&expr, p, r, convention)?;
            if json {
                print_json(&report::oracle_json(&row));
            } else {
                print!("{}", report::oracle_text(&row));
            }
            if row.stable() && !row.matches() {
                return Err(CliError::Mismatch("stable count differs from the formula".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
