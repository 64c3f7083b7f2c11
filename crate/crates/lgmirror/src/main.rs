use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use lgmirror::catalog::{load_catalog, Catalog};
use lgmirror::cli::{run, run_all, CliError, Computation, Report};

#[derive(Parser)]
#[command(
    name = "lgmirror",
    version,
    about = "Exact genus-zero LG/LG mirror checks for the exceptional unimodular singularities"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
    /// Catalog name, e.g. E12 or Q12'.
    #[arg(long, global = true, conflicts_with = "all")]
    singularity: Option<String>,
    /// Every catalog record, in catalog order.
    #[arg(long, global = true)]
    all: bool,
    /// Truncation order of the primitive form.
    #[arg(long, global = true, default_value_t = 3)]
    order: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Catalog file; the built-in catalog when omitted.
    #[arg(long, global = true)]
    catalog: Option<PathBuf>,
    /// Print wall-clock time per report on stderr.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Basis, Milnor number, pairing and structure constants.
    Jacobi,
    /// ζ and 𝒥 truncations.
    PrimitiveForm,
    /// Flat coordinates and F₀ up to quartic order, raw and sign-normalized.
    Prepotential,
    /// Seeds, oGRR values, WDVV-solved 4-point table, 5-point certificate.
    Fjrw,
    /// B-side quartic against the A-side reconstruction.
    MirrorCheck,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

impl From<Command> for Computation {
    fn from(c: Command) -> Self {
        match c {
            Command::Jacobi => Computation::Jacobi,
            Command::PrimitiveForm => Computation::PrimitiveForm,
            Command::Prepotential => Computation::Prepotential,
            Command::Fjrw => Computation::Fjrw,
            Command::MirrorCheck => Computation::MirrorCheck,
        }
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cat = match &args.catalog {
        Some(p) => match load_catalog(p) {
            Ok(c) => c,
            Err(e) => return fail(&e.into()),
        },
        None => Catalog::builtin(),
    };
    let computation = Computation::from(args.command);
    let start = Instant::now();
    let results: Vec<Result<Report, CliError>> = match (&args.singularity, args.all) {
        (_, true) => run_all(&cat, computation, args.order),
        (Some(name), false) => match cat.get(name) {
            Ok(rec) => vec![run(rec, computation, args.order)],
            Err(e) => return fail(&e.into()),
        },
        (None, false) => {
            eprintln!("error: pass --singularity <name> or --all");
            return ExitCode::from(2);
        }
    };
    let mut code = 0u8;
    let mut reports = Vec::new();
    for res in results {
        match res {
            Ok(rep) => {
                if rep.verdict.is_mismatch() {
                    code = code.max(1);
                }
                reports.push(rep);
            }
            Err(e) => {
                eprintln!("error: {e}");
                code = code.max(e.exit_code() as u8);
            }
        }
    }
    match args.format {
        Format::Json => {
            let v: Vec<_> = reports.iter().map(Report::to_json).collect();
            let out = if args.all { serde_json::Value::Array(v) } else { v.into_iter().next().unwrap_or_default() };
            println!("{}", serde_json::to_string_pretty(&out).expect("json"));
        }
        Format::Text => {
            for rep in &reports {
                print!("{}", rep.to_text());
            }
            if args.all {
                let matched = reports.iter().filter(|r| r.verdict == lgmirror::cli::Verdict::Match).count();
                let unsupported = reports.iter().filter(|r| r.verdict == lgmirror::cli::Verdict::Unsupported).count();
                println!(
                    "summary: {matched} match, {unsupported} unsupported, {} mismatch",
                    reports.len() - matched - unsupported
                );
            }
        }
    }
    if args.timing {
        eprintln!("elapsed: {:?}", start.elapsed());
    }
    ExitCode::from(code)
}
