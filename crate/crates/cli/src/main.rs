use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use z2pcf::bounds::{bound_table, PcfType, MAX_TABLE_LEVEL};
use z2pcf::enumerate::{emit_points, verify_bounds_theorem, write_output, Format};
use z2pcf::expand::{evaluate_text, expand, parse_unit, ExpansionType};
use z2pcf::interval::{format_sig17, DEFAULT_PRECISION, MAX_PRECISION, MIN_PRECISION};
use z2pcf::suite::{run_suite, Status, MAX_SUITE_LEVEL};
use z2pcf::{Error, Level};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNDECIDED: u8 = 3;

#[derive(Parser)]
#[command(name = "z2pcf", version, about = "Periodic continued fractions of X_n = 2cos(2π/2^(n+2)) over Z[X_(n-1)]")]
struct Cli {
    /// Working precision in bits for certified numerics
    #[arg(
        long,
        global = true,
        env = "Z2PCF_PRECISION",
        default_value_t = DEFAULT_PRECISION,
        value_parser = clap::value_parser!(u32).range(MIN_PRECISION as i64..=MAX_PRECISION as i64)
    )]
    precision: u32,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum TypeArg {
    #[value(name = "12")]
    T12,
    #[value(name = "03")]
    T03,
    #[value(name = "13")]
    T13,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundTypeArg {
    #[value(name = "12")]
    T12,
    #[value(name = "03")]
    T03,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run the exact verification suite for levels 1..=max-level
    Verify {
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(0..=MAX_SUITE_LEVEL as i64))]
        max_level: u32,
        /// Emit the report as JSON instead of text
        #[arg(long)]
        format: Option<FormatArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expand a relative unit as a PCF of X_n and verify the result
    Expand {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=z2pcf::ring::MAX_LEVEL as i64))]
        n: u32,
        #[arg(long = "type")]
        kind: TypeArg,
        /// `delta`, `eta`, or an element such as `L1:[3,2]`
        #[arg(long)]
        unit: String,
        #[arg(long)]
        format: Option<FormatArg>,
    },
    /// Print the bound table b_{s,σ}, C_{s,σ}, or sweep enumerated units
    Bounds {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=MAX_TABLE_LEVEL as i64))]
        n: u32,
        #[arg(long = "type")]
        kind: BoundTypeArg,
        #[arg(long)]
        format: Option<FormatArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Instead of the table, check every enumerated unit with exponents
        /// bounded by this value against the bounds
        #[arg(long, value_name = "E")]
        sweep: Option<u32>,
    },
    /// Export the log-embedding dataset of enumerated relative units
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=4))]
        n: u32,
        /// Exponent bound E (default 6 for n <= 2, 3 for n = 3, 1 for n = 4)
        #[arg(long)]
        bound: Option<u32>,
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a PCF with coefficients in Z[X_(n-1)]
    Eval {
        /// e.g. `[2|-2,4]` or `[|L1:[3,-1],L1:[1,1],L1:[3,-2]]`
        #[arg(long)]
        pcf: String,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=z2pcf::ring::MAX_LEVEL as i64))]
        n: u32,
        #[arg(long)]
        format: Option<FormatArg>,
    },
}

fn emit(out: Option<&Path>, contents: &str) -> z2pcf::Result<()> {
    match out {
        Some(path) => write_output(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn usage(msg: impl std::fmt::Display) -> Result<u8, Error> {
    eprintln!("error: {msg}");
    Ok(EXIT_USAGE)
}

fn code(ok: bool) -> u8 {
    if ok {
        0
    } else {
        EXIT_FAIL
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let precision = cli.precision;
    match cli.command {
        Command::Verify { max_level, format, out } => {
            let report = run_suite(max_level)?;
            match format {
                Some(FormatArg::Csv) => return usage("verify reports are text or json"),
                Some(FormatArg::Json) => emit(out.as_deref(), &report.to_json()?)?,
                None => emit(out.as_deref(), &report.to_string())?,
            }
            Ok(match report.status() {
                Status::Pass => 0,
                Status::Fail => EXIT_FAIL,
                Status::Undecided => EXIT_UNDECIDED,
            })
        }
        Command::Expand { n, kind, unit, format } => {
            let unit = parse_unit(&unit, Level(n))?;
            let kind = match kind {
                TypeArg::T12 => ExpansionType::T12,
                TypeArg::T03 => ExpansionType::T03,
                TypeArg::T13 => ExpansionType::T13,
            };
            let e = expand(&unit, kind)?;
            match format {
                Some(FormatArg::Csv) => return usage("expand output is text or json"),
                Some(FormatArg::Json) => println!("{}", serde_json::to_string_pretty(&e)?),
                None => print!("{e}"),
            }
            Ok(code(e.all_ok()))
        }
        Command::Bounds { n, kind, format, out, sweep } => {
            let kind = match kind {
                BoundTypeArg::T12 => PcfType::T12,
                BoundTypeArg::T03 => PcfType::T03,
            };
            if let Some(e) = sweep {
                let r = verify_bounds_theorem(Level(n), e, kind)?;
                let text = match format {
                    Some(FormatArg::Json) => serde_json::to_string_pretty(&r)? + "\n",
                    Some(FormatArg::Csv) => return usage("sweep reports are text or json"),
                    None => format!(
                        "type {} at L{}, E = {}: {} units tested, {} members, {} excluded, {} undecided, {} violations\nassumption: {}\n",
                        r.pcf_type.label(), r.level, r.bound, r.tested, r.members, r.excluded, r.undecided, r.violations, r.assumption
                    ),
                };
                emit(out.as_deref(), &text)?;
                return Ok(if r.undecided > 0 { EXIT_UNDECIDED } else { 0 });
            }
            let table = bound_table(Level(n), kind, precision)?;
            let text = match format {
                None => table.to_text(),
                Some(FormatArg::Csv) => table.to_csv(),
                Some(FormatArg::Json) => {
                    let rows: Vec<_> = table
                        .rows
                        .iter()
                        .flat_map(|row| {
                            (0..row.signs.len()).map(move |j| {
                                json!({
                                    "s": row.signs.to_string(),
                                    "sigma": j,
                                    "a_s": row.a_s.to_string(),
                                    "minimizers": row.minimizers.iter().map(ToString::to_string).collect::<Vec<_>>(),
                                    "b": format_sig17(row.b[j].mid_f64()).parse::<f64>().unwrap(),
                                    "C": format_sig17(row.c[j].mid_f64()).parse::<f64>().unwrap(),
                                })
                            })
                        })
                        .collect();
                    let doc = json!({ "level": n, "type": kind.to_string(), "rows": rows });
                    serde_json::to_string_pretty(&doc)? + "\n"
                }
            };
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Command::Enumerate { n, bound, format, out } => {
            let bound = bound.unwrap_or(match n {
                1 | 2 => 6,
                3 => 3,
                _ => 1,
            });
            let format = match format {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
            let data = emit_points(Level(n), bound, format, precision)?;
            emit(out.as_deref(), &data)?;
            Ok(0)
        }
        Command::Eval { pcf, n, format } => {
            let v = evaluate_text(&pcf, Level(n), precision)?;
            match format {
                Some(FormatArg::Csv) => return usage("eval output is text or json"),
                Some(FormatArg::Json) => println!("{}", serde_json::to_string_pretty(&v)?),
                None => print!("{v}"),
            }
            Ok(code(v.converges))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Undecided { .. } | Error::UndecidedTie { .. } => EXIT_UNDECIDED,
        Error::Parse { .. }
        | Error::LevelTooHigh(_)
        | Error::LevelZero { .. }
        | Error::LevelMismatch { .. }
        | Error::OutOfRange { .. }
        | Error::TooLarge { .. }
        | Error::UnsupportedShape { .. } => EXIT_USAGE,
        _ => EXIT_FAIL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(c) => ExitCode::from(c),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
