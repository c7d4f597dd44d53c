use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;

mod commands;
mod parse;

use commands::{Outcome, Status};
use parse::{parse_complex, parse_interval, parse_rational_arg, parse_width};

#[derive(Parser, Debug)]
#[command(name = "geopoly")]
#[command(about = "Exact and high-precision checks for geometric (Fubini) polynomials")]
struct Cli {
    /// Working precision in bits for floating evaluations (at least 53)
    #[arg(long, global = true, default_value_t = 256, value_parser = clap::value_parser!(u32).range(53..))]
    precision: u32,

    /// Root enclosure width: `2^-k`, `p/q` or a decimal
    #[arg(long, global = true, default_value = "2^-80", value_parser = parse_width)]
    width: BigRational,

    /// Quadrature tolerance
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write output here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coefficient tables of P_0..P_n, cross-checked across three generators
    Gen {
        #[arg(long)]
        n: usize,
    },
    /// Certified zero enclosures of P_n
    Zeros {
        #[arg(long)]
        n: usize,
    },
    /// Finite-n comparisons against the limit theorems
    Asympt {
        #[arg(value_enum)]
        statement: AsymptKind,
        /// Evaluation points `a+bi` (comma separated or repeated)
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
        z: Vec<Complex64>,
        /// Degrees (comma separated or repeated)
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Interior points in (-1, 0) as rationals; defaults to a 50-point grid on [-9/10, -1/10]
        #[arg(long, value_delimiter = ',', value_parser = parse_rational_arg, allow_hyphen_values = true)]
        x: Vec<BigRational>,
    },
    /// Limiting zero distribution checks
    Dist {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long, value_enum)]
        check: DistCheck,
        /// Evaluation points `a+bi`; stieltjes defaults to twelve fixed points, kolmogorov to z = 1
        #[arg(long, value_delimiter = ',', value_parser = parse_complex, allow_hyphen_values = true)]
        z: Vec<Complex64>,
        /// Interior grid size for the cdf overlay
        #[arg(long, default_value_t = 99)]
        points: usize,
    },
    /// Exact orthogonality integrals
    Ortho {
        #[arg(long)]
        n_max: usize,
        /// Also integrate the parity product configurations (indices up to min(n_max, 10))
        #[arg(long)]
        parity: bool,
    },
    /// Lagrange weights of P_n
    Weights {
        #[arg(long)]
        n: usize,
        /// Report the weight mass inside `a,b`
        #[arg(long, value_parser = parse_interval, allow_hyphen_values = true)]
        interval: Option<(f64, f64)>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AsymptKind {
    Exterior,
    Ratio,
    Nthroot,
    Interior,
    Fubini,
    Potential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DistCheck {
    Cdf,
    Stieltjes,
    Kolmogorov,
}

pub struct RunConfig {
    pub precision: usize,
    pub width: BigRational,
    pub tol: f64,
}

fn emit(outcome: &Outcome, format: Format, out: Option<&PathBuf>) -> io::Result<()> {
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut sink, &outcome.json)?;
            writeln!(sink)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut sink);
            w.write_record(&outcome.header)?;
            for row in &outcome.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    sink.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if !(cli.tol > 0.0) {
        eprintln!("error: --tol must be positive");
        return ExitCode::from(2);
    }
    let config = RunConfig {
        precision: cli.precision as usize,
        width: cli.width,
        tol: cli.tol,
    };
    let result = match cli.command {
        Command::Gen { n } => commands::gen(n),
        Command::Zeros { n } => commands::zeros(n, &config),
        Command::Asympt { statement, z, n, x } => commands::asympt(statement, &z, &n, &x, &config),
        Command::Dist { n, check, z, points } => commands::dist(&n, check, &z, points, &config),
        Command::Ortho { n_max, parity } => commands::ortho(n_max, parity),
        Command::Weights { n, interval } => commands::weights(n, interval, &config),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::exit_code(&e));
        }
    };
    for line in &outcome.diagnostics {
        eprintln!("{line}");
    }
    if let Err(e) = emit(&outcome, cli.format, cli.out.as_ref()) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(match outcome.status {
        Status::Pass => 0,
        Status::ToleranceViolation => 1,
        Status::Inconsistent => 2,
    })
}
