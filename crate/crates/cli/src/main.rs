//! `p1energy`: reproducible experiments on minimal-energy measures and
//! heights, emitting CSV or JSON tables.

mod commands;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{Format, LogBase};

#[derive(Parser, Debug)]
#[command(name = "p1energy", version, about = "Minimal-energy measures on P^1 and height bounds")]
pub struct Cli {
    /// Seed for every random choice; identical seeds give identical output.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Tolerance for pass/fail decisions (identity residuals, search violations).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Show logarithmic quantities in bits.
    #[arg(long, global = true, conflicts_with = "log10")]
    pub log2: bool,
    /// Show logarithmic quantities in base-10 units.
    #[arg(long, global = true)]
    pub log10: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Field selection: the reals by default, Q_p with `--p`.
#[derive(Args, Debug, Clone)]
pub struct FieldArgs {
    /// Work over Q_p for this prime instead of the reals.
    #[arg(long)]
    pub p: Option<u64>,
    /// p-adic digits carried.
    #[arg(long, default_value_t = 32)]
    pub precision: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimal energy of the equilibrium measure, with its exact form.
    Energy {
        #[command(flatten)]
        field: FieldArgs,
        /// A prime power q; the p-adic energy for residue field size q.
        #[arg(long, conflicts_with = "p")]
        q: Option<u64>,
    },
    /// Draw points from the equilibrium measure.
    Sample {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Potential of the equilibrium measure at given points. Over Q_p this is
    /// the discrete potential of `--n` samples.
    Potential {
        #[command(flatten)]
        field: FieldArgs,
        /// Evaluation points, integers over Q_p, `inf` allowed. Defaults to
        /// `0,0.3,0.5,2,5,-7` over R and `0,1,inf` over Q_p.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<String>,
        #[arg(long, default_value_t = 20_000)]
        n: usize,
    },
    /// Discrepancy of N equilibrium samples over a doubling ladder of N.
    Converge {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, default_value_t = 20_000)]
        n_max: usize,
    },
    /// Residue-class frequencies of roots of random totally split
    /// polynomials against the equilibrium ball masses.
    Equidist {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = 500)]
        polys: usize,
        #[arg(long, default_value_t = 50)]
        coeff_max: i64,
        #[arg(long, default_value_t = 32)]
        precision: u32,
    },
    /// Weil height and basic invariants of a polynomial's roots.
    Height {
        /// Coefficients, constant term first: `-1,-1,1` is x^2 - x - 1.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Whether a polynomial splits completely at each place.
    SplitCheck {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        /// Places: primes or `inf`.
        #[arg(long, value_delimiter = ',', default_value = "inf")]
        places: Vec<String>,
    },
    /// Local discrepancy D_v of a polynomial's roots at one place.
    DiscrepancyLocal {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        /// A prime or `inf`.
        #[arg(long)]
        place: String,
        /// Digits for the Hensel-lifted cross-check at a prime.
        #[arg(long, default_value_t = 32)]
        precision: u32,
    },
    /// Lower bound for heights of numbers totally split at the given places.
    Bound {
        /// Rational primes with L_v = Q_p.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        /// Include the real place with L_v = R.
        #[arg(long)]
        arch: bool,
        /// Local data `P:e,f,N[,q]` for a finite place (N may be a fraction;
        /// q defaults to P). Repeatable.
        #[arg(long = "field-degrees")]
        field_degrees: Vec<String>,
        /// Local degree N at the archimedean place (implies `--arch`).
        #[arg(long)]
        arch_degree: Option<String>,
    },
    /// Check 2h = D_inf + sum_p D_p for one polynomial or a random corpus.
    VerifyIdentity {
        #[arg(long, allow_hyphen_values = true)]
        poly: Option<String>,
        /// Size of a random corpus (degree 2..=6, coefficients in [-5, 5]).
        #[arg(long, default_value_t = 500)]
        corpus: usize,
    },
    /// Exhaustive search for numbers totally split at the given places.
    Search {
        #[arg(long, value_delimiter = ',', default_value = "2,inf")]
        places: Vec<String>,
        #[arg(long, default_value_t = 4)]
        degree_max: usize,
        #[arg(long, default_value_t = 8)]
        coeff_max: i64,
        /// Also record discrepancies of Hensel-lifted roots at this precision.
        #[arg(long)]
        padic_precision: Option<u32>,
        /// Emit only irreducible hits with nonzero height.
        #[arg(long)]
        nontrivial_only: bool,
    },
    /// Run the acceptance checks; exit status 1 on any failure.
    AllChecks {
        /// Reduced sample sizes and search box.
        #[arg(long)]
        quick: bool,
    },
}

impl Cli {
    fn log_base(&self) -> LogBase {
        if self.log2 {
            LogBase::Two
        } else if self.log10 {
            LogBase::Ten
        } else {
            LogBase::E
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    let (table, ok) = commands::dispatch(cli)?;
    let mut out: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    table.write(&mut out, cli.format, cli.log_base())?;
    out.flush()?;
    Ok(ok)
}
