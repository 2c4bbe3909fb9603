//! `iwasawa`: analyse complexes over the Iwasawa algebra, evaluate p-adic L-functions and
//! run the self-test suites.
//!
//! Exit status: 0 when every asserted identity holds, 1 when one fails, 2 for bad input,
//! 3 for other computational errors (precision exhausted, non-semisimple input, ...).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::RunConfig;
use output::{envelope, error_code, error_envelope, OutputMode, Report};

#[derive(Parser, Debug)]
#[command(name = "iwasawa", version, about = "Leading terms, Bockstein complexes and p-adic L-functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// The prime p (overrides the value in a complex document).
    #[arg(long, global = true)]
    prime: Option<u64>,
    /// p-adic precision N [default: 30].
    #[arg(long = "p-prec", global = true)]
    p_prec: Option<u32>,
    /// T-adic precision M [default: 40].
    #[arg(long = "t-prec", global = true)]
    t_prec: Option<usize>,
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    /// Trials per suite, replacing each suite's own count.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Finite set of primes S, comma separated; p is always added.
    #[arg(long = "S", global = true, value_delimiter = ',')]
    s_set: Option<Vec<u64>>,
    #[arg(long, global = true, value_enum, default_value_t = OutputMode::Text)]
    output: OutputMode,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hypertor, Bockstein maps, semisimplicity, leading terms and Euler characteristics.
    Analyze {
        file: PathBuf,
        /// Also split the complex over the DVR Λ_(T).
        #[arg(long)]
        dvr: bool,
    },
    /// Splits a complex over Λ_(T) into [R --1--> R] and [R --T--> R].
    Decompose { file: PathBuf },
    /// Evaluates L_{p,S}(s, χ).
    Lp {
        /// e.g. "mod=1", "mod=8; kind=quadratic", "mod=5; kind=omega^2", "d=12".
        #[arg(long)]
        chi: String,
        /// An element of Z_p given as an integer or fraction.
        #[arg(long, allow_hyphen_values = true)]
        s: String,
    },
    /// Residue / class-number-formula checks at s = 1.
    Stark {
        /// "Q", a catalogue label such as "Q(sqrt5)", or a field data file.
        #[arg(long)]
        field: String,
    },
    /// Runs the acceptance suites.
    Selftest {
        /// Run only these suites (1-9); repeatable.
        #[arg(long = "suite")]
        suites: Vec<u32>,
        #[arg(long)]
        parallel: bool,
        /// Drop the sign correction in the Bockstein route (negative control).
        #[arg(long = "corrupt-sign")]
        corrupt_sign: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Analyze { .. } => "analyze",
            Command::Decompose { .. } => "decompose",
            Command::Lp { .. } => "lp",
            Command::Stark { .. } => "stark",
            Command::Selftest { .. } => "selftest",
        }
    }
}

fn run(cmd: &Command, cfg: &RunConfig) -> iwasawa_descent::Result<Report> {
    cfg.check()?;
    match cmd {
        Command::Analyze { file, dvr } => commands::analyze(file, *dvr, cfg),
        Command::Decompose { file } => commands::decompose(file, cfg),
        Command::Lp { chi, s } => commands::lp(chi, s, cfg),
        Command::Stark { field } => commands::stark(field, cfg),
        Command::Selftest { suites, parallel, corrupt_sign } => commands::selftest(suites, *parallel, *corrupt_sign, cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig {
        prime: cli.prime,
        p_prec: cli.p_prec,
        t_prec: cli.t_prec,
        seed: cli.seed,
        trials: cli.trials,
        s_set: cli.s_set.clone(),
    };
    let name = cli.command.name();
    match run(&cli.command, &cfg) {
        Ok(report) => {
            match cli.output {
                OutputMode::Text => {
                    for l in &report.text {
                        println!("{l}");
                    }
                }
                OutputMode::Json => {
                    let doc = envelope(name, cfg.to_json(), report.json, report.ok);
                    println!("{}", serde_json::to_string_pretty(&doc).expect("reports serialise"));
                }
            }
            ExitCode::from(if report.ok { 0 } else { 1 })
        }
        Err(e) => {
            if cli.output == OutputMode::Json {
                println!("{}", serde_json::to_string_pretty(&error_envelope(name, cfg.to_json(), &e)).expect("reports serialise"));
            }
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e) as u8)
        }
    }
}
