//! Command-line surface for the hypothesis-testing library.
//!
//! Exit codes: 0 ok, 1 input/validation failure, 2 numerical failure,
//! 3 property-suite failure.

use clap::{Args, Parser, Subcommand, ValueEnum};

use qht::cli_io;
use qht::error::Error;
use qht::exponents::{Caps, Engine};

#[derive(Parser)]
#[command(
    name = "qht",
    about = "Quantum hypothesis testing: Renyi divergences, Hoeffding anti-divergence, cutoff rates, finite-n optimal tests",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Auto,
    Dense,
    Classical,
    Pinched,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Dense => Engine::Dense,
            EngineArg::Classical => Engine::Classical,
            EngineArg::Pinched => Engine::Pinched,
        }
    }
}

#[derive(Args)]
struct PairArg {
    /// Pair file path, or a built-in fixture name
    /// (equal_qubit, bern_half_quarter, qubit_tilted).
    #[arg(long)]
    pair: String,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sandwiched and Petz Renyi divergences and Q*_alpha on an alpha grid.
    Divergence {
        #[command(flatten)]
        common: PairArg,
        /// Comma-separated list of alpha values, each > 1.
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
    },
    /// Finite-n strong-converse exponents b_n(r) against H*_r.
    Exponent {
        #[command(flatten)]
        common: PairArg,
        /// Type-II rate r (nats).
        #[arg(long)]
        r: f64,
        /// Comma-separated schedule of copy counts.
        #[arg(long = "n-schedule", value_delimiter = ',', required = true)]
        n_schedule: Vec<usize>,
        #[arg(long, value_enum, default_value = "auto")]
        engine: EngineArg,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Hoeffding anti-divergence H*_r with audit fields.
    Hoeffding {
        #[command(flatten)]
        common: PairArg,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Generalized kappa-cutoff rate.
    Cutoff {
        #[command(flatten)]
        common: PairArg,
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Spectral binning of eta with the divergence-gap audit.
    Bin {
        #[command(flatten)]
        common: PairArg,
        /// Bin ladder parameter; ratio is 1 + 1/k.
        #[arg(long)]
        k: usize,
        /// Alphas at which to report the divergence gap.
        #[arg(long, value_delimiter = ',', default_value = "1.5,2,4")]
        alpha: Vec<f64>,
    },
    /// Run a deterministic property suite.
    Check {
        /// One of: dpi, binning, pinching, np_duality, exponents, cutoff, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Divergence { common, alpha } => {
            cli_io::cmd_divergence(&common.pair, &alpha, common.out.as_deref())?;
            Ok(0)
        }
        Command::Exponent {
            common,
            r,
            n_schedule,
            engine,
            tol,
        } => {
            cli_io::cmd_exponent(
                &common.pair,
                r,
                &n_schedule,
                engine.into(),
                tol,
                Caps::default(),
                common.out.as_deref(),
            )?;
            Ok(0)
        }
        Command::Hoeffding { common, r, tol } => {
            cli_io::cmd_hoeffding(&common.pair, r, tol, common.out.as_deref())?;
            Ok(0)
        }
        Command::Cutoff { common, kappa, tol } => {
            cli_io::cmd_cutoff(&common.pair, kappa, tol, common.out.as_deref())?;
            Ok(0)
        }
        Command::Bin { common, k, alpha } => {
            cli_io::cmd_bin(&common.pair, k, &alpha, common.out.as_deref())?;
            Ok(0)
        }
        Command::Check { suite, seed } => {
            let (results, ok) = cli_io::cmd_check(&suite, seed)?;
            for r in &results {
                let status = if r.pass { "PASS" } else { "FAIL" };
                println!("{status} {} ({})", r.name, r.detail);
            }
            println!(
                "{}: {}/{} assertions passed",
                suite,
                results.iter().filter(|r| r.pass).count(),
                results.len()
            );
            Ok(if ok { 0 } else { 3 })
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
