//! `srg-cert`: frequency-wise stability certificates for MIMO feedback loops.
//!
//! Exit codes: 0 certified / passed, 2 violated or inconclusive, 1 usage or model error.

mod artifacts;
mod commands;
mod config;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BenchArgs, EquivArgs, EvalArgs, PairArgs, PlotArgs};
use config::RunFlags;

#[derive(Debug, Parser)]
#[command(name = "srg-cert", version, about = "SRG-based stability certificates for square MIMO LTI feedback loops")]
struct Cli {
    /// Worker threads; the SRG_CERT_THREADS environment variable takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(flatten)]
    run: RunFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Frequency response, spectrum and SRG cloud of one model at one frequency.
    Eval(EvalArgs),
    /// SRG separation sweep of a feedback pair.
    Check(PairArgs),
    /// Generalized Nyquist criterion and its sufficient form.
    Nyquist(PairArgs),
    /// Random-ensemble comparison of the SRG test with the Nyquist test and the eigenvalue oracle.
    Equiv(EquivArgs),
    /// Timing and scaling exponents of the separation methods.
    Bench(BenchArgs),
    /// SRG projections, SRG data and the Nyquist locus of a pair.
    Plot(PlotArgs),
}

fn thread_count(flag: Option<usize>) -> anyhow::Result<Option<usize>> {
    match std::env::var("SRG_CERT_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().map_err(|_| anyhow::anyhow!("SRG_CERT_THREADS={v:?} is not a count"))?;
            Ok(Some(n))
        }
        Err(_) => Ok(flag),
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(n) = thread_count(cli.threads)? {
        if n == 0 {
            anyhow::bail!("thread count must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match &cli.command {
        Command::Eval(a) => commands::eval(a, &cli.run),
        Command::Check(a) => commands::check(a, &cli.run),
        Command::Nyquist(a) => commands::nyquist(a, &cli.run),
        Command::Equiv(a) => commands::equiv(a, &cli.run),
        Command::Bench(a) => commands::bench(a, &cli.run),
        Command::Plot(a) => commands::plot(a, &cli.run),
    }
}

/// Numerical outcomes that mean "not certified" rather than bad input.
fn is_inconclusive(e: &anyhow::Error) -> bool {
    use srg_cert::Error;
    matches!(
        e.downcast_ref::<Error>(),
        Some(Error::PhaseStep { .. } | Error::WindingAccuracy(_) | Error::OriginProximity { .. })
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) if is_inconclusive(&e) => {
            eprintln!("inconclusive: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
