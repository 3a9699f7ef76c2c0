use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use polarlab_cli::commands::parse_llrs;
use polarlab_cli::{cmd_codec, cmd_construct, cmd_simulate, cmd_wmin, CodecInput, RunConfig};

#[derive(Parser)]
#[command(name = "polarlab", version, about = "Polar-family code construction, analysis and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the rate profile for the configured code.
    Construct { config: PathBuf },
    /// Minimum weight and error coefficient per scheme.
    Wmin { config: PathBuf },
    /// BLER/BER sweep over the configured SNR grid.
    Simulate {
        config: PathBuf,
        /// Suppress per-point progress on stderr.
        #[arg(short, long)]
        quiet: bool,
    },
    /// Encode a data word and print every stage.
    Codec {
        config: PathBuf,
        /// Data word in hex (MSB first) or binary with a 0b prefix.
        data: String,
        /// Decode noiseless BPSK LLRs of this magnitude.
        #[arg(long, conflicts_with = "llr")]
        decode: Option<f64>,
        /// Decode LLRs read from this file.
        #[arg(long)]
        llr: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Construct { config } => {
            let path = cmd_construct(&RunConfig::load(&config)?)?;
            println!("{}", path.display());
        }
        Command::Wmin { config } => {
            let (path, reports) = cmd_wmin(&RunConfig::load(&config)?)?;
            for r in &reports {
                print!("{}", r.to_table());
            }
            println!("{}", path.display());
        }
        Command::Simulate { config, quiet } => {
            let cfg = RunConfig::load(&config)?;
            let path = cmd_simulate(&cfg, |row| {
                if !quiet {
                    eprintln!("{row}");
                }
            })?;
            println!("{}", path.display());
        }
        Command::Codec {
            config,
            data,
            decode,
            llr,
        } => {
            let input = match (decode, llr) {
                (Some(a), _) => CodecInput::Noiseless(a),
                (None, Some(p)) => CodecInput::Llrs(parse_llrs(&std::fs::read_to_string(p)?)?),
                (None, None) => CodecInput::EncodeOnly,
            };
            let (_, trace) = cmd_codec(&RunConfig::load(&config)?, &data, input)?;
            print!("{trace}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("polarlab: {e:#}");
            ExitCode::FAILURE
        }
    }
}
