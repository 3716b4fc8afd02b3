//! Batch front end: configuration files, the `spectrum`, `sweep` and
//! `certify` commands, and exit-code policy.

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use faer::c64;

pub use commands::{cmd_certify, cmd_spectrum, cmd_sweep, fmt_num, sample_z_values, Meta, VERSION};
pub use config::{
    BGrid, CertifyBlock, FieldBlock, FieldShape, ModelBlock, OutputBlock, RunConfig, SweepBlock,
    SweepQuantity,
};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "magspec",
    version,
    about = "Spectral stability experiments for magnetic operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write σ(H_b) as JSON.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        b: f64,
    },
    /// Run the configured sweep and write CSV tables plus fit JSON.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Certify spectral parameters through the defect of the approximate resolvent.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
        /// Spectral parameter as `re,im`; repeatable.
        #[arg(long = "z", value_parser = parse_z, allow_hyphen_values = true)]
        z: Vec<c64>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, overriding `output.directory`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Seed, overriding the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

fn parse_z(s: &str) -> std::result::Result<c64, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|e| format!("bad real part {re:?}: {e}"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|e| format!("bad imaginary part {im:?}: {e}"))?;
    Ok(c64::new(re, im))
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let out = common
        .out
        .clone()
        .unwrap_or_else(|| cfg.output.directory.clone());
    Ok((cfg, out))
}

/// Executes a parsed command, returning the written files.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>> {
    match &cli.command {
        Command::Spectrum { common, b } => {
            let (cfg, out) = load(common)?;
            cmd_spectrum(&cfg, *b, &out)
        }
        Command::Sweep { common, workers } => {
            let (cfg, out) = load(common)?;
            cmd_sweep(&cfg, &out, *workers)
        }
        Command::Certify {
            common,
            b,
            z,
            workers,
        } => {
            let (cfg, out) = load(common)?;
            cmd_certify(&cfg, *b, z, &out, *workers)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        EXIT_NUMERIC
    } else {
        EXIT_CONFIG
    }
}

/// Runs the command, printing written paths on stdout and errors on stderr.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
