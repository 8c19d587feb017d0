//! Command-line front end for span-prediction sentence alignment.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

use spanalign::{Error, Result};

use crate::args::{Cli, Command};
use crate::commands::Context;
use crate::config::RunConfig;
use crate::output::OutDir;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
        }
    };
    let config = match RunConfig::resolve(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    let level = cli.log_level.clone().or_else(|| config.global.log_level.clone()).unwrap_or_else(|| "warn".into());
    let _ = env_logger::Builder::new().parse_filters(&level).format_timestamp(None).try_init();
    match execute(&cli, config) {
        Ok(()) => EXIT_OK,
        Err(e) => report(&e),
    }
}

fn report(e: &Error) -> i32 {
    eprintln!("error: {e}");
    exit_code(e)
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        Error::CapExceeded { .. } => EXIT_CAP,
        _ => EXIT_INVALID,
    }
}

fn execute(cli: &Cli, config: RunConfig) -> Result<()> {
    let threads = cli.threads.or(config.global.threads).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let root = cli.out_dir.clone().or_else(|| config.global.out_dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    let seed = cli.seed.or(config.global.seed).unwrap_or(0);
    let ctx = Context { out: OutDir::create(&root)?, config, pool, seed };
    match &cli.command {
        Command::Synth(a) => commands::synth(&ctx, a),
        Command::Score(a) => commands::score(&ctx, a),
        Command::AlignIlp(a) => commands::align_ilp_cmd(&ctx, a),
        Command::AlignSym(a) => commands::align_sym_cmd(&ctx, a),
        Command::Baseline(a) => commands::baseline_cmd(&ctx, a),
        Command::Eval(a) => commands::eval_cmd(&ctx, a),
        Command::Pipeline(a) => commands::pipeline(&ctx, a),
    }
}
