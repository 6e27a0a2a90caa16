mod ablate;
mod analyze;
mod args;
mod features;
mod io;
mod run;
mod synth;
mod train;

use std::process::ExitCode;

use clap::Parser;
use gmtc_core::Error;

use crate::args::{Cli, Command};

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidArgument(_) | Error::Config(_) => 1,
        Error::Numeric(_) => 3,
        _ => 2,
    }
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("GMTC_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("GMTC_THREADS must be a positive integer, got {:?}", v)))?;
        if n == 0 {
            return Err(Error::Config("GMTC_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(if cli.quiet { "warn" } else { "info" }))
        .format_timestamp(None)
        .init();

    let result = configure_threads().and_then(|_| match cli.command {
        Command::Features(a) => features::run(a),
        Command::Train(a) => train::run(a),
        Command::Ablate(a) => ablate::run(a),
        Command::Analyze(a) => analyze::run(a),
        Command::Synth(a) => synth::run(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}
