use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use iwasawa_cli::{run_command, RunConfig};
use log::error;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let config = match RunConfig::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(2),
            };
        }
    };
    match run_command(&config) {
        Ok(outcome) => {
            if config.out.is_none() {
                let mut out = std::io::stdout().lock();
                if out.write_all(outcome.rendered.as_bytes()).and_then(|_| out.flush()).is_err() {
                    return ExitCode::from(2);
                }
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
