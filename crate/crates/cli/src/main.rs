use std::process::ExitCode;

use diamond_gap_cli::{parse_config, run, ConfigError, EXIT_FAILURE};

fn main() -> ExitCode {
    let cfg = match parse_config(std::env::args_os()) {
        Ok(cfg) => cfg,
        Err(ConfigError::Clap(e)) => e.exit(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILURE as u8);
        }
    };
    let outcome = run(&cfg, &mut std::io::stdout().lock());
    ExitCode::from(outcome.exit_code as u8)
}
