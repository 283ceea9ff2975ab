use std::process::ExitCode;

use clap::Parser;
use poseval::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = cli
        .config
        .as_deref()
        .and_then(|p| poseval::config::RunConfig::load(p).ok())
        .map_or_else(|| "warn".to_string(), |c| c.log_level);
    env_logger::Builder::new().parse_filters(&level).parse_default_env().init();
    match cli.run() {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
