use std::process::ExitCode;

use clap::Parser;
use mmv_cli::{exit_code, run, status_label, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let result = run(&cli, &mut stdout);
    let code = exit_code(&result);
    if let Err(e) = &result {
        eprintln!("error: {e:#}");
    }
    println!("status={}", status_label(code));
    ExitCode::from(code)
}
