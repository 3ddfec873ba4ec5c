use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use hmqct_cli::app::Cli;
use hmqct_cli::commands;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli).and_then(|out| out.commit()) {
        Ok(text) => {
            if let Some(text) = text {
                let mut stdout = std::io::stdout().lock();
                if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                    return ExitCode::from(4);
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hmqct: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
