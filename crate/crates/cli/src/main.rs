mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use commands::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(1);
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().expect("thread pool is set once");
    }
    let result = commands::run(&cli);
    let mut stdout = std::io::stdout().lock();
    match result {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(failure) => {
            let code = failure.exit_code();
            match failure {
                Failure::Mismatch(report) => {
                    let _ = stdout.write_all(report.as_bytes());
                    eprintln!("error: series and oracle disagree");
                }
                Failure::Usage(msg) | Failure::Inadmissible(msg) => eprintln!("error: {msg}"),
            }
            ExitCode::from(code)
        }
    }
}
