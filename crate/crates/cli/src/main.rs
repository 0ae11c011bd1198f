use std::process::ExitCode;

use clap::Parser;

use torint_cli::{run, write_report, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let result = run(&cli.command).and_then(|o| {
        write_report(&cli.command.common().out, &o.report)?;
        Ok(o)
    });
    match result {
        Ok(o) => {
            println!("{}", o.summary);
            ExitCode::from(o.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
