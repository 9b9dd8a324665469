mod commands;
mod config;
mod error;
mod format;
mod plot;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, Command};
use error::{CliError, CliResult};
use plot::OutFile;

fn write_files(dir: &std::path::Path, files: &[OutFile]) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    for f in files {
        let path = dir.join(&f.name);
        std::fs::write(&path, &f.contents).map_err(|source| CliError::Io { path, source })?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let output = match &cli.command {
        Command::Shoot(a) => commands::shoot(a)?,
        Command::Curve(a) => commands::curve(a)?,
        Command::Solution(a) => commands::solution(a)?,
        Command::Energy(a) => commands::energy(a)?,
        Command::Asymptotics(a) => commands::asymptotics(a)?,
        Command::Lambda0(c) => commands::lambda0(c)?,
        Command::Report(c) => commands::report(c)?,
    };
    write_files(&output.out_dir, &output.files)?;
    for w in &output.warnings {
        eprintln!("{w}");
    }
    let mut stdout = std::io::stdout().lock();
    // a closed pipe is not an error of the computation
    let _ = stdout.write_all(output.stdout.as_bytes());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let text = e.to_string();
                    eprintln!("{}", text.lines().next().unwrap_or("error: invalid arguments"));
                    ExitCode::from(2)
                }
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
