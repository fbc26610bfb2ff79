use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod demos;

/// Runs and checks split-velocity flow scenarios on a periodic cube.
#[derive(Debug, Parser)]
#[command(name = "helmsplit", version, about)]
struct Cli {
    /// Directory for run output; overrides the config's `output_dir`.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,

    /// Worker threads for the pointwise sweep (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,

    /// Replaces the seed of a random initial-velocity generator.
    #[arg(long, global = true)]
    seed_override: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, PartialEq)]
enum Command {
    /// Run the scenario described by a JSON config.
    Run {
        #[arg(value_parser = existing_file)]
        config: PathBuf,
    },
    /// Recompute the report of a finished run and compare it to the stored one.
    Validate {
        #[arg(value_parser = existing_file)]
        manifest: PathBuf,
    },
    /// Run a built-in scenario.
    Demo {
        #[arg(value_parser = demos::NAMES)]
        name: String,
    },
    /// List the built-in scenarios.
    ListDemos,
}

fn existing_file(s: &str) -> Result<PathBuf, String> {
    let p = PathBuf::from(s);
    if p.is_file() {
        Ok(p)
    } else {
        Err(format!("no such file: {s}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(commands::EXIT_RUNTIME);
        }
    }
    let opts = commands::Options {
        output_dir: cli.output_dir,
        seed_override: cli.seed_override,
    };
    let code = match cli.command {
        Command::Run { config } => commands::run_file(&config, &opts),
        Command::Validate { manifest } => commands::validate(&manifest, &opts),
        Command::Demo { name } => commands::demo(&name, &opts),
        Command::ListDemos => {
            for d in demos::DEMOS {
                println!("{:<14} {}", d.name, d.summary);
            }
            0
        }
    };
    ExitCode::from(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::error::ErrorKind;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("helmsplit").chain(args.iter().copied()))
    }

    #[test]
    fn run_takes_an_existing_path() {
        let file = tempfile::NamedTempFile::new().unwrap();
        let path = file.path().to_str().unwrap();
        let cli = parse(&["run", path, "--threads", "2"]).unwrap();
        assert_eq!(
            cli.command,
            Command::Run {
                config: file.path().to_path_buf()
            }
        );
        assert_eq!(cli.threads, Some(2));
        assert!(parse(&["run", "/no/such/config.json"]).is_err());
    }

    #[test]
    fn demo_names_are_checked() {
        let cli = parse(&["--seed-override", "7", "demo", "abc"]).unwrap();
        assert_eq!(cli.command, Command::Demo { name: "abc".into() });
        assert_eq!(cli.seed_override, Some(7));
        assert!(parse(&["demo", "kolmogorov"]).is_err());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(
            parse(&["run"]).unwrap_err().kind(),
            ErrorKind::MissingRequiredArgument
        );
        assert_eq!(parse(&[]).unwrap_err().exit_code(), 2);
        assert_eq!(
            parse(&["list-demos", "--bogus"]).unwrap_err().kind(),
            ErrorKind::UnknownArgument
        );
        assert!(parse(&["list-demos", "--threads", "0"]).is_err());
    }
}
