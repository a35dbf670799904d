use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use tubecat::pipeline::{self, Command, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Validate,
    Tube,
    Center,
    MpoDemo,
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Validate => Command::Validate,
            Cmd::Tube => Command::Tube,
            Cmd::Center => Command::Center,
            Cmd::MpoDemo => Command::MpoDemo,
            Cmd::Verify => Command::Verify,
        }
    }
}

/// Tube categories and Drinfeld centers of fusion categories.
#[derive(Debug, Parser)]
#[command(name = "tubecat", version)]
struct Args {
    /// Pipeline to run.
    #[arg(value_enum)]
    command: Cmd,
    /// Category file, or the name of a bundled category.
    spec: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Overrides the tolerance of the category file.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// With `tube`: only print hom space dimensions.
    #[arg(long)]
    dims: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    pipeline::configure_threads();
    let cfg = RunConfig {
        command: args.command.into(),
        spec_path: args.spec,
        seed: args.seed,
        tolerance: args.tolerance,
        out_path: args.out,
        dims: args.dims,
    };
    let outcome = pipeline::run(&cfg);
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    if cfg.command == Command::Tube && cfg.dims {
        if let Some(t) = outcome.report.sections.get("tube") {
            println!("{}", tubecat::report::canonical_json(t));
        }
    } else if cfg.out_path.is_some() {
        print!("{}", outcome.report.table());
    } else {
        eprint!("{}", outcome.report.table());
        print!("{}", outcome.report.to_json());
    }
    ExitCode::from(outcome.exit as u8)
}
