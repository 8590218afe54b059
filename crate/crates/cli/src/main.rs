mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Outcome, Suite};
use config::{parse_point, Flags, RunConfig, ScanMode};

#[derive(Debug, Parser)]
#[command(name = "tgeo", version, about = "Numerical checks for unit vector fields on spheres and their Sasaki lifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        flags: Flags,
    },
    /// Sample sectional curvatures of xi(M) and/or the unit tangent bundle.
    ScanCurvature {
        #[arg(long, value_enum)]
        mode: Option<ScanMode>,
        #[command(flatten)]
        flags: Flags,
    },
    /// Second variation of volume for the Hopf field.
    Variation {
        #[command(flatten)]
        flags: Flags,
    },
    /// Singular value decomposition of the shape operator at one point.
    Svd {
        /// Ambient coordinates, comma separated; rescaled onto the sphere.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Polar angle from the axis, for the meridian field.
        #[arg(long)]
        polar_angle: Option<f64>,
        #[command(flatten)]
        flags: Flags,
    },
}

impl Command {
    fn flags(&self) -> &Flags {
        match self {
            Command::Verify { flags, .. }
            | Command::ScanCurvature { flags, .. }
            | Command::Variation { flags }
            | Command::Svd { flags, .. } => flags,
        }
    }
}

fn config_for(cmd: &Command) -> Result<RunConfig, CliError> {
    let flags = cmd.flags();
    let file = match &flags.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let env = std::env::var("TGEO_SEED").ok();
    let mut cfg = RunConfig::resolve(flags, file.as_deref(), env.as_deref())?;
    match cmd {
        Command::ScanCurvature { mode: Some(m), .. } => cfg.mode = *m,
        Command::Svd { point, polar_angle, .. } => {
            if let Some(p) = point {
                cfg.point = Some(parse_point(p)?);
            }
            if polar_angle.is_some() {
                cfg.polar_angle = *polar_angle;
            }
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cmd: &Command) -> Result<bool, CliError> {
    let cfg = config_for(cmd)?;
    let Outcome { report, table } = match cmd {
        Command::Verify { suite, .. } => commands::verify(*suite, &cfg)?,
        Command::ScanCurvature { .. } => commands::scan_curvature(&cfg)?,
        Command::Variation { .. } => commands::variation(&cfg)?,
        Command::Svd { .. } => commands::svd(&cfg)?,
    };
    let bytes = output::render(&cfg, &report, table.as_ref())?;
    output::emit(&cfg, &bytes)?;
    eprintln!("{}", output::summary(&report));
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("tgeo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
