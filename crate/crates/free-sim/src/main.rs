//! Batch CLI for the FREE actuator toolkit.
//!
//! Each subcommand runs one scenario from a JSON config and writes CSV
//! and/or SVG artifacts plus a summary on stdout. Exit codes: 0 on
//! success, 2 for configuration problems (unreadable, malformed, or
//! invalid configs, or a config whose scenario does not match the
//! subcommand), 3 for numerical or I/O failures during the run.

use clap::{Args, Parser, Subcommand};
use free_sim::config::{self, AngleUnit, PressureUnit, Scenario};
use free_sim::runner::{self, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "free-sim",
    version,
    about = "Simulation and control-design toolkit for fiber-reinforced elastomeric actuators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Open-loop response at constant supply pressure.
    Simulate(RunArgs),
    /// Closed-loop rotation control against a constant or stepped setpoint.
    Pid(RunArgs),
    /// Closed-loop tracking of a cubic or chained rotation trajectory.
    Traj(RunArgs),
    /// Closed-loop pole locations along a swept controller gain.
    Rootlocus(RunArgs),
    /// Stiffness identification from a CSV of static samples.
    Identify(RunArgs),
    /// Thin-wall expansion and strain-energy utilities.
    Material(RunArgs),
}

impl Command {
    fn expected_scenario(&self) -> Scenario {
        match self {
            Command::Simulate(_) => Scenario::ConstantPressure,
            Command::Pid(_) => Scenario::PidStep,
            Command::Traj(_) => Scenario::Trajectory,
            Command::Rootlocus(_) => Scenario::RootLocus,
            Command::Identify(_) => Scenario::Identify,
            Command::Material(_) => Scenario::MaterialUtil,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Simulate(a)
            | Command::Pid(a)
            | Command::Traj(a)
            | Command::Rootlocus(a)
            | Command::Identify(a)
            | Command::Material(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory artifacts are written into (created if missing).
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Write CSV artifacts (default unless --svg is given alone).
    #[arg(long)]
    csv: bool,
    /// Write SVG plots.
    #[arg(long)]
    svg: bool,
    /// Override the config's units as ANGLE,PRESSURE (e.g. deg,psi).
    #[arg(long, value_parser = parse_units)]
    units: Option<config::Units>,
}

fn parse_units(text: &str) -> Result<config::Units, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err(format!(
            "expected ANGLE,PRESSURE (e.g. deg,psi), got '{text}'"
        ));
    }
    let angle = match parts[0].trim() {
        "deg" => AngleUnit::Deg,
        "rad" => AngleUnit::Rad,
        other => return Err(format!("unknown angle unit '{other}' (use deg or rad)")),
    };
    let pressure = match parts[1].trim() {
        "psi" => PressureUnit::Psi,
        "pa" => PressureUnit::Pa,
        other => return Err(format!("unknown pressure unit '{other}' (use psi or pa)")),
    };
    Ok(config::Units { angle, pressure })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let expected = cli.command.expected_scenario();
    let args = cli.command.args();

    let mut run_config = match config::parse_config(&args.config) {
        Ok(c) => c,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    };
    if run_config.scenario != expected {
        eprintln!(
            "error: config declares scenario '{}' but this subcommand runs '{}'",
            run_config.scenario.name(),
            expected.name()
        );
        return ExitCode::from(2);
    }
    if let Some(units) = args.units {
        run_config.units = units;
        // Re-validate: unit reinterpretation changes converted values.
        if let Err(err) = run_config.validate() {
            eprintln!("error: {err}");
            return ExitCode::from(2);
        }
    }
    if let Ok(geometry) = run_config.geometry() {
        if geometry.violates_thin_tube_assumption() {
            eprintln!(
                "warning: radius {:.4} m exceeds a tenth of length {:.4} m; \
                 the thin-tube model is a rough approximation here",
                geometry.radius_m, geometry.length_m
            );
        }
    }

    let opts = RunOptions {
        out_dir: args.out_dir.clone(),
        // CSV is the default artifact when no format flag is given.
        write_csv: args.csv || !args.svg,
        write_svg: args.svg,
    };
    match runner::run(&run_config, &opts) {
        Ok(artifacts) => {
            print!("{}", artifacts.summary);
            for path in artifacts.csv_paths.iter().chain(&artifacts.svg_paths) {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
