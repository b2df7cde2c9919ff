//! Scenario execution: turn a validated [`RunConfig`] into artifacts.
//!
//! `run` dispatches on the configured scenario, performs the computation,
//! optionally writes CSV and SVG artifacts into an output directory, and
//! returns a human-readable summary. Control runs report settle metrics
//! (time to band, overshoot, residual error per reference segment) and
//! trajectory runs report normalized tracking error; locus runs report
//! stability verdicts along the swept gain grid.
//!
//! Artifacts are deterministic: the same config produces byte-identical
//! files on every run. Summaries quote angles and pressures in the units
//! the config document declared; files always carry SI.

use crate::config::{ConfigError, RunConfig, Scenario, Units};
use crate::control::Reference;
use crate::dynamics::{DynamicsError, Loads, SimOutput, TimeSeries};
use crate::geometry::Geometry;
use crate::identify::{self, IdentifyError, OgdenParams};
use crate::linear::{
    classify_stability, default_gain_grid, root_locus, rotation_loop_tf, LinearError, Stability,
};
use crate::output::{self, Curve, OutputError, PlotSpec};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunnerError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Linear(#[from] LinearError),
    #[error(transparent)]
    Identify(#[from] IdentifyError),
    #[error(transparent)]
    Output(#[from] OutputError),
}

impl RunnerError {
    /// Process exit code this failure maps to: 2 for configuration
    /// problems, 3 for numerical or I/O failures at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunnerError::Config(_) => 2,
            _ => 3,
        }
    }
}

/// Where and what to write.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out_dir: PathBuf,
    pub write_csv: bool,
    pub write_svg: bool,
}

/// Everything a run produced.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub csv_paths: Vec<PathBuf>,
    pub svg_paths: Vec<PathBuf>,
    pub summary: String,
}

impl Artifacts {
    fn line(&mut self, text: &str) {
        self.summary.push_str(text);
        self.summary.push('\n');
    }
}

/// Execute a validated config.
pub fn run(config: &RunConfig, opts: &RunOptions) -> Result<Artifacts, RunnerError> {
    if opts.write_csv || opts.write_svg {
        std::fs::create_dir_all(&opts.out_dir).map_err(|source| OutputError::Io {
            path: opts.out_dir.display().to_string(),
            source,
        })?;
    }
    let mut artifacts = Artifacts::default();
    artifacts.line(&format!("scenario: {}", config.scenario.name()));
    match config.scenario {
        Scenario::ConstantPressure => run_constant_pressure(config, opts, &mut artifacts)?,
        Scenario::PidStep => run_pid_step(config, opts, &mut artifacts)?,
        Scenario::Trajectory => run_trajectory(config, opts, &mut artifacts)?,
        Scenario::RootLocus => run_root_locus(config, opts, &mut artifacts)?,
        Scenario::Identify => run_identify(config, opts, &mut artifacts)?,
        Scenario::MaterialUtil => run_material(config, opts, &mut artifacts)?,
    }
    Ok(artifacts)
}

fn angle_unit_name(units: &Units) -> &'static str {
    match units.angle {
        crate::config::AngleUnit::Rad => "rad",
        crate::config::AngleUnit::Deg => "deg",
    }
}

fn pressure_unit_name(units: &Units) -> &'static str {
    match units.pressure {
        crate::config::PressureUnit::Pa => "Pa",
        crate::config::PressureUnit::Psi => "psi",
    }
}

fn fmt_angle(units: &Units, rad: f64) -> String {
    format!("{:.4} {}", units.rad_to_angle(rad), angle_unit_name(units))
}

fn fmt_pressure(units: &Units, pa: f64) -> String {
    format!(
        "{:.4} {}",
        units.pa_to_pressure(pa),
        pressure_unit_name(units)
    )
}

fn artifact_path(opts: &RunOptions, prefix: &str, suffix: &str) -> PathBuf {
    opts.out_dir.join(format!("{prefix}_{suffix}"))
}

/// Write the time-series CSV and standard state plots for one run.
fn emit_series(
    config: &RunConfig,
    opts: &RunOptions,
    artifacts: &mut Artifacts,
    series: &TimeSeries,
) -> Result<(), RunnerError> {
    let prefix = config.output_prefix();
    if opts.write_csv {
        let path = artifact_path(opts, prefix, "timeseries.csv");
        output::write_text(&path, &output::time_series_csv(series))?;
        artifacts.csv_paths.push(path);
    }
    if opts.write_svg {
        let units = &config.units;
        let angle = angle_unit_name(units);
        let t = &series.t;
        let rotation: Vec<(f64, f64)> = t
            .iter()
            .zip(&series.phi_rad)
            .map(|(&t, &phi)| (t, units.rad_to_angle(phi)))
            .collect();
        let mut rotation_curves = vec![Curve::new("rotation", rotation)];
        if let Some(phi_d) = &series.phi_d_rad {
            let reference: Vec<(f64, f64)> = t
                .iter()
                .zip(phi_d)
                .map(|(&t, &phi)| (t, units.rad_to_angle(phi)))
                .collect();
            rotation_curves.push(Curve::new("reference", reference));
        }
        let rotation_path = artifact_path(opts, prefix, "rotation.svg");
        output::write_text(
            &rotation_path,
            &output::line_plot_svg(
                &PlotSpec::new("Rotation", "time (s)", &format!("rotation ({angle})")),
                &rotation_curves,
            ),
        )?;
        artifacts.svg_paths.push(rotation_path);

        let elongation: Vec<(f64, f64)> = t
            .iter()
            .zip(&series.s_m)
            .map(|(&t, &s)| (t, s * 1e3))
            .collect();
        let elongation_path = artifact_path(opts, prefix, "elongation.svg");
        output::write_text(
            &elongation_path,
            &output::line_plot_svg(
                &PlotSpec::new("Elongation", "time (s)", "elongation (mm)"),
                &[Curve::new("elongation", elongation)],
            ),
        )?;
        artifacts.svg_paths.push(elongation_path);

        let pressure_unit = pressure_unit_name(units);
        let pressure: Vec<(f64, f64)> = t
            .iter()
            .zip(&series.p_pa)
            .map(|(&t, &p)| (t, units.pa_to_pressure(p)))
            .collect();
        let pressure_path = artifact_path(opts, prefix, "pressure.svg");
        output::write_text(
            &pressure_path,
            &output::line_plot_svg(
                &PlotSpec::new(
                    "Supply pressure",
                    "time (s)",
                    &format!("pressure ({pressure_unit})"),
                ),
                &[Curve::new("pressure", pressure)],
            ),
        )?;
        artifacts.svg_paths.push(pressure_path);
    }
    Ok(())
}

fn run_constant_pressure(
    config: &RunConfig,
    opts: &RunOptions,
    artifacts: &mut Artifacts,
) -> Result<(), RunnerError> {
    let plant = config.plant()?;
    let pressure_pa = config.pressure_pa()?;
    let t_end = config.t_end_s.expect("validated");
    let sim = crate::dynamics::simulate_constant_pressure(
        &plant,
        pressure_pa,
        config.initial_state(),
        t_end,
        &config.solver_options(),
    )?;
    let series = sim.sample_series(config.sample_count())?;
    let last = sim.final_state();
    let (res_f, res_m) =
        crate::dynamics::static_residual(&plant, last.s_m, last.phi_rad, pressure_pa)
            .map_err(DynamicsError::from)?;
    artifacts.line(&format!(
        "pressure: {}",
        fmt_pressure(&config.units, pressure_pa)
    ));
    artifacts.line(&format!(
        "integrated {:.4} s in {} accepted steps",
        t_end, sim.solution.n_accepted
    ));
    artifacts.line(&format!(
        "final elongation: {:.6e} m, rotation: {}",
        last.s_m,
        fmt_angle(&config.units, last.phi_rad)
    ));
    artifacts.line(&format!(
        "terminal static residuals: force {res_f:.3e} N, torque {res_m:.3e} N·m"
    ));
    emit_series(config, opts, artifacts, &series)
}

/// Reference segments as (start, end, target) triples covering `[0, t_end]`.
fn reference_segments(reference: &Reference, t_end: f64) -> Vec<(f64, f64, f64)> {
    match reference {
        Reference::Constant(phi_d) => vec![(0.0, t_end, *phi_d)],
        Reference::Steps(schedule) => {
            let mut segments = Vec::new();
            let mut t_start = 0.0;
            for &(setpoint, duration) in schedule.segments() {
                let seg_end = (t_start + duration).min(t_end);
                if seg_end > t_start {
                    segments.push((t_start, seg_end, setpoint));
                }
                t_start += duration;
                if t_start >= t_end {
                    break;
                }
            }
            // The last setpoint persists beyond the scheduled horizon.
            if t_start < t_end {
                if let Some(&(setpoint, _)) = schedule.segments().last() {
                    segments.push((t_start, t_end, setpoint));
                }
            }
            segments
        }
        // Tracking references are scored by RMSD instead.
        Reference::Cubic(_) | Reference::Chained(_) => Vec::new(),
    }
}

#[derive(Debug, Clone, Copy)]
struct StepMetrics {
    target_rad: f64,
    /// Time from segment start until the response enters the band and
    /// stays inside it for the rest of the segment.
    settle_time_s: Option<f64>,
    /// Peak excursion beyond the target, in percent of the step size.
    overshoot_pct: Option<f64>,
    final_error_rad: f64,
}

/// Per-segment settle metrics for a sampled step response. The band is 2%
/// of the larger of the step size and the target magnitude.
fn step_metrics(t: &[f64], phi: &[f64], segments: &[(f64, f64, f64)]) -> Vec<StepMetrics> {
    let mut out = Vec::new();
    for &(t_start, t_end, target) in segments {
        let first = t.partition_point(|&ti| ti < t_start - 1e-12);
        let last = t.partition_point(|&ti| ti <= t_end + 1e-12);
        if first >= last {
            continue;
        }
        let range = first..last;
        let start_phi = phi[first];
        let step = target - start_phi;
        let amplitude = step.abs().max(target.abs());
        let band = if amplitude > 1e-9 {
            0.02 * amplitude
        } else {
            1e-3
        };

        let mut last_outside: Option<usize> = None;
        for i in range.clone() {
            if (phi[i] - target).abs() > band {
                last_outside = Some(i);
            }
        }
        let settle_time_s = match last_outside {
            None => Some(0.0),
            Some(i) if i + 1 < last => Some(t[i + 1] - t_start),
            Some(_) => None,
        };

        let overshoot_pct = if step.abs() > 1e-12 {
            let peak = range
                .clone()
                .map(|i| (phi[i] - target) * step.signum())
                .fold(f64::NEG_INFINITY, f64::max);
            Some((peak / step.abs() * 100.0).max(0.0))
        } else {
            None
        };

        out.push(StepMetrics {
            target_rad: target,
            settle_time_s,
            overshoot_pct,
            final_error_rad: (phi[last - 1] - target).abs(),
        });
    }
    out
}

fn closed_loop_series(config: &RunConfig) -> Result<(SimOutput, TimeSeries), RunnerError> {
    let plant = config.plant()?;
    let gains = config.gains()?;
    let reference = config.reference()?;
    let t_end = config.t_end_s.expect("validated");
    let sim = crate::dynamics::simulate_closed_loop(
        &plant,
        gains,
        reference,
        config.initial_state(),
        t_end,
        &config.solver_options(),
    )?;
    let series = sim.sample_series(config.sample_count())?;
    Ok((sim, series))
}

fn run_pid_step(
    config: &RunConfig,
    opts: &RunOptions,
    artifacts: &mut Artifacts,
) -> Result<(), RunnerError> {
    let (sim, series) = closed_loop_series(config)?;
    let reference = config.reference()?;
    let t_end = config.t_end_s.expect("validated");
    let segments = reference_segments(&reference, t_end);
    let units = &config.units;
    let gains = config.gains()?;
    artifacts.line(&format!(
        "gains: k_p {:.6e}, k_i {:.6e}, k_d {:.6e}, ceiling {}",
        gains.k_p,
        gains.k_i,
        gains.k_d,
        fmt_pressure(units, gains.p_max)
    ));
    artifacts.line(&format!(
        "integrated {:.4} s in {} accepted steps",
        t_end, sim.solution.n_accepted
    ));
    for (i, metrics) in step_metrics(&series.t, &series.phi_rad, &segments)
        .iter()
        .enumerate()
    {
        let settle = match metrics.settle_time_s {
            Some(ts) => format!("settles in {ts:.3} s"),
            None => "does not settle in segment".to_string(),
        };
        let overshoot = match metrics.overshoot_pct {
            Some(pct) => format!(", overshoot {pct:.1}%"),
            None => String::new(),
        };
        artifacts.line(&format!(
            "segment {}: target {}, {settle}{overshoot}, final error {}",
            i + 1,
            fmt_angle(units, metrics.target_rad),
            fmt_angle(units, metrics.final_error_rad)
        ));
    }
    let peak_pressure = series.p_pa.iter().copied().fold(0.0f64, f64::max);
    artifacts.line(&format!(
        "peak pressure: {}",
        fmt_pressure(units, peak_pressure)
    ));
    emit_series(config, opts, artifacts, &series)
}

fn run_trajectory(
    config: &RunConfig,
    opts: &RunOptions,
    artifacts: &mut Artifacts,
) -> Result<(), RunnerError> {
    let (sim, series) = closed_loop_series(config)?;
    let units = &config.units;
    let t_end = config.t_end_s.expect("validated");
    artifacts.line(&format!(
        "integrated {:.4} s in {} accepted steps",
        t_end, sim.solution.n_accepted
    ));
    let reference = series
        .phi_d_rad
        .as_ref()
        .expect("closed-loop series carries reference");
    let ref_max = reference.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if ref_max > 0.0 {
        let rmsd = identify::rmsd_displacement(&series.phi_rad, reference, ref_max)?;
        artifacts.line(&format!(
            "tracking RMSD: {:.3}% of peak reference {}",
            rmsd * 100.0,
            fmt_angle(units, ref_max)
        ));
    }
    let max_err = series
        .phi_rad
        .iter()
        .zip(reference)
        .map(|(&phi, &phi_d)| (phi - phi_d).abs())
        .fold(0.0f64, f64::max);
    let final_err = (series.phi_rad.last().unwrap() - reference.last().unwrap()).abs();
    artifacts.line(&format!(
        "max tracking error: {}, final error: {}",
        fmt_angle(units, max_err),
        fmt_angle(units, final_err)
    ));
    let peak_pressure = series.p_pa.iter().copied().fold(0.0f64, f64::max);
    artifacts.line(&format!(
        "peak pressure: {}",
        fmt_pressure(units, peak_pressure)
    ));
    emit_series(config, opts, artifacts, &series)
}

fn stability_word(verdict: Stability) -> &'static str {
    match verdict {
        Stability::Stable => "stable",
        Stability::Marginal => "marginal",
        Stability::Unstable => "unstable",
    }
}

fn run_root_locus(
    config: &RunConfig,
    opts: &RunOptions,
    artifacts: &mut Artifacts,
) -> Result<(), RunnerError> {
    let plant = config.plant()?;
    let gains = config.gains()?;
    let locus_cfg = config.locus.as_ref().expect("validated");
    let tf = rotation_loop_tf(&plant, &gains, locus_cfg.swept.into());
    let grid = match &locus_cfg.gains {
        Some(explicit) => explicit.clone(),
        None => default_gain_grid(locus_cfg.gain_ref.expect("validated"))?,
    };
    let locus = root_locus(&tf, &grid)?;
    artifacts.line(&format!(
        "swept gain: {:?}, {} grid points in [{:.6e}, {:.6e}]",
        locus_cfg.swept,
        grid.len(),
        grid.first().unwrap(),
        grid.last().unwrap()
    ));

    // Verdict at every grid point; report the first and each change.
    let mut previous: Option<Stability> = None;
    for (i, &k) in locus.gains.iter().enumerate() {
        let report = classify_stability(&locus.poles_at(i))?;
        if previous != Some(report.verdict) {
            let dominant = report.dominant;
            artifacts.line(&format!(
                "K = {:.6e}: {} (dominant pole {:.4} + {:.4}i, ζ = {:.4}, ωn = {:.4} rad/s)",
                k,
                stability_word(report.verdict),
                dominant.pole.re,
                dominant.pole.im,
                dominant.damping_ratio,
                dominant.natural_frequency
            ));
            previous = Some(report.verdict);
        }
    }

    let prefix = config.output_prefix();
    if opts.write_csv {
        let path = artifact_path(opts, prefix, "locus.csv");
        output::write_text(&path, &output::locus_csv(&locus))?;
        artifacts.csv_paths.push(path);
    }
    if opts.write_svg {
        let curves: Vec<Curve> = locus
            .branches
            .iter()
            .enumerate()
            .map(|(b, branch)| {
                Curve::new(
                    &format!("branch {b}"),
                    branch.iter().map(|z| (z.re, z.im)).collect(),
                )
            })
            .collect();
        let path = artifact_path(opts, prefix, "locus.svg");
        output::write_text(
            &path,
            &output::line_plot_svg(
                &PlotSpec::new("Root locus", "Re(s) (1/s)", "Im(s) (1/s)"),
                &curves,
            ),
        )?;
        artifacts.svg_paths.push(path);
    }
    Ok(())
}

fn run_identify(
    config: &RunConfig,
    opts: &RunOptions,
    artifacts: &mut Artifacts,
) -> Result<(), RunnerError> {
    let geometry: Geometry = config.geometry()?;
    let id_cfg = config.identify.as_ref().expect("validated");
    let samples = output::read_static_samples(Path::new(&id_cfg.samples_csv))?;
    artifacts.line(&format!(
        "read {} static samples from {}",
        samples.len(),
        id_cfg.samples_csv
    ));

    let mut estimates: Vec<(f64, f64, f64)> = Vec::new();
    for (i, sample) in samples.iter().enumerate() {
        let loads = Loads {
            axial_n: sample.f_n,
            torque_nm: sample.m_nm,
        };
        match identify::backout_stiffness(
            &geometry,
            &loads,
            sample.p_pa,
            sample.s_m,
            sample.phi_rad,
        ) {
            Ok((k_e, k_t)) => estimates.push((sample.p_pa, k_e, k_t)),
            Err(err) => {
                artifacts.line(&format!("sample {} skipped: {err}", i + 1));
            }
        }
    }
    let (k_e, k_t) = identify::averaged_stiffness(&estimates)?;
    artifacts.line(&format!(
        "used {} of {} samples; averaged k_e = {:.6e} N/m, k_t = {:.6e} N·m/rad",
        estimates.len(),
        samples.len(),
        k_e,
        k_t
    ));

    let prefix = config.output_prefix();
    if opts.write_csv {
        let mut csv = String::from("P_pa,k_e,k_t\n");
        for (p, k_e, k_t) in &estimates {
            let _ = writeln!(
                csv,
                "{},{},{}",
                output::format_number(*p),
                output::format_number(*k_e),
                output::format_number(*k_t)
            );
        }
        let path = artifact_path(opts, prefix, "stiffness.csv");
        output::write_text(&path, &csv)?;
        artifacts.csv_paths.push(path);
    }
    if opts.write_svg {
        let units = &config.units;
        let to_p = |p: f64| units.pa_to_pressure(p);
        let pressure_unit = pressure_unit_name(units);
        let axial: Vec<(f64, f64)> = estimates.iter().map(|&(p, k, _)| (to_p(p), k)).collect();
        let torsional: Vec<(f64, f64)> = estimates.iter().map(|&(p, _, k)| (to_p(p), k)).collect();
        for (name, label, points) in [
            ("axial_stiffness.svg", "k_e (N/m)", axial),
            ("torsional_stiffness.svg", "k_t (N·m/rad)", torsional),
        ] {
            let path = artifact_path(opts, prefix, name);
            output::write_text(
                &path,
                &output::line_plot_svg(
                    &PlotSpec::new(
                        "Identified stiffness",
                        &format!("pressure ({pressure_unit})"),
                        label,
                    ),
                    &[Curve::new(label, points)],
                ),
            )?;
            artifacts.svg_paths.push(path);
        }
    }
    Ok(())
}

fn run_material(
    config: &RunConfig,
    opts: &RunOptions,
    artifacts: &mut Artifacts,
) -> Result<(), RunnerError> {
    let material = config.material.as_ref().expect("validated");
    let units = &config.units;
    if let Some(tw) = &material.thin_wall {
        let pressure_pa = units.pressure_to_pa(tw.pressure);
        let expansion = identify::thin_wall_expansion(
            pressure_pa,
            tw.radius_m,
            tw.thickness_m,
            tw.modulus_pa,
            tw.poisson,
        );
        artifacts.line(&format!(
            "thin-wall radial expansion: {:.6e} m at {} (r = {:.4e} m, b = {:.4e} m, E = {:.4e} Pa, ν = {:.3})",
            expansion,
            fmt_pressure(units, pressure_pa),
            tw.radius_m,
            tw.thickness_m,
            tw.modulus_pa,
            tw.poisson
        ));
    }
    if let Some(og) = &material.ogden {
        let params = OgdenParams {
            mu: og.mu,
            alpha: og.alpha,
        };
        let mut csv = String::from("lambda1,lambda2,lambda3,energy_J_m3\n");
        for &[l1, l2, l3] in &og.stretches {
            let energy = identify::ogden_energy(l1, l2, l3, &params)?;
            artifacts.line(&format!(
                "ogden energy at ({l1:.6}, {l2:.6}, {l3:.6}): {energy:.6e} J/m³"
            ));
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                output::format_number(l1),
                output::format_number(l2),
                output::format_number(l3),
                output::format_number(energy)
            );
        }
        if opts.write_csv && !og.stretches.is_empty() {
            let path = artifact_path(opts, config.output_prefix(), "material.csv");
            output::write_text(&path, &csv)?;
            artifacts.csv_paths.push(path);
        }
    }
    Ok(())
}
