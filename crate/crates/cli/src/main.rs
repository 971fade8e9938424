use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cuprite_core::blockade::blockade_report;
use cuprite_core::config::{parse_with_overrides, OutputFormat, Params};
use cuprite_core::emit::{csv_string, json_string, table_string, write_file};
use cuprite_core::emitter::{
    default_freq_grid, emission_spectrum, fwhm, g2_closed_form, g2_numeric, photon_rate,
    steady_population, EmitterParams, EXCITED,
};
use cuprite_core::exciton::{
    blockade_radius_strong, blockade_volume, collective_rabi, mean_radius, radiative_linewidth,
    rydberg_energy, site_lattice,
};
use cuprite_core::lindblad::steady_state;
use cuprite_core::optimize::{optimize_point, OptimizeSpec};
use cuprite_core::sweep::{
    operating_report, report_summary, run_sweep, OperatingPoint, SENSITIVITY_HEADERS, SWEEP_HEADERS,
};
use cuprite_core::{Error, Result};

/// Rydberg-exciton blockade single-photon source calculator.
#[derive(Parser)]
#[command(name = "cuprite", version)]
struct Cli {
    /// Configuration file (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override a configuration key, e.g. `--set geometry.side=6`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Output format (overrides output.format).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Output file (overrides output.path); stdout when absent.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum G2Method {
    ClosedForm,
    Numeric,
}

#[derive(Subcommand)]
enum Command {
    /// Exciton scaling quantities of the configured level and crystal.
    Props,
    /// Steady state of the effective two-level emitter.
    Steady,
    /// Second-order correlation g₂(τ).
    G2 {
        /// Largest delay in units of 1/Γ.
        #[arg(long, default_value_t = 10.0)]
        tau_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long, value_enum, default_value = "closed-form")]
        method: G2Method,
    },
    /// Incoherent emission spectrum and fitted peaks.
    Spectrum,
    /// Per-pair double-excitation terms of the crystal.
    Blockade,
    /// Sweep one variable (sweep.variable over sweep.values).
    Sweep,
    /// Operating-point report with reference comparisons.
    Report,
    /// Grid search for the highest rate with g₂(0) ≤ sweep.g2_max.
    Optimize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load_params(cli: &Cli) -> Result<Params> {
    let text = match &cli.config {
        Some(path) => fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?,
        None => String::new(),
    };
    let mut params = parse_with_overrides(&text, &cli.overrides)?;
    if let Some(format) = cli.format {
        params.output.format = match format {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    if let Some(path) = &cli.output {
        params.output.path = Some(path.clone());
    }
    Ok(params)
}

fn deliver(params: &Params, text: &str) -> Result<()> {
    match &params.output.path {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emitter(params: &Params) -> Result<EmitterParams> {
    let n_sites = site_lattice(&params.geometry, &params.level, &params.material).n_sites();
    EmitterParams::new(
        collective_rabi(params.drive.rabi_single, n_sites),
        radiative_linewidth(params.level.n(), &params.material, params.drive.purcell),
        params.drive.detuning,
    )
}

#[derive(Serialize)]
struct PropsRow {
    n: u32,
    l: u32,
    defect: f64,
    mean_radius_um: f64,
    energy_ev: f64,
    gamma_bare_ghz: f64,
    gamma_ghz: f64,
    blockade_volume_um3: f64,
    c3: f64,
    pitch_um: f64,
    sites_per_axis: usize,
    #[serde(rename = "N")]
    n_sites: usize,
    omega_collective_ghz: f64,
    blockade_radius_um: Option<f64>,
}

#[derive(Serialize)]
struct SteadyRow {
    omega_collective_ghz: f64,
    gamma_ghz: f64,
    detuning_ghz: f64,
    ratio: f64,
    rho_ee: f64,
    rho_ee_engine: f64,
    fwhm_ghz: f64,
    rate_ghz: f64,
}

#[derive(Serialize)]
struct CurveRow {
    tau: f64,
    g2: f64,
}

#[derive(Serialize)]
struct DensityRow {
    nu_ghz: f64,
    density: f64,
}

#[derive(Serialize)]
struct OptimumRow {
    omega_single_ghz: f64,
    side_um: f64,
    #[serde(rename = "N")]
    n_sites: usize,
    ratio: f64,
    rho_ee: f64,
    rate_ghz: f64,
    p_rr: f64,
    g2_zero: Option<f64>,
}

impl From<&OperatingPoint> for OptimumRow {
    fn from(p: &OperatingPoint) -> Self {
        Self {
            omega_single_ghz: p.inputs.omega_single,
            side_um: p.inputs.side,
            n_sites: p.derived.n_sites,
            ratio: p.derived.ratio,
            rho_ee: p.derived.rho_ee,
            rate_ghz: p.derived.rate,
            p_rr: p.derived.p_rr,
            g2_zero: p.derived.g2_zero,
        }
    }
}

fn one_row<T: Serialize>(params: &Params, headers: &[&str], row: T) -> Result<String> {
    match params.output.format {
        OutputFormat::Csv => csv_string(headers, &[row]),
        OutputFormat::Json => json_string(&row),
    }
}

fn run(cli: Cli) -> Result<()> {
    let params = load_params(&cli)?;
    let text = match cli.command {
        Command::Props => {
            let (mat, level) = (&params.material, &params.level);
            let lattice = site_lattice(&params.geometry, level, mat);
            let omega_c = collective_rabi(params.drive.rabi_single, lattice.n_sites());
            let c3 = params.model.c3_source.c3(level.n(), mat);
            let row = PropsRow {
                n: level.n(),
                l: level.l(),
                defect: level.defect(),
                mean_radius_um: mean_radius(level, mat),
                energy_ev: rydberg_energy(level, mat),
                gamma_bare_ghz: radiative_linewidth(level.n(), mat, 1.0),
                gamma_ghz: radiative_linewidth(level.n(), mat, params.drive.purcell),
                blockade_volume_um3: blockade_volume(level.n(), mat),
                c3,
                pitch_um: lattice.pitch,
                sites_per_axis: lattice.per_axis,
                n_sites: lattice.n_sites(),
                omega_collective_ghz: omega_c,
                blockade_radius_um: blockade_radius_strong(omega_c, c3).ok(),
            };
            one_row(
                &params,
                &[
                    "n", "l", "defect", "mean_radius_um", "energy_ev", "gamma_bare_ghz", "gamma_ghz",
                    "blockade_volume_um3", "c3", "pitch_um", "sites_per_axis", "N", "omega_collective_ghz",
                    "blockade_radius_um",
                ],
                row,
            )?
        }
        Command::Steady => {
            let p = emitter(&params)?;
            let engine = steady_state(&p.lindblad_model())?.population(EXCITED);
            let row = SteadyRow {
                omega_collective_ghz: p.omega_c,
                gamma_ghz: p.gamma,
                detuning_ghz: p.detuning,
                ratio: p.drive_ratio(),
                rho_ee: steady_population(&p),
                rho_ee_engine: engine,
                fwhm_ghz: fwhm(&p),
                rate_ghz: photon_rate(&p),
            };
            one_row(
                &params,
                &[
                    "omega_collective_ghz", "gamma_ghz", "detuning_ghz", "ratio", "rho_ee", "rho_ee_engine",
                    "fwhm_ghz", "rate_ghz",
                ],
                row,
            )?
        }
        Command::G2 {
            tau_max,
            points,
            method,
        } => {
            if !(tau_max > 0.0 && tau_max.is_finite()) || points < 2 {
                return Err(Error::Config {
                    line: 0,
                    message: "--tau-max must be > 0 and --points ≥ 2".into(),
                });
            }
            let p = emitter(&params)?;
            let taus: Vec<f64> = (0..points)
                .map(|k| tau_max / p.gamma * k as f64 / (points - 1) as f64)
                .collect();
            let curve = match method {
                G2Method::ClosedForm => g2_closed_form(&p, &taus)?,
                G2Method::Numeric => g2_numeric(&p, &taus)?,
            };
            let rows: Vec<CurveRow> = curve
                .tau
                .iter()
                .zip(&curve.values)
                .map(|(&tau, &g2)| CurveRow { tau, g2 })
                .collect();
            table_string(params.output.format, &["tau", "g2"], &rows)?
        }
        Command::Spectrum => {
            let p = emitter(&params)?;
            let result = emission_spectrum(&p, &default_freq_grid(&p))?;
            for peak in &result.peaks {
                eprintln!(
                    "peak at {:+.4} GHz (fit centre {:+.4}, FWHM {:.4} GHz)",
                    peak.position, peak.center, peak.fwhm
                );
            }
            match params.output.format {
                OutputFormat::Csv => {
                    let rows: Vec<DensityRow> = result
                        .freq_grid
                        .iter()
                        .zip(&result.incoherent_density)
                        .map(|(&nu_ghz, &density)| DensityRow { nu_ghz, density })
                        .collect();
                    csv_string(&["nu_ghz", "density"], &rows)?
                }
                OutputFormat::Json => json_string(&result)?,
            }
        }
        Command::Blockade => {
            let r = blockade_report(
                &params.geometry,
                &params.level,
                &params.drive,
                &params.material,
                params.model.variant,
                params.model.c3_source,
            )?;
            let g2 = r.g2_zero.map_or("undefined".to_string(), |g| format!("{g:.6e}"));
            eprintln!("N = {}  P_rr = {:.6e}  g2(0) = {g2}  rate = {:.4} GHz", r.n_sites, r.p_rr, r.rate);
            match params.output.format {
                OutputFormat::Csv => {
                    csv_string(&["site_i", "site_j", "distance", "v_ij", "rho2"], &r.pair_terms)?
                }
                OutputFormat::Json => json_string(&r)?,
            }
        }
        Command::Sweep => table_string(params.output.format, SWEEP_HEADERS, &run_sweep(&params))?,
        Command::Report => {
            let report = operating_report(&params)?;
            let summary = report_summary(&report);
            match (&params.output.path, params.output.format) {
                (None, OutputFormat::Csv) => summary,
                (_, format) => {
                    eprint!("{summary}");
                    match format {
                        OutputFormat::Csv => csv_string(SENSITIVITY_HEADERS, &report.sensitivity)?,
                        OutputFormat::Json => json_string(&report)?,
                    }
                }
            }
        }
        Command::Optimize => {
            let best = optimize_point(&params, &OptimizeSpec::from_params(&params))?;
            eprintln!(
                "best: Omega = {} GHz, side = {} um, rate = {:.4} GHz",
                best.inputs.omega_single, best.inputs.side, best.derived.rate
            );
            match params.output.format {
                OutputFormat::Csv => csv_string(
                    &["omega_single_ghz", "side_um", "N", "ratio", "rho_ee", "rate_ghz", "p_rr", "g2_zero"],
                    &[OptimumRow::from(&best)],
                )?,
                OutputFormat::Json => json_string(&best)?,
            }
        }
    };
    deliver(&params, &text)
}
