//! Parameter sweeps and the operating-point report.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::blockade::{blockade_report, PairVariant};
use crate::config::{Params, SweepVariable};
use crate::exciton::{
    radiative_linewidth, site_lattice, C3Source, ExcitonLevel, OBSERVED_BLOCKADE_VOLUME_N24,
};
use crate::{Error, Result};

/// Reference values the report compares against.
pub const TARGET_RATE_GHZ: f64 = 2.0;
pub const TARGET_G2_ZERO: f64 = 0.007;
pub const TARGET_DRIVE_RATIO: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointInputs {
    /// Ω, GHz.
    pub omega_single: f64,
    /// μm.
    pub side: f64,
    pub n: u32,
    pub purcell: f64,
    pub spacing_factor: f64,
    pub variant: PairVariant,
    pub c3_source: &'static str,
    /// GHz·μm³.
    pub c3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    pub n_sites: usize,
    /// Ω′, GHz.
    pub collective_rabi: f64,
    /// GHz.
    pub gamma: f64,
    /// Ω′/Γ.
    pub ratio: f64,
    pub rho_ee: f64,
    /// GHz.
    pub rate: f64,
    pub p_rr: f64,
    pub g2_zero: Option<f64>,
}

/// Inputs and everything derived from them. Only [`operating_point`]
/// builds one, so the derived half always matches the inputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub inputs: PointInputs,
    pub derived: Derived,
}

pub fn operating_point(params: &Params) -> Result<OperatingPoint> {
    let r = blockade_report(
        &params.geometry,
        &params.level,
        &params.drive,
        &params.material,
        params.model.variant,
        params.model.c3_source,
    )?;
    Ok(OperatingPoint {
        inputs: PointInputs {
            omega_single: params.drive.rabi_single,
            side: params.geometry.side,
            n: params.level.n(),
            purcell: params.drive.purcell,
            spacing_factor: params.geometry.spacing_factor,
            variant: params.model.variant,
            c3_source: params.model.c3_source.label(),
            c3: r.c3,
        },
        derived: Derived {
            n_sites: r.n_sites,
            collective_rabi: r.collective_rabi,
            gamma: r.gamma,
            ratio: r.collective_rabi / r.gamma,
            rho_ee: r.rho_ee,
            rate: r.rate,
            p_rr: r.p_rr,
            g2_zero: r.g2_zero,
        },
    })
}

/// One sweep point. Column names are the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sweep_value: f64,
    #[serde(rename = "N")]
    pub n_sites: Option<usize>,
    #[serde(rename = "omega_collective_GHz")]
    pub omega_collective: Option<f64>,
    pub ratio: Option<f64>,
    pub rho_ee: Option<f64>,
    #[serde(rename = "rate_GHz")]
    pub rate: Option<f64>,
    #[serde(rename = "P_rr")]
    pub p_rr: Option<f64>,
    pub g2_zero: Option<f64>,
    pub error: Option<String>,
}

pub const SWEEP_HEADERS: &[&str] = &[
    "sweep_value",
    "N",
    "omega_collective_GHz",
    "ratio",
    "rho_ee",
    "rate_GHz",
    "P_rr",
    "g2_zero",
    "error",
];

impl SweepRow {
    fn from_point(value: f64, point: Result<OperatingPoint>) -> Self {
        match point {
            Ok(p) => {
                let d = p.derived;
                SweepRow {
                    sweep_value: value,
                    n_sites: Some(d.n_sites),
                    omega_collective: Some(d.collective_rabi),
                    ratio: Some(d.ratio),
                    rho_ee: Some(d.rho_ee),
                    rate: Some(d.rate),
                    p_rr: Some(d.p_rr),
                    g2_zero: d.g2_zero,
                    error: d
                        .g2_zero
                        .is_none()
                        .then(|| "g2 undefined: rho_ee = 0".to_string()),
                }
            }
            Err(e) => SweepRow {
                sweep_value: value,
                n_sites: None,
                omega_collective: None,
                ratio: None,
                rho_ee: None,
                rate: None,
                p_rr: None,
                g2_zero: None,
                error: Some(e.to_string()),
            },
        }
    }
}

/// `params` with the sweep variable set to `value`.
///
/// A `drive_ratio` value is Ω′/Γ; the single-site Ω is back-solved as
/// ratio·Γ/√N. An `n` sweep keeps Ω fixed.
pub fn apply_sweep_value(params: &Params, variable: SweepVariable, value: f64) -> Result<Params> {
    let mut p = params.clone();
    match variable {
        SweepVariable::DriveRatio => {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid("drive_ratio", format!("must be ≥ 0, got {value}")));
            }
            let n_sites = site_lattice(&p.geometry, &p.level, &p.material).n_sites();
            let gamma = radiative_linewidth(p.level.n(), &p.material, p.drive.purcell);
            p.drive.rabi_single = value * gamma / (n_sites as f64).sqrt();
        }
        SweepVariable::Side => {
            p.geometry.side = value;
            p.geometry.validate()?;
        }
        SweepVariable::N => {
            if !(value >= 1.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX)) {
                return Err(Error::invalid("level.n", format!("must be a positive integer, got {value}")));
            }
            let l = p.level.l();
            let defect = p.level.defect();
            p.level = ExcitonLevel::new(value as u32, l, defect)?;
        }
    }
    Ok(p)
}

/// One row per value of `params.sweep.values`, in input order. Failing
/// points fill the `error` column and the sweep continues.
pub fn run_sweep(params: &Params) -> Vec<SweepRow> {
    let variable = params.sweep.variable;
    params
        .sweep
        .values
        .par_iter()
        .map(|&value| {
            let point = apply_sweep_value(params, variable, value).and_then(|p| operating_point(&p));
            SweepRow::from_point(value, point)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityRow {
    pub variant: PairVariant,
    pub c3_source: &'static str,
    /// GHz·μm³.
    pub c3: f64,
    pub rho_ee: f64,
    #[serde(rename = "rate_GHz")]
    pub rate: f64,
    #[serde(rename = "P_rr")]
    pub p_rr: f64,
    pub g2_zero: Option<f64>,
}

pub const SENSITIVITY_HEADERS: &[&str] = &["variant", "c3_source", "c3", "rho_ee", "rate_GHz", "P_rr", "g2_zero"];

/// The operating point under both pair variants and both C₃ calibrations.
/// An observed-volume calibration from the config is kept; otherwise the
/// reference volume is used.
pub fn sensitivity_table(params: &Params) -> Result<Vec<SensitivityRow>> {
    let observed = match params.model.c3_source {
        C3Source::Observed(v) => v,
        C3Source::Formula => OBSERVED_BLOCKADE_VOLUME_N24,
    };
    let mut rows = Vec::with_capacity(4);
    for variant in PairVariant::ALL {
        for source in [C3Source::Formula, C3Source::Observed(observed)] {
            let mut p = params.clone();
            p.model.variant = variant;
            p.model.c3_source = source;
            let point = operating_point(&p)?;
            rows.push(SensitivityRow {
                variant,
                c3_source: source.label(),
                c3: point.inputs.c3,
                rho_ee: point.derived.rho_ee,
                rate: point.derived.rate,
                p_rr: point.derived.p_rr,
                g2_zero: point.derived.g2_zero,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub inputs: PointInputs,
    pub derived: Derived,
    pub sensitivity: Vec<SensitivityRow>,
}

pub fn operating_report(params: &Params) -> Result<Report> {
    let OperatingPoint { inputs, derived } = operating_point(params)?;
    Ok(Report {
        inputs,
        derived,
        sensitivity: sensitivity_table(params)?,
    })
}

fn deviation(achieved: f64, target: f64) -> String {
    format!("{:+.1}%", 100.0 * (achieved - target) / target)
}

/// Human-readable summary with reference comparisons.
pub fn report_summary(report: &Report) -> String {
    let (i, d) = (&report.inputs, &report.derived);
    let mut s = String::new();
    let _ = writeln!(s, "operating point");
    let _ = writeln!(
        s,
        "  n = {}  side = {} um  spacing = {}·<r_n>  Omega = {} GHz  Purcell = {}",
        i.n, i.side, i.spacing_factor, i.omega_single, i.purcell
    );
    let _ = writeln!(s, "  variant = {}  C3 ({}) = {:.4} GHz um^3", i.variant, i.c3_source, i.c3);
    let _ = writeln!(s, "  N = {}  Omega' = {:.4} GHz  Gamma = {:.4} GHz", d.n_sites, d.collective_rabi, d.gamma);
    let _ = writeln!(s, "  rho_ee = {:.6}  P_rr = {:.6e}", d.rho_ee, d.p_rr);
    let _ = writeln!(s, "comparison");
    let _ = writeln!(
        s,
        "  Omega'/Gamma  achieved {:.4}  reference {}  deviation {}",
        d.ratio,
        TARGET_DRIVE_RATIO,
        deviation(d.ratio, TARGET_DRIVE_RATIO)
    );
    let _ = writeln!(
        s,
        "  rate         achieved {:.4} GHz  reference {} GHz  deviation {}",
        d.rate,
        TARGET_RATE_GHZ,
        deviation(d.rate, TARGET_RATE_GHZ)
    );
    match d.g2_zero {
        Some(g2) => {
            let _ = writeln!(
                s,
                "  g2(0)        achieved {:.6}  reference {}  deviation {}",
                g2,
                TARGET_G2_ZERO,
                deviation(g2, TARGET_G2_ZERO)
            );
        }
        None => {
            let _ = writeln!(s, "  g2(0)        undefined (rho_ee = 0)  reference {TARGET_G2_ZERO}");
        }
    }
    let _ = writeln!(s, "g2(0) sensitivity");
    for row in &report.sensitivity {
        let g2 = row.g2_zero.map_or("undefined".to_string(), |g| format!("{g:.6}"));
        let _ = writeln!(
            s,
            "  {} / {:<8}  C3 = {:>9.4}  P_rr = {:.6e}  g2(0) = {}",
            row.variant, row.c3_source, row.c3, row.p_rr, g2
        );
    }
    s
}
