//! Imperfect blockade: probability of two simultaneous excitations.
//!
//! For every site pair (i, j) the two-exciton state |2_ij⟩ is detuned by the
//! dipole-dipole shift V_ij = C₃/r_ij³ and coupled to the collective
//! single-excitation state |1⟩ with strength Ω/(2√N). With
//!
//! ```text
//! X = NΩ²/Γ²,   Y = (Ω²/N) / (V_ij² + Γ²/4)
//! ```
//!
//! two per-pair estimates are available:
//!
//! - [`PairVariant::SaturatedProduct`] (config token `eq8`):
//!   ρ₂ = X/(1+2X) · Y/(1+2Y)
//! - [`PairVariant::SubsystemSteadyState`] (config token `eq7`):
//!   ρ₂ = ρ₁₁ · (Y/4)/(1 + Y/4) with ρ₁₁ = X/(1+2X), the exact stationary
//!   point of the |1⟩–|2_ij⟩ pair equations with ρ₁₁ held at its
//!   single-excitation value.
//!
//! They differ by a factor 4(1 + Y/4)/(1 + 2Y) → 4 at small Y.
//! [`ladder_oracle`] solves the full |0⟩–|1⟩–|2⟩ ladder with the Lindblad
//! engine as an independent check.
//!
//! P_rr = Σ_{i<j} ρ₂(i, j) and g₂(0) = ½·P_rr/ρ_ee.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::emitter::{photon_rate, steady_population, EmitterParams};
use crate::exciton::{
    collective_rabi, radiative_linewidth, site_lattice, C3Source, CrystalGeometry, DriveConfig,
    ExcitonLevel, MaterialConstants,
};
use crate::lindblad::{steady_state, Jump, LindbladModel, Operator, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PairVariant {
    #[serde(rename = "eq8")]
    SaturatedProduct,
    #[serde(rename = "eq7")]
    SubsystemSteadyState,
}

impl PairVariant {
    pub const ALL: [PairVariant; 2] = [PairVariant::SaturatedProduct, PairVariant::SubsystemSteadyState];

    pub fn token(&self) -> &'static str {
        match self {
            PairVariant::SaturatedProduct => "eq8",
            PairVariant::SubsystemSteadyState => "eq7",
        }
    }
}

impl fmt::Display for PairVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for PairVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "eq8" => Ok(PairVariant::SaturatedProduct),
            "eq7" => Ok(PairVariant::SubsystemSteadyState),
            other => Err(format!("unknown variant `{other}` (expected eq8 or eq7)")),
        }
    }
}

/// Drive seen by one site pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDrive {
    /// Single-site Rabi frequency Ω, GHz.
    pub rabi_single: f64,
    pub n_sites: usize,
    /// Effective decay Γ, GHz.
    pub gamma: f64,
}

impl PairDrive {
    pub fn new(rabi_single: f64, n_sites: usize, gamma: f64) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::invalid("n_sites", format!("pairs need N ≥ 2, got {n_sites}")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::invalid("gamma", format!("must be > 0, got {gamma}")));
        }
        if !(rabi_single.is_finite() && rabi_single >= 0.0) {
            return Err(Error::invalid("rabi", format!("must be ≥ 0, got {rabi_single}")));
        }
        Ok(Self {
            rabi_single,
            n_sites,
            gamma,
        })
    }

    /// X = NΩ²/Γ² = (Ω′/Γ)².
    pub fn x(&self) -> f64 {
        self.n_sites as f64 * (self.rabi_single / self.gamma).powi(2)
    }

    /// Y = (Ω²/N)/(V² + Γ²/4).
    pub fn y(&self, v_ij: f64) -> f64 {
        (self.rabi_single.powi(2) / self.n_sites as f64)
            / (v_ij * v_ij + self.gamma * self.gamma / 4.0)
    }

    /// Single-excitation population X/(1 + 2X).
    pub fn single_population(&self) -> f64 {
        let x = self.x();
        x / (1.0 + 2.0 * x)
    }
}

/// V_ij = C₃/r³, GHz.
pub fn pair_interaction(distance: f64, c3: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::invalid("distance", format!("must be > 0, got {distance}")));
    }
    Ok(c3 / distance.powi(3))
}

pub fn pair_probability_product(drive: &PairDrive, v_ij: f64) -> f64 {
    let y = drive.y(v_ij);
    drive.single_population() * y / (1.0 + 2.0 * y)
}

pub fn pair_probability_subsystem(drive: &PairDrive, v_ij: f64) -> f64 {
    let q = drive.y(v_ij) / 4.0;
    drive.single_population() * q / (1.0 + q)
}

pub fn pair_probability(variant: PairVariant, drive: &PairDrive, v_ij: f64) -> f64 {
    match variant {
        PairVariant::SaturatedProduct => pair_probability_product(drive, v_ij),
        PairVariant::SubsystemSteadyState => pair_probability_subsystem(drive, v_ij),
    }
}

/// Exact ρ₂₂ of the three-level ladder |0⟩ ↔ |1⟩ ↔ |2⟩ with couplings
/// √N·Ω/2 and Ω/(2√N), shift V_ij on |2⟩, and decay |1⟩→|0⟩, |2⟩→|1⟩ at Γ.
pub fn ladder_oracle(drive: &PairDrive, v_ij: f64) -> Result<f64> {
    let n = drive.n_sites as f64;
    let lower = C64::new(n.sqrt() * drive.rabi_single / 2.0, 0.0);
    let upper = C64::new(drive.rabi_single / (2.0 * n.sqrt()), 0.0);
    let mut h = Operator::zeros(3);
    h.add_entry(0, 1, lower);
    h.add_entry(1, 0, lower);
    h.add_entry(1, 2, upper);
    h.add_entry(2, 1, upper);
    h.add_entry(2, 2, C64::new(v_ij, 0.0));
    let model = LindbladModel::new(
        h,
        vec![
            Jump {
                operator: Operator::transition(3, 0, 1),
                rate: drive.gamma,
            },
            Jump {
                operator: Operator::transition(3, 1, 2),
                rate: drive.gamma,
            },
        ],
    )?;
    Ok(steady_state(&model)?.population(2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairTerm {
    pub site_i: usize,
    pub site_j: usize,
    /// μm.
    pub distance: f64,
    /// GHz.
    pub v_ij: f64,
    pub rho2: f64,
}

/// Per-pair terms for all i < j, in (i, j) order.
pub fn pair_terms(
    positions: &[[f64; 3]],
    drive: &PairDrive,
    c3: f64,
    variant: PairVariant,
) -> Result<Vec<PairTerm>> {
    let rows: Vec<Result<Vec<PairTerm>>> = (0..positions.len())
        .into_par_iter()
        .map(|i| {
            let a = positions[i];
            (i + 1..positions.len())
                .map(|j| {
                    let b = positions[j];
                    let distance = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
                    let v_ij = pair_interaction(distance, c3)?;
                    Ok(PairTerm {
                        site_i: i,
                        site_j: j,
                        distance,
                        v_ij,
                        rho2: pair_probability(variant, drive, v_ij),
                    })
                })
                .collect()
        })
        .collect();
    let mut terms = Vec::new();
    for row in rows {
        terms.extend(row?);
    }
    Ok(terms)
}

/// Sum in (i, j) order.
pub fn total_double_excitation(terms: &[PairTerm]) -> f64 {
    terms.iter().map(|t| t.rho2).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockadeResult {
    pub n_sites: usize,
    pub variant: PairVariant,
    /// GHz·μm³.
    pub c3: f64,
    /// Ω′, GHz.
    pub collective_rabi: f64,
    /// Γ (Purcell-scaled), GHz.
    pub gamma: f64,
    pub rho_ee: f64,
    pub pair_terms: Vec<PairTerm>,
    pub p_rr: f64,
    /// ½·P_rr/ρ_ee; `None` when ρ_ee = 0.
    pub g2_zero: Option<f64>,
    /// ρ_ee·Γ, GHz.
    pub rate: f64,
}

/// Resonant blockade analysis of a cubic crystal.
pub fn blockade_report(
    geom: &CrystalGeometry,
    level: &ExcitonLevel,
    drive: &DriveConfig,
    mat: &MaterialConstants,
    variant: PairVariant,
    c3_source: C3Source,
) -> Result<BlockadeResult> {
    geom.validate()?;
    drive.validate()?;
    mat.validate()?;
    let lattice = site_lattice(geom, level, mat);
    let gamma = radiative_linewidth(level.n(), mat, drive.purcell);
    let c3 = c3_source.c3(level.n(), mat);
    blockade_for_sites(&lattice.positions, drive.rabi_single, gamma, c3, variant)
}

/// [`blockade_report`] on explicit site positions.
pub fn blockade_for_sites(
    positions: &[[f64; 3]],
    rabi_single: f64,
    gamma: f64,
    c3: f64,
    variant: PairVariant,
) -> Result<BlockadeResult> {
    let n_sites = positions.len();
    if n_sites == 0 {
        return Err(Error::invalid("sites", "at least one site is required"));
    }
    let omega_c = collective_rabi(rabi_single, n_sites);
    let emitter = EmitterParams::new(omega_c, gamma, 0.0)?;
    let rho_ee = steady_population(&emitter);
    let rate = photon_rate(&emitter);

    let pair_terms = if n_sites >= 2 {
        pair_terms(positions, &PairDrive::new(rabi_single, n_sites, gamma)?, c3, variant)?
    } else {
        Vec::new()
    };
    let p_rr = total_double_excitation(&pair_terms);
    let g2_zero = if n_sites == 1 {
        Some(0.0)
    } else if rho_ee > 0.0 {
        Some(0.5 * p_rr / rho_ee)
    } else {
        None
    };
    Ok(BlockadeResult {
        n_sites,
        variant,
        c3,
        collective_rabi: omega_c,
        gamma,
        rho_ee,
        pair_terms,
        p_rr,
        g2_zero,
        rate,
    })
}
