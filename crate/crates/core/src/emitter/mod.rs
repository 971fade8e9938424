//! The blockaded crystal as an effective two-level emitter.
//!
//! Basis |g⟩ = 0, |e⟩ = 1. In the frame rotating at the laser frequency the
//! Hamiltonian is H = −Δω|e⟩⟨e| + (Ω′/2)(|e⟩⟨g| + |g⟩⟨e|) and the only
//! dissipator is σ⁻ = |g⟩⟨e| at rate Γ. This reproduces
//!
//! ```text
//! ρ̇_ee = −Γρ_ee + i(Ω′/2)(ρ_eg − ρ_ge)
//! ρ̇_eg = i(Ω′/2)(ρ_ee − ρ_gg) + (−Γ/2 + iΔω)ρ_eg
//! ```

mod g2;
mod spectrum;

use serde::Serialize;

use crate::lindblad::{Jump, LindbladModel, Operator, C64};
use crate::{Error, Result};

pub use g2::{g2_closed_form, g2_numeric, G2Curve};
pub use spectrum::{default_freq_grid, emission_spectrum, Peak, SpectrumResult};

pub const GROUND: usize = 0;
pub const EXCITED: usize = 1;

/// Drive and decay of the effective emitter, all in GHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmitterParams {
    /// Collective Rabi frequency Ω′.
    pub omega_c: f64,
    /// Effective (Purcell-scaled) decay rate Γ.
    pub gamma: f64,
    /// Laser detuning Δω = ω − ω₀.
    pub detuning: f64,
}

impl EmitterParams {
    pub fn new(omega_c: f64, gamma: f64, detuning: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::invalid("gamma", format!("must be > 0, got {gamma}")));
        }
        if !(omega_c.is_finite() && omega_c >= 0.0) {
            return Err(Error::invalid("omega_c", format!("must be ≥ 0, got {omega_c}")));
        }
        if !detuning.is_finite() {
            return Err(Error::invalid("detuning", "must be finite"));
        }
        Ok(Self {
            omega_c,
            gamma,
            detuning,
        })
    }

    /// Resonant emitter with Ω′ = ratio·Γ.
    pub fn resonant_ratio(ratio: f64, gamma: f64) -> Result<Self> {
        Self::new(ratio * gamma, gamma, 0.0)
    }

    pub fn drive_ratio(&self) -> f64 {
        self.omega_c / self.gamma
    }

    pub fn lindblad_model(&self) -> LindbladModel {
        let mut h = Operator::zeros(2);
        h.add_entry(EXCITED, EXCITED, C64::new(-self.detuning, 0.0));
        h.add_entry(EXCITED, GROUND, C64::new(self.omega_c / 2.0, 0.0));
        h.add_entry(GROUND, EXCITED, C64::new(self.omega_c / 2.0, 0.0));
        LindbladModel::new(
            h,
            vec![Jump {
                operator: sigma_minus(),
                rate: self.gamma,
            }],
        )
        .expect("two-level model is Hermitian with a non-negative rate")
    }
}

/// σ⁻ = |g⟩⟨e|.
pub fn sigma_minus() -> Operator {
    Operator::transition(2, GROUND, EXCITED)
}

/// Steady excited population
/// (Ω′²/4) / (Δω² + (Γ²/4)(1 + 2Ω′²/Γ²)).
pub fn steady_population(p: &EmitterParams) -> f64 {
    let omega2 = p.omega_c * p.omega_c;
    let gamma2 = p.gamma * p.gamma;
    (omega2 / 4.0) / (p.detuning * p.detuning + gamma2 / 4.0 * (1.0 + 2.0 * omega2 / gamma2))
}

/// Power-broadened linewidth Γ√(1 + 2Ω′²/Γ²).
pub fn fwhm(p: &EmitterParams) -> f64 {
    let s = p.drive_ratio();
    p.gamma * (1.0 + 2.0 * s * s).sqrt()
}

/// Photon emission rate ρ_ee·Γ, GHz.
pub fn photon_rate(p: &EmitterParams) -> f64 {
    steady_population(p) * p.gamma
}
