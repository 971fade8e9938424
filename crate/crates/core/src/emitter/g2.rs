use serde::Serialize;

use super::{steady_population, EmitterParams, EXCITED, GROUND};
use crate::lindblad::{evolve, steady_state, DensityMatrix, IntegratorOptions};
use crate::{Error, Result};

/// Populations below this make g₂ undefined.
const MIN_POPULATION: f64 = 1e-300;

/// Second-order correlation sampled on a delay grid (delays in 1/GHz).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct G2Curve {
    pub tau: Vec<f64>,
    pub values: Vec<f64>,
}

/// Resonance-fluorescence g₂(τ) for a resonantly driven emitter:
///
/// ```text
/// g₂(τ) = 1 − e^{−3Γτ/4} [cos(Ω_e τ) + (3Γ/4Ω_e) sin(Ω_e τ)],  Ω_e = √(Ω′² − Γ²/16)
/// ```
///
/// Below Ω′ = Γ/4 the same expression is continued with Ω_e → i|Ω_e|
/// (cosh/sinh); at Ω′ = Γ/4 it reduces to 1 − e^{−3Γτ/4}(1 + 3Γτ/4).
pub fn g2_closed_form(p: &EmitterParams, tau_grid: &[f64]) -> Result<G2Curve> {
    if p.detuning != 0.0 {
        return Err(Error::invalid(
            "detuning",
            "the closed-form g₂ holds only at resonance; use g2_numeric",
        ));
    }
    if tau_grid.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::invalid("tau grid", "delays must be ≥ 0"));
    }
    let gamma = p.gamma;
    let discriminant = p.omega_c * p.omega_c - gamma * gamma / 16.0;
    let values = tau_grid
        .iter()
        .map(|&tau| {
            let (cos_like, sin_over_freq) = oscillation(discriminant, tau);
            1.0 - (-0.75 * gamma * tau).exp() * (cos_like + 0.75 * gamma * sin_over_freq)
        })
        .collect();
    Ok(G2Curve {
        tau: tau_grid.to_vec(),
        values,
    })
}

/// (cos(ωτ), sin(ωτ)/ω) with ω² = `freq_sq`, continued analytically to
/// ω² ≤ 0.
fn oscillation(freq_sq: f64, tau: f64) -> (f64, f64) {
    let x = freq_sq * tau * tau;
    if x.abs() < 1e-8 {
        // Series through O(x²); exact at freq_sq = 0.
        let c = 1.0 - x / 2.0 + x * x / 24.0;
        let s = tau * (1.0 - x / 6.0 + x * x / 120.0);
        return (c, s);
    }
    if freq_sq > 0.0 {
        let w = freq_sq.sqrt();
        ((w * tau).cos(), (w * tau).sin() / w)
    } else {
        let w = (-freq_sq).sqrt();
        ((w * tau).cosh(), (w * tau).sinh() / w)
    }
}

/// g₂(τ) = ρ_ee(τ)|_{ρ(0)=|g⟩⟨g|} / ρ_ee(∞), both from the Lindblad engine.
/// Valid at any detuning.
pub fn g2_numeric(p: &EmitterParams, tau_grid: &[f64]) -> Result<G2Curve> {
    let model = p.lindblad_model();
    if steady_population(p) < MIN_POPULATION {
        return Err(Error::Undefined(
            "g₂ is undefined: steady-state excited population is zero".into(),
        ));
    }
    let rho_ss = steady_state(&model)?.population(EXCITED);
    if !(rho_ss >= MIN_POPULATION) {
        return Err(Error::Undefined(
            "g₂ is undefined: steady-state excited population is zero".into(),
        ));
    }
    let states = evolve(
        &model,
        &DensityMatrix::basis(2, GROUND),
        tau_grid,
        IntegratorOptions::default(),
    )?;
    Ok(G2Curve {
        tau: tau_grid.to_vec(),
        values: states
            .iter()
            .map(|s| s.population(EXCITED) / rho_ss)
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(t_max: f64, points: usize) -> Vec<f64> {
        (0..points)
            .map(|k| t_max * k as f64 / (points - 1) as f64)
            .collect()
    }

    #[test]
    fn closed_form_examples() {
        let p = EmitterParams::resonant_ratio(6.0, 1.0).unwrap();
        let curve = g2_closed_form(&p, &[0.0, 1.0, 20.0]).unwrap();
        assert!(curve.values[0].abs() < 1e-12);
        assert!((curve.values[1] - 0.563950).abs() < 1e-6);
        assert!((curve.values[2] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn critical_and_overdamped_branches() {
        let gamma = 2.0;
        let critical = EmitterParams::resonant_ratio(0.25, gamma).unwrap();
        let taus = grid(10.0, 41);
        let curve = g2_closed_form(&critical, &taus).unwrap();
        for (t, v) in taus.iter().zip(&curve.values) {
            let x = 0.75 * gamma * t;
            let limit = 1.0 - (-x).exp() * (1.0 + x);
            assert!((v - limit).abs() < 1e-12);
        }
        // Continuity across Ω′ = Γ/4.
        let below = EmitterParams::resonant_ratio(0.25 - 1e-7, gamma).unwrap();
        let above = EmitterParams::resonant_ratio(0.25 + 1e-7, gamma).unwrap();
        let lo = g2_closed_form(&below, &taus).unwrap();
        let hi = g2_closed_form(&above, &taus).unwrap();
        for ((a, b), c) in lo.values.iter().zip(&hi.values).zip(&curve.values) {
            assert!((a - c).abs() < 1e-6 && (b - c).abs() < 1e-6);
        }
    }

    #[test]
    fn closed_form_rejects_detuning() {
        let p = EmitterParams::new(1.0, 1.0, 0.5).unwrap();
        assert!(g2_closed_form(&p, &[0.0]).is_err());
    }

    #[test]
    fn numeric_matches_closed_form() {
        let taus = grid(10.0, 201);
        for (ratio, tol) in [(1.0, 1e-6), (6.0, 1e-6), (20.0, 1e-6), (0.1, 1e-5), (0.2, 1e-5)] {
            let p = EmitterParams::resonant_ratio(ratio, 1.0).unwrap();
            let a = g2_closed_form(&p, &taus).unwrap();
            let b = g2_numeric(&p, &taus).unwrap();
            let worst = a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(worst <= tol, "Ω′/Γ = {ratio}: {worst:e}");
        }
    }

    #[test]
    fn flat_start() {
        let p = EmitterParams::resonant_ratio(6.0, 1.0).unwrap();
        let h = 1e-4;
        let c = g2_closed_form(&p, &[0.0, h]).unwrap();
        // g₂(h) ≈ (Ω′²/4)h²/ρ_ee = (73/4)h², so the slope at 0 vanishes.
        assert!((c.values[1] - c.values[0]) / h < 1e-2);
        assert!(((c.values[1] / (h * h)) - 73.0 / 4.0).abs() < 0.01);
    }

    #[test]
    fn numeric_detuned_and_undriven() {
        let p = EmitterParams::new(3.0, 1.0, 2.0).unwrap();
        let curve = g2_numeric(&p, &grid(30.0, 31)).unwrap();
        assert!(curve.values[0].abs() < 1e-12);
        assert!((curve.values[30] - 1.0).abs() < 1e-4);
        let off = EmitterParams::new(0.0, 1.0, 0.0).unwrap();
        assert!(matches!(g2_numeric(&off, &[0.0, 1.0]), Err(Error::Undefined(_))));
    }
}
