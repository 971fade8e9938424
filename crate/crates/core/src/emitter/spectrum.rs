//! Resonance-fluorescence spectrum and Mollow-triplet peak analysis.
//!
//! g₁(τ) = Tr[σ⁺ e^{Lτ}(σ⁻ρ_ss)] = ⟨σ⁺(τ)σ⁻(0)⟩ comes from the regression
//! theorem. Its τ → ∞ limit |⟨σ⁻⟩|² is the coherent (elastic) part and is
//! reported as a weight. The decaying remainder is Fourier transformed with
//! the trapezoid rule on [0, 30/Γ]:
//!
//! ```text
//! S(ν) = (1/π) Re ∫₀^{τ_max} [g₁(τ) − |⟨σ⁻⟩|²] e^{−iν′τ} dτ,   ν′ = ν − Δω
//! ```
//!
//! where ν is the offset from ω₀ and ν′ the offset from the laser. With this
//! normalization ∫S dν equals the incoherent power ρ_ee − |⟨σ⁻⟩|².

use std::f64::consts::PI;

use nalgebra::{Matrix5, Vector5};
use serde::Serialize;

use super::{sigma_minus, EmitterParams};
use crate::lindblad::{correlation_with_state, steady_state, IntegratorOptions, C64};
use crate::{Error, Result};

/// Correlation window in units of 1/Γ.
const TAU_MAX_GAMMA: f64 = 30.0;
/// Peaks lower than this fraction of the tallest one are ignored.
const PEAK_THRESHOLD: f64 = 0.01;
/// Fit window half-width in estimated half-widths.
const FIT_WINDOW: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Peak {
    /// Grid frequency of the local maximum, GHz offset from ω₀.
    pub position: f64,
    /// Lorentzian center from the fit.
    pub center: f64,
    /// Fitted full width at half maximum.
    pub fwhm: f64,
    /// Spectral density at `position`.
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub freq_grid: Vec<f64>,
    pub incoherent_density: Vec<f64>,
    /// |⟨σ⁻⟩_ss|², the weight of the delta component at the laser frequency.
    pub coherent_weight: f64,
    /// ρ_ee − |⟨σ⁻⟩|², the exact incoherent power.
    pub incoherent_power: f64,
    /// Trapezoid integral of `incoherent_density` over the grid.
    pub integrated_density: f64,
    pub peaks: Vec<Peak>,
}

/// Uniform grid with step Γ/5 covering ±(Ω′ + 40Γ) around ω₀ + Δω.
pub fn default_freq_grid(p: &EmitterParams) -> Vec<f64> {
    let step = p.gamma / 5.0;
    let half_span = p.omega_c + 40.0 * p.gamma;
    let count = (half_span / step).ceil() as i64;
    (-count..=count)
        .map(|k| p.detuning + k as f64 * step)
        .collect()
}

pub fn emission_spectrum(p: &EmitterParams, freq_grid: &[f64]) -> Result<SpectrumResult> {
    if !(p.omega_c > 0.0) {
        return Err(Error::invalid("omega_c", "the spectrum needs Ω′ > 0"));
    }
    if freq_grid.len() < 3 {
        return Err(Error::invalid("frequency grid", "needs at least 3 points"));
    }
    if freq_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("frequency grid", "must be strictly ascending"));
    }
    let step = freq_grid
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    if step > p.gamma / 2.0 {
        return Err(Error::Resolution {
            step,
            half_width: p.gamma / 2.0,
        });
    }

    let model = p.lindblad_model();
    let rho_ss = steady_state(&model)?;
    let sm = sigma_minus();
    let mean_sm = rho_ss.expect(&sm);
    let coherent_weight = mean_sm.norm_sqr();
    let incoherent_power = rho_ss.population(super::EXCITED) - coherent_weight;

    let max_offset = freq_grid
        .iter()
        .map(|nu| (nu - p.detuning).abs())
        .fold(0.0, f64::max);
    let tau_max = TAU_MAX_GAMMA / p.gamma;
    let mut dt = (0.01 / p.gamma).min(0.3 / p.omega_c);
    if max_offset > 0.0 {
        dt = dt.min(0.5 / max_offset);
    }
    let samples = (tau_max / dt).ceil() as usize;
    let dt = tau_max / samples as f64;
    let taus: Vec<f64> = (0..=samples).map(|k| k as f64 * dt).collect();

    let g1 = correlation_with_state(
        &model,
        &rho_ss,
        &sm.adjoint(),
        &sm,
        &taus,
        IntegratorOptions::default(),
    )?;
    let remainder: Vec<C64> = g1.iter().map(|g| g - coherent_weight).collect();

    let incoherent_density: Vec<f64> = freq_grid
        .iter()
        .map(|&nu| {
            let omega = nu - p.detuning;
            let mut acc = C64::new(0.0, 0.0);
            for (k, (&tau, &g)) in taus.iter().zip(&remainder).enumerate() {
                let weight = if k == 0 || k == samples { 0.5 } else { 1.0 };
                acc += g * C64::from_polar(weight, -omega * tau);
            }
            (acc * dt).re / PI
        })
        .collect();

    let integrated_density = trapezoid(freq_grid, &incoherent_density);
    let peaks = find_peaks(freq_grid, &incoherent_density);
    Ok(SpectrumResult {
        freq_grid: freq_grid.to_vec(),
        incoherent_density,
        coherent_weight,
        incoherent_power,
        integrated_density,
        peaks,
    })
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| (xs[1] - xs[0]) * (ys[0] + ys[1]) / 2.0)
        .sum()
}

fn find_peaks(x: &[f64], y: &[f64]) -> Vec<Peak> {
    let tallest = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(tallest > 0.0) {
        return Vec::new();
    }
    (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1] && y[i] >= PEAK_THRESHOLD * tallest)
        .map(|i| {
            let half_width = estimate_half_width(x, y, i);
            let (center, width) = fit_lorentzian(x, y, i, half_width)
                .unwrap_or((x[i], half_width));
            Peak {
                position: x[i],
                center,
                fwhm: 2.0 * width,
                height: y[i],
            }
        })
        .collect()
}

/// Half width at half maximum by walking outward from peak `i` with linear
/// interpolation. A side that reaches a valley or the grid edge first uses
/// that distance instead.
fn estimate_half_width(x: &[f64], y: &[f64], i: usize) -> f64 {
    let half = y[i] / 2.0;
    let walk = |dir: isize| -> Option<f64> {
        let mut j = i as isize;
        loop {
            let next = j + dir;
            if next < 0 || next as usize >= y.len() {
                return None;
            }
            let (a, b) = (j as usize, next as usize);
            if y[b] <= half {
                let frac = (y[a] - half) / (y[a] - y[b]);
                return Some((x[a] + frac * (x[b] - x[a]) - x[i]).abs());
            }
            if y[b] > y[a] {
                return Some((x[a] - x[i]).abs());
            }
            j = next;
        }
    };
    match (walk(-1), walk(1)) {
        (Some(l), Some(r)) => (l + r) / 2.0,
        (Some(w), None) | (None, Some(w)) => w,
        (None, None) => (x[x.len() - 1] - x[0]) / 2.0,
    }
}

/// Least-squares fit of A·w²/((ν−c)² + w²) + b₀ + b₁(ν−ν_i) over
/// ±3 estimated half-widths around peak `i` (Levenberg–Marquardt).
/// The linear baseline absorbs the tails of neighbouring peaks.
/// Returns (c, |w|).
fn fit_lorentzian(x: &[f64], y: &[f64], i: usize, half_width: f64) -> Option<(f64, f64)> {
    let x0 = x[i];
    let window: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(xv, _)| (*xv - x0).abs() <= FIT_WINDOW * half_width)
        .map(|(&xv, &yv)| (xv - x0, yv))
        .collect();
    if window.len() < 6 {
        return None;
    }
    let scale = y[i];
    let model = |p: &Vector5<f64>, u: f64| -> (f64, Vector5<f64>) {
        let (amp, c, w, b0, b1) = (p[0], p[1], p[2], p[3], p[4]);
        let d = u - c;
        let den = d * d + w * w;
        let shape = w * w / den;
        let value = amp * shape + b0 + b1 * u;
        let grad = Vector5::new(
            shape,
            amp * 2.0 * w * w * d / (den * den),
            amp * 2.0 * w * d * d / (den * den),
            1.0,
            u,
        );
        (value, grad)
    };
    let cost = |p: &Vector5<f64>| -> f64 {
        window
            .iter()
            .map(|&(u, v)| ((model(p, u).0 - v) / scale).powi(2))
            .sum()
    };

    let mut params = Vector5::new(scale, 0.0, half_width, 0.0, 0.0);
    let mut current = cost(&params);
    let mut lambda = 1e-3;
    for _ in 0..200 {
        let mut jtj = Matrix5::<f64>::zeros();
        let mut jtr = Vector5::<f64>::zeros();
        for &(u, v) in &window {
            let (value, grad) = model(&params, u);
            let g = grad / scale;
            jtj += g * g.transpose();
            jtr += g * ((v - value) / scale);
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut damped = jtj;
            for k in 0..5 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-12);
            }
            let Some(delta) = damped.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial = params + delta;
            let trial_cost = cost(&trial);
            if trial_cost.is_finite() && trial_cost < current {
                let converged = (current - trial_cost) <= 1e-15 * current.max(1e-300);
                params = trial;
                current = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                improved = !converged;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    let width = params[2].abs();
    if !(width.is_finite() && width > 0.0 && params[0] > 0.0) {
        return None;
    }
    Some((x0 + params[1], width))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::build_liouvillian;
    use nalgebra::{DMatrix, DVector};

    /// S(ν) = (1/π) Re Tr[σ⁺ (iν′ − L)⁻¹ (σ⁻ρ − ⟨σ⁻⟩ρ)], the τ_max → ∞
    /// Laplace transform, as an independent oracle. The rank-one term
    /// |ρ_ss⟩⟨Tr| makes the system invertible at ν′ = 0 without changing the
    /// traceless solution.
    fn resolvent_spectrum(p: &EmitterParams, nu: f64) -> f64 {
        let model = p.lindblad_model();
        let liou = build_liouvillian(&model);
        let rho = steady_state(&model).unwrap();
        let sm = sigma_minus();
        let seed: DMatrix<C64> = sm.matrix() * rho.matrix() - rho.matrix() * rho.expect(&sm);
        let omega = nu - p.detuning;
        let rho_vec = DVector::from_column_slice(rho.matrix().as_slice());
        let trace_row = DVector::from_column_slice(DMatrix::<C64>::identity(2, 2).as_slice());
        let a = DMatrix::<C64>::identity(4, 4) * C64::new(0.0, omega) - liou.matrix()
            + &rho_vec * trace_row.transpose();
        let x = a.lu().solve(&DVector::from_column_slice(seed.as_slice())).unwrap();
        let x = DMatrix::from_column_slice(2, 2, x.as_slice());
        (sm.adjoint().matrix() * x).trace().re / PI
    }

    #[test]
    fn matches_resolvent_oracle() {
        for (omega_c, detuning) in [(6.0, 0.0), (2.0, 1.5), (0.5, 0.0)] {
            let p = EmitterParams::new(omega_c, 1.0, detuning).unwrap();
            let grid: Vec<f64> = (-100..=100).map(|k| k as f64 * 0.15).collect();
            let s = emission_spectrum(&p, &grid).unwrap();
            for (nu, v) in grid.iter().zip(&s.incoherent_density) {
                let exact = resolvent_spectrum(&p, *nu);
                assert!((v - exact).abs() < 1e-6, "ν = {nu}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn lorentzian_fit_recovers_synthetic_line() {
        let x: Vec<f64> = (-200..=200).map(|k| k as f64 * 0.05).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|&v| 2.0 * 0.36 / ((v - 1.3).powi(2) + 0.36) + 0.01 + 0.002 * v)
            .collect();
        let i = x.iter().position(|&v| (v - 1.3).abs() < 1e-9).unwrap();
        let (c, w) = fit_lorentzian(&x, &y, i, estimate_half_width(&x, &y, i)).unwrap();
        assert!((c - 1.3).abs() < 1e-6);
        assert!((w - 0.6).abs() < 1e-6);
    }

    #[test]
    fn mollow_triplet_at_six_gamma() {
        let gamma = 1.0;
        let p = EmitterParams::resonant_ratio(6.0, gamma).unwrap();
        let grid = default_freq_grid(&p);
        let step = grid[1] - grid[0];
        let s = emission_spectrum(&p, &grid).unwrap();
        assert_eq!(s.peaks.len(), 3);
        let expected = [-6.0, 0.0, 6.0];
        for (peak, want) in s.peaks.iter().zip(expected) {
            assert!((peak.position - want).abs() <= step * (1.0 + 1e-9));
        }
        assert!((s.peaks[1].fwhm - gamma).abs() <= 0.1 * gamma);
        for side in [&s.peaks[0], &s.peaks[2]] {
            assert!((side.fwhm - 1.5 * gamma).abs() <= 0.15 * gamma);
        }
        assert!((s.integrated_density - s.incoherent_power).abs() <= 0.02 * s.incoherent_power);
        assert!(s.incoherent_density.iter().all(|&v| v >= 0.0));
        let n = s.incoherent_density.len();
        let tallest = s.peaks[1].height;
        for k in 0..n / 2 {
            let (a, b) = (s.incoherent_density[k], s.incoherent_density[n - 1 - k]);
            assert!((a - b).abs() <= 0.01 * tallest);
        }
    }

    #[test]
    fn weak_drive_single_peak_coherent_dominates() {
        let p = EmitterParams::resonant_ratio(0.1, 1.0).unwrap();
        let s = emission_spectrum(&p, &default_freq_grid(&p)).unwrap();
        assert_eq!(s.peaks.len(), 1);
        assert!(s.peaks[0].position.abs() < 1e-9);
        assert!(s.coherent_weight > 10.0 * s.incoherent_power);
    }

    #[test]
    fn rejects_coarse_grid_and_zero_drive() {
        let p = EmitterParams::resonant_ratio(6.0, 1.0).unwrap();
        let coarse: Vec<f64> = (-20..=20).map(|k| k as f64 * 0.6).collect();
        assert!(matches!(
            emission_spectrum(&p, &coarse),
            Err(Error::Resolution { .. })
        ));
        let off = EmitterParams::new(0.0, 1.0, 0.0).unwrap();
        assert!(emission_spectrum(&off, &coarse).is_err());
    }
}
