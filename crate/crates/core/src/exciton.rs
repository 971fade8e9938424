//! Static Rydberg-exciton properties of the cuprous-oxide yellow series.
//!
//! Everything here is a pure function of an [`ExcitonLevel`] and a
//! [`MaterialConstants`] record: mean orbital radius, binding energy,
//! radiative linewidth, blockade volume and the dipole-dipole coefficient
//! C₃ calibrated from it, the cubic site lattice that fits into a crystal,
//! and the collective Rabi frequency of a single shared excitation.
//!
//! Material constants are stored in their customary units (nm, meV, eV,
//! THz). Conversions to μm / GHz happen in the functions below, never in
//! callers.

use std::f64::consts::PI;

use serde::Serialize;

use crate::{Error, Result};

const NM_PER_UM: f64 = 1.0e3;
const GHZ_PER_THZ: f64 = 1.0e3;
const EV_PER_MEV: f64 = 1.0e-3;

/// Laser intensity (μW/mm²) at which the n = 24 single-site Rabi frequency
/// equals [`REFERENCE_RABI_GHZ`].
pub const REFERENCE_INTENSITY: f64 = 4.0;
pub const REFERENCE_RABI_GHZ: f64 = 9.0;
pub const REFERENCE_N: u32 = 24;

/// Observed blockade volume for n = 24 (μm³), an alternative C₃ calibration.
pub const OBSERVED_BLOCKADE_VOLUME_N24: f64 = 2000.0;

/// Material constants of the yellow exciton series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaterialConstants {
    /// Exciton Bohr radius a_B, nm.
    pub bohr_radius: f64,
    /// Rydberg energy Ry, meV.
    pub rydberg_energy: f64,
    /// Band gap E_g, eV.
    pub bandgap: f64,
    /// Quantum defect of the P series.
    pub defect_p: f64,
    /// Linewidth coefficient in Γ(n) = coeff·n⁻³, THz.
    pub linewidth_coeff: f64,
    /// Blockade-volume coefficient in V_B(n) = coeff·n⁷, μm³.
    pub blockade_coeff: f64,
    /// Static dielectric constant. Carried as metadata only.
    pub dielectric: f64,
}

impl Default for MaterialConstants {
    fn default() -> Self {
        Self {
            bohr_radius: 1.1,
            rydberg_energy: 92.0,
            bandgap: 2.17208,
            defect_p: 0.23,
            linewidth_coeff: 28.0,
            blockade_coeff: 3.0e-7,
            dielectric: 7.5,
        }
    }
}

impl MaterialConstants {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("material.bohr_radius", self.bohr_radius),
            ("material.rydberg_energy", self.rydberg_energy),
            ("material.bandgap", self.bandgap),
            ("material.defect_p", self.defect_p),
            ("material.linewidth_coeff", self.linewidth_coeff),
            ("material.blockade_coeff", self.blockade_coeff),
            ("material.dielectric", self.dielectric),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be > 0, got {value}")));
            }
        }
        Ok(())
    }
}

/// A Rydberg level (n, l) with its quantum defect δ_l.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcitonLevel {
    n: u32,
    l: u32,
    defect: f64,
}

impl ExcitonLevel {
    pub fn new(n: u32, l: u32, defect: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::invalid("level.n", "n ≥ 1 required"));
        }
        if l >= n {
            return Err(Error::invalid(
                "level.l",
                format!("0 ≤ l ≤ n−1 required, got l = {l} for n = {n}"),
            ));
        }
        if !defect.is_finite() || f64::from(n) - defect <= 0.0 {
            return Err(Error::invalid(
                "level.defect",
                format!("n − δ_l must be positive, got n = {n}, δ_l = {defect}"),
            ));
        }
        Ok(Self { n, l, defect })
    }

    /// The nP level with the material's P-series quantum defect.
    pub fn p_state(n: u32, mat: &MaterialConstants) -> Result<Self> {
        Self::new(n, 1, mat.defect_p)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn defect(&self) -> f64 {
        self.defect
    }
}

/// Cubic crystal and the spacing of the exciton sites inside it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrystalGeometry {
    /// Edge length, μm.
    pub side: f64,
    /// Site pitch in units of the mean exciton radius.
    pub spacing_factor: f64,
}

impl Default for CrystalGeometry {
    fn default() -> Self {
        Self {
            side: 4.0,
            spacing_factor: 2.0,
        }
    }
}

impl CrystalGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.side.is_finite() && self.side > 0.0) {
            return Err(Error::invalid("geometry.side", format!("must be > 0, got {}", self.side)));
        }
        if !(self.spacing_factor.is_finite() && self.spacing_factor > 0.0) {
            return Err(Error::invalid(
                "geometry.spacing_factor",
                format!("must be > 0, got {}", self.spacing_factor),
            ));
        }
        Ok(())
    }
}

/// Laser drive of a single site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveConfig {
    /// Single-site Rabi frequency Ω, GHz.
    pub rabi_single: f64,
    /// Laser detuning Δω, GHz.
    pub detuning: f64,
    /// Purcell enhancement of the radiative decay.
    pub purcell: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            rabi_single: REFERENCE_RABI_GHZ,
            detuning: 0.0,
            purcell: 2.0,
        }
    }
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rabi_single.is_finite() && self.rabi_single >= 0.0) {
            return Err(Error::invalid(
                "drive.rabi",
                format!("must be ≥ 0, got {}", self.rabi_single),
            ));
        }
        if !self.detuning.is_finite() {
            return Err(Error::invalid("drive.detuning", "must be finite"));
        }
        if !(self.purcell.is_finite() && self.purcell > 0.0) {
            return Err(Error::invalid(
                "drive.purcell",
                format!("must be > 0, got {}", self.purcell),
            ));
        }
        Ok(())
    }
}

/// Mean orbital radius ⟨r_n⟩ = (a_B/2)(3n² − l(l+1)), in μm.
pub fn mean_radius(level: &ExcitonLevel, mat: &MaterialConstants) -> f64 {
    let n = f64::from(level.n);
    let l = f64::from(level.l);
    mat.bohr_radius / 2.0 * (3.0 * n * n - l * (l + 1.0)) / NM_PER_UM
}

/// Level energy E_n = E_g − Ry/(n − δ_l)², in eV.
pub fn rydberg_energy(level: &ExcitonLevel, mat: &MaterialConstants) -> f64 {
    let effective_n = f64::from(level.n) - level.defect;
    mat.bandgap - mat.rydberg_energy * EV_PER_MEV / (effective_n * effective_n)
}

/// Radiative linewidth Γ(n) = purcell·coeff·n⁻³, in GHz.
pub fn radiative_linewidth(n: u32, mat: &MaterialConstants, purcell: f64) -> f64 {
    purcell * mat.linewidth_coeff * GHZ_PER_THZ / f64::from(n).powi(3)
}

/// Weak-field blockade volume V_B = coeff·n⁷, in μm³.
pub fn blockade_volume(n: u32, mat: &MaterialConstants) -> f64 {
    mat.blockade_coeff * f64::from(n).powi(7)
}

/// C₃ that reproduces `volume` as the weak-field blockade volume
/// (4π/3)·C₃/(Γ_n/2), using the bare (Purcell-free) linewidth. GHz·μm³.
pub fn c3_from_volume(volume: f64, n: u32, mat: &MaterialConstants) -> f64 {
    3.0 / (4.0 * PI) * volume * radiative_linewidth(n, mat, 1.0) / 2.0
}

/// C₃ calibrated from the closed-form blockade volume, GHz·μm³.
pub fn c3_coefficient(n: u32, mat: &MaterialConstants) -> f64 {
    c3_from_volume(blockade_volume(n, mat), n, mat)
}

/// Which blockade volume C₃ is calibrated against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum C3Source {
    /// coeff·n⁷.
    Formula,
    /// A measured blockade volume in μm³.
    Observed(f64),
}

impl C3Source {
    pub fn c3(&self, n: u32, mat: &MaterialConstants) -> f64 {
        match *self {
            C3Source::Formula => c3_coefficient(n, mat),
            C3Source::Observed(volume) => c3_from_volume(volume, n, mat),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            C3Source::Formula => "formula",
            C3Source::Observed(_) => "observed",
        }
    }
}

/// Simple cubic lattice of exciton sites inside the crystal.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteLattice {
    /// Lattice pitch, μm.
    pub pitch: f64,
    /// Sites per axis.
    pub per_axis: usize,
    /// Site coordinates, μm, in x-fastest order.
    pub positions: Vec<[f64; 3]>,
}

impl SiteLattice {
    pub fn n_sites(&self) -> usize {
        self.positions.len()
    }
}

/// Corner-anchored cubic grid with pitch `spacing_factor·⟨r_n⟩` and
/// ⌊side/pitch⌋ sites per axis (at least one).
pub fn site_lattice(
    geom: &CrystalGeometry,
    level: &ExcitonLevel,
    mat: &MaterialConstants,
) -> SiteLattice {
    let pitch = geom.spacing_factor * mean_radius(level, mat);
    let per_axis = ((geom.side / pitch).floor() as usize).max(1);
    let mut positions = Vec::with_capacity(per_axis.pow(3));
    for k in 0..per_axis {
        for j in 0..per_axis {
            for i in 0..per_axis {
                positions.push([i as f64 * pitch, j as f64 * pitch, k as f64 * pitch]);
            }
        }
    }
    SiteLattice {
        pitch,
        per_axis,
        positions,
    }
}

/// Ω′ = √N·Ω.
pub fn collective_rabi(rabi_single: f64, n_sites: usize) -> f64 {
    (n_sites as f64).sqrt() * rabi_single
}

/// Strong-field blockade radius R_b = (C₃/Ω′)^(1/3), μm.
pub fn blockade_radius_strong(collective_rabi: f64, c3: f64) -> Result<f64> {
    if !(collective_rabi > 0.0) {
        return Err(Error::invalid(
            "collective_rabi",
            "blockade radius needs a nonzero drive",
        ));
    }
    Ok((c3 / collective_rabi).cbrt())
}

/// Single-site Rabi frequency at laser intensity `intensity` (μW/mm²) for
/// level n, scaled from the 9 GHz / 4 μW/mm² / n = 24 calibration as
/// √intensity · n^(−3/2).
pub fn rabi_from_intensity(intensity: f64, n: u32) -> Result<f64> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::invalid("drive.intensity", format!("must be ≥ 0, got {intensity}")));
    }
    let n_ratio = f64::from(n) / f64::from(REFERENCE_N);
    Ok(REFERENCE_RABI_GHZ * (intensity / REFERENCE_INTENSITY).sqrt() * n_ratio.powf(-1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn mat() -> MaterialConstants {
        MaterialConstants::default()
    }

    fn p(n: u32) -> ExcitonLevel {
        ExcitonLevel::p_state(n, &mat()).unwrap()
    }

    #[test]
    fn radius_examples() {
        assert_relative_eq!(mean_radius(&p(25), &mat()), 1.03015, max_relative = 1e-12);
        let ground = ExcitonLevel::new(1, 0, 0.0).unwrap();
        assert_relative_eq!(mean_radius(&ground, &mat()), 1.65e-3, max_relative = 1e-12);
        assert_relative_eq!(mean_radius(&p(24), &mat()), 0.9493, max_relative = 1e-12);
    }

    #[test]
    fn energy_examples() {
        assert_relative_eq!(rydberg_energy(&p(24), &mat()), 2.171917, epsilon = 5e-7);
        assert_relative_eq!(rydberg_energy(&p(2), &mat()), 2.1427142, epsilon = 1e-6);
        let deep = ExcitonLevel::new(100_000, 1, 0.23).unwrap();
        assert_relative_eq!(rydberg_energy(&deep, &mat()), mat().bandgap, epsilon = 1e-11);
    }

    #[test]
    fn linewidth_examples() {
        assert_relative_eq!(radiative_linewidth(24, &mat(), 1.0), 2.025463, epsilon = 1e-6);
        assert_relative_eq!(radiative_linewidth(1, &mat(), 1.0), 28_000.0);
        assert_relative_eq!(radiative_linewidth(24, &mat(), 2.0), 4.050926, epsilon = 1e-6);
    }

    #[test]
    fn blockade_volume_and_c3() {
        assert_relative_eq!(blockade_volume(24, &mat()), 1375.9414272, max_relative = 1e-12);
        assert_relative_eq!(blockade_volume(10, &mat()), 3.0, max_relative = 1e-12);
        assert_relative_eq!(blockade_volume(1, &mat()), 3.0e-7, max_relative = 1e-12);

        assert_relative_eq!(c3_coefficient(24, &mat()), 332.6639, max_relative = 1e-6);
        assert_relative_eq!(
            C3Source::Observed(OBSERVED_BLOCKADE_VOLUME_N24).c3(24, &mat()),
            483.5437,
            max_relative = 1e-6
        );
        // n⁷·n⁻³
        assert_relative_eq!(
            c3_coefficient(20, &mat()) / c3_coefficient(10, &mat()),
            16.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn blockade_volume_round_trip() {
        for n in [2u32, 10, 24, 40] {
            let m = mat();
            let gamma = radiative_linewidth(n, &m, 1.0);
            let v = 4.0 * PI / 3.0 * c3_coefficient(n, &m) / (gamma / 2.0);
            assert_relative_eq!(v, blockade_volume(n, &m), max_relative = 1e-14);
        }
    }

    #[test]
    fn lattice_examples() {
        let geom = |side| CrystalGeometry {
            side,
            spacing_factor: 2.0,
        };
        let l4 = site_lattice(&geom(4.0), &p(24), &mat());
        assert_eq!((l4.per_axis, l4.n_sites()), (2, 8));
        assert_relative_eq!(l4.pitch, 1.8986, max_relative = 1e-12);
        assert_eq!(site_lattice(&geom(6.0), &p(24), &mat()).n_sites(), 27);
        let tiny = site_lattice(&geom(0.5), &p(24), &mat());
        assert_eq!(tiny.n_sites(), 1);
        assert_eq!(tiny.positions[0], [0.0; 3]);
    }

    #[test]
    fn collective_rabi_examples() {
        assert_relative_eq!(collective_rabi(9.0, 8), 25.455844, epsilon = 1e-6);
        assert_eq!(collective_rabi(9.0, 1), 9.0);
        assert_relative_eq!(collective_rabi(9.0, 27), 46.765372, epsilon = 1e-6);
        let ratio = collective_rabi(9.0, 8) / radiative_linewidth(24, &mat(), 2.0);
        assert!((ratio - 6.3).abs() < 0.05, "Ω′/Γ = {ratio}");
    }

    #[test]
    fn blockade_radius_examples() {
        assert_relative_eq!(blockade_radius_strong(25.46, 328.5).unwrap(), 2.3454, epsilon = 1e-3);
        assert_relative_eq!(blockade_radius_strong(7.0, 7.0).unwrap(), 1.0);
        let r1 = blockade_radius_strong(5.0, 100.0).unwrap();
        let r4 = blockade_radius_strong(20.0, 100.0).unwrap();
        assert_relative_eq!(r1 / r4, 4f64.cbrt(), max_relative = 1e-14);
        assert!(blockade_radius_strong(0.0, 100.0).is_err());
    }

    #[test]
    fn rabi_intensity_examples() {
        assert_relative_eq!(rabi_from_intensity(4.0, 24).unwrap(), 9.0);
        assert_relative_eq!(rabi_from_intensity(16.0, 24).unwrap(), 18.0);
        assert_relative_eq!(rabi_from_intensity(4.0, 12).unwrap(), 25.4558441, epsilon = 1e-6);
        assert!(rabi_from_intensity(-1.0, 24).is_err());
    }

    #[test]
    fn level_invariants() {
        assert!(ExcitonLevel::new(0, 0, 0.0).is_err());
        assert!(ExcitonLevel::new(3, 3, 0.0).is_err());
        assert!(ExcitonLevel::new(1, 0, 1.0).is_err());
        assert!(ExcitonLevel::new(2, 1, 0.23).is_ok());
        let mut bad = mat();
        bad.bohr_radius = 0.0;
        assert!(bad.validate().is_err());
        assert!(CrystalGeometry { side: -1.0, spacing_factor: 2.0 }.validate().is_err());
        assert!(DriveConfig { purcell: 0.0, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn blockade_to_size_ratio_grows_with_n() {
        let ratio = |n| blockade_volume(n, &mat()) / mean_radius(&p(n), &mat()).powi(3);
        assert!(ratio(24) > ratio(12));
    }

    proptest! {
        #[test]
        fn radius_monotone(n in 2u32..200, l in 0u32..50) {
            let l = l.min(n - 2);
            let a = ExcitonLevel::new(n, l, 0.0).unwrap();
            let b = ExcitonLevel::new(n + 1, l, 0.0).unwrap();
            let c = ExcitonLevel::new(n, l + 1, 0.0).unwrap();
            prop_assert!(mean_radius(&b, &mat()) > mean_radius(&a, &mat()));
            prop_assert!(mean_radius(&c, &mat()) < mean_radius(&a, &mat()));
        }

        #[test]
        fn energy_monotone_and_bounded(n in 2u32..500) {
            let e0 = rydberg_energy(&p(n), &mat());
            let e1 = rydberg_energy(&p(n + 1), &mat());
            prop_assert!(e1 > e0);
            prop_assert!(e1 < mat().bandgap);
        }

        #[test]
        fn lattice_properties(side in 0.1f64..12.0, f1 in 0.5f64..4.0, df in 0.0f64..2.0) {
            let lvl = p(24);
            let a = site_lattice(&CrystalGeometry { side, spacing_factor: f1 }, &lvl, &mat());
            let b = site_lattice(&CrystalGeometry { side, spacing_factor: f1 + df }, &lvl, &mat());
            prop_assert_eq!(a.n_sites(), a.per_axis.pow(3));
            prop_assert!(b.n_sites() <= a.n_sites());
            if a.n_sites() <= 64 {
                for (i, x) in a.positions.iter().enumerate() {
                    for y in &a.positions[i + 1..] {
                        let d = ((x[0]-y[0]).powi(2) + (x[1]-y[1]).powi(2) + (x[2]-y[2]).powi(2)).sqrt();
                        prop_assert!(d >= a.pitch * (1.0 - 1e-12));
                    }
                }
            }
        }

        #[test]
        fn collective_rabi_scaling(omega in 0.0f64..100.0, n in 1usize..100, a in 1usize..10) {
            let lhs = collective_rabi(omega, a * a * n);
            let rhs = a as f64 * collective_rabi(omega, n);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }
    }
}
