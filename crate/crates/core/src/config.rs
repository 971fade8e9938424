//! Flat `section.key = value` configuration.
//!
//! ```text
//! # comment
//! level.n = 24
//! geometry.side = 4      # μm
//! model.variant = eq7
//! sweep.values = 1, 2, 6
//! ```
//!
//! Missing keys take the defaults of the operating point: n = 24 (P state),
//! side 4 μm, spacing factor 2, Ω = 9 GHz, Purcell factor 2, variant `eq8`,
//! formula C₃.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::blockade::PairVariant;
use crate::exciton::{
    rabi_from_intensity, C3Source, CrystalGeometry, DriveConfig, ExcitonLevel, MaterialConstants,
    OBSERVED_BLOCKADE_VOLUME_N24,
};
use crate::{Error, Result};

pub const KEYS: &[&str] = &[
    "material.bohr_radius",
    "material.rydberg_energy",
    "material.bandgap",
    "material.defect_p",
    "material.linewidth_coeff",
    "material.blockade_coeff",
    "material.dielectric",
    "level.n",
    "level.l",
    "level.defect",
    "geometry.side",
    "geometry.spacing_factor",
    "drive.rabi",
    "drive.intensity",
    "drive.detuning",
    "drive.purcell",
    "model.variant",
    "model.c3_source",
    "model.observed_volume",
    "sweep.variable",
    "sweep.values",
    "sweep.start",
    "sweep.stop",
    "sweep.points",
    "sweep.g2_max",
    "sweep.rabi_min",
    "sweep.rabi_max",
    "sweep.side_min",
    "sweep.side_max",
    "sweep.grid",
    "output.format",
    "output.path",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    DriveRatio,
    Side,
    N,
}

impl FromStr for SweepVariable {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "drive_ratio" => Ok(SweepVariable::DriveRatio),
            "side" => Ok(SweepVariable::Side),
            "n" => Ok(SweepVariable::N),
            other => Err(format!("unknown sweep variable `{other}` (expected drive_ratio, side or n)")),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::DriveRatio => "drive_ratio",
            SweepVariable::Side => "side",
            SweepVariable::N => "n",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelConfig {
    pub variant: PairVariant,
    pub c3_source: C3Source,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    /// Strictly ascending, non-empty.
    pub values: Vec<f64>,
    pub g2_max: f64,
    pub rabi_min: f64,
    pub rabi_max: f64,
    pub side_min: f64,
    pub side_max: f64,
    /// Points per axis of the optimizer grid.
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputConfig {
    pub format: OutputFormat,
    pub path: Option<PathBuf>,
}

/// Fully validated parameter record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    pub material: MaterialConstants,
    pub level: ExcitonLevel,
    pub geometry: CrystalGeometry,
    pub drive: DriveConfig,
    pub model: ModelConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

impl Default for Params {
    fn default() -> Self {
        parse_config("").expect("defaults are valid")
    }
}

/// Parse a configuration file.
pub fn parse_config(text: &str) -> Result<Params> {
    parse_with_overrides::<&str>(text, &[])
}

/// Parse a configuration file, then apply `section.key=value` overrides.
/// Override errors are reported as line 0.
pub fn parse_with_overrides<S: AsRef<str>>(text: &str, overrides: &[S]) -> Result<Params> {
    let mut entries = Entries::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = split_assignment(content).ok_or_else(|| Error::Config {
            line,
            message: format!("expected `section.key = value`, got `{content}`"),
        })?;
        entries.insert(key, value, line)?;
    }
    for assignment in overrides {
        let assignment = assignment.as_ref();
        let (key, value) = split_assignment(assignment).ok_or_else(|| Error::Config {
            line: 0,
            message: format!("override `{assignment}` is not `section.key=value`"),
        })?;
        entries.set(key, value, 0)?;
    }
    entries.build()
}

fn split_assignment(s: &str) -> Option<(&str, &str)> {
    let (key, value) = s.split_once('=')?;
    let (key, value) = (key.trim(), value.trim());
    if key.is_empty() || value.is_empty() {
        return None;
    }
    Some((key, value))
}

#[derive(Default)]
struct Entries {
    map: BTreeMap<&'static str, (String, usize)>,
}

impl Entries {
    fn canonical(key: &str, line: usize) -> Result<&'static str> {
        KEYS.iter().copied().find(|k| *k == key).ok_or_else(|| Error::Config {
            line,
            message: format!("unknown key `{key}`"),
        })
    }

    fn insert(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let key = Self::canonical(key, line)?;
        if let Some((_, first)) = self.map.get(key) {
            return Err(Error::Config {
                line,
                message: format!("duplicate key `{key}` (first set on line {first})"),
            });
        }
        self.map.insert(key, (value.to_string(), line));
        Ok(())
    }

    fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let key = Self::canonical(key, line)?;
        self.map.insert(key, (value.to_string(), line));
        Ok(())
    }

    fn line_of(&self, key: &str) -> usize {
        if let Some((_, line)) = self.map.get(key) {
            return *line;
        }
        let section = key.split('.').next().unwrap_or(key);
        self.map
            .iter()
            .filter(|(k, _)| k.split('.').next() == Some(section))
            .map(|(_, (_, line))| *line)
            .max()
            .unwrap_or(0)
    }

    fn parsed<T: FromStr>(&self, key: &'static str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some((value, line)) => value.parse().map(Some).map_err(|e| Error::Config {
                line: *line,
                message: format!("`{key}`: cannot parse `{value}`: {e}"),
            }),
        }
    }

    fn number(&self, key: &'static str, default: f64) -> Result<f64> {
        let value = self.parsed::<f64>(key)?.unwrap_or(default);
        if !value.is_finite() {
            return Err(Error::Config {
                line: self.line_of(key),
                message: format!("`{key}` must be finite"),
            });
        }
        Ok(value)
    }

    fn list(&self, key: &'static str) -> Result<Option<Vec<f64>>> {
        let Some((value, line)) = self.map.get(key) else {
            return Ok(None);
        };
        value
            .split(',')
            .map(|item| {
                let item = item.trim();
                item.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| Error::Config {
                    line: *line,
                    message: format!("`{key}`: cannot parse `{item}` as a number"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    /// Re-tag a validation failure with the line of the offending key.
    fn locate(&self, err: Error) -> Error {
        match err {
            Error::InvalidParameter { name, reason } => Error::Config {
                line: self.line_of(name),
                message: format!("invalid {name}: {reason}"),
            },
            other => other,
        }
    }

    fn violation(&self, key: &'static str, message: impl Into<String>) -> Error {
        Error::Config {
            line: self.line_of(key),
            message: format!("invalid {key}: {}", message.into()),
        }
    }

    fn build(&self) -> Result<Params> {
        let d = MaterialConstants::default();
        let material = MaterialConstants {
            bohr_radius: self.number("material.bohr_radius", d.bohr_radius)?,
            rydberg_energy: self.number("material.rydberg_energy", d.rydberg_energy)?,
            bandgap: self.number("material.bandgap", d.bandgap)?,
            defect_p: self.number("material.defect_p", d.defect_p)?,
            linewidth_coeff: self.number("material.linewidth_coeff", d.linewidth_coeff)?,
            blockade_coeff: self.number("material.blockade_coeff", d.blockade_coeff)?,
            dielectric: self.number("material.dielectric", d.dielectric)?,
        };
        material.validate().map_err(|e| self.locate(e))?;

        let n = self.parsed::<u32>("level.n")?.unwrap_or(24);
        let l = self.parsed::<u32>("level.l")?.unwrap_or(1);
        let defect = self.number("level.defect", if l == 1 { material.defect_p } else { 0.0 })?;
        let level = ExcitonLevel::new(n, l, defect).map_err(|e| self.locate(e))?;

        let g = CrystalGeometry::default();
        let geometry = CrystalGeometry {
            side: self.number("geometry.side", g.side)?,
            spacing_factor: self.number("geometry.spacing_factor", g.spacing_factor)?,
        };
        geometry.validate().map_err(|e| self.locate(e))?;

        let dr = DriveConfig::default();
        let rabi_single = match (self.map.contains_key("drive.rabi"), self.parsed::<f64>("drive.intensity")?) {
            (true, Some(_)) => {
                return Err(self.violation("drive.intensity", "set either drive.rabi or drive.intensity, not both"))
            }
            (false, Some(intensity)) => rabi_from_intensity(intensity, n).map_err(|e| self.locate(e))?,
            _ => self.number("drive.rabi", dr.rabi_single)?,
        };
        let drive = DriveConfig {
            rabi_single,
            detuning: self.number("drive.detuning", dr.detuning)?,
            purcell: self.number("drive.purcell", dr.purcell)?,
        };
        drive.validate().map_err(|e| self.locate(e))?;

        let variant = self.parsed::<PairVariant>("model.variant")?.unwrap_or(PairVariant::SaturatedProduct);
        let observed = self.number("model.observed_volume", OBSERVED_BLOCKADE_VOLUME_N24)?;
        if observed <= 0.0 {
            return Err(self.violation("model.observed_volume", "must be > 0"));
        }
        let c3_source = match self.map.get("model.c3_source").map(|(v, l)| (v.as_str(), *l)) {
            None | Some(("formula", _)) => C3Source::Formula,
            Some(("observed", _)) => C3Source::Observed(observed),
            Some((other, line)) => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown c3_source `{other}` (expected formula or observed)"),
                })
            }
        };

        let sweep = self.build_sweep()?;

        let output = OutputConfig {
            format: self.parsed::<OutputFormat>("output.format")?.unwrap_or(OutputFormat::Csv),
            path: self.map.get("output.path").map(|(v, _)| PathBuf::from(v)),
        };

        Ok(Params {
            material,
            level,
            geometry,
            drive,
            model: ModelConfig { variant, c3_source },
            sweep,
            output,
        })
    }

    fn build_sweep(&self) -> Result<SweepConfig> {
        let variable = self.parsed::<SweepVariable>("sweep.variable")?.unwrap_or(SweepVariable::DriveRatio);
        let range_keys = ["sweep.start", "sweep.stop", "sweep.points"];
        let values = match self.list("sweep.values")? {
            Some(values) => {
                if let Some(key) = range_keys.iter().find(|k| self.map.contains_key(**k)) {
                    return Err(self.violation(key, "use either sweep.values or start/stop/points"));
                }
                values
            }
            None => {
                let start = self.number("sweep.start", 0.0)?;
                let stop = self.number("sweep.stop", 10.0)?;
                let points = self.parsed::<usize>("sweep.points")?.unwrap_or(51);
                if points == 0 {
                    return Err(self.violation("sweep.points", "must be ≥ 1"));
                }
                if points == 1 {
                    vec![start]
                } else {
                    (0..points)
                        .map(|k| start + (stop - start) * k as f64 / (points - 1) as f64)
                        .collect()
                }
            }
        };
        if values.windows(2).any(|w| !(w[1] > w[0])) {
            let key = if self.map.contains_key("sweep.values") { "sweep.values" } else { "sweep.stop" };
            return Err(self.violation(key, "values must be strictly ascending"));
        }
        let lower = match variable {
            SweepVariable::DriveRatio => 0.0,
            SweepVariable::Side => f64::MIN_POSITIVE,
            SweepVariable::N => 1.0,
        };
        if values.iter().any(|&v| v < lower) {
            return Err(self.violation("sweep.values", format!("{variable} values must be ≥ {lower}")));
        }
        if variable == SweepVariable::N && values.iter().any(|v| v.fract() != 0.0) {
            return Err(self.violation("sweep.values", "n values must be integers"));
        }

        let g2_max = self.number("sweep.g2_max", 0.01)?;
        if !(g2_max > 0.0 && g2_max <= 0.5) {
            return Err(self.violation("sweep.g2_max", format!("must lie in (0, ½], got {g2_max}")));
        }
        let rabi_min = self.number("sweep.rabi_min", 0.0)?;
        let rabi_max = self.number("sweep.rabi_max", 20.0)?;
        if !(rabi_min >= 0.0 && rabi_max >= rabi_min) {
            return Err(self.violation("sweep.rabi_max", "need 0 ≤ rabi_min ≤ rabi_max"));
        }
        let side_min = self.number("sweep.side_min", 2.0)?;
        let side_max = self.number("sweep.side_max", 8.0)?;
        if !(side_min > 0.0 && side_max >= side_min) {
            return Err(self.violation("sweep.side_max", "need 0 < side_min ≤ side_max"));
        }
        let grid = self.parsed::<usize>("sweep.grid")?.unwrap_or(50);
        if grid < 1 {
            return Err(self.violation("sweep.grid", "must be ≥ 1"));
        }
        Ok(SweepConfig {
            variable,
            values,
            g2_max,
            rabi_min,
            rabi_max,
            side_min,
            side_max,
            grid,
        })
    }
}
