//! Grid search for the highest photon rate under a g₂(0) ceiling.

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Params;
use crate::exciton::mean_radius;
use crate::sweep::{operating_point, OperatingPoint};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimizeSpec {
    pub g2_max: f64,
    /// GHz.
    pub rabi_min: f64,
    pub rabi_max: f64,
    /// μm.
    pub side_min: f64,
    pub side_max: f64,
    /// Points per axis.
    pub grid: usize,
}

impl OptimizeSpec {
    pub fn from_params(params: &Params) -> Self {
        let s = &params.sweep;
        Self {
            g2_max: s.g2_max,
            rabi_min: s.rabi_min,
            rabi_max: s.rabi_max,
            side_min: s.side_min,
            side_max: s.side_max,
            grid: s.grid,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g2_max > 0.0 && self.g2_max <= 0.5) {
            return Err(Error::invalid("sweep.g2_max", format!("must lie in (0, ½], got {}", self.g2_max)));
        }
        if !(self.rabi_min >= 0.0 && self.rabi_max >= self.rabi_min && self.rabi_max.is_finite()) {
            return Err(Error::invalid("sweep.rabi_max", "need 0 ≤ rabi_min ≤ rabi_max"));
        }
        if !(self.side_min > 0.0 && self.side_max >= self.side_min && self.side_max.is_finite()) {
            return Err(Error::invalid("sweep.side_max", "need 0 < side_min ≤ side_max"));
        }
        if self.grid == 0 {
            return Err(Error::invalid("sweep.grid", "must be ≥ 1"));
        }
        Ok(())
    }
}

/// `points` evenly spaced values on [lo, hi]. Grids of 2k−1 points contain
/// every point of the k-point grid exactly.
pub fn axis(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    (0..points)
        .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
        .collect()
}

/// Smallest side allowed: twice the site pitch.
pub fn minimum_side(params: &Params) -> f64 {
    2.0 * params.geometry.spacing_factor * mean_radius(&params.level, &params.material)
}

/// Maximize the photon rate over the Ω × side grid subject to
/// g₂(0) ≤ g2_max and side ≥ [`minimum_side`]. Ties go to the smaller Ω,
/// then the smaller side.
pub fn optimize_point(params: &Params, spec: &OptimizeSpec) -> Result<OperatingPoint> {
    spec.validate()?;
    let min_side = minimum_side(params);
    let sides: Vec<f64> = axis(spec.side_min, spec.side_max, spec.grid)
        .into_iter()
        .filter(|&s| s >= min_side)
        .collect();
    if sides.is_empty() {
        return Err(Error::Infeasible {
            constraint: format!(
                "side ≥ {min_side:.4} μm (twice the site pitch) but side_max = {}",
                spec.side_max
            ),
        });
    }
    let rabis = axis(spec.rabi_min, spec.rabi_max, spec.grid);
    let cells: Vec<(f64, f64)> = rabis
        .iter()
        .flat_map(|&o| sides.iter().map(move |&s| (o, s)))
        .collect();
    let evaluated: Vec<Result<OperatingPoint>> = cells
        .par_iter()
        .map(|&(rabi, side)| {
            let mut p = params.clone();
            p.drive.rabi_single = rabi;
            p.geometry.side = side;
            operating_point(&p)
        })
        .collect();

    let mut best: Option<OperatingPoint> = None;
    let mut lowest_g2 = f64::INFINITY;
    for point in evaluated {
        let point = point?;
        let Some(g2) = point.derived.g2_zero else { continue };
        lowest_g2 = lowest_g2.min(g2);
        if g2 > spec.g2_max {
            continue;
        }
        if best.as_ref().is_none_or(|b| point.derived.rate > b.derived.rate) {
            best = Some(point);
        }
    }
    best.ok_or_else(|| Error::Infeasible {
        constraint: if lowest_g2.is_finite() {
            format!("g₂(0) ≤ {} but the lowest value on the grid is {lowest_g2:.4e}", spec.g2_max)
        } else {
            "g₂(0) is undefined everywhere on the grid (zero drive)".to_string()
        },
    })
}
