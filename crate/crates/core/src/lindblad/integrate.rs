//! Dormand–Prince 5(4) integration of ẋ = L·x for vectorized operators.

use nalgebra::DVector;

use super::{Liouvillian, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

// Butcher tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth- minus fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Adaptive propagator for a fixed Liouvillian.
pub struct Propagator<'a> {
    liouvillian: &'a Liouvillian,
    options: IntegratorOptions,
}

struct Stages {
    k: [DVector<C64>; 7],
    tmp: DVector<C64>,
    next: DVector<C64>,
    err: DVector<C64>,
}

impl<'a> Propagator<'a> {
    pub fn new(liouvillian: &'a Liouvillian, options: IntegratorOptions) -> Self {
        Self {
            liouvillian,
            options,
        }
    }

    fn rhs(&self, x: &DVector<C64>, out: &mut DVector<C64>) {
        out.gemv(
            C64::new(1.0, 0.0),
            self.liouvillian.matrix(),
            x,
            C64::new(0.0, 0.0),
        );
    }

    /// Evolves `x0` (given at t = 0) and returns its value at every time in
    /// `times`.
    pub fn propagate(&self, x0: DVector<C64>, times: &[f64]) -> Result<Vec<DVector<C64>>> {
        validate_grid(times)?;
        let len = x0.len();
        if len != self.liouvillian.dim().pow(2) {
            return Err(Error::invalid("state vector", "length does not match Liouvillian"));
        }

        let rate_scale = self.liouvillian.norm_inf();
        let mut out = Vec::with_capacity(times.len());
        let mut x = x0;
        let mut t = 0.0;
        if rate_scale == 0.0 {
            out.resize(times.len(), x);
            return Ok(out);
        }
        let mut h = 0.01 / rate_scale;
        let mut stages = Stages {
            k: std::array::from_fn(|_| DVector::zeros(len)),
            tmp: DVector::zeros(len),
            next: DVector::zeros(len),
            err: DVector::zeros(len),
        };
        self.rhs(&x, &mut stages.k[0]);

        for &target in times {
            while t < target {
                let remaining = target - t;
                let hit = h >= remaining;
                let step = if hit { remaining } else { h };
                if step < 1e-14 * t.abs().max(1.0 / rate_scale) {
                    return Err(Error::StepUnderflow { time: t });
                }
                let err_norm = self.try_step(&x, step, &mut stages);
                if err_norm <= 1.0 {
                    t = if hit { target } else { t + step };
                    std::mem::swap(&mut x, &mut stages.next);
                    // FSAL: k7 is the derivative at the new point.
                    stages.k.swap(0, 6);
                    let factor = if err_norm == 0.0 {
                        MAX_FACTOR
                    } else {
                        (SAFETY * err_norm.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
                    };
                    if !hit || factor < 1.0 {
                        h = step * factor;
                    }
                } else {
                    h = step * (SAFETY * err_norm.powf(-0.2)).max(MIN_FACTOR);
                }
                if !h.is_finite() {
                    return Err(Error::StepUnderflow { time: t });
                }
            }
            out.push(x.clone());
        }
        Ok(out)
    }

    /// One trial step; leaves the candidate in `stages.next` and returns the
    /// scaled error norm.
    fn try_step(&self, x: &DVector<C64>, h: f64, s: &mut Stages) -> f64 {
        let hc = |a: f64| C64::new(h * a, 0.0);

        s.tmp.copy_from(x);
        s.tmp.axpy(hc(A21), &s.k[0], C64::new(1.0, 0.0));
        let (head, tail) = s.k.split_at_mut(1);
        self.rhs(&s.tmp, &mut tail[0]);

        s.tmp.copy_from(x);
        s.tmp.axpy(hc(A31), &head[0], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A32), &tail[0], C64::new(1.0, 0.0));
        self.rhs(&s.tmp, &mut tail[1]);

        s.tmp.copy_from(x);
        s.tmp.axpy(hc(A41), &head[0], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A42), &tail[0], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A43), &tail[1], C64::new(1.0, 0.0));
        self.rhs(&s.tmp, &mut tail[2]);

        s.tmp.copy_from(x);
        s.tmp.axpy(hc(A51), &head[0], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A52), &tail[0], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A53), &tail[1], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A54), &tail[2], C64::new(1.0, 0.0));
        self.rhs(&s.tmp, &mut tail[3]);

        s.tmp.copy_from(x);
        s.tmp.axpy(hc(A61), &head[0], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A62), &tail[0], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A63), &tail[1], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A64), &tail[2], C64::new(1.0, 0.0));
        s.tmp.axpy(hc(A65), &tail[3], C64::new(1.0, 0.0));
        self.rhs(&s.tmp, &mut tail[4]);

        s.next.copy_from(x);
        s.next.axpy(hc(B1), &head[0], C64::new(1.0, 0.0));
        s.next.axpy(hc(B3), &tail[1], C64::new(1.0, 0.0));
        s.next.axpy(hc(B4), &tail[2], C64::new(1.0, 0.0));
        s.next.axpy(hc(B5), &tail[3], C64::new(1.0, 0.0));
        s.next.axpy(hc(B6), &tail[4], C64::new(1.0, 0.0));
        self.rhs(&s.next, &mut tail[5]);

        s.err.fill(C64::new(0.0, 0.0));
        for (w, k) in [(E1, &head[0]), (E3, &tail[1]), (E4, &tail[2]), (E5, &tail[3]), (E6, &tail[4]), (E7, &tail[5])] {
            s.err.axpy(hc(w), k, C64::new(1.0, 0.0));
        }

        let IntegratorOptions { rtol, atol } = self.options;
        let sum: f64 = s
            .err
            .iter()
            .zip(x.iter().zip(s.next.iter()))
            .map(|(e, (a, b))| {
                let scale = atol + rtol * a.norm().max(b.norm());
                (e.norm() / scale).powi(2)
            })
            .sum();
        (sum / s.err.len() as f64).sqrt()
    }
}

fn validate_grid(times: &[f64]) -> Result<()> {
    if let Some(&first) = times.first() {
        if !(first >= 0.0) {
            return Err(Error::invalid("time grid", "must start at t ≥ 0"));
        }
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("time grid", "times must be finite"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid("time grid", "times must be ascending"));
    }
    Ok(())
}
