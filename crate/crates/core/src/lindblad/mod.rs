//! Dense solver for few-level open quantum systems.
//!
//! A [`LindbladModel`] holds a Hamiltonian and a list of jump operators with
//! rates; the generator
//!
//! ```text
//! ρ̇ = −i[H, ρ] + Σ_k γ_k (L_k ρ L_k† − ½{L_k†L_k, ρ})
//! ```
//!
//! is vectorized column-major into a dim²×dim² [`Liouvillian`]. On top of
//! that the module provides adaptive time evolution ([`evolve`]), the
//! unique stationary state ([`steady_state`]) and two-time correlations via
//! the quantum regression theorem ([`correlation`]).
//!
//! All models in this crate have dim ≤ 16, so everything is dense.

mod integrate;
mod liouvillian;
mod steady;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

pub use integrate::{IntegratorOptions, Propagator};
pub use liouvillian::{build_liouvillian, Liouvillian};
pub use steady::steady_state;

pub type C64 = Complex64;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const EIGEN_TOL: f64 = -1e-8;

/// Tolerances applied to states produced by time integration.
const EVOLVED_HERMITIAN_TOL: f64 = 1e-8;
const EVOLVED_TRACE_TOL: f64 = 1e-8;
const EVOLVED_EIGEN_TOL: f64 = -1e-6;

/// A square complex operator on the system Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator(DMatrix<C64>);

impl Operator {
    pub fn from_matrix(matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(Error::invalid(
                "operator",
                format!("must be square with dim ≥ 1, got {}×{}", matrix.nrows(), matrix.ncols()),
            ));
        }
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("operator", "entries must be finite"));
        }
        Ok(Self(matrix))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    /// |to⟩⟨from|.
    pub fn transition(dim: usize, to: usize, from: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(to, from)] = C64::new(1.0, 0.0);
        Self(m)
    }

    /// |k⟩⟨k|.
    pub fn projector(dim: usize, k: usize) -> Self {
        Self::transition(dim, k, k)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Largest entrywise |A − A†|.
    pub fn hermitian_deviation(&self) -> f64 {
        hermitian_deviation(&self.0)
    }

    /// Adds `value` to entry (row, col).
    pub fn add_entry(&mut self, row: usize, col: usize, value: C64) {
        self.0[(row, col)] += value;
    }
}

fn hermitian_deviation(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Hermitian, unit-trace, positive semidefinite state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(DMatrix<C64>);

impl DensityMatrix {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerances(matrix, HERMITIAN_TOL, TRACE_TOL, EIGEN_TOL)
    }

    fn evolved(matrix: DMatrix<C64>) -> Result<Self> {
        Self::with_tolerances(
            matrix,
            EVOLVED_HERMITIAN_TOL,
            EVOLVED_TRACE_TOL,
            EVOLVED_EIGEN_TOL,
        )
    }

    fn with_tolerances(
        matrix: DMatrix<C64>,
        hermitian_tol: f64,
        trace_tol: f64,
        eigen_tol: f64,
    ) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.nrows() != matrix.ncols() {
            return Err(Error::InvalidState("matrix must be square and non-empty".into()));
        }
        let deviation = hermitian_deviation(&matrix);
        if !(deviation <= hermitian_tol) {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let trace = matrix.trace();
        if !((trace - C64::new(1.0, 0.0)).norm() <= trace_tol) {
            return Err(Error::InvalidState(format!("trace {trace} ≠ 1")));
        }
        let min_eig = min_eigenvalue(&matrix);
        if !(min_eig >= eigen_tol) {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self(matrix))
    }

    /// Pure state |k⟩⟨k|.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self(Operator::projector(dim, k).0)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    /// ⟨k|ρ|k⟩.
    pub fn population(&self, k: usize) -> f64 {
        self.0[(k, k)].re
    }

    /// Tr[A ρ].
    pub fn expect(&self, op: &Operator) -> C64 {
        (&op.0 * &self.0).trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.0)
    }

    fn to_vector(&self) -> DVector<C64> {
        vectorize(&self.0)
    }
}

/// Smallest eigenvalue of the Hermitian part (ρ + ρ†)/2.
fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let herm = (m + m.adjoint()).scale(0.5);
    herm.symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn vectorize(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

pub(crate) fn unvectorize(v: &DVector<C64>, dim: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(dim, dim, v.as_slice())
}

/// A jump operator with its rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub operator: Operator,
    pub rate: f64,
}

/// Hamiltonian plus dissipators.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladModel {
    hamiltonian: Operator,
    jumps: Vec<Jump>,
}

impl LindbladModel {
    pub fn new(hamiltonian: Operator, jumps: Vec<Jump>) -> Result<Self> {
        let deviation = hamiltonian.hermitian_deviation();
        if !(deviation <= HERMITIAN_TOL) {
            return Err(Error::NonHermitian { deviation });
        }
        let dim = hamiltonian.dim();
        for jump in &jumps {
            if jump.operator.dim() != dim {
                return Err(Error::invalid(
                    "jump operator",
                    format!("dimension {} ≠ Hamiltonian dimension {dim}", jump.operator.dim()),
                ));
            }
            if !(jump.rate.is_finite() && jump.rate >= 0.0) {
                return Err(Error::invalid(
                    "jump rate",
                    format!("must be ≥ 0, got {}", jump.rate),
                ));
            }
        }
        Ok(Self { hamiltonian, jumps })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }
}

/// Integrates the master equation from `rho0` at t = 0 and samples the
/// state at each time of `t_grid` (ascending, ≥ 0).
pub fn evolve(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    options: IntegratorOptions,
) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != model.dim() {
        return Err(Error::invalid(
            "rho0",
            format!("dimension {} ≠ model dimension {}", rho0.dim(), model.dim()),
        ));
    }
    let liouvillian = build_liouvillian(model);
    let propagator = Propagator::new(&liouvillian, options);
    propagator
        .propagate(rho0.to_vector(), t_grid)?
        .into_iter()
        .map(|v| DensityMatrix::evolved(unvectorize(&v, model.dim())))
        .collect()
}

/// C(τ) = Tr[A · e^{Lτ}(B·ρ_ss)] on `tau_grid`, with ρ_ss the steady state.
pub fn correlation(
    model: &LindbladModel,
    a: &Operator,
    b: &Operator,
    tau_grid: &[f64],
) -> Result<Vec<C64>> {
    let rho_ss = steady_state(model)?;
    correlation_with_state(model, &rho_ss, a, b, tau_grid, IntegratorOptions::default())
}

/// C(τ) = Tr[A · e^{Lτ}(B·ρ_ss·B†)]. With A = σ⁺σ⁻ and B = σ⁻ this is the
/// unnormalized intensity correlation G₂(τ).
pub fn correlation_sandwiched(
    model: &LindbladModel,
    a: &Operator,
    b: &Operator,
    tau_grid: &[f64],
) -> Result<Vec<C64>> {
    let rho_ss = steady_state(model)?;
    let seed = b.matrix() * rho_ss.matrix() * b.matrix().adjoint();
    propagate_and_trace(model, a, seed, tau_grid, IntegratorOptions::default())
}

fn propagate_and_trace(
    model: &LindbladModel,
    a: &Operator,
    seed: DMatrix<C64>,
    tau_grid: &[f64],
    options: IntegratorOptions,
) -> Result<Vec<C64>> {
    let dim = model.dim();
    let liouvillian = build_liouvillian(model);
    let propagator = Propagator::new(&liouvillian, options);
    Ok(propagator
        .propagate(vectorize(&seed), tau_grid)?
        .iter()
        .map(|v| (a.matrix() * unvectorize(v, dim)).trace())
        .collect())
}

/// [`correlation`] with a precomputed stationary state.
pub fn correlation_with_state(
    model: &LindbladModel,
    rho_ss: &DensityMatrix,
    a: &Operator,
    b: &Operator,
    tau_grid: &[f64],
    options: IntegratorOptions,
) -> Result<Vec<C64>> {
    let dim = model.dim();
    if a.dim() != dim || b.dim() != dim || rho_ss.dim() != dim {
        return Err(Error::invalid("correlation operators", "dimension mismatch"));
    }
    let seed = b.matrix() * rho_ss.matrix();
    propagate_and_trace(model, a, seed, tau_grid, options)
}
