use nalgebra::DMatrix;

use super::{unvectorize, vectorize, LindbladModel, C64};

/// Superoperator acting on column-major vectorized density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    dim: usize,
    matrix: DMatrix<C64>,
}

impl Liouvillian {
    /// Hilbert-space dimension (the superoperator is dim²×dim²).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// L(ρ) as a dim×dim matrix.
    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        unvectorize(&(&self.matrix * vectorize(rho)), self.dim)
    }

    /// Max absolute row sum; sets the rate scale of the dynamics.
    pub fn norm_inf(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Uses vec(AXB) = (Bᵀ ⊗ A)·vec(X):
///
/// ```text
/// L = −i(I⊗H − Hᵀ⊗I) + Σ_k γ_k [ L̄_k⊗L_k − ½ I⊗(L_k†L_k) − ½ (L_k†L_k)ᵀ⊗I ]
/// ```
pub fn build_liouvillian(model: &LindbladModel) -> Liouvillian {
    let dim = model.dim();
    let id = DMatrix::<C64>::identity(dim, dim);
    let h = model.hamiltonian().matrix();
    let minus_i = C64::new(0.0, -1.0);

    let mut matrix = (id.kronecker(h) - h.transpose().kronecker(&id)) * minus_i;
    for jump in model.jumps() {
        if jump.rate == 0.0 {
            continue;
        }
        let l = jump.operator.matrix();
        let ldl = l.adjoint() * l;
        let term = l.map(|z| z.conj()).kronecker(l)
            - id.kronecker(&ldl).scale(0.5)
            - ldl.transpose().kronecker(&id).scale(0.5);
        matrix += term.scale(jump.rate);
    }
    Liouvillian { dim, matrix }
}
