use nalgebra::{DMatrix, DVector};

use super::{build_liouvillian, unvectorize, DensityMatrix, LindbladModel, C64};
use crate::{Error, Result};

/// Singular values of L below this fraction of the largest count as null.
const NULL_TOL: f64 = 1e-10;
/// Residual ‖L·vec(ρ)‖ allowed, relative to max(1, ‖L‖).
const RESIDUAL_TOL: f64 = 1e-9;
const REFINE_STEPS: usize = 4;

/// Stationary state: least-squares solution of [L; Tr] · vec(ρ) = [0; 1].
pub fn steady_state(model: &LindbladModel) -> Result<DensityMatrix> {
    let dim = model.dim();
    let d2 = dim * dim;
    let liouvillian = build_liouvillian(model);
    let l = liouvillian.matrix();

    let singular = l.clone().singular_values();
    let largest = singular.max();
    let nullity = singular
        .iter()
        .filter(|&&s| s <= NULL_TOL * largest.max(1.0))
        .count();
    if nullity != 1 {
        return Err(Error::DegenerateSteadyState { nullity });
    }

    let mut stacked = DMatrix::<C64>::zeros(d2 + 1, d2);
    stacked.rows_mut(0, d2).copy_from(l);
    for k in 0..dim {
        stacked[(d2, k * dim + k)] = C64::new(1.0, 0.0);
    }
    let mut rhs = DVector::<C64>::zeros(d2 + 1);
    rhs[d2] = C64::new(1.0, 0.0);

    let svd = stacked.clone().svd(true, true);
    let solve = |b: &DVector<C64>| {
        svd.solve(b, f64::EPSILON)
            .map_err(|e| Error::Undefined(format!("steady-state solve failed: {e}")))
    };
    let mut x = solve(&rhs)?;
    for _ in 0..REFINE_STEPS {
        let r = &rhs - &stacked * &x;
        if r.norm() <= f64::EPSILON * largest.max(1.0) {
            break;
        }
        x += solve(&r)?;
    }

    let residual = (l * &x).norm();
    if !(residual <= RESIDUAL_TOL * largest.max(1.0)) {
        return Err(Error::SteadyStateResidual { residual });
    }

    let rho = unvectorize(&x, dim);
    let mut rho = (&rho + rho.adjoint()).scale(0.5);
    let trace = rho.trace();
    rho /= trace;
    DensityMatrix::new(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::tests::two_level;
    use crate::lindblad::{evolve, Jump, Operator};
    use proptest::prelude::*;

    fn eq6(omega: f64, gamma: f64, detuning: f64) -> f64 {
        (omega * omega / 4.0) / (detuning * detuning + gamma * gamma / 4.0 * (1.0 + 2.0 * omega * omega / (gamma * gamma)))
    }

    #[test]
    fn resonant_two_level_matches_closed_form() {
        for ratio in [0.1, 1.0, 6.0, 20.0] {
            let rho = steady_state(&two_level(ratio, 1.0, 0.0)).unwrap();
            let s = ratio * ratio;
            assert!((rho.population(1) - s / (1.0 + 2.0 * s)).abs() < 1e-12);
        }
    }

    #[test]
    fn undriven_is_ground() {
        let rho = steady_state(&two_level(0.0, 1.0, 0.0)).unwrap();
        assert!((rho.population(0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_null_space_reported() {
        let model = LindbladModel::new(Operator::zeros(2), vec![]).unwrap();
        assert!(matches!(
            steady_state(&model),
            Err(Error::DegenerateSteadyState { nullity: 4 })
        ));
        let unitary = two_level(1.0, 0.0, 0.0);
        assert!(matches!(
            steady_state(&unitary),
            Err(Error::DegenerateSteadyState { .. })
        ));
    }

    #[test]
    fn agrees_with_long_evolution() {
        for ratio in [0.1, 1.0, 6.0, 20.0] {
            for detuning in [0.0, 1.0, 5.0] {
                let model = two_level(ratio, 1.0, detuning);
                let ss = steady_state(&model).unwrap();
                let late = evolve(&model, &DensityMatrix::basis(2, 0), &[50.0], Default::default())
                    .unwrap()
                    .pop()
                    .unwrap();
                let diff = ss.matrix() - late.matrix();
                assert!(diff.iter().all(|z| z.norm() < 1e-6), "Ω={ratio} Δ={detuning}");
                assert!((ss.population(1) - eq6(ratio, 1.0, detuning)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn huge_level_shift_suppresses_upper_level() {
        // |0⟩ ↔ |1⟩ ↔ |2⟩ with |2⟩ shifted by `shift`.
        let ladder = |shift: f64| {
            let mut h = Operator::zeros(3);
            let (a, b) = (C64::new(2.0, 0.0), C64::new(0.4, 0.0));
            h.add_entry(0, 1, a);
            h.add_entry(1, 0, a);
            h.add_entry(1, 2, b);
            h.add_entry(2, 1, b);
            h.add_entry(2, 2, C64::new(shift, 0.0));
            LindbladModel::new(
                h,
                vec![
                    Jump { operator: Operator::transition(3, 0, 1), rate: 1.0 },
                    Jump { operator: Operator::transition(3, 1, 2), rate: 1.0 },
                ],
            )
            .unwrap()
        };
        let far = steady_state(&ladder(1e6)).unwrap().population(2);
        assert!(far.abs() < 1e-6, "ρ22 = {far}");
        let near = steady_state(&ladder(0.0)).unwrap().population(2);
        assert!(near > 1e-3);
    }

    proptest! {
        #[test]
        fn even_in_detuning(omega in 0.05f64..30.0, detuning in 0.0f64..10.0) {
            let plus = steady_state(&two_level(omega, 1.0, detuning)).unwrap().population(1);
            let minus = steady_state(&two_level(omega, 1.0, -detuning)).unwrap().population(1);
            prop_assert!((plus - minus).abs() < 1e-13);
        }
    }
}
