use nalgebra::DMatrix;

use crate::control_model::{DiscreteModel, StateMatrix, NU, NX};
use crate::error::{Error, Result};

use super::InputWeight;

const MAX_DOUBLING_STEPS: usize = 100;

/// `A'PA - A'PB (R + B'PB)^-1 B'PA + Q - P`.
pub fn dare_residual(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>, r: &DMatrix<f64>, p: &DMatrix<f64>) -> DMatrix<f64> {
    let bt_p = b.transpose() * p;
    let s = r + &bt_p * b;
    let k = s
        .lu()
        .solve(&(&bt_p * a))
        .unwrap_or_else(|| DMatrix::from_element(b.ncols(), a.ncols(), f64::NAN));
    a.transpose() * p * a - a.transpose() * p * b * k + q - p
}

/// Stabilizing solution of the discrete algebraic Riccati equation by the
/// structured doubling algorithm.
pub fn solve_dare(a: &DMatrix<f64>, b: &DMatrix<f64>, q: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || q.shape() != (n, n) || r.shape() != (b.ncols(), b.ncols()) {
        return Err(Error::Dimension("inconsistent DARE operands".into()));
    }
    let r_chol = r
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Parameter("R must be positive definite".into()))?;
    let eye = DMatrix::<f64>::identity(n, n);

    let mut ak = a.clone();
    let mut gk = b * r_chol.solve(&b.transpose());
    let mut hk = q.clone();
    for _ in 0..MAX_DOUBLING_STEPS {
        let w = (&eye + &gk * &hk).lu();
        let w_a = w.solve(&ak).ok_or(Error::Convergence { what: "Riccati doubling", iters: 0 })?;
        let w_g = w.solve(&gk).ok_or(Error::Convergence { what: "Riccati doubling", iters: 0 })?;
        let h_next = &hk + ak.transpose() * &hk * &w_a;
        let g_next = &gk + &ak * &w_g * ak.transpose();
        let a_next = &ak * &w_a;
        let delta = (&h_next - &hk).amax();
        hk = h_next;
        gk = g_next;
        ak = a_next;
        if delta <= 1e-15 * hk.amax().max(1.0) {
            break;
        }
    }
    let p = (&hk + hk.transpose()) * 0.5;

    let res = dare_residual(a, b, q, r, &p);
    if !res.iter().all(|v| v.is_finite()) || res.amax() > 1e-8 * p.amax().max(1e-300) {
        return Err(Error::Convergence { what: "Riccati doubling", iters: MAX_DOUBLING_STEPS });
    }
    Ok(p)
}

/// LQR terminal weight for the prediction model, computed once offline in
/// double precision.
pub fn terminal_weight_dare(model: &DiscreteModel, q1: &StateMatrix, r: &InputWeight) -> Result<StateMatrix> {
    let p = solve_dare(
        &DMatrix::from_column_slice(NX, NX, model.a.as_slice()),
        &DMatrix::from_column_slice(NX, NU, model.b.as_slice()),
        &DMatrix::from_column_slice(NX, NX, q1.as_slice()),
        &DMatrix::from_column_slice(NU, NU, r.as_slice()),
    )?;
    Ok(StateMatrix::from_column_slice(p.as_slice()))
}
