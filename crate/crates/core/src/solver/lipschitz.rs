use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const POWER_TOL: f64 = 1e-6;
const POWER_MAX_ITERS: usize = 20_000;
/// Safety margin on the power-iteration estimate.
pub const LIPSCHITZ_INFLATION: f64 = 1.01;

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration, to relative tolerance `1e-6`.
pub fn largest_eigenvalue(w: &DMatrix<f64>) -> Result<f64> {
    let m = w.nrows();
    if m == 0 {
        return Ok(0.0);
    }
    // fixed, non-degenerate start vector keeps runs reproducible
    let mut v = DVector::from_fn(m, |i, _| 1.0 + 0.5 * ((i as f64) * 0.7).sin());
    v /= v.norm();
    let mut lambda = 0.0;
    for _ in 0..POWER_MAX_ITERS {
        let wv = w * &v;
        let next = v.dot(&wv);
        let norm = wv.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        v = wv / norm;
        if (next - lambda).abs() <= POWER_TOL * next.abs() {
            // Rayleigh quotient of the normalized iterate
            return Ok(v.dot(&(w * &v)).max(next));
        }
        lambda = next;
    }
    Err(Error::Convergence { what: "power iteration", iters: POWER_MAX_ITERS })
}

/// `1.01 * lambda_max(D H^-1 D')`, the step-size constant of the dual
/// gradient projection.
pub fn compute_lipschitz(hessian: &DMatrix<f64>, constraints: &DMatrix<f64>) -> Result<f64> {
    let chol = hessian
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Parameter("Hessian must be positive definite".into()))?;
    let w = constraints * chol.solve(&constraints.transpose());
    dual_lipschitz(&w)
}

/// Inflated Lipschitz constant from a precomputed `D H^-1 D'`.
pub(crate) fn dual_lipschitz(w: &DMatrix<f64>) -> Result<f64> {
    let lambda = largest_eigenvalue(w)?;
    if !(lambda > 0.0) {
        return Err(Error::Parameter("dual Hessian is zero; constraints do not depend on z".into()));
    }
    Ok(LIPSCHITZ_INFLATION * lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_problem() {
        let one = DMatrix::from_element(1, 1, 1.0);
        let l = compute_lipschitz(&one, &one).unwrap();
        assert!((l - 1.01).abs() < 1e-12);
    }

    #[test]
    fn scaled_identity() {
        let h = DMatrix::<f64>::identity(4, 4);
        let d = DMatrix::<f64>::identity(4, 4) * 2.0;
        let l = compute_lipschitz(&h, &d).unwrap();
        assert!((l - 4.04).abs() < 1e-9);
    }

    #[test]
    fn zero_constraints_are_rejected() {
        let h = DMatrix::<f64>::identity(2, 2);
        assert!(compute_lipschitz(&h, &DMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn indefinite_hessian_is_rejected() {
        let h = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(compute_lipschitz(&h, &DMatrix::identity(2, 2)).is_err());
    }
}
