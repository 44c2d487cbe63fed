//! Independent oracles shared by the integration tests and the acceptance
//! runner. Nothing here calls into the code it is used to check, apart from
//! plain data types.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::Rng;

use attitude_mpc::control_model::{DiscreteModel, ModelState, NU, NX};
use attitude_mpc::mpc::{Formulation, MpcConfig};

/// Matrix exponential by scaling and squaring with a 20-term Taylor series.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = m.abs().row_sum().max();
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let a = m / 2f64.powi(s);
    let n = m.nrows();
    let mut term = DMatrix::identity(n, n);
    let mut sum = DMatrix::identity(n, n);
    for k in 1..=20 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// ZOH of `(ac, bc)` read off `exp([ac bc; 0 0] ts)`.
pub fn zoh_by_expm(ac: &DMatrix<f64>, bc: &DMatrix<f64>, ts: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let (nx, nu) = (ac.nrows(), bc.ncols());
    let mut aug = DMatrix::zeros(nx + nu, nx + nu);
    aug.view_mut((0, 0), (nx, nx)).copy_from(&(ac * ts));
    aug.view_mut((0, nx), (nx, nu)).copy_from(&(bc * ts));
    let e = expm(&aug);
    (e.view((0, 0), (nx, nx)).into_owned(), e.view((0, nx), (nx, nu)).into_owned())
}

/// MPC cost from a simulated prediction: inputs rebuilt from the increments
/// (held past the control horizon), virtual states held likewise.
pub fn rollout_cost(
    model: &DiscreteModel,
    cfg: &MpcConfig,
    x0: &ModelState,
    rt: &ModelState,
    u_prev: &[f64; 3],
    z: &DVector<f64>,
) -> f64 {
    let nc = cfg.control_horizon;
    let du = |k: usize| -> DVector<f64> {
        if k < nc {
            z.rows(NU * k, NU).into_owned()
        } else {
            DVector::zeros(NU)
        }
    };
    let xv = |k: usize| -> DVector<f64> {
        match cfg.formulation {
            Formulation::Modified => z.rows(NU * nc + NX * k.min(nc - 1), NX).into_owned(),
            Formulation::Standard => DVector::zeros(NX),
        }
    };
    let a = DMatrix::from_column_slice(NX, NX, model.a.as_slice());
    let b = DMatrix::from_column_slice(NX, NU, model.b.as_slice());
    let q1 = DMatrix::from_column_slice(NX, NX, cfg.q1.as_slice());
    let q2 = DMatrix::from_column_slice(NX, NX, cfg.q2.as_slice());
    let r = DMatrix::from_column_slice(NU, NU, cfg.r.as_slice());
    let pf = DMatrix::from_column_slice(NX, NX, cfg.pf.as_slice());
    let rt = DVector::from_column_slice(rt.as_slice());

    let mut x = DVector::from_column_slice(x0.as_slice());
    let mut u = DVector::from_column_slice(u_prev);
    let mut cost = 0.0;
    for k in 0..cfg.horizon {
        let d = du(k);
        u += &d;
        let e = &x - xv(k) - &rt;
        cost += (e.transpose() * &q1 * &e)[0] + (d.transpose() * &r * &d)[0];
        if cfg.formulation == Formulation::Modified {
            let v = xv(k);
            cost += (v.transpose() * &q2 * &v)[0];
        }
        x = &a * &x + &b * &u;
    }
    let e = &x - &rt;
    cost + (e.transpose() * &pf * &e)[0]
}

/// A random strictly convex QP `min 1/2 z'Hz + h'z, Dz <= d` with a known
/// optimum built from the KKT conditions: a chosen active set gets positive
/// multipliers and zero slack, the rest zero multipliers and positive slack.
pub struct KnownQp {
    pub hessian: DMatrix<f64>,
    pub h: DVector<f64>,
    pub constraints: DMatrix<f64>,
    pub d: DVector<f64>,
    pub z_star: DVector<f64>,
    pub y_star: DVector<f64>,
    pub v_star: f64,
}

pub fn random_known_qp(rng: &mut StdRng, n: usize, m: usize) -> KnownQp {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let hessian = &g * g.transpose() + DMatrix::identity(n, n) * rng.gen_range(0.5..2.0);
    let constraints = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0));
    let z_star = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
    // at most n active rows so the active gradients stay independent
    let max_active = n.min(m);
    let mut y_star = DVector::zeros(m);
    let mut d = &constraints * &z_star;
    for i in 0..m {
        if i < max_active && rng.gen_bool(0.5) {
            y_star[i] = rng.gen_range(0.1..2.0);
        } else {
            d[i] += rng.gen_range(0.05..1.0);
        }
    }
    let h = -(&hessian * &z_star) - constraints.transpose() * &y_star;
    let v_star = objective(&hessian, &h, &z_star);
    KnownQp { hessian, h, constraints, d, z_star, y_star, v_star }
}

pub fn objective(hessian: &DMatrix<f64>, h: &DVector<f64>, z: &DVector<f64>) -> f64 {
    0.5 * z.dot(&(hessian * z)) + h.dot(z)
}

/// Dual function at `y` given the primal minimiser `z = z(y)`.
pub fn dual_value(hessian: &DMatrix<f64>, h: &DVector<f64>, z: &DVector<f64>, y: &DVector<f64>, g: &DVector<f64>) -> f64 {
    objective(hessian, h, z) + y.dot(g)
}

/// Optimal value by enumerating every active set: each candidate solves the
/// equality-constrained KKT system and is kept when primal and dual
/// feasible. Exponential in `m`; meant for small problems.
pub fn enumerate_active_sets(
    hessian: &DMatrix<f64>,
    h: &DVector<f64>,
    constraints: &DMatrix<f64>,
    d: &DVector<f64>,
) -> Option<(DVector<f64>, f64)> {
    let (n, m) = (hessian.nrows(), constraints.nrows());
    assert!(m <= 20, "enumeration over {m} rows is too large");
    let mut best: Option<(DVector<f64>, f64)> = None;
    for mask in 0u32..(1 << m) {
        let active: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let k = active.len();
        if k > n {
            continue;
        }
        let mut kkt = DMatrix::zeros(n + k, n + k);
        let mut rhs = DVector::zeros(n + k);
        kkt.view_mut((0, 0), (n, n)).copy_from(hessian);
        rhs.rows_mut(0, n).copy_from(&(-h));
        for (c, &i) in active.iter().enumerate() {
            for j in 0..n {
                kkt[(n + c, j)] = constraints[(i, j)];
                kkt[(j, n + c)] = constraints[(i, j)];
            }
            rhs[n + c] = d[i];
        }
        let Some(sol) = kkt.lu().solve(&rhs) else { continue };
        let z = sol.rows(0, n).into_owned();
        if sol.rows(n, k).iter().any(|&mu| mu < -1e-9) {
            continue;
        }
        if (constraints * &z - d).iter().any(|&g| g > 1e-9) {
            continue;
        }
        let v = objective(hessian, h, &z);
        if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
            best = Some((z, v));
        }
    }
    best
}

/// Fixed-point inner product checked in exact integer arithmetic: returns
/// `|sum(x_i y_i) 2^p - r|` in units of `2^-2p`, where `x`, `y` and `r`
/// are raw mantissas at `p` fractional bits.
pub fn inner_product_error_units(x: &[i64], y: &[i64], r: i64, p: u32) -> u128 {
    let exact: i128 = x.iter().zip(y).map(|(&a, &b)| a as i128 * b as i128).sum();
    (exact - ((r as i128) << p)).unsigned_abs()
}
