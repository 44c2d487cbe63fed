use nalgebra::{DMatrix, DVector, Vector3};

use crate::control_model::{DiscreteModel, ModelState, NU, NX};
use crate::error::{Error, Result};

use super::{ConstraintSpec, Formulation, MpcConfig};

/// Dense QP `min 1/2 z'Hz + h'z  s.t.  Dz <= d`, with `h` and `d` affine in
/// the measured state `x`, lifted reference `rt` and previous input `u_prev`:
///
/// ```text
/// h = Fx x + Fr rt + Fu u_prev
/// d = d0 + Gx x + Gu u_prev
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct CondensedQp {
    pub hessian: DMatrix<f64>,
    pub constraints: DMatrix<f64>,
    pub h_state: DMatrix<f64>,
    pub h_reference: DMatrix<f64>,
    pub h_input: DMatrix<f64>,
    pub d_offset: DVector<f64>,
    pub d_state: DMatrix<f64>,
    pub d_input: DMatrix<f64>,
    pub formulation: Formulation,
    pub horizon: usize,
    pub control_horizon: usize,
    /// `(block name, first row, row count)` for each constraint block.
    pub row_blocks: Vec<(String, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpVectors {
    pub h: DVector<f64>,
    pub d: DVector<f64>,
}

impl CondensedQp {
    pub fn num_primal(&self) -> usize {
        self.hessian.nrows()
    }

    pub fn num_dual(&self) -> usize {
        self.constraints.nrows()
    }

    pub fn vectors(&self, x: &ModelState, r_tilde: &ModelState, u_prev: &Vector3<f64>) -> QpVectors {
        let x = DVector::from_column_slice(x.as_slice());
        let rt = DVector::from_column_slice(r_tilde.as_slice());
        let u = DVector::from_column_slice(u_prev.as_slice());
        QpVectors {
            h: &self.h_state * &x + &self.h_reference * &rt + &self.h_input * &u,
            d: &self.d_offset + &self.d_state * &x + &self.d_input * &u,
        }
    }

    /// `1/2 z'Hz + h'z`.
    pub fn objective(&self, z: &DVector<f64>, h: &DVector<f64>) -> f64 {
        0.5 * z.dot(&(&self.hessian * z)) + h.dot(z)
    }
}

pub fn update_qp_vectors(qp: &CondensedQp, x: &ModelState, r_tilde: &ModelState, u_prev: &Vector3<f64>) -> QpVectors {
    qp.vectors(x, r_tilde, u_prev)
}

/// Selection matrices that express per-step quantities as linear maps of `z`.
struct Layout {
    n: usize,
    nc: usize,
    formulation: Formulation,
}

impl Layout {
    /// `du_k` (zero past the control horizon).
    fn increment(&self, k: usize) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(NU, self.n);
        if k < self.nc {
            s.view_mut((0, NU * k), (NU, NU)).fill_with_identity();
        }
        s
    }

    /// `u_k - u_prev = sum of du_j for j <= min(k, Nc-1)`.
    fn input_offset(&self, k: usize) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(NU, self.n);
        for j in 0..=k.min(self.nc - 1) {
            s.view_mut((0, NU * j), (NU, NU)).fill_with_identity();
        }
        s
    }

    /// Virtual state `xv_k`, held at `xv_{Nc-1}` past the control horizon.
    fn virtual_state(&self, k: usize) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(NX, self.n);
        if self.formulation == Formulation::Modified {
            let j = k.min(self.nc - 1);
            s.view_mut((0, NU * self.nc + NX * j), (NX, NX)).fill_with_identity();
        }
        s
    }
}

/// Eliminates the predicted states and assembles the dense QP.
pub fn condense(model: &DiscreteModel, cfg: &MpcConfig, cons: &ConstraintSpec) -> Result<CondensedQp> {
    cfg.validate()?;
    for b in &cons.blocks {
        b.validate()?;
    }
    let (big_n, nc) = (cfg.horizon, cfg.control_horizon);
    let n = cfg.num_primal();
    let layout = Layout { n, nc, formulation: cfg.formulation };

    let a = DMatrix::from_column_slice(NX, NX, model.a.as_slice());
    let b = DMatrix::from_column_slice(NX, NU, model.b.as_slice());
    let q1 = DMatrix::from_column_slice(NX, NX, cfg.q1.as_slice());
    let q2 = DMatrix::from_column_slice(NX, NX, cfg.q2.as_slice());
    let r = DMatrix::from_column_slice(NU, NU, cfg.r.as_slice());
    let pf = DMatrix::from_column_slice(NX, NX, cfg.pf.as_slice());

    // x_k = px[k] x0 + pu[k] u_prev + pz[k] z
    let mut px = vec![DMatrix::identity(NX, NX)];
    let mut pu = vec![DMatrix::zeros(NX, NU)];
    let mut pz = vec![DMatrix::zeros(NX, n)];
    for k in 0..big_n {
        px.push(&a * &px[k]);
        pu.push(&a * &pu[k] + &b);
        pz.push(&a * &pz[k] + &b * layout.input_offset(k));
    }

    let mut hess = DMatrix::zeros(n, n);
    let mut fx = DMatrix::zeros(n, NX);
    let mut fu = DMatrix::zeros(n, NU);
    let mut fr = DMatrix::zeros(n, NX);
    for k in 0..big_n {
        // tracking error x_k - xv_k - rt
        let e = &pz[k] - layout.virtual_state(k);
        let et_q = e.transpose() * &q1;
        hess += &et_q * &e;
        fx += &et_q * &px[k];
        fu += &et_q * &pu[k];
        fr -= &et_q;
        if cfg.formulation == Formulation::Modified {
            let sv = layout.virtual_state(k);
            hess += sv.transpose() * &q2 * &sv;
        }
        let sd = layout.increment(k);
        hess += sd.transpose() * &r * &sd;
    }
    let et_p = pz[big_n].transpose() * &pf;
    hess += &et_p * &pz[big_n];
    fx += &et_p * &px[big_n];
    fu += &et_p * &pu[big_n];
    fr -= &et_p;

    // H = 2 * (accumulated form), symmetrized exactly
    let hess = &hess + hess.transpose();
    if hess.clone().cholesky().is_none() {
        return Err(Error::Parameter("condensed Hessian is not positive definite".into()));
    }

    let m = cons.num_rows(big_n, nc);
    let mut dmat = DMatrix::zeros(m, n);
    let mut d0 = DVector::zeros(m);
    let mut gx = DMatrix::zeros(m, NX);
    let mut gu = DMatrix::zeros(m, NU);
    let mut row_blocks = Vec::with_capacity(cons.blocks.len());
    let mut row = 0;
    for blk in &cons.blocks {
        let start = row;
        let kr = blk.rows();
        for k in blk.steps.steps(big_n, nc) {
            let gz = &blk.cc * &pz[k] + &blk.dc * layout.input_offset(k) + &blk.ec * layout.increment(k);
            let cx = &blk.cc * &px[k];
            let cu = &blk.cc * &pu[k] + &blk.dc;
            // upper: Gz z <= hi - cx x - cu u
            dmat.view_mut((row, 0), (kr, n)).copy_from(&gz);
            d0.rows_mut(row, kr).copy_from(&blk.hi);
            gx.view_mut((row, 0), (kr, NX)).copy_from(&(-&cx));
            gu.view_mut((row, 0), (kr, NU)).copy_from(&(-&cu));
            row += kr;
            // lower: -Gz z <= -lo + cx x + cu u
            dmat.view_mut((row, 0), (kr, n)).copy_from(&(-&gz));
            d0.rows_mut(row, kr).copy_from(&(-&blk.lo));
            gx.view_mut((row, 0), (kr, NX)).copy_from(&cx);
            gu.view_mut((row, 0), (kr, NU)).copy_from(&cu);
            row += kr;
        }
        row_blocks.push((blk.name.clone(), start, row - start));
    }
    debug_assert_eq!(row, m);

    Ok(CondensedQp {
        hessian: hess,
        constraints: dmat,
        h_state: fx * 2.0,
        h_reference: fr * 2.0,
        h_input: fu * 2.0,
        d_offset: d0,
        d_state: gx,
        d_input: gu,
        formulation: cfg.formulation,
        horizon: big_n,
        control_horizon: nc,
        row_blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::InertiaParams;
    use crate::mpc::{lift_reference, ConstraintBlock};

    fn setup() -> (DiscreteModel, MpcConfig) {
        let model = DiscreteModel::for_spacecraft(&InertiaParams::reference_spacecraft(), 0.5).unwrap();
        let cfg = MpcConfig::reference(&model).unwrap();
        (model, cfg)
    }

    fn input_only() -> ConstraintSpec {
        ConstraintSpec::new().with(ConstraintBlock::input_bounds([-1.0; 3], [1.0; 3]))
    }

    #[test]
    fn table_dimensions() {
        let (model, cfg) = setup();
        let u = input_only();
        let qp = condense(&model, &cfg, &u).unwrap();
        assert_eq!((qp.num_primal(), qp.num_dual()), (18, 12));
        let du = u.with(ConstraintBlock::input_rate_bounds([0.5; 3]));
        let qp = condense(&model, &cfg, &du).unwrap();
        assert_eq!((qp.num_primal(), qp.num_dual()), (18, 24));
        let x = du
            .with(ConstraintBlock::attitude_bounds([std::f64::consts::FRAC_PI_3; 3]))
            .with(ConstraintBlock::wheel_speed_bounds([10.0; 3]));
        let qp = condense(&model, &cfg, &x).unwrap();
        assert_eq!((qp.num_primal(), qp.num_dual()), (18, 144));
        assert_eq!(qp.row_blocks.len(), 4);
        assert_eq!(qp.row_blocks[3], ("wheel_speed".to_string(), 84, 60));
    }

    #[test]
    fn hessian_is_positive_definite() {
        let (model, cfg) = setup();
        let qp = condense(&model, &cfg, &input_only()).unwrap();
        assert!(qp.hessian.clone().cholesky().is_some());
        assert!((&qp.hessian - qp.hessian.transpose()).amax() == 0.0);
    }

    #[test]
    fn on_reference_the_unconstrained_optimum_is_zero() {
        let (model, cfg) = setup();
        let qp = condense(&model, &cfg, &input_only()).unwrap();
        let rt = lift_reference(&Vector3::new(0.08, -0.03, -0.1));
        let v = qp.vectors(&rt, &rt, &Vector3::zeros());
        assert!(v.h.amax() < 1e-9);
    }

    #[test]
    fn input_bound_offsets() {
        let (model, cfg) = setup();
        let qp = condense(&model, &cfg, &input_only()).unwrap();
        let x = ModelState::from_column_slice(&[0.1, -0.2, 0.3, 1.0, 2.0, -3.0]);
        let v = qp.vectors(&x, &ModelState::zeros(), &Vector3::zeros());
        assert!(v.d.iter().all(|&d| d == 1.0));

        let u_prev = Vector3::new(0.25, -0.5, 0.0);
        let v = qp.vectors(&x, &ModelState::zeros(), &u_prev);
        // rows: k=0 upper, k=0 lower, k=1 upper, k=1 lower
        for k in 0..2 {
            for i in 0..3 {
                assert!((v.d[6 * k + i] - (1.0 - u_prev[i])).abs() < 1e-15);
                assert!((v.d[6 * k + 3 + i] - (1.0 + u_prev[i])).abs() < 1e-15);
            }
        }
        // k = 1 constrains du_0 + du_1
        let row = qp.constraints.row(6);
        assert_eq!((row[0], row[3]), (1.0, 1.0));
    }

    #[test]
    fn standard_formulation_has_no_virtual_states() {
        let (model, cfg) = setup();
        let cfg = cfg.with_formulation(Formulation::Standard);
        let qp = condense(&model, &cfg, &input_only()).unwrap();
        assert_eq!((qp.num_primal(), qp.num_dual()), (6, 12));
    }
}
