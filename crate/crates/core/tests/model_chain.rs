mod support;

use nalgebra::{DMatrix, DVector, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use attitude_mpc::control_model::{build_continuous_model, discretize_zoh, DiscreteModel, ModelState, NU, NX};
use attitude_mpc::dynamics::{plant_derivative, InertiaParams, PlantState};
use attitude_mpc::mpc::{condense, ConstraintBlock, ConstraintSpec, Formulation, MpcConfig};

fn random_params(rng: &mut StdRng) -> InertiaParams {
    let wheel = [rng.gen_range(5.0..100.0), rng.gen_range(5.0..100.0), rng.gen_range(5.0..100.0)];
    let body = wheel.map(|w| w * rng.gen_range(2.0..200.0));
    InertiaParams::new(body, wheel).unwrap()
}

#[test]
fn zoh_matches_matrix_exponential() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..50 {
        let params = random_params(&mut rng);
        let ts = rng.gen_range(0.01..5.0);
        let lin = build_continuous_model(&params).unwrap();
        let d = discretize_zoh(&lin, ts).unwrap();
        let ac = DMatrix::from_column_slice(NX, NX, lin.ac.as_slice());
        let bc = DMatrix::from_column_slice(NX, NU, lin.bc.as_slice());
        let (a, b) = support::zoh_by_expm(&ac, &bc, ts);
        let a_err = (DMatrix::from_column_slice(NX, NX, d.a.as_slice()) - &a).amax();
        let b_err = (DMatrix::from_column_slice(NX, NU, d.b.as_slice()) - &b).amax();
        assert!(a_err <= 4.0 * f64::EPSILON * a.amax(), "A off by {a_err}");
        assert!(b_err <= 16.0 * f64::EPSILON * b.amax(), "B off by {b_err}");
    }
}

#[test]
fn expm_oracle_sanity() {
    // rotation generator
    let m = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let e = support::expm(&m);
    assert!((e[(0, 0)] - 1f64.cos()).abs() < 1e-15);
    assert!((e[(1, 0)] - 1f64.sin()).abs() < 1e-15);
}

fn setups() -> Vec<(DiscreteModel, MpcConfig, ConstraintSpec)> {
    let model = DiscreteModel::for_spacecraft(&InertiaParams::reference_spacecraft(), 0.5).unwrap();
    let cfg = MpcConfig::reference(&model).unwrap();
    let cons = ConstraintSpec::new()
        .with(ConstraintBlock::input_bounds([-1.0; 3], [1.0; 3]))
        .with(ConstraintBlock::input_rate_bounds([0.5; 3]))
        .with(ConstraintBlock::attitude_bounds([1.0; 3]))
        .with(ConstraintBlock::wheel_speed_bounds([10.0; 3]));
    let mut long = cfg.clone();
    long.horizon = 7;
    long.control_horizon = 4;
    vec![
        (model.clone(), cfg.clone(), cons.clone()),
        (model.clone(), cfg.with_formulation(Formulation::Standard), cons.clone()),
        (model, long, cons),
    ]
}

#[test]
fn condensed_cost_matches_rollout() {
    let mut rng = StdRng::seed_from_u64(11);
    for (model, cfg, cons) in setups() {
        let qp = condense(&model, &cfg, &cons).unwrap();
        for _ in 0..40 {
            let x = ModelState::from_fn(|_, _| rng.gen_range(-1.0..1.0));
            let rt = ModelState::from_fn(|i, _| if i < 3 { rng.gen_range(-0.5..0.5) } else { 0.0 });
            let u_prev = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
            let z = DVector::from_fn(qp.num_primal(), |_, _| rng.gen_range(-1.0..1.0));
            let v = qp.vectors(&x, &rt, &Vector3::from(u_prev));
            let condensed = qp.objective(&z, &v.h);
            let zero = support::rollout_cost(&model, &cfg, &x, &rt, &u_prev, &DVector::zeros(qp.num_primal()));
            let rolled = support::rollout_cost(&model, &cfg, &x, &rt, &u_prev, &z) - zero;
            let scale = rolled.abs().max(zero.abs()).max(1.0);
            assert!((condensed - rolled).abs() <= 1e-9 * scale, "{condensed} vs {rolled}");
        }
    }
}

#[test]
fn constraint_rows_match_rollout() {
    let mut rng = StdRng::seed_from_u64(12);
    let (model, cfg, cons) = setups().remove(0);
    let qp = condense(&model, &cfg, &cons).unwrap();
    let x0 = ModelState::from_fn(|_, _| rng.gen_range(-1.0..1.0));
    let u_prev = Vector3::new(0.3, -0.2, 0.1);
    let z = DVector::from_fn(qp.num_primal(), |_, _| rng.gen_range(-1.0..1.0));
    let v = qp.vectors(&x0, &ModelState::zeros(), &u_prev);
    let g = &qp.constraints * &z - &v.d;

    // attitude upper rows: x_k[0..3] - 1 for k = 1..N
    let (_, start, _) = qp.row_blocks.iter().find(|b| b.0 == "attitude").unwrap().clone();
    let mut x = x0;
    let mut u = u_prev;
    for k in 0..cfg.horizon {
        if k < cfg.control_horizon {
            u += Vector3::new(z[3 * k], z[3 * k + 1], z[3 * k + 2]);
        }
        x = model.step(&x, &u);
        for i in 0..3 {
            let row = start + 6 * k + i;
            assert!((g[row] - (x[i] - 1.0)).abs() < 1e-12, "step {}, axis {i}", k + 1);
        }
    }
}

#[test]
fn plant_linearization_matches_continuous_model() {
    let mut rng = StdRng::seed_from_u64(13);
    let params = InertiaParams::reference_spacecraft();
    let lin = build_continuous_model(&params).unwrap();
    for _ in 0..200 {
        let x = ModelState::from_fn(|_, _| rng.gen_range(-1e-3..1e-3));
        let u = Vector3::from_fn(|_, _| rng.gen_range(-1e-3..1e-3));
        // body rates from the momentum relation the reduced model eliminates them with
        let wheel = Vector3::new(x[3], x[4], x[5]);
        let rate = Vector3::from_fn(|i, _| -params.wheel[i] * wheel[i] / params.body[i]);
        let s = PlantState { attitude: Vector3::new(x[0], x[1], x[2]), body_rate: rate, wheel_speed: wheel };
        let f = plant_derivative(&s, &u, &params).unwrap();
        let lin_rate = lin.ac * x + lin.bc * u;
        for i in 0..3 {
            assert!((f[i] - lin_rate[i]).abs() <= 1e-6);
            assert!((f[6 + i] - lin_rate[3 + i]).abs() <= 1e-6);
        }
    }
}
