//! Fixed-point model predictive control of spacecraft attitude with reaction
//! wheels.
//!
//! * [`fixed_point`]: Q-format scalars with round-to-nearest and overflow
//!   detection.
//! * [`dynamics`]: the nonlinear nine-state spacecraft plant and an RK4
//!   integrator.
//! * [`control_model`]: the six-state linear prediction model and its exact
//!   zero-order-hold discretization.
//! * [`mpc`]: weights, constraints, condensing to a dense QP, the reference
//!   integrator.
//! * [`solver`]: dual gradient projection in float or fixed-point arithmetic.
//! * [`sim`]: closed-loop simulation, experiments, complexity accounting, I/O.

pub mod control_model;
pub mod dynamics;
pub mod error;
pub mod fixed_point;
pub mod mpc;
pub mod sim;
pub mod solver;

pub use error::{Error, Result};
