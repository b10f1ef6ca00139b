//! The two underwater-vehicle benchmarks: a surge/yaw-rate model with three
//! thrusters and a surge/sway/yaw model with four thrusters in an X layout,
//! yaw angle and its integral.
//!
//! Thruster `i` at angle `α_i` produces `F_{i,x} = F_i sin α_i`,
//! `F_{i,y} = F_i cos α_i` and yaw moment `F_i (cos α_i l_{i,x} − sin α_i l_{i,y})`.
//! Efficiency `φ_i` scales thruster `i`.
//!
//! Default coefficients are not published values; see [`AuvParams::auv2_default`].

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cegis::Problem;
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::model::{BoundingBox, Dynamics, FaultSet, InputBox, LipschitzBounds, NonlinearModel, StatePolytope};
use crate::sim::{FaultPhase, ReferenceSignal};

/// Default Euler step, seconds.
pub const DEFAULT_DT: f64 = 0.01;
/// Default per-thruster saturation, newtons.
pub const DEFAULT_U_MAX: f64 = 38.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thruster {
    /// Mounting angle α, degrees.
    pub alpha_deg: f64,
    pub l_x: f64,
    pub l_y: f64,
}

impl Thruster {
    fn new(alpha_deg: f64, l_x: f64, l_y: f64) -> Self {
        Self { alpha_deg, l_x, l_y }
    }

    /// `(surge, sway, yaw)` force and moment per newton of thrust.
    pub fn unit_wrench(&self) -> (f64, f64, f64) {
        let (s, c) = self.alpha_deg.to_radians().sin_cos();
        (s, c, -s * self.l_y + c * self.l_x)
    }
}

/// Physical coefficients; keys mirror the usual marine-craft symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuvParams {
    /// Mass, kg.
    pub m: f64,
    /// Yaw inertia, kg m².
    #[serde(rename = "J_z")]
    pub j_z: f64,
    #[serde(rename = "X_u")]
    pub x_u: f64,
    #[serde(rename = "X_uu")]
    pub x_uu: f64,
    /// Sway drag; unused by the two-state model.
    #[serde(rename = "Y_v", default)]
    pub y_v: f64,
    #[serde(rename = "Y_vv", default)]
    pub y_vv: f64,
    #[serde(rename = "N_r")]
    pub n_r: f64,
    #[serde(rename = "N_rr")]
    pub n_rr: f64,
    pub thrusters: Vec<Thruster>,
    /// Per-thruster saturation, N.
    #[serde(default = "default_u_max")]
    pub u_max: f64,
}

fn default_u_max() -> f64 {
    DEFAULT_U_MAX
}

impl AuvParams {
    /// Heavy hovering vehicle with three angled thrusters.
    ///
    /// Not published values. Chosen so that the learner SDP is feasible on
    /// `[-2, 2]²` with the stock hyperparameters and the saturated closed loop
    /// of a high-gain tracking controller stays well damped.
    pub fn auv2_default() -> Self {
        Self {
            m: 950.0,
            j_z: 210.0,
            x_u: 55.0,
            x_uu: 3.0,
            y_v: 0.0,
            y_vv: 0.0,
            n_r: 34.0,
            n_rr: 1.2,
            thrusters: vec![
                Thruster::new(62.0, -0.54, -0.23),
                Thruster::new(64.0, -0.38, 0.37),
                Thruster::new(159.0, 0.50, 0.05),
            ],
            u_max: DEFAULT_U_MAX,
        }
    }

    /// Light vehicle with four thrusters in an X layout. Not published values.
    pub fn auv5_default() -> Self {
        Self {
            m: 30.0,
            j_z: 3.0,
            x_u: 20.0,
            x_uu: 6.0,
            y_v: 25.0,
            y_vv: 6.0,
            n_r: 5.0,
            n_rr: 1.0,
            thrusters: vec![
                Thruster::new(45.0, -0.4, 0.3),
                Thruster::new(-45.0, -0.4, -0.3),
                Thruster::new(-45.0, 0.4, 0.3),
                Thruster::new(45.0, 0.4, -0.3),
            ],
            u_max: DEFAULT_U_MAX,
        }
    }

    fn validate(&self, thrusters: usize) -> Result<()> {
        if self.thrusters.len() != thrusters {
            return Err(Error::Config(format!(
                "model needs {thrusters} thrusters, got {}",
                self.thrusters.len()
            )));
        }
        if !(self.m > 0.0 && self.j_z > 0.0) {
            return Err(Error::Config("m and J_z must be positive".into()));
        }
        let drags = [self.x_u, self.x_uu, self.y_v, self.y_vv, self.n_r, self.n_rr];
        if drags.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(Error::Config("drag coefficients must be finite and nonnegative".into()));
        }
        if !(self.u_max.is_finite() && self.u_max > 0.0) {
            return Err(Error::Config("u_max must be positive".into()));
        }
        Ok(())
    }

    fn wrenches(&self) -> Vec<(f64, f64, f64)> {
        self.thrusters.iter().map(Thruster::unit_wrench).collect()
    }
}

/// Surge speed `x₁` and yaw rate `x₂`.
#[derive(Clone, Debug)]
pub struct Auv2 {
    params: AuvParams,
    wrench: Vec<(f64, f64, f64)>,
}

impl Dynamics for Auv2 {
    fn state_dim(&self) -> usize {
        2
    }

    fn input_dim(&self) -> usize {
        3
    }

    fn drift(&self, x: &DVector<f64>) -> DVector<f64> {
        let p = &self.params;
        DVector::from_vec(vec![
            (-p.x_u * x[0] - p.x_uu * x[0] * x[0]) / p.m,
            (-p.n_r * x[1] - p.n_rr * x[1] * x[1]) / p.j_z,
        ])
    }

    fn input_matrix(&self, _x: &DVector<f64>, phi: &DVector<f64>) -> DMatrix<f64> {
        let p = &self.params;
        DMatrix::from_fn(2, 3, |r, i| {
            let (fx, _, t) = self.wrench[i];
            phi[i] * if r == 0 { fx / p.m } else { t / p.j_z }
        })
    }

    fn drift_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let p = &self.params;
        DMatrix::from_diagonal(&DVector::from_vec(vec![
            -(p.x_u + 2.0 * p.x_uu * x[0]) / p.m,
            -(p.n_r + 2.0 * p.n_rr * x[1]) / p.j_z,
        ]))
    }

    fn input_matrix_jacobians(&self, _x: &DVector<f64>, _phi: &DVector<f64>) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(2, 2); 3]
    }

    // Quadratic drag and Coriolis terms have linear Jacobians; thrust is state-free.
    fn affine_jacobians(&self) -> bool {
        true
    }

    fn analytic_lipschitz(&self, _bbox: &BoundingBox, dt: f64) -> Option<LipschitzBounds> {
        let p = &self.params;
        // A is diagonal with slopes 2X_uu/m and 2N_rr/J_z; B is state-free and linear in φ.
        let kappa_a = 2.0 * dt * (p.x_uu / p.m).max(p.n_rr / p.j_z);
        Some(LipschitzBounds { kappa_a, kappa_b: dt * max_column_norm(&self.input_matrix(&DVector::zeros(2), &DVector::from_element(3, 1.0))), certified: true })
    }
}

/// Surge `x₁`, sway `x₂`, yaw rate `x₃`, yaw angle `x₄` and its integral `x₅`.
#[derive(Clone, Debug)]
pub struct Auv5 {
    params: AuvParams,
    wrench: Vec<(f64, f64, f64)>,
}

impl Dynamics for Auv5 {
    fn state_dim(&self) -> usize {
        5
    }

    fn input_dim(&self) -> usize {
        4
    }

    fn drift(&self, x: &DVector<f64>) -> DVector<f64> {
        let p = &self.params;
        DVector::from_vec(vec![
            (-p.x_u * x[0] - p.x_uu * x[0] * x[0] + p.m * x[1] * x[2]) / p.m,
            (-p.y_v * x[1] - p.y_vv * x[1] * x[1] - p.m * x[0] * x[2]) / p.m,
            (-p.n_r * x[2] - p.n_rr * x[2] * x[2]) / p.j_z,
            x[2],
            x[3],
        ])
    }

    fn input_matrix(&self, _x: &DVector<f64>, phi: &DVector<f64>) -> DMatrix<f64> {
        let p = &self.params;
        DMatrix::from_fn(5, 4, |r, i| {
            let (fx, fy, t) = self.wrench[i];
            phi[i]
                * match r {
                    0 => fx / p.m,
                    1 => fy / p.m,
                    2 => t / p.j_z,
                    _ => 0.0,
                }
        })
    }

    fn drift_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let p = &self.params;
        let mut j = DMatrix::zeros(5, 5);
        j[(0, 0)] = -(p.x_u + 2.0 * p.x_uu * x[0]) / p.m;
        j[(0, 1)] = x[2];
        j[(0, 2)] = x[1];
        j[(1, 0)] = -x[2];
        j[(1, 1)] = -(p.y_v + 2.0 * p.y_vv * x[1]) / p.m;
        j[(1, 2)] = -x[0];
        j[(2, 2)] = -(p.n_r + 2.0 * p.n_rr * x[2]) / p.j_z;
        j[(3, 2)] = 1.0;
        j[(4, 3)] = 1.0;
        j
    }

    fn input_matrix_jacobians(&self, _x: &DVector<f64>, _phi: &DVector<f64>) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(5, 5); 4]
    }

    fn jacobian_support(&self) -> Vec<bool> {
        vec![true, true, true, false, false]
    }

    // Quadratic drag and Coriolis terms have linear Jacobians; thrust is state-free.
    fn affine_jacobians(&self) -> bool {
        true
    }

    fn analytic_lipschitz(&self, _bbox: &BoundingBox, dt: f64) -> Option<LipschitzBounds> {
        let p = &self.params;
        // Frobenius bound of the Jacobian's directional derivative along a unit Δx.
        let a = 2.0 * p.x_uu / p.m;
        let b = 2.0 * p.y_vv / p.m;
        let c = 2.0 * p.n_rr / p.j_z;
        let kappa_a = dt * (1.0 + a * a).max(1.0 + b * b).max(2.0 + c * c).sqrt();
        let g = self.input_matrix(&DVector::zeros(5), &DVector::from_element(4, 1.0));
        Some(LipschitzBounds { kappa_a, kappa_b: dt * max_column_norm(&g), certified: true })
    }
}

fn max_column_norm(g: &DMatrix<f64>) -> f64 {
    g.column_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn auv2(params: &AuvParams, dt: f64) -> Result<NonlinearModel> {
    params.validate(3)?;
    let dynamics = Auv2 { params: params.clone(), wrench: params.wrenches() };
    NonlinearModel::new("auv2", Arc::new(dynamics), dt)
}

pub fn auv5(params: &AuvParams, dt: f64) -> Result<NonlinearModel> {
    params.validate(4)?;
    let dynamics = Auv5 { params: params.clone(), wrench: params.wrenches() };
    NonlinearModel::new("auv5", Arc::new(dynamics), dt)
}

/// AUV2 on `[-2, 2]²` with analytic Lipschitz bounds.
pub fn auv2_problem(params: &AuvParams) -> Result<Problem> {
    let model = auv2(params, DEFAULT_DT)?;
    let domain = StatePolytope::from_box(DVector::from_element(2, -2.0), DVector::from_element(2, 2.0))?;
    Problem::new(model, domain, InputBox::uniform(3, params.u_max)?, None)
}

/// AUV5 on `[-2, 2]³ × [-100, 100]²` with analytic Lipschitz bounds.
pub fn auv5_problem(params: &AuvParams) -> Result<Problem> {
    let model = auv5(params, DEFAULT_DT)?;
    let domain = StatePolytope::from_box(
        DVector::from_vec(vec![-2.0, -2.0, -2.0, -100.0, -100.0]),
        DVector::from_vec(vec![2.0, 2.0, 2.0, 100.0, 100.0]),
    )?;
    Problem::new(model, domain, InputBox::uniform(4, params.u_max)?, None)
}

/// The tracking gain published for the two-state benchmark (N per unit error).
pub fn published_auv2_gain() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 2, &[-43.987, 0.308, -30.985, 7.948, -1.187, 37.481]) * 1e3
}

/// Fault set of a model with `p` thrusters.
pub fn fault_set(model: &NonlinearModel) -> FaultSet {
    FaultSet::new(model.p()).expect("models have at least one actuator")
}

/// Tracking `x_ref = [0.5, 0]` for 30 s from rest: nominal, then thruster 3 at
/// 10% on `(10, 20]`, then thruster 2 at 10% on `(20, 30]`.
pub fn auv2_three_phase_scenario() -> ScenarioConfig {
    let phase = |t_start: f64, phi: [f64; 3]| FaultPhase { t_start, t_end: t_start + 10.0, phi: phi.to_vec() };
    ScenarioConfig {
        horizon: 30.0,
        x0: vec![0.0, 0.0],
        reference: ReferenceSignal::Constant { x_ref: vec![0.5, 0.0] },
        phases: vec![phase(0.0, [1.0, 1.0, 1.0]), phase(10.0, [1.0, 1.0, 0.1]), phase(20.0, [1.0, 0.1, 1.0])],
    }
}
