//! Control-affine models `ẋ = f(x) + g(x, φ) u` with per-actuator efficiency φ,
//! their Euler-discretized Jacobian pairs, and Lipschitz bounds for those
//! Jacobians over a state domain.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conic::{self, LinearProgram};
use crate::error::{Error, Result};
use crate::ldi::op_norm;

/// Continuous-time evaluators of a control-affine system.
///
/// Implementations must be pure: the verifier calls them concurrently.
pub trait Dynamics: Send + Sync {
    fn state_dim(&self) -> usize;
    fn input_dim(&self) -> usize;
    /// Drift `f(x)`.
    fn drift(&self, x: &DVector<f64>) -> DVector<f64>;
    /// Input matrix `g(x, φ)`, n×p.
    fn input_matrix(&self, x: &DVector<f64>, phi: &DVector<f64>) -> DMatrix<f64>;
    /// `∂f/∂x`, n×n.
    fn drift_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
    /// State Jacobian of every column of `g`; entry `i` is `∂g_i/∂x` (n×n).
    fn input_matrix_jacobians(&self, x: &DVector<f64>, phi: &DVector<f64>) -> Vec<DMatrix<f64>>;

    /// State coordinates on which `∂f/∂x` and `g` actually depend.
    ///
    /// The verifier only searches these; the objective is constant along the rest.
    fn jacobian_support(&self) -> Vec<bool> {
        vec![true; self.state_dim()]
    }

    /// Analytic Lipschitz constants of the discrete Jacobians over `bbox`, if known.
    fn analytic_lipschitz(&self, _bbox: &BoundingBox, _dt: f64) -> Option<LipschitzBounds> {
        None
    }

    /// True when `∂f/∂x` is affine in `x` and `g` does not depend on `x` and is
    /// linear in `φ`. `(A, B)` is then jointly affine in `(x, φ)`.
    fn affine_jacobians(&self) -> bool {
        false
    }
}

/// A named control-affine model together with its Euler step.
#[derive(Clone)]
pub struct NonlinearModel {
    name: String,
    dt: f64,
    dynamics: Arc<dyn Dynamics>,
}

impl fmt::Debug for NonlinearModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonlinearModel")
            .field("name", &self.name)
            .field("n", &self.n())
            .field("p", &self.p())
            .field("dt", &self.dt)
            .finish()
    }
}

impl NonlinearModel {
    pub fn new(name: impl Into<String>, dynamics: Arc<dyn Dynamics>, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive and finite, got {dt}")));
        }
        if dynamics.state_dim() == 0 || dynamics.input_dim() == 0 {
            return Err(Error::Config("model needs n >= 1 and p >= 1".into()));
        }
        Ok(Self { name: name.into(), dt, dynamics })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.dynamics.state_dim()
    }

    pub fn p(&self) -> usize {
        self.dynamics.input_dim()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dynamics(&self) -> &dyn Dynamics {
        self.dynamics.as_ref()
    }

    pub fn jacobian_support(&self) -> Vec<bool> {
        self.dynamics.jacobian_support()
    }

    pub fn affine_jacobians(&self) -> bool {
        self.dynamics.affine_jacobians()
    }

    fn check_state(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.n() {
            return Err(dim_err("state", self.n(), x.len()));
        }
        Ok(())
    }

    fn check_fault(&self, phi: &DVector<f64>) -> Result<()> {
        if phi.len() != self.p() {
            return Err(dim_err("fault vector", self.p(), phi.len()));
        }
        Ok(())
    }

    /// Discrete Jacobian pair `A = I + dt ∂f/∂x`, `B = dt g(x̄, φ̄)`.
    pub fn linearize(&self, x: &DVector<f64>, phi: &DVector<f64>) -> Result<JacobianPair> {
        self.check_state(x)?;
        self.check_fault(phi)?;
        let n = self.n();
        let a = DMatrix::identity(n, n) + self.dynamics.drift_jacobian(x) * self.dt;
        let b = self.dynamics.input_matrix(x, phi) * self.dt;
        check_finite("A", &a)?;
        check_finite("B", &b)?;
        Ok(JacobianPair { a, b, x: x.clone(), phi: phi.clone() })
    }

    /// Continuous right-hand side `f(x) + g(x, φ) u`.
    pub fn rhs(&self, x: &DVector<f64>, u: &DVector<f64>, phi: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_state(x)?;
        self.check_fault(phi)?;
        if u.len() != self.p() {
            return Err(dim_err("input", self.p(), u.len()));
        }
        Ok(self.dynamics.drift(x) + self.dynamics.input_matrix(x, phi) * u)
    }

    /// One explicit Euler step. `k` is the step index reported on divergence.
    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>, phi: &DVector<f64>, k: usize) -> Result<DVector<f64>> {
        let next = x + self.rhs(x, u, phi)? * self.dt;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: k, time: k as f64 * self.dt });
        }
        Ok(next)
    }
}

fn dim_err(context: &'static str, expected: usize, got: usize) -> Error {
    Error::Dimension { context, expected: expected.to_string(), got: got.to_string() }
}

/// Fails with the first non-finite entry of `m`.
pub fn check_finite(what: &'static str, m: &DMatrix<f64>) -> Result<()> {
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if !m[(r, c)].is_finite() {
                return Err(Error::NonFinite { what, row: r, col: c });
            }
        }
    }
    Ok(())
}

/// Single-actuator fault set: subproblem `i` frees `φ_i ∈ [0, 1]`, all others at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaultSet {
    p: usize,
}

impl FaultSet {
    pub fn new(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Config("fault set needs at least one actuator".into()));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn subproblem_count(&self) -> usize {
        self.p
    }

    pub fn nominal(&self) -> DVector<f64> {
        DVector::from_element(self.p, 1.0)
    }

    /// Fault vector of subproblem `i` with `φ_i = value`.
    pub fn fault_vector(&self, i: usize, value: f64) -> Result<DVector<f64>> {
        if i >= self.p {
            return Err(Error::Contract(format!("subproblem {i} out of range for p = {}", self.p)));
        }
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::Contract(format!("efficiency {value} outside [0, 1]")));
        }
        let mut phi = self.nominal();
        phi[i] = value;
        Ok(phi)
    }

    /// Whether `phi` lies in the set: entries in [0,1], at most one below 1.
    pub fn contains(&self, phi: &DVector<f64>) -> bool {
        phi.len() == self.p
            && phi.iter().all(|v| (0.0..=1.0).contains(v))
            && phi.iter().filter(|v| **v < 1.0).count() <= 1
    }
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundingBox {
    pub lower: DVector<f64>,
    pub upper: DVector<f64>,
}

impl BoundingBox {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(dim_err("bounding box", lower.len(), upper.len()));
        }
        for k in 0..lower.len() {
            if !(lower[k].is_finite() && upper[k].is_finite() && lower[k] <= upper[k]) {
                return Err(Error::Config(format!(
                    "invalid box bounds on coordinate {k}: [{}, {}]",
                    lower[k], upper[k]
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }

    pub fn diameter(&self) -> f64 {
        (&self.upper - &self.lower).norm()
    }

    pub fn contains(&self, x: &DVector<f64>, slack: f64) -> bool {
        x.len() == self.dim()
            && (0..self.dim()).all(|k| x[k] >= self.lower[k] - slack && x[k] <= self.upper[k] + slack)
    }
}

/// State domain `D = {x : L x ≤ 1}` with a bounding box for the verifier.
#[derive(Clone, Debug, PartialEq)]
pub struct StatePolytope {
    l: DMatrix<f64>,
    bbox: BoundingBox,
}

impl StatePolytope {
    /// Box `lower ≤ x ≤ upper`; the origin must be strictly inside.
    pub fn from_box(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        let bbox = BoundingBox::new(lower, upper)?;
        let n = bbox.dim();
        let mut rows = Vec::with_capacity(2 * n);
        for k in 0..n {
            if !(bbox.lower[k] < 0.0 && bbox.upper[k] > 0.0) {
                return Err(Error::Config(format!(
                    "origin must be interior to the domain box (coordinate {k})"
                )));
            }
            let mut up = vec![0.0; n];
            up[k] = 1.0 / bbox.upper[k];
            let mut lo = vec![0.0; n];
            lo[k] = 1.0 / bbox.lower[k];
            rows.push(up);
            rows.push(lo);
        }
        let l = DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]);
        Ok(Self { l, bbox })
    }

    /// General polytope. Without `bbox`, the bounding box is computed with 2n LPs.
    pub fn from_rows(l: DMatrix<f64>, bbox: Option<BoundingBox>) -> Result<Self> {
        if l.nrows() == 0 || l.ncols() == 0 {
            return Err(Error::Config("polytope needs at least one row".into()));
        }
        check_finite("L", &l)?;
        let bbox = match bbox {
            Some(b) => {
                if b.dim() != l.ncols() {
                    return Err(dim_err("bounding box", l.ncols(), b.dim()));
                }
                b
            }
            None => polytope_bounding_box(&l)?,
        };
        Ok(Self { l, bbox })
    }

    pub fn l(&self) -> &DMatrix<f64> {
        &self.l
    }

    pub fn rows(&self) -> usize {
        self.l.nrows()
    }

    pub fn dim(&self) -> usize {
        self.l.ncols()
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn contains(&self, x: &DVector<f64>, slack: f64) -> bool {
        x.len() == self.dim() && (&self.l * x).iter().all(|v| *v <= 1.0 + slack)
    }
}

fn polytope_bounding_box(l: &DMatrix<f64>) -> Result<BoundingBox> {
    let n = l.ncols();
    let mut lower = DVector::zeros(n);
    let mut upper = DVector::zeros(n);
    for k in 0..n {
        for (sign, out) in [(1.0, &mut upper), (-1.0, &mut lower)] {
            let mut c = DVector::zeros(n);
            c[k] = sign;
            let lp = LinearProgram::new(c, l.clone(), DVector::from_element(l.nrows(), 1.0))?;
            match lp.maximize(conic::DEFAULT_TOL)? {
                conic::LpOutcome::Optimal { value, .. } => out[k] = sign * value,
                conic::LpOutcome::Unbounded => {
                    return Err(Error::Config(format!("polytope is unbounded along coordinate {k}")))
                }
                conic::LpOutcome::Infeasible => return Err(Error::Config("polytope is empty".into())),
            }
        }
    }
    BoundingBox::new(lower, upper)
}

/// Per-actuator saturation thresholds `ū`.
#[derive(Clone, Debug, PartialEq)]
pub struct InputBox {
    u_max: DVector<f64>,
}

impl InputBox {
    pub fn new(u_max: DVector<f64>) -> Result<Self> {
        if u_max.is_empty() || u_max.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Config("saturation thresholds must be positive and finite".into()));
        }
        Ok(Self { u_max })
    }

    pub fn uniform(p: usize, value: f64) -> Result<Self> {
        Self::new(DVector::from_element(p, value))
    }

    pub fn u_max(&self) -> &DVector<f64> {
        &self.u_max
    }

    pub fn p(&self) -> usize {
        self.u_max.len()
    }
}

/// One element of the uncertainty set: a discrete Jacobian pair and its origin `(x̄, φ̄)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobianPair {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub x: DVector<f64>,
    pub phi: DVector<f64>,
}

impl JacobianPair {
    /// Combined operator-norm distance `‖ΔA‖ + ‖ΔB‖`.
    pub fn distance(&self, other: &JacobianPair) -> f64 {
        op_norm(&(&self.a - &other.a)) + op_norm(&(&self.b - &other.b))
    }
}

/// Lipschitz constants of `x ↦ A(x)` and `(x, φ) ↦ B(x, φ)` in operator norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzBounds {
    pub kappa_a: f64,
    pub kappa_b: f64,
    /// True for user-supplied analytic bounds, false for sampled estimates.
    pub certified: bool,
}

impl LipschitzBounds {
    pub fn new(kappa_a: f64, kappa_b: f64, certified: bool) -> Result<Self> {
        if !(kappa_a.is_finite() && kappa_b.is_finite() && kappa_a >= 0.0 && kappa_b >= 0.0) {
            return Err(Error::Config(format!(
                "Lipschitz bounds must be finite and nonnegative, got ({kappa_a}, {kappa_b})"
            )));
        }
        Ok(Self { kappa_a, kappa_b, certified })
    }
}

/// Sampling settings for [`estimate_lipschitz`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LipschitzSampling {
    pub samples: usize,
    pub safety_factor: f64,
    pub seed: u64,
}

impl Default for LipschitzSampling {
    fn default() -> Self {
        Self { samples: 200, safety_factor: 2.0, seed: 0 }
    }
}

/// Sampled Jacobian Lipschitz constants, inflated by `safety_factor`.
///
/// Ratios are taken over random point pairs plus axis-aligned and fault-only
/// partners of each point. Only the model's Jacobian support is sampled, so
/// distances are measured in the coordinates the Jacobians depend on.
pub fn estimate_lipschitz(
    model: &NonlinearModel,
    polytope: &StatePolytope,
    faults: &FaultSet,
    settings: &LipschitzSampling,
) -> Result<LipschitzBounds> {
    if settings.samples < 2 {
        return Err(Error::Config("Lipschitz estimation needs at least 2 samples".into()));
    }
    if !(settings.safety_factor.is_finite() && settings.safety_factor > 0.0) {
        return Err(Error::Config("safety factor must be positive".into()));
    }
    if polytope.dim() != model.n() || faults.p() != model.p() {
        return Err(dim_err("Lipschitz estimation", model.n(), polytope.dim()));
    }
    let bbox = polytope.bbox();
    let support = model.jacobian_support();
    let active: Vec<usize> = (0..model.n()).filter(|k| support[*k]).collect();
    if active.iter().any(|k| bbox.width(*k) <= 0.0) {
        return Err(Error::Config("degenerate domain: zero-volume bounding box".into()));
    }
    let anchor = DVector::from_fn(model.n(), |k, _| {
        if bbox.lower[k] <= 0.0 && bbox.upper[k] >= 0.0 {
            0.0
        } else {
            0.5 * (bbox.lower[k] + bbox.upper[k])
        }
    });

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut points = Vec::with_capacity(settings.samples * (active.len() + 2));
    for s in 0..settings.samples {
        let mut x = anchor.clone();
        for &k in &active {
            x[k] = rng.gen_range(bbox.lower[k]..=bbox.upper[k]);
        }
        let phi = faults.fault_vector(s % faults.p(), rng.gen_range(0.0..=1.0))?;
        points.push(model.linearize(&x, &phi)?);
    }

    let dt = model.dt();
    let mut kappa_a: f64 = 0.0;
    let mut kappa_b: f64 = 0.0;
    let mut update = |p: &JacobianPair, q: &JacobianPair| {
        let dx = active.iter().map(|k| (p.x[*k] - q.x[*k]).powi(2)).sum::<f64>().sqrt();
        let dphi = (&p.phi - &q.phi).norm();
        if dx > 0.0 {
            kappa_a = kappa_a.max(op_norm(&(&p.a - &q.a)) / dx);
        }
        // The verifier varies one fault coordinate at a time; pairs from different
        // subproblems would measure a constant the search never uses.
        let changed = (0..p.phi.len()).filter(|i| p.phi[*i] != q.phi[*i]).count();
        if changed <= 1 && dx + dphi > 0.0 {
            kappa_b = kappa_b.max(op_norm(&(&p.b - &q.b)) / (dx + dphi));
        }
    };

    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            update(&points[i], &points[j]);
        }
    }
    let mut local_b: f64 = 0.0;
    for p in &points {
        for &k in &active {
            let mut x = p.x.clone();
            let h = 0.25 * bbox.width(k);
            x[k] = if x[k] + h <= bbox.upper[k] { x[k] + h } else { x[k] - h };
            let q = model.linearize(&x, &p.phi)?;
            update(p, &q);
        }
        let i = (0..faults.p()).find(|i| p.phi[*i] < 1.0).unwrap_or(0);
        let other = if p.phi[i] > 0.5 { 0.0 } else { 1.0 };
        let q = model.linearize(&p.x, &faults.fault_vector(i, other)?)?;
        update(p, &q);

        // Local bound from the column Jacobians of g: ‖Σ_k v_k ∂B/∂x_k‖ ≤ dt·√(Σ_i ‖∂g_i/∂x‖²).
        let cols = model.dynamics().input_matrix_jacobians(&p.x, &p.phi);
        let local = dt * cols.iter().map(|j| op_norm(j).powi(2)).sum::<f64>().sqrt();
        local_b = local_b.max(local);
    }
    let kappa_b = kappa_b.max(local_b);

    LipschitzBounds::new(
        kappa_a * settings.safety_factor,
        kappa_b * settings.safety_factor,
        false,
    )
}

/// Linear test model `x⁺ = A_d x + B_d diag(φ) u`, encoded as the continuous
/// pair `F = (A_d − I)/dt`, `G = B_d/dt` so the Euler discretization is exact.
#[derive(Clone, Debug)]
pub struct LinearDynamics {
    f: DMatrix<f64>,
    g: DMatrix<f64>,
}

impl LinearDynamics {
    pub fn from_discrete(a_d: &DMatrix<f64>, b_d: &DMatrix<f64>, dt: f64) -> Result<Self> {
        let n = a_d.nrows();
        if a_d.ncols() != n || b_d.nrows() != n || b_d.ncols() == 0 {
            return Err(dim_err("linear model", n, b_d.nrows()));
        }
        if !(dt > 0.0) {
            return Err(Error::Config("dt must be positive".into()));
        }
        check_finite("A_d", a_d)?;
        check_finite("B_d", b_d)?;
        Ok(Self { f: (a_d - DMatrix::identity(n, n)) / dt, g: b_d / dt })
    }
}

impl Dynamics for LinearDynamics {
    fn state_dim(&self) -> usize {
        self.f.nrows()
    }

    fn input_dim(&self) -> usize {
        self.g.ncols()
    }

    fn drift(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.f * x
    }

    fn input_matrix(&self, _x: &DVector<f64>, phi: &DVector<f64>) -> DMatrix<f64> {
        let mut g = self.g.clone();
        for (i, mut col) in g.column_iter_mut().enumerate() {
            col *= phi[i];
        }
        g
    }

    fn drift_jacobian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.f.clone()
    }

    fn input_matrix_jacobians(&self, _x: &DVector<f64>, _phi: &DVector<f64>) -> Vec<DMatrix<f64>> {
        let n = self.state_dim();
        vec![DMatrix::zeros(n, n); self.input_dim()]
    }

    fn jacobian_support(&self) -> Vec<bool> {
        // Jacobians are state-independent.
        vec![false; self.state_dim()]
    }

    fn affine_jacobians(&self) -> bool {
        true
    }

    fn analytic_lipschitz(&self, _bbox: &BoundingBox, dt: f64) -> Option<LipschitzBounds> {
        let col_max = self.g.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        Some(LipschitzBounds { kappa_a: 0.0, kappa_b: dt * col_max, certified: true })
    }
}
