//! The learner: a maximal invariant ellipsoid SDP imposed at every stored
//! Jacobian sample and every saturation sign pattern, and extraction of the
//! gains `K = Y Q⁻¹`, `H = Z Q⁻¹` and Lyapunov matrix `P = Q⁻¹`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cegis::{self, Problem};
use crate::conic::{self, Lmi, LinearProgram, LpOutcome, MatVar, SdpProblem, SdpStatus};
use crate::error::{Error, Result};
use crate::ldi::{min_eig, op_norm, SignMatrixSet, XiEvaluator};
use crate::model::{InputBox, JacobianPair, StatePolytope};
use crate::verifier::VerifierSettings;

/// Hyperparameters of the learner–verifier loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CegisConfig {
    /// Upper bound on `Q` and twice the spectral bound on `Y`, `Z`.
    pub eta: f64,
    /// Strictness margin `Ξ ⪰ εI`.
    pub epsilon: f64,
    pub tau: f64,
    pub max_iterations: usize,
    /// Interior-point feasibility and gap tolerance.
    pub solver_tol: f64,
    /// Drop samples inside the convex hull of the others before each solve.
    pub prune_samples: bool,
    pub verifier: VerifierSettings,
}

impl Default for CegisConfig {
    fn default() -> Self {
        Self {
            eta: 50.0,
            epsilon: 1e-4,
            tau: 0.999,
            max_iterations: 50,
            solver_tol: conic::DEFAULT_TOL,
            prune_samples: false,
            verifier: VerifierSettings::default(),
        }
    }
}

impl CegisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0 && self.eta.is_finite() && self.eta >= self.epsilon) {
            return Err(Error::Config(format!(
                "need eta >= epsilon > 0, got eta = {}, epsilon = {}",
                self.eta, self.epsilon
            )));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::Config(format!("tau must lie in [0, 1], got {}", self.tau)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if !(self.solver_tol.is_finite() && self.solver_tol > 0.0) {
            return Err(Error::Config("solver_tol must be positive".into()));
        }
        self.verifier.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleEntry {
    pub pair: JacobianPair,
    /// Iteration at which the sample was added; 0 for the initial sample.
    pub iteration: usize,
}

/// Result of [`SampleSet::add_sample`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AddOutcome {
    Added,
    /// Within 1e-12 of a stored pair; the set is unchanged.
    Duplicate { distance: f64 },
}

/// Distance below which two pairs count as the same sample.
pub const DUPLICATE_DISTANCE: f64 = 1e-12;

/// The counterexample store.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SampleSet {
    entries: Vec<SampleEntry>,
}

impl SampleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[SampleEntry] {
        &self.entries
    }

    pub fn pairs(&self) -> impl Iterator<Item = &JacobianPair> {
        self.entries.iter().map(|e| &e.pair)
    }

    /// Smallest combined operator-norm distance to a stored pair.
    pub fn min_distance(&self, pair: &JacobianPair) -> f64 {
        self.pairs().map(|p| p.distance(pair)).fold(f64::INFINITY, f64::min)
    }

    pub fn add_sample(&mut self, pair: JacobianPair, iteration: usize) -> Result<AddOutcome> {
        crate::model::check_finite("sample A", &pair.a)?;
        crate::model::check_finite("sample B", &pair.b)?;
        if let Some(first) = self.entries.first() {
            if first.pair.a.shape() != pair.a.shape() || first.pair.b.shape() != pair.b.shape() {
                return Err(Error::Dimension {
                    context: "sample set",
                    expected: format!("{:?}/{:?}", first.pair.a.shape(), first.pair.b.shape()),
                    got: format!("{:?}/{:?}", pair.a.shape(), pair.b.shape()),
                });
            }
        }
        let distance = self.min_distance(&pair);
        if distance < DUPLICATE_DISTANCE {
            log::warn!("duplicate sample rejected (distance {distance:e}); the verifier may be stalled");
            return Ok(AddOutcome::Duplicate { distance });
        }
        self.entries.push(SampleEntry { pair, iteration });
        Ok(AddOutcome::Added)
    }
}

/// Decision variables and optimum of the learner SDP.
#[derive(Clone, Debug, PartialEq)]
pub struct LearnerSolution {
    pub q: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub z: DMatrix<f64>,
    /// `trace(Q)`.
    pub objective: f64,
}

/// Gains and Lyapunov matrix extracted from a learner solution.
#[derive(Clone, Debug, PartialEq)]
pub struct Controller {
    pub k: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub y: DMatrix<f64>,
    pub z: DMatrix<f64>,
    pub inputs: InputBox,
    pub certificate: Option<CertificateInfo>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateInfo {
    /// Smallest objective value found by the verifier.
    pub lambda_star: f64,
    /// Certified lower bound on the objective.
    pub bound: f64,
    /// False when the Lipschitz constants were sampled rather than analytic.
    pub certified: bool,
}

impl Controller {
    /// `V(x) = xᵀ P x`.
    pub fn lyapunov(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.p * x))
    }

    pub fn n(&self) -> usize {
        self.k.ncols()
    }

    pub fn p_inputs(&self) -> usize {
        self.k.nrows()
    }

    pub fn solution(&self) -> LearnerSolution {
        LearnerSolution { q: self.q.clone(), y: self.y.clone(), z: self.z.clone(), objective: self.q.trace() }
    }
}

/// How `Y` enters the SDP.
#[derive(Clone, Debug, PartialEq)]
pub enum GainMode {
    /// `Y` is a free variable.
    Free,
    /// `Y = K Q` for the given gain; used for region-of-attraction estimates.
    Fixed(DMatrix<f64>),
}

/// Assembled learner SDP with handles to its variables.
#[derive(Clone, Debug)]
pub struct LearnerSdp {
    pub problem: SdpProblem,
    pub q: MatVar,
    pub y: Option<MatVar>,
    pub z: MatVar,
    /// Number of Ξ constraints (`|S| · 2^p`).
    pub xi_constraints: usize,
}

/// Builds the learner SDP over the given samples.
pub fn assemble_learner_sdp(
    samples: &[&JacobianPair],
    config: &CegisConfig,
    domain: &StatePolytope,
    inputs: &InputBox,
    signs: &SignMatrixSet,
    mode: &GainMode,
) -> Result<LearnerSdp> {
    let first = samples.first().ok_or_else(|| Error::Contract("learner needs a non-empty sample set".into()))?;
    let n = first.a.nrows();
    let p = first.b.ncols();
    if domain.dim() != n || inputs.p() != p || signs.p() != p {
        return Err(Error::Dimension {
            context: "learner SDP",
            expected: format!("n = {n}, p = {p}"),
            got: format!("domain {}, inputs {}, signs {}", domain.dim(), inputs.p(), signs.p()),
        });
    }
    if let GainMode::Fixed(k) = mode {
        if k.shape() != (p, n) {
            return Err(Error::Dimension { context: "fixed gain", expected: format!("{p}x{n}"), got: format!("{}x{}", k.nrows(), k.ncols()) });
        }
    }
    let (eta, eps, tau) = (config.eta, config.epsilon, config.tau);

    let mut sdp = SdpProblem::new();
    let q = sdp.add_var("Q", n, n, true);
    let y = matches!(mode, GainMode::Free).then(|| sdp.add_var("Y", p, n, false));
    let z = sdp.add_var("Z", p, n, false);
    let ident_p = DMatrix::<f64>::identity(p, p);

    let mut xi_constraints = 0;
    for (s, pair) in samples.iter().enumerate() {
        for j in 0..signs.len() {
            let e = signs.matrix(j);
            let be = &pair.b * &e;
            let be_bar = &pair.b * (&ident_p - &e);
            let mut lmi = Lmi::new(format!("xi[{s},{j}]"), 3 * n);
            lmi.add_var(0, 0, None, q, None, tau)
                .add_identity(n, n, 1.0 - tau)
                .add_var(2 * n, 2 * n, None, q, None, 1.0)
                .add_identity(0, 3 * n, -eps);
            match (mode, y) {
                (GainMode::Free, Some(y)) => {
                    lmi.add_var(2 * n, 0, Some(&pair.a), q, None, 1.0);
                    if be.amax() > 0.0 {
                        lmi.add_var(2 * n, 0, Some(&be), y, None, 1.0);
                    }
                }
                (GainMode::Fixed(k), _) => {
                    let closed = &pair.a + &be * k;
                    lmi.add_var(2 * n, 0, Some(&closed), q, None, 1.0);
                }
                _ => unreachable!(),
            }
            if be_bar.amax() > 0.0 {
                lmi.add_var(2 * n, 0, Some(&be_bar), z, None, 1.0);
            }
            sdp.add_lmi(lmi);
            xi_constraints += 1;
        }
    }

    let l = domain.l();
    for i in 0..domain.rows() {
        let row = l.row(i).into_owned();
        let row = DMatrix::from_row_slice(1, n, row.as_slice());
        let mut lmi = Lmi::new(format!("state[{i}]"), n + 1);
        lmi.add_identity(0, 1, 1.0).add_var(0, 1, Some(&row), q, None, 1.0).add_var(1, 1, None, q, None, 1.0);
        sdp.add_lmi(lmi);
    }

    for i in 0..p {
        let sel = DMatrix::from_fn(1, p, |_, c| if c == i { 1.0 } else { 0.0 });
        let mut lmi = Lmi::new(format!("input[{i}]"), n + 1);
        lmi.add_identity(0, 1, inputs.u_max()[i].powi(2))
            .add_var(0, 1, Some(&sel), z, None, 1.0)
            .add_var(1, 1, None, q, None, 1.0);
        sdp.add_lmi(lmi);
    }

    let mut upper = Lmi::new("eta I - Q", n);
    upper.add_identity(0, n, eta).add_var(0, 0, None, q, None, -1.0);
    sdp.add_lmi(upper);

    let mut y_norm = Lmi::new("norm Y", p + n);
    y_norm.add_identity(0, p + n, eta / 2.0);
    match (mode, y) {
        (GainMode::Free, Some(y)) => {
            y_norm.add_var(0, p, None, y, None, 1.0);
        }
        (GainMode::Fixed(k), _) => {
            y_norm.add_var(0, p, Some(k), q, None, 1.0);
        }
        _ => unreachable!(),
    }
    sdp.add_lmi(y_norm);
    let mut z_norm = Lmi::new("norm Z", p + n);
    z_norm.add_identity(0, p + n, eta / 2.0).add_var(0, p, None, z, None, 1.0);
    sdp.add_lmi(z_norm);

    sdp.maximize_trace(q, 1.0);
    Ok(LearnerSdp { problem: sdp, q, y, z, xi_constraints })
}

/// Result of one learner call.
#[derive(Clone, Debug, PartialEq)]
pub enum LearnOutcome {
    Solved(LearnerSolution),
    Infeasible,
}

/// Details of a learner call, for run records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LearnStats {
    pub constraints: usize,
    pub xi_constraints: usize,
    pub samples_used: usize,
}

/// Solves the learner SDP and re-verifies every returned constraint independently.
pub fn learn(
    set: &SampleSet,
    config: &CegisConfig,
    domain: &StatePolytope,
    inputs: &InputBox,
    signs: &SignMatrixSet,
    mode: &GainMode,
) -> Result<(LearnOutcome, LearnStats)> {
    config.validate()?;
    if set.is_empty() {
        return Err(Error::Contract("learner needs a non-empty sample set".into()));
    }
    let all: Vec<&JacobianPair> = set.pairs().collect();
    let used: Vec<&JacobianPair> = if config.prune_samples && all.len() > 2 {
        let keep = hull_vertices(&all)?;
        keep.into_iter().map(|i| all[i]).collect()
    } else {
        all.clone()
    };
    let sdp = assemble_learner_sdp(&used, config, domain, inputs, signs, mode)?;
    let stats = LearnStats {
        constraints: sdp.problem.constraint_count(),
        xi_constraints: sdp.xi_constraints,
        samples_used: used.len(),
    };

    let mut tol = config.solver_tol;
    for attempt in 0..2 {
        let sol = conic::solve_sdp(&sdp.problem, tol)?;
        match sol.status {
            SdpStatus::Infeasible => return Ok((LearnOutcome::Infeasible, stats)),
            SdpStatus::Unbounded => {
                return Err(Error::NumericalFailure("learner SDP reported unbounded despite Q <= eta I".into()))
            }
            SdpStatus::NumericalFailure => {
                log::warn!("learner SDP numerical failure at tol {tol:e} (attempt {})", attempt + 1);
                tol *= 100.0;
                continue;
            }
            SdpStatus::Optimal => {
                let q = symmetrize(&sol.value(sdp.q));
                let y = match (mode, sdp.y) {
                    (GainMode::Free, Some(v)) => sol.value(v),
                    (GainMode::Fixed(k), _) => k * &q,
                    _ => unreachable!(),
                };
                let z = sol.value(sdp.z);
                let out = LearnerSolution { objective: q.trace(), q, y, z };
                let slack = 10.0 * tol;
                let report = check_solution(&out, &all, config, domain, inputs, signs)?;
                if report.worst() < -slack {
                    log::warn!(
                        "learner solution fails re-verification by {:e} at tol {tol:e} (attempt {})",
                        -report.worst(),
                        attempt + 1
                    );
                    tol *= 100.0;
                    continue;
                }
                return Ok((LearnOutcome::Solved(out), stats));
            }
        }
    }
    Err(Error::NumericalFailure("learner SDP failed twice; aborting".into()))
}

/// Worst slack of every learner constraint at a solution (negative = violated).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolutionReport {
    /// `min λ_min(Ξ) − ε` over samples and sign patterns.
    pub xi: f64,
    pub state: f64,
    pub input: f64,
    /// `η − ‖Q‖`.
    pub q_bound: f64,
    /// `η/2 − max(‖Y‖, ‖Z‖)`.
    pub yz_bound: f64,
}

impl SolutionReport {
    pub fn worst(&self) -> f64 {
        self.xi.min(self.state).min(self.input).min(self.q_bound).min(self.yz_bound)
    }
}

/// Independent check of the learner constraints with dense eigenvalues.
pub fn check_solution(
    sol: &LearnerSolution,
    samples: &[&JacobianPair],
    config: &CegisConfig,
    domain: &StatePolytope,
    inputs: &InputBox,
    signs: &SignMatrixSet,
) -> Result<SolutionReport> {
    let n = sol.q.nrows();
    let ev = XiEvaluator::new(&sol.q, &sol.y, &sol.z, signs, config.tau)?;
    let xi = samples
        .iter()
        .map(|s| ev.min_over_signs(&s.a, &s.b).0 - config.epsilon)
        .fold(f64::INFINITY, f64::min);
    let block = |corner: f64, row: DMatrix<f64>| -> Result<f64> {
        let mut m = DMatrix::zeros(n + 1, n + 1);
        m[(0, 0)] = corner;
        m.view_mut((0, 1), (1, n)).copy_from(&row);
        m.view_mut((1, 0), (n, 1)).copy_from(&row.transpose());
        m.view_mut((1, 1), (n, n)).copy_from(&sol.q);
        min_eig(&m)
    };
    let mut state = f64::INFINITY;
    for i in 0..domain.rows() {
        let row = domain.l().rows(i, 1) * &sol.q;
        state = state.min(block(1.0, row)?);
    }
    let mut input = f64::INFINITY;
    for i in 0..inputs.p() {
        input = input.min(block(inputs.u_max()[i].powi(2), sol.z.rows(i, 1).into_owned())?);
    }
    let q_max = -min_eig(&(-&sol.q))?;
    Ok(SolutionReport {
        xi,
        state,
        input,
        q_bound: config.eta - q_max,
        yz_bound: config.eta / 2.0 - op_norm(&sol.y).max(op_norm(&sol.z)),
    })
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// `P = Q⁻¹`, `K = Y P`, `H = Z P`.
pub fn extract_controller(sol: &LearnerSolution, inputs: &InputBox) -> Result<Controller> {
    let q = symmetrize(&sol.q);
    let lam = min_eig(&q)?;
    if !(lam > 1e-10) {
        return Err(Error::Extraction { min_eig: lam });
    }
    let chol = q.clone().cholesky().ok_or(Error::Extraction { min_eig: lam })?;
    let p = symmetrize(&chol.inverse());
    Ok(Controller {
        k: &sol.y * &p,
        h: &sol.z * &p,
        p,
        q,
        y: sol.y.clone(),
        z: sol.z.clone(),
        inputs: inputs.clone(),
        certificate: None,
    })
}

/// Indices of samples that are not convex combinations of the others.
///
/// One LP per sample: find `λ ≥ 0`, `Σλ = 1`, `Σ λ_k vec(A_k, B_k) = vec(A_i, B_i)`.
pub fn hull_vertices(samples: &[&JacobianPair]) -> Result<Vec<usize>> {
    let vecs: Vec<DVector<f64>> = samples
        .iter()
        .map(|s| DVector::from_iterator(s.a.len() + s.b.len(), s.a.iter().chain(s.b.iter()).copied()))
        .collect();
    let mut keep = Vec::new();
    for i in 0..vecs.len() {
        let others: Vec<usize> = (0..vecs.len()).filter(|k| *k != i).collect();
        let m = others.len();
        let d = vecs[i].len();
        let mut e = DMatrix::zeros(d + 1, m);
        for (c, &k) in others.iter().enumerate() {
            e.view_mut((0, c), (d, 1)).copy_from(&vecs[k]);
            e[(d, c)] = 1.0;
        }
        let mut f = vecs[i].clone().resize_vertically(d + 1, 0.0);
        f[d] = 1.0;
        let lp = LinearProgram::new(DVector::from_element(m, -1.0), -DMatrix::identity(m, m), DVector::zeros(m))?
            .with_equalities(e, f)?;
        match lp.maximize(conic::DEFAULT_TOL) {
            Ok(LpOutcome::Optimal { .. }) => {}
            Ok(_) => keep.push(i),
            Err(err) => {
                log::debug!("hull LP for sample {i} failed ({err}); keeping it");
                keep.push(i);
            }
        }
    }
    Ok(keep)
}

/// Outcome of [`roa_for_fixed_gain`].
#[derive(Clone, Debug, PartialEq)]
pub enum RoaOutcome {
    /// Largest certified invariant ellipsoid `{x : xᵀ Q⁻¹ x ≤ 1}` for the gain.
    Ellipsoid { q: DMatrix<f64>, z: DMatrix<f64>, iterations: usize },
    Infeasible { iterations: usize },
}

impl RoaOutcome {
    /// `trace(Q)`, zero when infeasible.
    pub fn trace(&self) -> f64 {
        match self {
            RoaOutcome::Ellipsoid { q, .. } => q.trace(),
            RoaOutcome::Infeasible { .. } => 0.0,
        }
    }
}

/// Maximal certified invariant ellipsoid for a fixed gain, via its own
/// learner–verifier loop with `Y = K Q`.
pub fn roa_for_fixed_gain(k: &DMatrix<f64>, problem: &Problem, config: &CegisConfig) -> Result<RoaOutcome> {
    if k.shape() != (problem.model.p(), problem.model.n()) {
        return Err(Error::Dimension {
            context: "fixed gain",
            expected: format!("{}x{}", problem.model.p(), problem.model.n()),
            got: format!("{}x{}", k.nrows(), k.ncols()),
        });
    }
    let outcome = cegis::run_with_mode(problem, config, None, &GainMode::Fixed(k.clone()))?;
    let iterations = outcome.history().len();
    match outcome {
        cegis::CegisOutcome::Converged { controller, .. } => {
            Ok(RoaOutcome::Ellipsoid { q: controller.q, z: controller.z, iterations })
        }
        cegis::CegisOutcome::Infeasible { .. } => Ok(RoaOutcome::Infeasible { iterations }),
        cegis::CegisOutcome::Budget { .. } => Err(Error::Config(format!(
            "region-of-attraction loop hit the iteration budget ({iterations})"
        ))),
        cegis::CegisOutcome::Undecided { error, .. } => Err(error.into_error()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldi::enumerate_sign_matrices;
    use approx::assert_relative_eq;

    fn scalar_pair(a: f64, b: f64) -> JacobianPair {
        JacobianPair {
            a: DMatrix::from_element(1, 1, a),
            b: DMatrix::from_element(1, 1, b),
            x: DVector::zeros(1),
            phi: DVector::from_element(1, 1.0),
        }
    }

    fn unit_domain() -> StatePolytope {
        StatePolytope::from_box(DVector::from_element(1, -1.0), DVector::from_element(1, 1.0)).unwrap()
    }

    #[test]
    fn duplicate_samples_are_rejected() {
        let mut s = SampleSet::new();
        assert_eq!(s.add_sample(scalar_pair(0.5, 1.0), 0).unwrap(), AddOutcome::Added);
        assert!(matches!(s.add_sample(scalar_pair(0.5, 1.0), 1).unwrap(), AddOutcome::Duplicate { .. }));
        assert_eq!(s.len(), 1);
        assert_eq!(s.add_sample(scalar_pair(0.6, 1.0), 1).unwrap(), AddOutcome::Added);
        assert_eq!(s.len(), 2);
        let mut bad = scalar_pair(0.5, 1.0);
        bad.a[(0, 0)] = f64::NAN;
        assert!(s.add_sample(bad, 2).is_err());
    }

    #[test]
    fn constraint_counts() {
        let pair = JacobianPair {
            a: DMatrix::identity(2, 2),
            b: DMatrix::from_element(2, 3, 0.1),
            x: DVector::zeros(2),
            phi: DVector::from_element(3, 1.0),
        };
        let domain = StatePolytope::from_box(DVector::from_element(2, -2.0), DVector::from_element(2, 2.0)).unwrap();
        let inputs = InputBox::uniform(3, 38.0).unwrap();
        let signs = enumerate_sign_matrices(3).unwrap();
        let config = CegisConfig::default();
        let sdp = assemble_learner_sdp(&[&pair], &config, &domain, &inputs, &signs, &GainMode::Free).unwrap();
        assert_eq!(sdp.xi_constraints, 8);
        assert_eq!(sdp.problem.constraint_count(), 8 + 4 + 3 + 1 + 2);
        let many: Vec<&JacobianPair> = std::iter::repeat_n(&pair, 7).collect();
        let sdp = assemble_learner_sdp(&many, &config, &domain, &inputs, &signs, &GainMode::Free).unwrap();
        assert_eq!(sdp.xi_constraints, 56);
        assert!(assemble_learner_sdp(&[], &config, &domain, &inputs, &signs, &GainMode::Free).is_err());
    }

    #[test]
    fn stable_scalar_system_is_feasible() {
        let mut set = SampleSet::new();
        set.add_sample(scalar_pair(0.5, 1.0), 0).unwrap();
        let inputs = InputBox::uniform(1, 1.0).unwrap();
        let signs = enumerate_sign_matrices(1).unwrap();
        let config = CegisConfig::default();
        let (out, stats) = learn(&set, &config, &unit_domain(), &inputs, &signs, &GainMode::Free).unwrap();
        assert_eq!(stats.xi_constraints, 2);
        let LearnOutcome::Solved(sol) = out else { panic!("expected a solution") };
        assert!(sol.objective > 0.0);
        // The box constraint |x| <= 1 caps q at 1.
        assert!(sol.q[(0, 0)] <= 1.0 + 1e-6);
        let c = extract_controller(&sol, &inputs).unwrap();
        assert_relative_eq!((&c.p * &c.q)[(0, 0)], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn tight_eta_with_unstable_uncontrollable_sample_is_infeasible() {
        let mut set = SampleSet::new();
        set.add_sample(scalar_pair(1.5, 0.0), 0).unwrap();
        let config = CegisConfig { eta: 1e-4, epsilon: 1e-4, ..Default::default() };
        let (out, _) = learn(
            &set,
            &config,
            &unit_domain(),
            &InputBox::uniform(1, 1.0).unwrap(),
            &enumerate_sign_matrices(1).unwrap(),
            &GainMode::Free,
        )
        .unwrap();
        assert_eq!(out, LearnOutcome::Infeasible);
    }

    #[test]
    fn extraction_examples() {
        let inputs = InputBox::uniform(2, 1.0).unwrap();
        let y0 = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.5, 3.0]);
        let z0 = DMatrix::from_row_slice(2, 2, &[0.1, 0.2, -0.3, 0.4]);
        let sol = LearnerSolution { q: DMatrix::identity(2, 2), y: y0.clone(), z: z0.clone(), objective: 2.0 };
        let c = extract_controller(&sol, &inputs).unwrap();
        assert_relative_eq!(c.k, y0, epsilon = 1e-14);
        assert_relative_eq!(c.h, z0, epsilon = 1e-14);
        assert_relative_eq!(c.p, DMatrix::identity(2, 2), epsilon = 1e-14);
        let sol2 = LearnerSolution { q: DMatrix::identity(2, 2) * 2.0, ..sol.clone() };
        assert_relative_eq!(extract_controller(&sol2, &inputs).unwrap().k, &y0 / 2.0, epsilon = 1e-14);
        let singular = LearnerSolution { q: DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-13])), ..sol };
        assert!(matches!(extract_controller(&singular, &inputs), Err(Error::Extraction { .. })));
    }

    #[test]
    fn hull_pruning_drops_interior_samples() {
        let pts = [scalar_pair(0.0, 0.0), scalar_pair(1.0, 0.0), scalar_pair(0.0, 1.0), scalar_pair(0.2, 0.2)];
        let refs: Vec<&JacobianPair> = pts.iter().collect();
        assert_eq!(hull_vertices(&refs).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn config_validation() {
        assert!(CegisConfig::default().validate().is_ok());
        assert!(CegisConfig { eta: 1e-5, ..Default::default() }.validate().is_err());
        assert!(CegisConfig { tau: 1.5, ..Default::default() }.validate().is_err());
        assert!(CegisConfig { max_iterations: 0, ..Default::default() }.validate().is_err());
    }
}
