//! TOML file formats: problem configuration, controller, scenario, run report
//! and region-of-attraction output.
//!
//! Matrices are arrays of rows. Floats are written in shortest round-trip
//! form, so every file parses back bit-identically. Every output file embeds
//! the problem configuration it was produced from under `[config]`.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bench::{self, AuvParams};
use crate::cegis::{CegisOutcome, IterationRecord, IterationVerdict, Problem};
use crate::error::{Error, Result};
use crate::learner::{CegisConfig, CertificateInfo, Controller, LearnerSolution, RoaOutcome};
use crate::model::{
    estimate_lipschitz, BoundingBox, FaultSet, InputBox, LinearDynamics, LipschitzBounds, LipschitzSampling,
    NonlinearModel, StatePolytope,
};
use crate::sim::{FaultPhase, FaultSchedule, Feedback, ReferenceSignal};

/// Matrix stored as an array of rows.
pub type Rows = Vec<Vec<f64>>;

/// Dense matrix from rows; every row must have the same, nonzero length.
pub fn matrix_from_rows(rows: &Rows, what: &str) -> Result<DMatrix<f64>> {
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Config(format!("{what} must be a non-empty rectangular array of rows")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Config(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

pub fn rows_of(m: &DMatrix<f64>) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelName {
    Auv2,
    Auv5,
    /// Discrete linear system `x⁺ = A x + B diag(φ) u` given by `a` and `b`.
    LinearTest,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub name: ModelName,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Vehicle coefficients (AUV models).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<AuvParams>,
    /// Discrete state matrix (linear-test).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Rows>,
    /// Discrete input matrix (linear-test).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Rows>,
    /// Per-input saturation (linear-test); AUV models take `params.u_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_max: Option<Vec<f64>>,
}

fn default_dt() -> f64 {
    bench::DEFAULT_DT
}

/// State domain: a box, or polytope rows `l_i x ≤ 1` with an optional bounding box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Rows>,
}

/// Jacobian Lipschitz constants: analytic when both `kappa_a` and `kappa_b`
/// are given, else the model's own analytic bounds, else sampled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LipschitzConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_b: Option<f64>,
    /// Ignore the model's analytic bounds and sample instead.
    pub force_sampling: bool,
    pub samples: usize,
    pub safety_factor: f64,
    /// Seed of every sampling-based check.
    pub seed: u64,
}

impl Default for LipschitzConfig {
    fn default() -> Self {
        let s = LipschitzSampling::default();
        Self {
            kappa_a: None,
            kappa_b: None,
            force_sampling: false,
            samples: s.samples,
            safety_factor: s.safety_factor,
            seed: s.seed,
        }
    }
}

/// Seed sample `(x̄, φ̄)` of the loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSample {
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
}

/// Everything `synth`, `verify`, `simulate` and `roa` need to rebuild a problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub model: ModelConfig,
    pub domain: DomainConfig,
    #[serde(default)]
    pub cegis: CegisConfig,
    #[serde(default)]
    pub lipschitz: LipschitzConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSample>,
}

impl ProblemConfig {
    /// Parses and validates; no computation happens on an invalid file.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&read(path)?)
            .map_err(|e| match e {
                Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
                Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
                other => other,
            })
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    /// Schema checks that need no solver.
    pub fn validate(&self) -> Result<()> {
        self.cegis.validate()?;
        let model = self.model()?;
        let domain = self.domain(model.n())?;
        self.inputs(&model)?;
        let l = &self.lipschitz;
        if l.kappa_a.is_some() != l.kappa_b.is_some() {
            return Err(Error::Config("lipschitz: give both kappa_a and kappa_b or neither".into()));
        }
        if let (Some(a), Some(b)) = (l.kappa_a, l.kappa_b) {
            LipschitzBounds::new(a, b, true)?;
        }
        if let Some(init) = &self.initial {
            if init.x.len() != model.n() || init.phi.len() != model.p() {
                return Err(Error::Config(format!(
                    "initial sample needs x of length {} and phi of length {}",
                    model.n(),
                    model.p()
                )));
            }
            let x = DVector::from_column_slice(&init.x);
            if !domain.bbox().contains(&x, 1e-12) {
                return Err(Error::Config("initial x lies outside the domain".into()));
            }
            if !FaultSet::new(model.p())?.contains(&DVector::from_column_slice(&init.phi)) {
                return Err(Error::Config("initial phi is not in the fault set".into()));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Result<NonlinearModel> {
        let m = &self.model;
        if !(m.dt.is_finite() && m.dt > 0.0) {
            return Err(Error::Config(format!("model.dt must be positive, got {}", m.dt)));
        }
        match m.name {
            ModelName::Auv2 | ModelName::Auv5 => {
                if m.a.is_some() || m.b.is_some() || m.u_max.is_some() {
                    return Err(Error::Config(
                        "model.a, model.b and model.u_max belong to linear-test; AUV models take params".into(),
                    ));
                }
                let params = m.params.as_ref().ok_or_else(|| Error::Config("AUV models need [model.params]".into()))?;
                if m.name == ModelName::Auv2 {
                    bench::auv2(params, m.dt)
                } else {
                    bench::auv5(params, m.dt)
                }
            }
            ModelName::LinearTest => {
                if m.params.is_some() {
                    return Err(Error::Config("linear-test takes model.a and model.b, not params".into()));
                }
                let a = matrix_from_rows(m.a.as_ref().ok_or_else(|| Error::Config("linear-test needs model.a".into()))?, "model.a")?;
                let b = matrix_from_rows(m.b.as_ref().ok_or_else(|| Error::Config("linear-test needs model.b".into()))?, "model.b")?;
                let dynamics = LinearDynamics::from_discrete(&a, &b, m.dt)?;
                NonlinearModel::new("linear-test", std::sync::Arc::new(dynamics), m.dt)
            }
        }
    }

    pub fn domain(&self, n: usize) -> Result<StatePolytope> {
        let d = &self.domain;
        let vec_of = |v: &Option<Vec<f64>>, what: &str| -> Result<Option<DVector<f64>>> {
            match v {
                None => Ok(None),
                Some(v) if v.len() == n => Ok(Some(DVector::from_column_slice(v))),
                Some(v) => Err(Error::Config(format!("domain.{what} has {} entries, model has {n} states", v.len()))),
            }
        };
        let lower = vec_of(&d.lower, "lower")?;
        let upper = vec_of(&d.upper, "upper")?;
        match (&d.rows, lower, upper) {
            (None, Some(lo), Some(hi)) => StatePolytope::from_box(lo, hi),
            (None, _, _) => Err(Error::Config("domain needs lower and upper, or rows".into())),
            (Some(rows), lo, hi) => {
                let l = matrix_from_rows(rows, "domain.rows")?;
                if l.ncols() != n {
                    return Err(Error::Config(format!("domain.rows have {} columns, model has {n} states", l.ncols())));
                }
                let bbox = match (lo, hi) {
                    (Some(lo), Some(hi)) => Some(BoundingBox::new(lo, hi)?),
                    (None, None) => None,
                    _ => return Err(Error::Config("give both domain.lower and domain.upper or neither".into())),
                };
                StatePolytope::from_rows(l, bbox)
            }
        }
    }

    pub fn inputs(&self, model: &NonlinearModel) -> Result<InputBox> {
        match (&self.model.params, &self.model.u_max) {
            (Some(p), _) => InputBox::uniform(model.p(), p.u_max),
            (None, Some(u)) if u.len() == model.p() => InputBox::new(DVector::from_column_slice(u)),
            (None, Some(u)) => Err(Error::Config(format!("model.u_max has {} entries, model has {} inputs", u.len(), model.p()))),
            (None, None) => Err(Error::Config("model.u_max is required for linear-test".into())),
        }
    }

    pub fn sampling(&self) -> LipschitzSampling {
        LipschitzSampling {
            samples: self.lipschitz.samples,
            safety_factor: self.lipschitz.safety_factor,
            seed: self.lipschitz.seed,
        }
    }

    pub fn problem(&self) -> Result<Problem> {
        self.validate()?;
        let model = self.model()?;
        let domain = self.domain(model.n())?;
        let inputs = self.inputs(&model)?;
        let l = &self.lipschitz;
        let bounds = match (l.kappa_a, l.kappa_b) {
            (Some(a), Some(b)) => Some(LipschitzBounds::new(a, b, true)?),
            _ if l.force_sampling => {
                let faults = FaultSet::new(model.p())?;
                Some(estimate_lipschitz(&model, &domain, &faults, &self.sampling())?)
            }
            _ => None,
        };
        if bounds.is_none() && model.dynamics().analytic_lipschitz(domain.bbox(), model.dt()).is_none() {
            let faults = FaultSet::new(model.p())?;
            let sampled = estimate_lipschitz(&model, &domain, &faults, &self.sampling())?;
            return Problem::new(model, domain, inputs, Some(sampled));
        }
        Problem::new(model, domain, inputs, bounds)
    }

    pub fn initial_sample(&self) -> Option<(DVector<f64>, DVector<f64>)> {
        self.initial.as_ref().map(|s| (DVector::from_column_slice(&s.x), DVector::from_column_slice(&s.phi)))
    }
}

/// Verifier outcome stored with a synthesized controller.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateRecord {
    pub lambda_star: f64,
    pub bound: f64,
    /// False when the Lipschitz constants were sampled.
    pub certified: bool,
    pub iterations: usize,
}

/// Controller file. Only `k` and `u_max` are required, so a bare gain can be
/// simulated; verification also needs `q` and `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerFile {
    pub model: String,
    pub u_max: Vec<f64>,
    /// `u = sat(K e)`.
    pub k: Rows,
    /// Auxiliary gain of the saturation envelope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<Rows>,
    /// Lyapunov matrix `P = Q⁻¹`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Rows>,
    /// Ellipsoid matrix `Q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Rows>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ProblemConfig>,
}

impl ControllerFile {
    pub fn from_controller(
        controller: &Controller,
        model: &str,
        iterations: usize,
        config: Option<&ProblemConfig>,
    ) -> Self {
        Self {
            model: model.to_string(),
            u_max: controller.inputs.u_max().iter().copied().collect(),
            k: rows_of(&controller.k),
            h: Some(rows_of(&controller.h)),
            p: Some(rows_of(&controller.p)),
            q: Some(rows_of(&controller.q)),
            certificate: controller.certificate.map(|c: CertificateInfo| CertificateRecord {
                lambda_star: c.lambda_star,
                bound: c.bound,
                certified: c.certified,
                iterations,
            }),
            config: config.cloned(),
        }
    }

    /// A bare gain with no certificate.
    pub fn from_gain(k: &DMatrix<f64>, inputs: &InputBox, model: &str, config: Option<&ProblemConfig>) -> Self {
        Self {
            model: model.to_string(),
            u_max: inputs.u_max().iter().copied().collect(),
            k: rows_of(k),
            h: None,
            p: None,
            q: None,
            certificate: None,
            config: config.cloned(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&read(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn gain(&self) -> Result<DMatrix<f64>> {
        matrix_from_rows(&self.k, "controller k")
    }

    pub fn inputs(&self) -> Result<InputBox> {
        InputBox::new(DVector::from_column_slice(&self.u_max))
    }

    /// Checks `K` against an `n`-state, `p`-input model.
    pub fn check_dims(&self, n: usize, p: usize) -> Result<()> {
        let k = self.gain()?;
        if k.shape() != (p, n) || self.u_max.len() != p {
            return Err(Error::Dimension {
                context: "controller file",
                expected: format!("K {p}x{n}, {p} saturation bounds"),
                got: format!("K {}x{}, {} saturation bounds", k.nrows(), k.ncols(), self.u_max.len()),
            });
        }
        for (m, what) in [(&self.q, "q"), (&self.p, "p")] {
            if let Some(m) = m {
                let m = matrix_from_rows(m, what)?;
                if m.shape() != (n, n) {
                    return Err(Error::Dimension {
                        context: "controller file",
                        expected: format!("{what} {n}x{n}"),
                        got: format!("{what} {}x{}", m.nrows(), m.ncols()),
                    });
                }
            }
        }
        if let Some(h) = &self.h {
            let h = matrix_from_rows(h, "h")?;
            if h.shape() != (p, n) {
                return Err(Error::Dimension {
                    context: "controller file",
                    expected: format!("h {p}x{n}"),
                    got: format!("h {}x{}", h.nrows(), h.ncols()),
                });
            }
        }
        Ok(())
    }

    /// Candidate `(Q, Y = K Q, Z = H Q)` for re-verification; an edited `K` changes `Y`.
    pub fn candidate(&self) -> Result<LearnerSolution> {
        let q = matrix_from_rows(
            self.q.as_ref().ok_or_else(|| Error::Config("controller file has no q; cannot verify".into()))?,
            "q",
        )?;
        let h = matrix_from_rows(
            self.h.as_ref().ok_or_else(|| Error::Config("controller file has no h; cannot verify".into()))?,
            "h",
        )?;
        let k = self.gain()?;
        Ok(LearnerSolution { y: &k * &q, z: &h * &q, objective: q.trace(), q })
    }

    pub fn feedback(&self) -> Result<Feedback> {
        let p = self.p.as_ref().map(|p| matrix_from_rows(p, "p")).transpose()?;
        Ok(Feedback { k: self.gain()?, inputs: self.inputs()?, p })
    }
}

/// Simulation scenario: horizon, initial state, reference and fault phases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Seconds.
    pub horizon: f64,
    pub x0: Vec<f64>,
    pub reference: ReferenceSignal,
    pub phases: Vec<FaultPhase>,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&read(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn schedule(&self, faults: &FaultSet) -> Result<FaultSchedule> {
        FaultSchedule::new(self.phases.clone(), faults, self.horizon)
    }

    pub fn initial_state(&self, n: usize) -> Result<DVector<f64>> {
        if self.x0.len() != n {
            return Err(Error::Config(format!("scenario x0 has {} entries, model has {n} states", self.x0.len())));
        }
        Ok(DVector::from_column_slice(&self.x0))
    }
}

/// One iteration of a synthesis run. Wall-clock time is left out so that
/// identical configs give identical files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistoryEntry {
    pub iteration: usize,
    pub samples: usize,
    pub constraints: usize,
    pub xi_constraints: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_q: Option<f64>,
    /// `infeasible`, `certificate`, `counterexample` or `undecided`.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subproblem: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub separation: Option<f64>,
    pub verifier_evaluations: usize,
}

impl From<&IterationRecord> for HistoryEntry {
    fn from(r: &IterationRecord) -> Self {
        let mut e = HistoryEntry {
            iteration: r.iteration,
            samples: r.samples,
            constraints: r.constraints,
            xi_constraints: r.xi_constraints,
            trace_q: r.trace_q,
            verdict: String::new(),
            value: None,
            bound: None,
            subproblem: None,
            sign_index: None,
            x: None,
            phi: None,
            separation: None,
            verifier_evaluations: r.verifier_evaluations,
        };
        match &r.verdict {
            IterationVerdict::Infeasible => e.verdict = "infeasible".into(),
            IterationVerdict::Certificate { lambda_star, bound } => {
                e.verdict = "certificate".into();
                e.value = Some(*lambda_star);
                e.bound = Some(*bound);
            }
            IterationVerdict::Counterexample { value, subproblem, sign_index, x, phi, separation, duplicate } => {
                e.verdict = if *duplicate { "duplicate-counterexample" } else { "counterexample" }.into();
                e.value = Some(*value);
                e.subproblem = Some(*subproblem);
                e.sign_index = Some(*sign_index);
                e.x = Some(x.iter().copied().collect());
                e.phi = Some(phi.iter().copied().collect());
                e.separation = Some(*separation);
            }
            IterationVerdict::Undecided { best, bound } => {
                e.verdict = "undecided".into();
                e.value = Some(*best);
                e.bound = Some(*bound);
            }
        }
        e
    }
}

/// Synthesis report written next to the controller file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunReport {
    /// `converged`, `infeasible`, `budget` or `undecided`.
    pub outcome: String,
    pub summary: String,
    pub iterations: usize,
    pub samples: usize,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub lipschitz_certified: bool,
    pub history: Vec<HistoryEntry>,
    pub config: ProblemConfig,
}

impl RunReport {
    pub fn new(outcome: &CegisOutcome, problem: &Problem, config: &ProblemConfig) -> Self {
        Self {
            outcome: outcome.kind().into(),
            summary: outcome.summary(),
            iterations: outcome.history().len(),
            samples: outcome.samples().len(),
            kappa_a: problem.lipschitz.kappa_a,
            kappa_b: problem.lipschitz.kappa_b,
            lipschitz_certified: problem.lipschitz.certified,
            history: outcome.history().iter().map(HistoryEntry::from).collect(),
            config: config.clone(),
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}

/// Boundary points `L (cos θ, sin θ)` of `E(Q)` with `Q = L Lᵀ`, for `n = 2`.
pub fn ellipse_polyline(q: &DMatrix<f64>, points: usize) -> Result<Vec<[f64; 2]>> {
    if q.shape() != (2, 2) {
        return Err(Error::Contract("ellipse polyline needs a 2x2 matrix".into()));
    }
    let l = q.clone().cholesky().ok_or_else(|| Error::Contract("ellipsoid matrix is not positive definite".into()))?.l();
    Ok((0..points)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
            let v = &l * DVector::from_vec(vec![th.cos(), th.sin()]);
            [v[0], v[1]]
        })
        .collect())
}

/// Region-of-attraction output of a fixed gain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoaFile {
    pub model: String,
    pub k: Rows,
    pub feasible: bool,
    pub iterations: usize,
    /// `trace(Q)`; 0 when infeasible.
    pub trace_q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Rows>,
    /// 360 boundary points of the ellipse for two-state models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<[f64; 2]>>,
    pub config: ProblemConfig,
}

impl RoaFile {
    pub fn new(k: &DMatrix<f64>, outcome: &RoaOutcome, model: &str, config: &ProblemConfig) -> Result<Self> {
        let (feasible, iterations, q) = match outcome {
            RoaOutcome::Ellipsoid { q, iterations, .. } => (true, *iterations, Some(q)),
            RoaOutcome::Infeasible { iterations } => (false, *iterations, None),
        };
        let boundary = match q {
            Some(q) if q.nrows() == 2 => Some(ellipse_polyline(q, 360)?),
            _ => None,
        };
        Ok(Self {
            model: model.into(),
            k: rows_of(k),
            feasible,
            iterations,
            trace_q: outcome.trace(),
            q: q.map(rows_of),
            boundary,
            config: config.clone(),
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }
}
