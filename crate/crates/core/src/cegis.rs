//! The learner–verifier loop: learn a candidate from the samples, verify it
//! globally, and either stop with a certified controller or add the returned
//! counterexample and repeat.

use std::time::Instant;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::ldi::enumerate_sign_matrices;
use crate::learner::{
    extract_controller, learn, AddOutcome, CegisConfig, CertificateInfo, Controller, GainMode, LearnOutcome,
    SampleSet,
};
use crate::model::{
    estimate_lipschitz, FaultSet, InputBox, JacobianPair, LipschitzBounds, LipschitzSampling, NonlinearModel,
    StatePolytope,
};
use crate::verifier::{verify, VerifierResult};

/// Everything that defines a synthesis problem apart from hyperparameters.
#[derive(Clone, Debug)]
pub struct Problem {
    pub model: NonlinearModel,
    pub domain: StatePolytope,
    pub inputs: InputBox,
    pub faults: FaultSet,
    /// Jacobian Lipschitz constants used by the verifier.
    pub lipschitz: LipschitzBounds,
}

impl Problem {
    /// Without explicit bounds, the model's analytic bounds are used, or
    /// sampled ones when it has none.
    pub fn new(
        model: NonlinearModel,
        domain: StatePolytope,
        inputs: InputBox,
        lipschitz: Option<LipschitzBounds>,
    ) -> Result<Self> {
        if domain.dim() != model.n() {
            return Err(Error::Dimension {
                context: "state domain",
                expected: model.n().to_string(),
                got: domain.dim().to_string(),
            });
        }
        if inputs.p() != model.p() {
            return Err(Error::Dimension {
                context: "saturation box",
                expected: model.p().to_string(),
                got: inputs.p().to_string(),
            });
        }
        let faults = FaultSet::new(model.p())?;
        let lipschitz = match lipschitz.or_else(|| model.dynamics().analytic_lipschitz(domain.bbox(), model.dt())) {
            Some(l) => l,
            None => estimate_lipschitz(&model, &domain, &faults, &LipschitzSampling::default())?,
        };
        Ok(Self { model, domain, inputs, faults, lipschitz })
    }
}

/// What happened in one iteration.
#[derive(Clone, Debug, PartialEq)]
pub enum IterationVerdict {
    Infeasible,
    Certificate {
        lambda_star: f64,
        bound: f64,
    },
    Counterexample {
        value: f64,
        subproblem: usize,
        sign_index: usize,
        x: DVector<f64>,
        phi: DVector<f64>,
        /// Combined operator-norm distance to the closest stored sample.
        separation: f64,
        duplicate: bool,
    },
    Undecided {
        best: f64,
        bound: f64,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Sample-set size the learner saw.
    pub samples: usize,
    /// PSD constraints in the learner SDP.
    pub constraints: usize,
    pub xi_constraints: usize,
    pub trace_q: Option<f64>,
    pub verdict: IterationVerdict,
    pub verifier_evaluations: usize,
    pub seconds: f64,
}

/// Diagnostics of an undecided verification.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UndecidedInfo {
    pub best: f64,
    pub bound: f64,
    pub gap: f64,
    pub evaluations: usize,
}

impl UndecidedInfo {
    pub fn into_error(self) -> Error {
        Error::Undecided { best: self.best, bound: self.bound, gap: self.gap, evaluations: self.evaluations }
    }
}

#[derive(Clone, Debug)]
pub enum CegisOutcome {
    Converged {
        controller: Controller,
        certificate: CertificateInfo,
        iterations: usize,
        history: Vec<IterationRecord>,
        samples: SampleSet,
    },
    Infeasible {
        iterations: usize,
        history: Vec<IterationRecord>,
        samples: SampleSet,
    },
    Budget {
        history: Vec<IterationRecord>,
        samples: SampleSet,
    },
    Undecided {
        error: UndecidedInfo,
        history: Vec<IterationRecord>,
        samples: SampleSet,
    },
}

impl CegisOutcome {
    pub fn history(&self) -> &[IterationRecord] {
        match self {
            CegisOutcome::Converged { history, .. }
            | CegisOutcome::Infeasible { history, .. }
            | CegisOutcome::Budget { history, .. }
            | CegisOutcome::Undecided { history, .. } => history,
        }
    }

    pub fn samples(&self) -> &SampleSet {
        match self {
            CegisOutcome::Converged { samples, .. }
            | CegisOutcome::Infeasible { samples, .. }
            | CegisOutcome::Budget { samples, .. }
            | CegisOutcome::Undecided { samples, .. } => samples,
        }
    }

    pub fn controller(&self) -> Option<&Controller> {
        match self {
            CegisOutcome::Converged { controller, .. } => Some(controller),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CegisOutcome::Converged { .. } => "converged",
            CegisOutcome::Infeasible { .. } => "infeasible",
            CegisOutcome::Budget { .. } => "budget",
            CegisOutcome::Undecided { .. } => "undecided",
        }
    }

    pub fn summary(&self) -> String {
        match self {
            CegisOutcome::Converged { certificate, iterations, .. } => format!(
                "converged after {iterations} iterations: lambda* = {:e}, certified bound = {:e}{}",
                certificate.lambda_star,
                certificate.bound,
                if certificate.certified { "" } else { " (estimate-based Lipschitz constants)" }
            ),
            CegisOutcome::Infeasible { iterations, .. } => {
                format!("learner SDP infeasible at iteration {iterations}; try other eta/epsilon/tau")
            }
            CegisOutcome::Budget { history, .. } => {
                format!("iteration budget exhausted after {} iterations", history.len())
            }
            CegisOutcome::Undecided { error, .. } => format!(
                "verifier undecided (best {:e}, bound {:e}, gap {:e}); raise epsilon or supply analytic Lipschitz bounds",
                error.best, error.bound, error.gap
            ),
        }
    }
}

/// Linearization at the origin with all actuators nominal.
pub fn default_initial_sample(model: &NonlinearModel, faults: &FaultSet) -> Result<JacobianPair> {
    model.linearize(&DVector::zeros(model.n()), &faults.nominal())
}

/// Runs the loop with a free gain. `initial` overrides the seed sample `(x̄, φ̄)`.
pub fn run(
    problem: &Problem,
    config: &CegisConfig,
    initial: Option<(DVector<f64>, DVector<f64>)>,
) -> Result<CegisOutcome> {
    run_with_mode(problem, config, initial, &GainMode::Free)
}

pub fn run_with_mode(
    problem: &Problem,
    config: &CegisConfig,
    initial: Option<(DVector<f64>, DVector<f64>)>,
    mode: &GainMode,
) -> Result<CegisOutcome> {
    config.validate()?;
    let signs = enumerate_sign_matrices(problem.model.p())?;
    let seed = match initial {
        Some((x, phi)) => {
            if !problem.faults.contains(&phi) {
                return Err(Error::Config("initial fault vector is outside the fault set".into()));
            }
            problem.model.linearize(&x, &phi)?
        }
        None => default_initial_sample(&problem.model, &problem.faults)?,
    };
    let mut samples = SampleSet::new();
    samples.add_sample(seed, 0)?;
    let mut history = Vec::new();
    let mut duplicates_in_row = 0;

    for k in 1..=config.max_iterations {
        let start = Instant::now();
        let (learned, stats) = learn(&samples, config, &problem.domain, &problem.inputs, &signs, mode)?;
        let mut record = IterationRecord {
            iteration: k,
            samples: samples.len(),
            constraints: stats.constraints,
            xi_constraints: stats.xi_constraints,
            trace_q: None,
            verdict: IterationVerdict::Infeasible,
            verifier_evaluations: 0,
            seconds: 0.0,
        };
        let sol = match learned {
            LearnOutcome::Infeasible => {
                record.seconds = start.elapsed().as_secs_f64();
                log::info!("iteration {k}: learner infeasible");
                history.push(record);
                return Ok(CegisOutcome::Infeasible { iterations: k, history, samples });
            }
            LearnOutcome::Solved(sol) => sol,
        };
        record.trace_q = Some(sol.objective);

        match verify(problem, &sol, config) {
            Ok(VerifierResult::Certificate { lambda_star, bound, certified, evaluations }) => {
                record.verdict = IterationVerdict::Certificate { lambda_star, bound };
                record.verifier_evaluations = evaluations;
                record.seconds = start.elapsed().as_secs_f64();
                log::info!("iteration {k}: trace(Q) = {:.6e}, certificate lambda* = {lambda_star:e}", sol.objective);
                history.push(record);
                let certificate = CertificateInfo { lambda_star, bound, certified };
                let mut controller = extract_controller(&sol, &problem.inputs)?;
                controller.certificate = Some(certificate);
                return Ok(CegisOutcome::Converged { controller, certificate, iterations: k, history, samples });
            }
            Ok(VerifierResult::Counterexample { pair, value, subproblem, sign_index, evaluations }) => {
                let separation = samples.min_distance(&pair);
                let (x, phi) = (pair.x.clone(), pair.phi.clone());
                let added = samples.add_sample(pair, k)?;
                let duplicate = matches!(added, AddOutcome::Duplicate { .. });
                log::info!(
                    "iteration {k}: trace(Q) = {:.6e}, counterexample {value:e} at x = {:?}, phi = {:?} (separation {separation:e})",
                    sol.objective,
                    x.as_slice(),
                    phi.as_slice()
                );
                record.verdict =
                    IterationVerdict::Counterexample { value, subproblem, sign_index, x, phi, separation, duplicate };
                record.verifier_evaluations = evaluations;
                record.seconds = start.elapsed().as_secs_f64();
                history.push(record);
                if duplicate {
                    duplicates_in_row += 1;
                    if duplicates_in_row >= 2 {
                        return Err(Error::NumericalFailure(format!(
                            "loop stalled: the verifier returned an already stored sample twice in a row (iteration {k})"
                        )));
                    }
                } else {
                    duplicates_in_row = 0;
                }
            }
            Err(Error::Undecided { best, bound, gap, evaluations }) => {
                record.verdict = IterationVerdict::Undecided { best, bound };
                record.verifier_evaluations = evaluations;
                record.seconds = start.elapsed().as_secs_f64();
                history.push(record);
                let error = UndecidedInfo { best, bound, gap, evaluations };
                return Ok(CegisOutcome::Undecided { error, history, samples });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(CegisOutcome::Budget { history, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::LinearDynamics;
    use nalgebra::DMatrix;
    use std::sync::Arc;

    fn scalar_problem(a: f64, b: &[f64]) -> Problem {
        let dyns =
            LinearDynamics::from_discrete(&DMatrix::from_element(1, 1, a), &DMatrix::from_row_slice(1, b.len(), b), 0.01)
                .unwrap();
        let model = NonlinearModel::new("linear-test", Arc::new(dyns), 0.01).unwrap();
        let domain = StatePolytope::from_box(DVector::from_element(1, -1.0), DVector::from_element(1, 1.0)).unwrap();
        Problem::new(model, domain, InputBox::uniform(b.len(), 1.0).unwrap(), None).unwrap()
    }

    #[test]
    fn uncontrollable_unstable_scalar_is_infeasible_at_first_iteration() {
        let out = run(&scalar_problem(1.5, &[0.0]), &CegisConfig::default(), None).unwrap();
        match out {
            CegisOutcome::Infeasible { iterations, history, .. } => {
                assert_eq!(iterations, 1);
                assert_eq!(history.len(), 1);
            }
            other => panic!("unexpected {}", other.summary()),
        }
    }

    #[test]
    fn default_seed_is_nominal_origin() {
        let p = scalar_problem(0.5, &[1.0]);
        let pair = default_initial_sample(&p.model, &p.faults).unwrap();
        assert_eq!(pair.a[(0, 0)], 0.5);
        assert_eq!(pair.b[(0, 0)], 1.0);
        assert_eq!(pair.phi[0], 1.0);
    }

    #[test]
    fn fault_family_needs_counterexamples() {
        // x⁺ = 1.05 x + φ₁u₁ + 0.1 φ₂u₂: a gain learned from the nominal sample
        // leans on the strong actuator and fails when it is lost.
        let p = scalar_problem(1.05, &[1.0, 0.1]);
        let out = run(&p, &CegisConfig::default(), None).unwrap();
        let CegisOutcome::Converged { controller, iterations, history, samples, .. } = &out else {
            panic!("unexpected {}", out.summary())
        };
        assert!(*iterations >= 2);
        assert_eq!(history.len(), *iterations);
        assert_eq!(samples.len(), *iterations);
        assert!(controller.certificate.unwrap().lambda_star > 0.0);
        // An unstable plant loses every stabilizing gain once its actuator can fail completely.
        let unstable = run(&scalar_problem(1.02, &[1.0]), &CegisConfig::default(), None).unwrap();
        assert_eq!(unstable.kind(), "infeasible");
        assert_eq!(unstable.history().len(), 2);
    }

    #[test]
    fn rejects_seed_outside_fault_set() {
        let p = scalar_problem(0.5, &[1.0]);
        assert!(run(&p, &CegisConfig::default(), Some((DVector::zeros(1), DVector::from_element(1, 2.0)))).is_err());
    }
}
