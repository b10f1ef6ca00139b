//! Closed-loop simulation under fault schedules and reference signals,
//! tracking metrics, and the sampled invariant-ellipsoid contraction check.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cegis::Problem;
use crate::error::{Error, Result};
use crate::ldi::saturate;
use crate::learner::Controller;
use crate::model::{FaultSet, InputBox, NonlinearModel};

/// Slack when matching times against phase boundaries.
const TIME_SLACK: f64 = 1e-9;

/// States with a larger Euclidean norm count as diverged.
pub const DIVERGENCE_NORM: f64 = 1e6;

/// Constant fault vector on `(t_start, t_end]` (the first phase includes `t = 0`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultPhase {
    pub t_start: f64,
    pub t_end: f64,
    pub phi: Vec<f64>,
}

/// Contiguous fault phases covering the simulation horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct FaultSchedule {
    phases: Vec<FaultPhase>,
}

impl FaultSchedule {
    /// Checks contiguity, coverage of `[0, horizon]` and that every vector lies in the fault set.
    pub fn new(phases: Vec<FaultPhase>, faults: &FaultSet, horizon: f64) -> Result<Self> {
        let Some(first) = phases.first() else {
            return Err(Error::Config("fault schedule has no phases".into()));
        };
        if first.t_start.abs() > TIME_SLACK {
            return Err(Error::Config(format!("fault schedule starts at {} instead of 0", first.t_start)));
        }
        for (i, ph) in phases.iter().enumerate() {
            if !(ph.t_start.is_finite() && ph.t_end.is_finite() && ph.t_end > ph.t_start) {
                return Err(Error::Config(format!("fault phase {i} has an empty or invalid interval")));
            }
            let phi = DVector::from_column_slice(&ph.phi);
            if phi.len() != faults.p() || !faults.contains(&phi) {
                return Err(Error::Config(format!(
                    "fault phase {i}: {:?} is not a fault vector for {} actuators (at most one entry below 1)",
                    ph.phi,
                    faults.p()
                )));
            }
            if let Some(next) = phases.get(i + 1) {
                if (next.t_start - ph.t_end).abs() > TIME_SLACK {
                    return Err(Error::Config(format!(
                        "fault schedule gap or overlap between t = {} and t = {}",
                        ph.t_end, next.t_start
                    )));
                }
            }
        }
        let end = phases.last().map_or(0.0, |p| p.t_end);
        if end < horizon - TIME_SLACK {
            return Err(Error::Config(format!("fault schedule ends at {end} before the horizon {horizon}")));
        }
        Ok(Self { phases })
    }

    /// A single fault-free phase.
    pub fn nominal(faults: &FaultSet, horizon: f64) -> Result<Self> {
        let phase = FaultPhase { t_start: 0.0, t_end: horizon, phi: faults.nominal().as_slice().to_vec() };
        Self::new(vec![phase], faults, horizon)
    }

    pub fn phases(&self) -> &[FaultPhase] {
        &self.phases
    }

    /// Index of the phase active at `t`.
    pub fn phase_index(&self, t: f64) -> usize {
        self.phases.iter().position(|p| t <= p.t_end + TIME_SLACK).unwrap_or(self.phases.len() - 1)
    }

    pub fn at(&self, t: f64) -> DVector<f64> {
        DVector::from_column_slice(&self.phases[self.phase_index(t)].phi)
    }
}

/// Setpoint trajectory `x_ref(t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceSignal {
    Constant {
        x_ref: Vec<f64>,
    },
    /// `offset + amplitude · sin(2π · frequency · t)` per channel, frequency in hertz.
    Sinusoid {
        amplitude: Vec<f64>,
        frequency: Vec<f64>,
        offset: Vec<f64>,
    },
    /// Zero-order hold through `(t, x_ref)` knots sorted by time.
    Piecewise {
        points: Vec<(f64, Vec<f64>)>,
    },
}

impl ReferenceSignal {
    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("reference {what} must have {n} finite entries")));
        let ok = |v: &[f64]| v.len() == n && v.iter().all(|x| x.is_finite());
        match self {
            ReferenceSignal::Constant { x_ref } if !ok(x_ref) => bad("x_ref"),
            ReferenceSignal::Sinusoid { amplitude, frequency, offset } => {
                if !ok(amplitude) {
                    bad("amplitude")
                } else if !ok(frequency) {
                    bad("frequency")
                } else if !ok(offset) {
                    bad("offset")
                } else {
                    Ok(())
                }
            }
            ReferenceSignal::Piecewise { points } => {
                if points.is_empty() {
                    return Err(Error::Config("piecewise reference needs at least one knot".into()));
                }
                if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
                    return Err(Error::Config("piecewise reference knots must be strictly increasing in time".into()));
                }
                if points.iter().any(|(t, v)| !t.is_finite() || !ok(v)) {
                    return bad("knot");
                }
                Ok(())
            }
            ReferenceSignal::Constant { .. } => Ok(()),
        }
    }

    pub fn at(&self, t: f64) -> DVector<f64> {
        match self {
            ReferenceSignal::Constant { x_ref } => DVector::from_column_slice(x_ref),
            ReferenceSignal::Sinusoid { amplitude, frequency, offset } => DVector::from_fn(offset.len(), |k, _| {
                offset[k] + amplitude[k] * (2.0 * std::f64::consts::PI * frequency[k] * t).sin()
            }),
            ReferenceSignal::Piecewise { points } => {
                let idx = points.iter().rposition(|(tk, _)| *tk <= t + TIME_SLACK).unwrap_or(0);
                DVector::from_column_slice(&points[idx].1)
            }
        }
    }
}

/// State feedback `u = sat(K e)`, optionally with the Lyapunov matrix `P` for `V(e)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Feedback {
    pub k: DMatrix<f64>,
    pub inputs: InputBox,
    pub p: Option<DMatrix<f64>>,
}

impl From<&Controller> for Feedback {
    fn from(c: &Controller) -> Self {
        Self { k: c.k.clone(), inputs: c.inputs.clone(), p: Some(c.p.clone()) }
    }
}

/// Recorded closed-loop run on a uniform time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Trace {
    pub t: Vec<f64>,
    pub x: Vec<DVector<f64>>,
    /// Saturated input applied from each sample to the next.
    pub u: Vec<DVector<f64>>,
    pub phi: Vec<DVector<f64>>,
    pub x_ref: Vec<DVector<f64>>,
    /// `V(x − x_ref)`; NaN without a Lyapunov matrix.
    pub v: Vec<f64>,
    /// Active fault phase per sample.
    pub phase: Vec<usize>,
    pub u_max: DVector<f64>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn error(&self, k: usize) -> DVector<f64> {
        &self.x[k] - &self.x_ref[k]
    }

    /// Writes `#`-prefixed comment lines, then the header row and one row per sample.
    pub fn write_csv<W: Write>(&self, w: W, comments: &[String]) -> Result<()> {
        let mut w = w;
        for c in comments {
            for line in c.lines() {
                writeln!(w, "# {line}")?;
            }
        }
        let n = self.x.first().map_or(0, |x| x.len());
        let p = self.u_max.len();
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|i| format!("x{i}")));
        header.extend((1..=p).map(|i| format!("u{i}")));
        header.extend((1..=p).map(|i| format!("phi{i}")));
        header.extend((1..=n).map(|i| format!("ref{i}")));
        header.push("V".into());
        out.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![self.t[k]];
            row.extend(self.x[k].iter());
            row.extend(self.u[k].iter());
            row.extend(self.phi[k].iter());
            row.extend(self.x_ref[k].iter());
            row.push(self.v[k]);
            out.write_record(row.iter().map(|v| v.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Runs `x⁺ = step(x, sat(K (x − x_ref)), φ(t))` for `round(horizon / dt)` steps.
pub fn simulate(
    model: &NonlinearModel,
    feedback: &Feedback,
    x0: &DVector<f64>,
    schedule: &FaultSchedule,
    reference: &ReferenceSignal,
    horizon: f64,
) -> Result<Trace> {
    let (n, p) = (model.n(), model.p());
    if feedback.k.shape() != (p, n) {
        return Err(Error::Dimension {
            context: "feedback gain",
            expected: format!("{p}x{n}"),
            got: format!("{}x{}", feedback.k.nrows(), feedback.k.ncols()),
        });
    }
    if feedback.inputs.p() != p {
        return Err(Error::Dimension { context: "saturation box", expected: p.to_string(), got: feedback.inputs.p().to_string() });
    }
    if let Some(pm) = &feedback.p {
        if pm.shape() != (n, n) {
            return Err(Error::Dimension {
                context: "Lyapunov matrix",
                expected: format!("{n}x{n}"),
                got: format!("{}x{}", pm.nrows(), pm.ncols()),
            });
        }
    }
    if x0.len() != n {
        return Err(Error::Dimension { context: "initial state", expected: n.to_string(), got: x0.len().to_string() });
    }
    if schedule.phases().iter().any(|ph| ph.phi.len() != p) {
        return Err(Error::Dimension { context: "fault schedule", expected: p.to_string(), got: "other".into() });
    }
    reference.validate(n)?;
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::Config("simulation horizon must be positive".into()));
    }
    let end = schedule.phases().last().map_or(0.0, |ph| ph.t_end);
    if end < horizon - TIME_SLACK {
        return Err(Error::Config(format!("fault schedule ends at {end} before the horizon {horizon}")));
    }

    let dt = model.dt();
    let steps = (horizon / dt).round() as usize;
    let mut trace = Trace {
        t: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        phi: Vec::with_capacity(steps + 1),
        x_ref: Vec::with_capacity(steps + 1),
        v: Vec::with_capacity(steps + 1),
        phase: Vec::with_capacity(steps + 1),
        u_max: feedback.inputs.u_max().clone(),
    };
    let mut x = x0.clone();
    for k in 0..=steps {
        let t = k as f64 * dt;
        let phi = schedule.at(t);
        let r = reference.at(t);
        let e = &x - &r;
        let u = saturate(&(&feedback.k * &e), &feedback.inputs);
        let v = feedback.p.as_ref().map_or(f64::NAN, |pm| e.dot(&(pm * &e)));
        let next = if k < steps {
            let next = model.step(&x, &u, &phi, k + 1)?;
            if next.norm() > DIVERGENCE_NORM {
                return Err(Error::Divergence { step: k + 1, time: (k + 1) as f64 * dt });
            }
            Some(next)
        } else {
            None
        };
        trace.t.push(t);
        trace.x.push(x.clone());
        trace.u.push(u);
        trace.phi.push(phi);
        trace.x_ref.push(r);
        trace.v.push(v);
        trace.phase.push(schedule.phase_index(t));
        if let Some(next) = next {
            x = next;
        }
    }
    Ok(trace)
}

/// Error statistics of one fault phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseMetrics {
    pub phase: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
    /// `‖e‖` at the first sample of the phase.
    pub initial_error: f64,
    pub max_error: f64,
    pub final_error: f64,
    /// Mean `‖e‖` over the last 10% of the phase's samples.
    pub steady_state_error: f64,
    /// Fraction of samples with each input at its bound.
    pub saturation_duty: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub phases: Vec<PhaseMetrics>,
    /// Largest `|u_i| / u_max_i` over the whole run.
    pub max_input_ratio: f64,
}

/// Per-phase tracking metrics; phases without samples are skipped.
pub fn metrics(trace: &Trace) -> Result<MetricsReport> {
    if trace.is_empty() {
        return Err(Error::Contract("metrics need a non-empty trace".into()));
    }
    let p = trace.u_max.len();
    let last_phase = trace.phase.iter().copied().max().unwrap_or(0);
    let mut phases = Vec::new();
    for ph in 0..=last_phase {
        let idx: Vec<usize> = (0..trace.len()).filter(|k| trace.phase[*k] == ph).collect();
        let (Some(&first), Some(&last)) = (idx.first(), idx.last()) else { continue };
        let err: Vec<f64> = idx.iter().map(|k| trace.error(*k).norm()).collect();
        let tail = (idx.len() / 10).max(1);
        let steady = err[err.len() - tail..].iter().sum::<f64>() / tail as f64;
        let saturation_duty = (0..p)
            .map(|i| {
                let bound = trace.u_max[i];
                let hits = idx.iter().filter(|k| trace.u[**k][i].abs() >= bound * (1.0 - 1e-12)).count();
                hits as f64 / idx.len() as f64
            })
            .collect();
        phases.push(PhaseMetrics {
            phase: ph,
            t_start: trace.t[first],
            t_end: trace.t[last],
            samples: idx.len(),
            initial_error: err[0],
            max_error: err.iter().copied().fold(0.0, f64::max),
            final_error: err[err.len() - 1],
            steady_state_error: steady,
            saturation_duty,
        });
    }
    let max_input_ratio = trace
        .u
        .iter()
        .flat_map(|u| u.iter().zip(trace.u_max.iter()).map(|(v, m)| v.abs() / m))
        .fold(0.0, f64::max);
    Ok(MetricsReport { phases, max_input_ratio })
}

/// Outcome of the sampled Lyapunov decrease check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionReport {
    pub samples: usize,
    /// Pairs with `V(A x + B sat(K x)) > V(x) + tol`.
    pub violations: usize,
    /// Largest `V(A x + B sat(K x)) − V(x)`.
    pub worst_increase: f64,
}

/// Draws `samples` states uniformly from `E(Q)` and Jacobian pairs at uniform
/// points of the domain box and fault set, and checks the Lyapunov decrease
/// of the saturated linear family.
pub fn check_contraction(
    problem: &Problem,
    controller: &Controller,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ContractionReport> {
    let n = problem.model.n();
    let p = problem.model.p();
    let chol = controller
        .q
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Contract("controller Q is not positive definite".into()))?;
    let l = chol.l();
    let bbox = problem.domain.bbox();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for s in 0..samples {
        // Uniform in the unit ball, mapped onto E(Q) = {L w : ‖w‖ ≤ 1}.
        let dir = loop {
            let g = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..=1.0));
            let norm = g.norm();
            if norm > 1e-12 && norm <= 1.0 {
                break g / norm;
            }
        };
        let radius: f64 = rng.gen_range(0.0f64..=1.0).powf(1.0 / n as f64);
        let x = &l * dir * radius;
        let xbar = DVector::from_fn(n, |k, _| rng.gen_range(bbox.lower[k]..=bbox.upper[k]));
        let phi = if s % (p + 1) == p {
            problem.faults.nominal()
        } else {
            problem.faults.fault_vector(s % (p + 1), rng.gen_range(0.0..=1.0))?
        };
        let pair = problem.model.linearize(&xbar, &phi)?;
        let u = saturate(&(&controller.k * &x), &controller.inputs);
        let next = &pair.a * &x + &pair.b * u;
        let increase = controller.lyapunov(&next) - controller.lyapunov(&x);
        worst = worst.max(increase);
        if increase > tol {
            violations += 1;
        }
    }
    Ok(ContractionReport { samples, violations, worst_increase: worst })
}
