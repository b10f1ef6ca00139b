//! The verifier: deterministic Lipschitz branch-and-bound minimization of
//! `min_j λ_min(Ξ_j(A(x, φ), B(x, φ)))` over the state box and each
//! single-fault subproblem.
//!
//! Regions are trisected along their widest Lipschitz-weighted side. A region
//! with center value `f(c)` and half-widths `h` has lower bound
//! `f(c) − Σ_g L_g ‖h_g‖₂`, kept monotone by taking the max with its parent's.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cegis::Problem;
use crate::error::{Error, Result};
use crate::ldi::{enumerate_sign_matrices, XiEvaluator};
use crate::learner::{CegisConfig, LearnerSolution};
use crate::model::JacobianPair;

/// Branch-and-bound tolerances and budgets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifierSettings {
    /// Regions narrower than this fraction of the box diameter are not split.
    pub diam_tol_rel: f64,
    /// Objective evaluations per subproblem before giving up.
    pub max_evaluations: usize,
    /// Regions split per parallel batch.
    pub batch_size: usize,
    /// Evaluate every corner of the search box before branching.
    pub seed_vertices: bool,
    /// Extra evaluations spent refining the minimizer once a nonpositive value is found.
    pub polish_evaluations: usize,
    /// Emit a progress record every this many batches (0 disables).
    pub log_every: usize,
    /// For models with affine Jacobians the objective is concave, so its
    /// minimum over a box is attained at a vertex; scan the vertices instead
    /// of branching.
    pub exploit_concavity: bool,
}

impl Default for VerifierSettings {
    fn default() -> Self {
        Self {
            diam_tol_rel: 1e-4,
            max_evaluations: 1_000_000,
            batch_size: 32,
            seed_vertices: true,
            polish_evaluations: 2_000,
            log_every: 200,
            exploit_concavity: true,
        }
    }
}

impl VerifierSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.diam_tol_rel.is_finite() && self.diam_tol_rel > 0.0) {
            return Err(Error::Config("verifier diam_tol_rel must be positive".into()));
        }
        if self.max_evaluations == 0 || self.batch_size == 0 {
            return Err(Error::Config("verifier budgets must be positive".into()));
        }
        Ok(())
    }
}

/// Coordinates sharing one Lipschitz constant under the Euclidean norm.
#[derive(Clone, Debug, PartialEq)]
pub struct CoordGroup {
    pub coords: Vec<usize>,
    pub lipschitz: f64,
}

/// Box and Lipschitz cone of a minimization problem.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub groups: Vec<CoordGroup>,
    /// The objective is concave on the box.
    pub concave: bool,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, groups: Vec<CoordGroup>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::Config("search box needs matching, non-empty bounds".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l < u)) {
            return Err(Error::Config("search box is degenerate".into()));
        }
        let mut seen = vec![false; lower.len()];
        for g in &groups {
            if !(g.lipschitz.is_finite() && g.lipschitz >= 0.0) {
                return Err(Error::Config(format!("Lipschitz constant must be finite, got {}", g.lipschitz)));
            }
            for &c in &g.coords {
                if c >= lower.len() || seen[c] {
                    return Err(Error::Config("Lipschitz groups must partition the coordinates".into()));
                }
                seen[c] = true;
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Config("every coordinate needs a Lipschitz group".into()));
        }
        Ok(Self { lower, upper, groups, concave: false })
    }

    /// Marks the objective as concave on the box.
    pub fn with_concave(mut self, concave: bool) -> Self {
        self.concave = concave;
        self
    }

    fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|m| (0..d).map(|k| if (m >> k) & 1 == 1 { self.upper[k] } else { self.lower[k] }).collect())
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn diameter(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| (u - l).powi(2)).sum::<f64>().sqrt()
    }

    fn weight(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.dim()];
        for g in &self.groups {
            for &c in &g.coords {
                w[c] = g.lipschitz;
            }
        }
        w
    }

    /// `Σ_g L_g ‖h_g‖₂` for half-widths `h`.
    fn cone(&self, half: &[f64]) -> f64 {
        self.groups
            .iter()
            .map(|g| g.lipschitz * g.coords.iter().map(|c| half[*c] * half[*c]).sum::<f64>().sqrt())
            .sum()
    }
}

/// Largest dimension for which a concave objective is minimized by vertex scan.
pub const MAX_VERTEX_SCAN_DIM: usize = 20;

/// Why [`global_minimize`] stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinimizeStatus {
    /// The certified lower bound exceeds the threshold.
    Certified,
    /// A point at or below the threshold was found.
    Found,
    /// Every region is below the diameter tolerance; the bound could not cross the threshold.
    Exhausted,
    /// Evaluation budget spent.
    Budget,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimizeResult {
    pub status: MinimizeStatus,
    pub best_value: f64,
    pub best_point: Vec<f64>,
    /// Auxiliary tag returned by the objective at the best point (the sign index).
    pub best_tag: usize,
    /// Lower bound on the minimum over the whole box; never above `best_value`.
    pub certified_bound: f64,
    pub evaluations: usize,
    pub regions: usize,
}

#[derive(Clone, Debug)]
struct Region {
    lower: Vec<f64>,
    upper: Vec<f64>,
    value: f64,
    lb: f64,
    id: usize,
}

impl Region {
    fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }

    fn half(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (u - l)).collect()
    }

    fn diameter(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| (u - l).powi(2)).sum::<f64>().sqrt()
    }
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Region {}

impl PartialOrd for Region {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Region {
    // Max-heap order: the smallest lower bound (then the oldest region) is greatest.
    fn cmp(&self, other: &Self) -> Ordering {
        other.lb.total_cmp(&self.lb).then_with(|| other.id.cmp(&self.id))
    }
}

struct Incumbent {
    value: f64,
    point: Vec<f64>,
    tag: usize,
}

impl Incumbent {
    fn offer(&mut self, value: f64, point: &[f64], tag: usize) {
        if value < self.value {
            self.value = value;
            self.point = point.to_vec();
            self.tag = tag;
        }
    }
}

/// Minimizes `f` over `space`, stopping once the certified bound exceeds
/// `threshold` or a value at or below it is found (then polishing briefly).
///
/// `f` returns the objective and a tag carried along with the incumbent.
/// On a concave space of at most [`MAX_VERTEX_SCAN_DIM`] dimensions the
/// vertex minimum is the exact global minimum and is returned directly.
pub fn global_minimize<F>(f: F, space: &SearchSpace, settings: &VerifierSettings, threshold: f64) -> Result<MinimizeResult>
where
    F: Fn(&[f64]) -> Result<(f64, usize)> + Sync,
{
    settings.validate()?;
    let d = space.dim();
    let weight = space.weight();
    let diam_tol = settings.diam_tol_rel * space.diameter();
    let eval_batch = |points: &[Vec<f64>]| -> Result<Vec<(f64, usize)>> {
        let out: Vec<Result<(f64, usize)>> = points.par_iter().map(|p| f(p)).collect();
        out.into_iter().collect()
    };

    let mut evaluations = 0usize;
    let mut inc = Incumbent { value: f64::INFINITY, point: Vec::new(), tag: 0 };

    if space.concave && d <= MAX_VERTEX_SCAN_DIM {
        let corners = space.corners();
        let values = eval_batch(&corners)?;
        for (p, (v, t)) in corners.iter().zip(values) {
            inc.offer(v, p, t);
        }
        let status = if inc.value > threshold { MinimizeStatus::Certified } else { MinimizeStatus::Found };
        let bound = inc.value;
        return Ok(finish(status, inc, bound, corners.len(), 1));
    }

    if settings.seed_vertices && d <= 12 {
        let corners = space.corners();
        let values = eval_batch(&corners)?;
        evaluations += corners.len();
        for (p, (v, t)) in corners.iter().zip(values) {
            inc.offer(v, p, t);
        }
    }

    let mut next_id = 0usize;
    let mut root = Region { lower: space.lower.clone(), upper: space.upper.clone(), value: 0.0, lb: 0.0, id: 0 };
    let c = root.center();
    let (v, t) = f(&c)?;
    evaluations += 1;
    inc.offer(v, &c, t);
    root.value = v;
    root.lb = v - space.cone(&root.half());
    next_id += 1;

    let mut heap = BinaryHeap::new();
    // Lower bounds of regions no longer queued: too small to split, or settled.
    let mut parked = f64::INFINITY;
    let mut regions = 1usize;
    heap.push(root);

    let bound_of = |heap: &BinaryHeap<Region>, parked: f64, best: f64| -> f64 {
        heap.peek().map_or(f64::INFINITY, |r| r.lb).min(parked).min(best)
    };

    let mut polish_left: Option<usize> = None;
    let mut batches = 0usize;
    loop {
        let found = inc.value <= threshold;
        if found && polish_left.is_none() {
            polish_left = Some(settings.polish_evaluations);
        }
        let bound = bound_of(&heap, parked, inc.value);
        if !found && bound > threshold {
            return Ok(finish(MinimizeStatus::Certified, inc, bound, evaluations, regions));
        }
        if polish_left == Some(0) {
            return Ok(finish(MinimizeStatus::Found, inc, bound, evaluations, regions));
        }
        if !found && evaluations >= settings.max_evaluations {
            return Ok(finish(MinimizeStatus::Budget, inc, bound, evaluations, regions));
        }

        // Regions that cannot beat the target need no refinement: above the
        // threshold while searching, above the incumbent while polishing.
        let cutoff = if found { inc.value } else { threshold };
        let mut batch = Vec::with_capacity(settings.batch_size);
        while batch.len() < settings.batch_size {
            let Some(r) = heap.pop() else { break };
            if r.lb > cutoff {
                parked = parked.min(r.lb);
                // Heap order means every remaining region is settled too.
                while let Some(rest) = heap.pop() {
                    parked = parked.min(rest.lb);
                }
                break;
            }
            if r.diameter() < diam_tol {
                parked = parked.min(r.lb);
                continue;
            }
            batch.push(r);
        }
        if batch.is_empty() {
            let bound = bound_of(&heap, parked, inc.value);
            let status = if found { MinimizeStatus::Found } else if bound > threshold { MinimizeStatus::Certified } else { MinimizeStatus::Exhausted };
            return Ok(finish(status, inc, bound, evaluations, regions));
        }

        // Trisect each region along its widest Lipschitz-weighted side.
        let mut children: Vec<(Region, bool)> = Vec::with_capacity(3 * batch.len());
        for parent in &batch {
            let axis = (0..d)
                .max_by(|a, b| {
                    let wa = (parent.upper[*a] - parent.lower[*a]) * weight[*a].max(1e-300);
                    let wb = (parent.upper[*b] - parent.lower[*b]) * weight[*b].max(1e-300);
                    wa.total_cmp(&wb).then_with(|| b.cmp(a))
                })
                .expect("non-empty box");
            let w = (parent.upper[axis] - parent.lower[axis]) / 3.0;
            for part in 0..3 {
                let mut child = parent.clone();
                child.lower[axis] = parent.lower[axis] + w * part as f64;
                child.upper[axis] = if part == 2 { parent.upper[axis] } else { parent.lower[axis] + w * (part + 1) as f64 };
                child.id = next_id;
                next_id += 1;
                // The middle child keeps the parent's center and value.
                children.push((child, part != 1));
            }
        }
        let points: Vec<Vec<f64>> = children.iter().filter(|(_, e)| *e).map(|(r, _)| r.center()).collect();
        let values = eval_batch(&points)?;
        evaluations += points.len();
        let mut vals = values.into_iter();
        for ((mut child, needs_eval), parent) in children.into_iter().zip(batch.iter().flat_map(|p| [p, p, p])) {
            if needs_eval {
                let (v, t) = vals.next().expect("one value per evaluated child");
                inc.offer(v, &child.center(), t);
                child.value = v;
            }
            child.lb = (child.value - space.cone(&child.half())).max(parent.lb);
            heap.push(child);
        }
        regions += 2 * batch.len();
        if let Some(left) = polish_left.as_mut() {
            *left = left.saturating_sub(points.len());
        }

        batches += 1;
        if settings.log_every > 0 && batches.is_multiple_of(settings.log_every) {
            log::debug!(
                "verifier evals={} regions={} queued={} best={:e} bound={:e}",
                evaluations,
                regions,
                heap.len(),
                inc.value,
                bound_of(&heap, parked, inc.value)
            );
        }
    }
}

fn finish(status: MinimizeStatus, inc: Incumbent, bound: f64, evaluations: usize, regions: usize) -> MinimizeResult {
    MinimizeResult {
        status,
        certified_bound: bound.min(inc.value),
        best_value: inc.value,
        best_point: inc.point,
        best_tag: inc.tag,
        evaluations,
        regions,
    }
}

/// Candidate, model and search geometry for one verification call.
pub struct VerifierProblem<'a> {
    problem: &'a Problem,
    evaluator: XiEvaluator,
    support: Vec<usize>,
    anchor: DVector<f64>,
    /// Objective Lipschitz constant along the state (2-norm).
    pub l_state: f64,
    /// Objective Lipschitz constant along the fault coordinate.
    pub l_fault: f64,
    settings: VerifierSettings,
}

impl<'a> VerifierProblem<'a> {
    pub fn new(problem: &'a Problem, candidate: &LearnerSolution, config: &CegisConfig) -> Result<Self> {
        let model = &problem.model;
        let signs = enumerate_sign_matrices(model.p())?;
        let evaluator = XiEvaluator::new(&candidate.q, &candidate.y, &candidate.z, &signs, config.tau)?;
        let flags = model.jacobian_support();
        let support: Vec<usize> = (0..model.n()).filter(|k| flags[*k]).collect();
        let bbox = problem.domain.bbox();
        let anchor = DVector::from_fn(model.n(), |k, _| {
            if bbox.lower[k] <= 0.0 && bbox.upper[k] >= 0.0 {
                0.0
            } else {
                0.5 * (bbox.lower[k] + bbox.upper[k])
            }
        });
        // A perturbation (ΔA, ΔB) moves the off-diagonal block of Ξ_j by
        // ΔA Q + ΔB W_j, and λ_min by at most that much.
        let lq = evaluator.q_norm();
        let lw = evaluator.gain_norm();
        let kappa = problem.lipschitz;
        Ok(Self {
            problem,
            evaluator,
            support,
            anchor,
            l_state: lq * kappa.kappa_a + lw * kappa.kappa_b,
            l_fault: lw * kappa.kappa_b,
            settings: config.verifier.clone(),
        })
    }

    pub fn subproblem_count(&self) -> usize {
        self.problem.faults.subproblem_count()
    }

    /// Search box of a subproblem: supported state coordinates, then `φ_i`.
    pub fn search_space(&self) -> Result<SearchSpace> {
        let bbox = self.problem.domain.bbox();
        let mut lower: Vec<f64> = self.support.iter().map(|k| bbox.lower[*k]).collect();
        let mut upper: Vec<f64> = self.support.iter().map(|k| bbox.upper[*k]).collect();
        lower.push(0.0);
        upper.push(1.0);
        let m = self.support.len();
        SearchSpace::new(
            lower,
            upper,
            vec![
                CoordGroup { coords: (0..m).collect(), lipschitz: self.l_state },
                CoordGroup { coords: vec![m], lipschitz: self.l_fault },
            ],
        )
        .map(|s| s.with_concave(self.settings.exploit_concavity && self.problem.model.affine_jacobians()))
    }

    /// Full state and fault vector of a search point.
    pub fn point(&self, z: &[f64], sub: usize) -> Result<(DVector<f64>, DVector<f64>)> {
        let mut x = self.anchor.clone();
        for (i, k) in self.support.iter().enumerate() {
            x[*k] = z[i];
        }
        let phi = self.problem.faults.fault_vector(sub, z[self.support.len()].clamp(0.0, 1.0))?;
        Ok((x, phi))
    }

    /// `min_j λ_min(Ξ_j)` at `(x, φ_i)` and the minimizing sign index.
    pub fn objective(&self, x: &DVector<f64>, phi_i: f64, sub: usize) -> Result<(f64, usize)> {
        let phi = self.problem.faults.fault_vector(sub, phi_i)?;
        let pair = self.problem.model.linearize(x, &phi)?;
        Ok(self.evaluator.min_over_signs(&pair.a, &pair.b))
    }

    fn objective_at(&self, z: &[f64], sub: usize) -> Result<(f64, usize)> {
        let (x, phi) = self.point(z, sub)?;
        let pair = self.problem.model.linearize(&x, &phi)?;
        Ok(self.evaluator.min_over_signs(&pair.a, &pair.b))
    }

    /// Branch-and-bound on subproblem `sub` with threshold 0.
    pub fn global_minimize(&self, sub: usize) -> Result<SubproblemResult> {
        let space = self.search_space()?;
        let res = global_minimize(|z| self.objective_at(z, sub), &space, &self.settings, 0.0)?;
        let (x, phi) = self.point(&res.best_point, sub)?;
        log::debug!(
            "verifier subproblem={sub} status={:?} evals={} best={:e} bound={:e}",
            res.status,
            res.evaluations,
            res.best_value,
            res.certified_bound
        );
        Ok(SubproblemResult { subproblem: sub, x, phi, result: res })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SubproblemResult {
    pub subproblem: usize,
    pub x: DVector<f64>,
    pub phi: DVector<f64>,
    pub result: MinimizeResult,
}

/// Verdict of [`verify`].
#[derive(Clone, Debug, PartialEq)]
pub enum VerifierResult {
    Certificate {
        lambda_star: f64,
        bound: f64,
        /// Inherited from the Lipschitz bounds: false when they were sampled.
        certified: bool,
        evaluations: usize,
    },
    Counterexample {
        pair: JacobianPair,
        value: f64,
        subproblem: usize,
        sign_index: usize,
        evaluations: usize,
    },
}

/// Verifies a candidate over the whole domain and every single-actuator fault.
///
/// Subproblems run concurrently. The smallest nonpositive value wins (ties by
/// subproblem index); undecided subproblems only surface when none found one.
pub fn verify(problem: &Problem, candidate: &LearnerSolution, config: &CegisConfig) -> Result<VerifierResult> {
    let vp = VerifierProblem::new(problem, candidate, config)?;
    let results: Vec<Result<SubproblemResult>> =
        (0..vp.subproblem_count()).into_par_iter().map(|i| vp.global_minimize(i)).collect();
    let results: Vec<SubproblemResult> = results.into_iter().collect::<Result<_>>()?;
    let evaluations = results.iter().map(|r| r.result.evaluations).sum();

    let worst = results
        .iter()
        .filter(|r| r.result.best_value <= 0.0)
        .min_by(|a, b| a.result.best_value.total_cmp(&b.result.best_value).then(a.subproblem.cmp(&b.subproblem)));
    if let Some(w) = worst {
        let pair = problem.model.linearize(&w.x, &w.phi)?;
        return Ok(VerifierResult::Counterexample {
            pair,
            value: w.result.best_value,
            subproblem: w.subproblem,
            sign_index: w.result.best_tag,
            evaluations,
        });
    }
    if let Some(u) = results
        .iter()
        .filter(|r| matches!(r.result.status, MinimizeStatus::Budget | MinimizeStatus::Exhausted))
        .min_by(|a, b| a.result.certified_bound.total_cmp(&b.result.certified_bound))
    {
        return Err(Error::Undecided {
            best: u.result.best_value,
            bound: u.result.certified_bound,
            gap: u.result.best_value - u.result.certified_bound,
            evaluations,
        });
    }
    Ok(VerifierResult::Certificate {
        lambda_star: results.iter().map(|r| r.result.best_value).fold(f64::INFINITY, f64::min),
        bound: results.iter().map(|r| r.result.certified_bound).fold(f64::INFINITY, f64::min),
        certified: problem.lipschitz.certified,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_space(l: f64) -> SearchSpace {
        SearchSpace::new(vec![0.0], vec![1.0], vec![CoordGroup { coords: vec![0], lipschitz: l }]).unwrap()
    }

    #[test]
    fn constant_objective_certifies_after_one_evaluation() {
        let settings = VerifierSettings { seed_vertices: false, ..Default::default() };
        let res = global_minimize(|_| Ok((0.25, 3)), &unit_space(0.0), &settings, 0.0).unwrap();
        assert_eq!(res.status, MinimizeStatus::Certified);
        assert_eq!(res.evaluations, 1);
        assert_eq!(res.certified_bound, 0.25);
        assert_eq!(res.best_tag, 3);
    }

    #[test]
    fn concave_space_is_decided_at_the_vertices() {
        let settings = VerifierSettings::default();
        let f = |z: &[f64]| Ok((0.2 - (z[0] - 0.3).powi(2), 0));
        let res = global_minimize(f, &unit_space(2.0).with_concave(true), &settings, 0.0).unwrap();
        assert_eq!(res.status, MinimizeStatus::Found);
        assert_eq!(res.evaluations, 2);
        assert_eq!(res.best_point, vec![1.0]);
        assert_eq!(res.certified_bound, res.best_value);
        let g = |z: &[f64]| Ok((0.6 - (z[0] - 0.3).powi(2), 0));
        let res = global_minimize(g, &unit_space(2.0).with_concave(true), &settings, 0.0).unwrap();
        assert_eq!(res.status, MinimizeStatus::Certified);
        assert!((res.certified_bound - 0.11).abs() < 1e-12);
    }

    #[test]
    fn finds_counterexample_of_shifted_abs() {
        let settings = VerifierSettings { seed_vertices: false, ..Default::default() };
        let res = global_minimize(|z| Ok(((z[0] - 0.3).abs() - 0.1, 0)), &unit_space(1.0), &settings, 0.0).unwrap();
        assert_eq!(res.status, MinimizeStatus::Found);
        assert!(res.best_value <= 0.0);
        assert!((res.best_point[0] - 0.3).abs() <= 0.1);
        // Polishing drives the incumbent to the true minimum.
        assert!(res.best_value < -0.0999);
        assert!(res.certified_bound <= res.best_value);
    }

    #[test]
    fn certifies_positive_lipschitz_function() {
        let settings = VerifierSettings::default();
        let space = SearchSpace::new(
            vec![-1.0, -1.0],
            vec![1.0, 1.0],
            vec![CoordGroup { coords: vec![0, 1], lipschitz: 2.0 }],
        )
        .unwrap();
        let res = global_minimize(|z| Ok((z[0] * z[0] + z[1] * z[1] + 0.05, 0)), &space, &settings, 0.0).unwrap();
        assert_eq!(res.status, MinimizeStatus::Certified);
        assert!(res.certified_bound > 0.0 && res.certified_bound <= 0.05 + 1e-12);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let settings = VerifierSettings { max_evaluations: 10, seed_vertices: false, ..Default::default() };
        let res = global_minimize(|z| Ok(((z[0] - 0.5).abs() + 1e-9, 0)), &unit_space(1.0), &settings, 0.0).unwrap();
        assert_eq!(res.status, MinimizeStatus::Budget);
        assert!(res.certified_bound <= res.best_value);
    }

    #[test]
    fn tie_goes_to_first_minimizing_point_deterministically() {
        let settings = VerifierSettings::default();
        let f = |z: &[f64]| Ok(((z[0] - 0.5).abs() - 0.2, 0));
        let a = global_minimize(f, &unit_space(1.0), &settings, 0.0).unwrap();
        let b = global_minimize(f, &unit_space(1.0), &settings, 0.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn search_space_validation() {
        assert!(SearchSpace::new(vec![0.0], vec![0.0], vec![CoordGroup { coords: vec![0], lipschitz: 1.0 }]).is_err());
        assert!(SearchSpace::new(vec![0.0, 0.0], vec![1.0, 1.0], vec![CoordGroup { coords: vec![0], lipschitz: 1.0 }]).is_err());
        assert!(SearchSpace::new(vec![0.0], vec![1.0], vec![CoordGroup { coords: vec![0], lipschitz: f64::NAN }]).is_err());
    }
}
