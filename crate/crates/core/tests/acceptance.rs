//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! status if any criterion fails.

use nalgebra::{DMatrix, DVector};
use pftc::bench::{auv2, auv2_three_phase_scenario, published_auv2_gain, AuvParams, DEFAULT_DT};
use pftc::cegis::{self, CegisOutcome, IterationVerdict, Problem};
use pftc::cli::{cmd_roa, cmd_synth, sibling, EXIT_OK};
use pftc::config::{ControllerFile, ProblemConfig, RoaFile, RunReport};
use pftc::ldi::{build_xi, enumerate_sign_matrices, min_eig, op_norm};
use pftc::learner::{CegisConfig, Controller, LearnerSolution};
use pftc::model::{FaultSet, InputBox};
use pftc::sim::{check_contraction, metrics, simulate, Feedback};
use pftc::verifier::VerifierProblem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::time::Instant;

type Check = Result<String, String>;

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// A converged synthesis run with everything the later criteria inspect.
struct Run {
    name: &'static str,
    problem: Problem,
    config: CegisConfig,
    outcome: CegisOutcome,
    seconds: f64,
}

impl Run {
    fn new(name: &'static str, file: &str) -> Result<Self, String> {
        let cfg = ProblemConfig::load(&config_path(file)).map_err(|e| e.to_string())?;
        let problem = cfg.problem().map_err(|e| e.to_string())?;
        let start = Instant::now();
        let outcome = cegis::run(&problem, &cfg.cegis, cfg.initial_sample()).map_err(|e| e.to_string())?;
        Ok(Self { name, problem, config: cfg.cegis, outcome, seconds: start.elapsed().as_secs_f64() })
    }

    fn controller(&self) -> Result<&Controller, String> {
        self.outcome.controller().ok_or_else(|| format!("{}: {}", self.name, self.outcome.summary()))
    }
}

fn criterion_1(dir: &Path) -> Check {
    let out = dir.join("auv2.toml");
    let start = Instant::now();
    let code = cmd_synth(&config_path("auv2.toml"), &out);
    let seconds = start.elapsed().as_secs_f64();
    if code != EXIT_OK {
        return Err(format!("cmd_synth exited with {code}"));
    }
    let report = RunReport::from_toml_str(&std::fs::read_to_string(sibling(&out, "report.toml")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let file = ControllerFile::load(&out).map_err(|e| e.to_string())?;
    let lambda = file.certificate.as_ref().map_or(f64::NAN, |c| c.lambda_star);
    let detail = format!("lambda* = {lambda:e}, {} iterations, {seconds:.1} s", report.iterations);
    if lambda > 0.0 && report.iterations <= 50 && seconds <= 300.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2(run: &Run) -> Check {
    let c = run.controller()?;
    let lambda = c.certificate.map_or(f64::NAN, |c| c.lambda_star);
    let history = run.outcome.history();
    let signs = 1usize << run.problem.model.p();
    let naive = (1usize << 21) * signs;
    let bookkeeping: Vec<usize> = history.iter().map(|r| r.constraints - r.xi_constraints).collect();
    let counts_ok = history.iter().all(|r| r.xi_constraints == r.samples * signs && r.constraints < naive / 1000)
        && bookkeeping.windows(2).all(|w| w[0] == w[1]);
    let last = history.last().ok_or("empty history")?;
    let detail = format!(
        "lambda* = {lambda:e}, {} iterations, {:.1} s, final SDP {} PSD constraints ({} = {}x{} Xi + {} bookkeeping) vs {naive} naive",
        history.len(),
        run.seconds,
        last.constraints,
        last.xi_constraints,
        last.samples,
        signs,
        bookkeeping[0]
    );
    if lambda > 0.0 && history.len() <= 50 && run.seconds <= 1800.0 && counts_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_3(runs: &[&Run]) -> Check {
    let mut details = Vec::new();
    let mut ok = true;
    for run in runs {
        let c = run.controller()?;
        let vp = VerifierProblem::new(&run.problem, &c.solution(), &run.config).map_err(|e| e.to_string())?;
        let bbox = run.problem.domain.bbox();
        let n = run.problem.model.n();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut worst = f64::INFINITY;
        for sub in 0..vp.subproblem_count() {
            for _ in 0..10_000 {
                let x = DVector::from_fn(n, |k, _| rng.gen_range(bbox.lower[k]..=bbox.upper[k]));
                let phi_i = rng.gen_range(0.0..=1.0);
                let (v, _) = vp.objective(&x, phi_i, sub).map_err(|e| e.to_string())?;
                worst = worst.min(v);
            }
        }
        ok &= worst >= -1e-8;
        details.push(format!("{}: min over {}x10^4 points = {worst:e}", run.name, vp.subproblem_count()));
    }
    let detail = details.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_4(runs: &[&Run]) -> Check {
    let mut details = Vec::new();
    let mut ok = true;
    for run in runs {
        let report = check_contraction(&run.problem, run.controller()?, 1000, 4, 1e-9).map_err(|e| e.to_string())?;
        ok &= report.violations == 0;
        details.push(format!(
            "{}: {} violations / {}, worst increase {:e}",
            run.name, report.violations, report.samples, report.worst_increase
        ));
    }
    let detail = details.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-scale..=scale));
    (&m + m.transpose()) * 0.5
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for _ in 0..10_000 {
        let n = rng.gen_range(3..=12);
        let k = random_symmetric(&mut rng, n, 10.0);
        let scale = 10f64.powf(rng.gen_range(-6.0..=1.0));
        let l = random_symmetric(&mut rng, n, scale);
        let shift = (min_eig(&k).map_err(|e| e.to_string())? - min_eig(&(&k + &l)).map_err(|e| e.to_string())?).abs();
        let slack = op_norm(&l) + 1e-10 - shift;
        tightest = tightest.min(slack);
        if slack < 0.0 {
            violations += 1;
        }
    }
    let detail = format!("{violations} violations in 10^4 pairs, smallest slack {tightest:e}");
    if violations == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn clip(m: DMatrix<f64>, bound: f64) -> DMatrix<f64> {
    let s = op_norm(&m);
    if s > bound {
        m * (bound / s)
    } else {
        m
    }
}

fn uniform(rng: &mut ChaCha8Rng, r: usize, c: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(-scale..=scale))
}

fn criterion_6() -> Check {
    let eta = 50.0;
    let tau = 0.999;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let mut worst_ratio = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(2..=5);
        let p = rng.gen_range(1..=4);
        let g = uniform(&mut rng, n, n, 3.0);
        let q = clip(&g * g.transpose() + DMatrix::identity(n, n) * 1e-3, eta);
        let y = clip(uniform(&mut rng, p, n, 30.0), eta / 2.0);
        let z = clip(uniform(&mut rng, p, n, 30.0), eta / 2.0);
        let a = uniform(&mut rng, n, n, 1.5);
        let b = uniform(&mut rng, n, p, 0.1);
        let size = 10f64.powf(rng.gen_range(-5.0..=0.0));
        let da = uniform(&mut rng, n, n, size);
        let db = uniform(&mut rng, n, p, size);
        let signs = enumerate_sign_matrices(p).map_err(|e| e.to_string())?;
        let e = signs.matrix(rng.gen_range(0..signs.len()));
        let xi = |a: &DMatrix<f64>, b: &DMatrix<f64>| build_xi(&q, &y, &z, a, b, &e, tau).map(|x| x.min_eig());
        let shift = (xi(&a, &b).map_err(|e| e.to_string())? - xi(&(&a + &da), &(&b + &db)).map_err(|e| e.to_string())?).abs();
        let bound = eta * (op_norm(&da) + op_norm(&db));
        worst_ratio = worst_ratio.max(shift / bound);
        if shift > bound + 1e-8 {
            violations += 1;
        }
    }
    let detail = format!("{violations} violations in 10^3 triplets, largest shift/bound {worst_ratio:.3}");
    if violations == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_7(runs: &[&Run]) -> Check {
    let mut details = Vec::new();
    let mut ok = true;
    for run in runs {
        let margin = run.config.epsilon / run.config.eta - 1e-9;
        let entries = run.outcome.samples().entries();
        let mut closest = f64::INFINITY;
        for (i, e) in entries.iter().enumerate().skip(1) {
            let d = entries[..i].iter().map(|p| p.pair.distance(&e.pair)).fold(f64::INFINITY, f64::min);
            closest = closest.min(d);
        }
        let recorded = run
            .outcome
            .history()
            .iter()
            .filter_map(|r| match r.verdict {
                IterationVerdict::Counterexample { separation, duplicate: false, .. } => Some(separation),
                _ => None,
            })
            .fold(f64::INFINITY, f64::min);
        ok &= closest > margin && recorded > margin;
        details.push(format!(
            "{}: {} samples, closest pair {closest:.4e}, recorded minimum {recorded:.4e} > {margin:.4e}",
            run.name,
            entries.len()
        ));
    }
    let detail = details.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_8(run: &Run) -> Check {
    let c = run.controller()?;
    let broken = LearnerSolution { y: -&c.y, z: -&c.z, ..c.solution() };
    let start = Instant::now();
    let bbox = run.problem.domain.bbox();
    let (nx, nphi) = (50usize, 11usize);
    let hx: Vec<f64> = (0..2).map(|k| bbox.width(k) / (nx - 1) as f64).collect();
    let hphi = 1.0 / (nphi - 1) as f64;

    let dense = VerifierProblem::new(&run.problem, &broken, &run.config).map_err(|e| e.to_string())?;
    let mut grid = vec![f64::INFINITY; dense.subproblem_count()];
    for (sub, g) in grid.iter_mut().enumerate() {
        for i in 0..nx {
            for j in 0..nx {
                let x = DVector::from_vec(vec![bbox.lower[0] + i as f64 * hx[0], bbox.lower[1] + j as f64 * hx[1]]);
                for l in 0..nphi {
                    let (v, _) = dense.objective(&x, l as f64 * hphi, sub).map_err(|e| e.to_string())?;
                    *g = g.min(v);
                }
            }
        }
    }

    let mut details = Vec::new();
    let mut ok = true;
    for exploit in [true, false] {
        let mut config = run.config.clone();
        config.verifier.exploit_concavity = exploit;
        let vp = VerifierProblem::new(&run.problem, &broken, &config).map_err(|e| e.to_string())?;
        let tolerance = vp.l_state * (hx[0].powi(2) + hx[1].powi(2)).sqrt() + vp.l_fault * hphi;
        let mut worst_gap = f64::NEG_INFINITY;
        for (sub, g) in grid.iter().enumerate() {
            let found = vp.global_minimize(sub).map_err(|e| e.to_string())?.result.best_value;
            worst_gap = worst_gap.max(found - g);
            ok &= found <= g + tolerance;
        }
        details.push(format!(
            "{}: worst best-minus-grid {worst_gap:.3e} within tolerance {tolerance:.3e}",
            if exploit { "vertex scan" } else { "branch-and-bound" }
        ));
    }
    let seconds = start.elapsed().as_secs_f64();
    ok &= seconds <= 60.0;
    details.push(format!("grid minimum {:.4e}, {seconds:.1} s", grid.iter().copied().fold(f64::INFINITY, f64::min)));
    let detail = details.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_9() -> Check {
    let model = auv2(&AuvParams::auv2_default(), DEFAULT_DT).map_err(|e| e.to_string())?;
    let inputs = InputBox::uniform(3, 38.0).map_err(|e| e.to_string())?;
    let feedback = Feedback { k: published_auv2_gain(), inputs, p: None };
    let scenario = auv2_three_phase_scenario();
    let faults = FaultSet::new(3).map_err(|e| e.to_string())?;
    let schedule = scenario.schedule(&faults).map_err(|e| e.to_string())?;
    let x0 = scenario.initial_state(2).map_err(|e| e.to_string())?;
    let trace = simulate(&model, &feedback, &x0, &schedule, &scenario.reference, scenario.horizon)
        .map_err(|e| format!("simulation failed: {e}"))?;
    let report = metrics(&trace).map_err(|e| e.to_string())?;
    let max_u = trace.u.iter().map(|u| u.amax()).fold(0.0, f64::max);
    let decreasing = report.phases.iter().all(|p| p.final_error < p.initial_error);
    let phases: Vec<String> =
        report.phases.iter().map(|p| format!("{:.3e} -> {:.3e}", p.initial_error, p.final_error)).collect();
    let detail = format!("{} samples, phase errors [{}], max |u| = {max_u:.2}", trace.len(), phases.join(", "));
    if decreasing && max_u <= 38.0 + 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_10(dir: &Path) -> Check {
    let config = config_path("auv2.toml");
    let synthesized = dir.join("auv2.toml");
    if !synthesized.exists() {
        return Err("no synthesized controller (criterion 1 failed)".into());
    }
    let file = ControllerFile::load(&synthesized).map_err(|e| e.to_string())?;
    let k = file.gain().map_err(|e| e.to_string())?;
    let inputs = file.inputs().map_err(|e| e.to_string())?;
    let detuned = dir.join("detuned.toml");
    let text = ControllerFile::from_gain(&(k * 0.1), &inputs, "auv2", None).to_toml().map_err(|e| e.to_string())?;
    std::fs::write(&detuned, text).map_err(|e| e.to_string())?;
    let mut traces = Vec::new();
    for (label, ctrl) in [("synthesized", &synthesized), ("detuned", &detuned)] {
        let out = dir.join(format!("{label}.roa.toml"));
        let code = cmd_roa(&config, ctrl, &out);
        let roa = RoaFile::from_toml_str(&std::fs::read_to_string(&out).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        traces.push((label, code, roa.trace_q));
    }
    let detail = traces.iter().map(|(l, c, t)| format!("{l}: trace(Q) = {t:.4} (exit {c})")).collect::<Vec<_>>().join("; ");
    if traces[0].1 == EXIT_OK && traces[0].2 >= traces[1].2 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn report(n: usize, check: Check) -> bool {
    match check {
        Ok(detail) => {
            println!("criterion {n}: PASS ({detail})");
            true
        }
        Err(detail) => {
            println!("criterion {n}: FAIL ({detail})");
            false
        }
    }
}

fn main() {
    let dir = tempfile::tempdir().expect("temporary directory");
    let auv2_run = Run::new("auv2", "auv2.toml");
    let auv5_run = Run::new("auv5", "auv5.toml");
    let both = |f: &dyn Fn(&[&Run]) -> Check| -> Check {
        match (&auv2_run, &auv5_run) {
            (Ok(a), Ok(b)) => f(&[a, b]),
            (Err(e), _) | (_, Err(e)) => Err(e.clone()),
        }
    };

    let mut pass = true;
    pass &= report(1, criterion_1(dir.path()));
    pass &= report(2, auv5_run.as_ref().map_err(Clone::clone).and_then(criterion_2));
    pass &= report(3, both(&criterion_3));
    pass &= report(4, both(&criterion_4));
    pass &= report(5, criterion_5());
    pass &= report(6, criterion_6());
    pass &= report(7, both(&criterion_7));
    pass &= report(8, auv2_run.as_ref().map_err(Clone::clone).and_then(criterion_8));
    pass &= report(9, criterion_9());
    pass &= report(10, criterion_10(dir.path()));
    if !pass {
        std::process::exit(1);
    }
}
