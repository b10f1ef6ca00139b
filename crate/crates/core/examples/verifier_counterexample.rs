//! Refutes a sign-flipped AUV2 gain with both verifier strategies: the exact
//! vertex scan for affine Jacobians and Lipschitz branch-and-bound.
//!
//! ```text
//! cargo run --release --example verifier_counterexample
//! ```

use pftc::bench::{auv2_problem, AuvParams};
use pftc::cegis;
use pftc::error::Error;
use pftc::learner::{CegisConfig, LearnerSolution};
use pftc::verifier::{verify, VerifierResult};

pub fn run() -> pftc::Result<()> {
    let problem = auv2_problem(&AuvParams::auv2_default())?;
    let config = CegisConfig::default();
    let outcome = cegis::run(&problem, &config, None)?;
    let c = outcome.controller().ok_or_else(|| Error::Config(outcome.summary()))?;
    // Flip the gain: Y = K Q becomes -Y.
    let broken = LearnerSolution { y: -&c.y, ..c.solution() };
    for exploit in [true, false] {
        let mut cfg = config.clone();
        cfg.verifier.exploit_concavity = exploit;
        let start = std::time::Instant::now();
        match verify(&problem, &broken, &cfg)? {
            VerifierResult::Counterexample { pair, value, subproblem, evaluations, .. } => println!(
                "{}: lambda = {value:.4e} at x = {:?}, phi = {:?} (subproblem {subproblem}, {evaluations} evaluations, {:.2} s)",
                if exploit { "vertex scan" } else { "branch-and-bound" },
                pair.x.as_slice(),
                pair.phi.as_slice(),
                start.elapsed().as_secs_f64()
            ),
            other => println!("unexpected: {other:?}"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pftc::Result<()> {
    run()
}
