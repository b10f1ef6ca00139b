//! Synthesizes a certified fault-tolerant gain for the two-state AUV and
//! checks the Lyapunov decrease on random states of the invariant ellipsoid.
//!
//! ```text
//! cargo run --release --example auv2_synthesis
//! ```

use pftc::bench::{auv2_problem, AuvParams};
use pftc::cegis::{self, CegisOutcome, IterationVerdict};
use pftc::learner::CegisConfig;
use pftc::sim::check_contraction;

pub fn run() -> pftc::Result<()> {
    let problem = auv2_problem(&AuvParams::auv2_default())?;
    println!(
        "AUV2: n = {}, p = {}, kappa_A = {:.3e}, kappa_B = {:.3e}",
        problem.model.n(),
        problem.model.p(),
        problem.lipschitz.kappa_a,
        problem.lipschitz.kappa_b
    );
    let outcome = cegis::run(&problem, &CegisConfig::default(), None)?;
    for rec in outcome.history() {
        let verdict = match &rec.verdict {
            IterationVerdict::Counterexample { value, x, phi, .. } => {
                format!("counterexample {value:.3e} at x = {:?}, phi = {:?}", x.as_slice(), phi.as_slice())
            }
            other => format!("{other:?}"),
        };
        println!("  iter {:2}: |S| = {:2}, trace Q = {:?}, {verdict}", rec.iteration, rec.samples, rec.trace_q);
    }
    println!("{}", outcome.summary());
    if let CegisOutcome::Converged { controller, .. } = &outcome {
        println!("K = {:.4}", controller.k);
        let check = check_contraction(&problem, controller, 1000, 7, 1e-9)?;
        println!(
            "Lyapunov decrease on 1000 random pairs: {} violations, worst increase {:.3e}",
            check.violations, check.worst_increase
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pftc::Result<()> {
    env_logger::init();
    run()
}
