//! Synthesizes a certified gain for the five-state AUV with integral yaw action.
//!
//! ```text
//! cargo run --release --example auv5_synthesis
//! ```

use pftc::bench::{auv5_problem, AuvParams};
use pftc::cegis;
use pftc::learner::CegisConfig;

fn main() -> pftc::Result<()> {
    env_logger::init();
    let problem = auv5_problem(&AuvParams::auv5_default())?;
    let start = std::time::Instant::now();
    let outcome = cegis::run(&problem, &CegisConfig::default(), None)?;
    for rec in outcome.history() {
        println!(
            "  iter {:2}: |S| = {:2}, {} PSD constraints ({} from samples), trace Q = {:?}",
            rec.iteration, rec.samples, rec.constraints, rec.xi_constraints, rec.trace_q
        );
    }
    println!("{} ({:.1} s)", outcome.summary(), start.elapsed().as_secs_f64());
    if let Some(c) = outcome.controller() {
        println!("K = {:.4}", c.k);
    }
    Ok(())
}
