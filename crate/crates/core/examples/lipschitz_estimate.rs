//! Compares analytic Jacobian Lipschitz constants of both AUV models with
//! sampled estimates.
//!
//! ```text
//! cargo run --release --example lipschitz_estimate
//! ```

use pftc::bench::{auv2_problem, auv5_problem, AuvParams};
use pftc::model::{estimate_lipschitz, LipschitzSampling};

pub fn run() -> pftc::Result<()> {
    let raw = LipschitzSampling { samples: 400, safety_factor: 1.0, seed: 1 };
    for problem in [auv2_problem(&AuvParams::auv2_default())?, auv5_problem(&AuvParams::auv5_default())?] {
        let sampled = estimate_lipschitz(&problem.model, &problem.domain, &problem.faults, &raw)?;
        println!(
            "{}: analytic kappa_A = {:.4e}, kappa_B = {:.4e}; sampled kappa_A = {:.4e}, kappa_B = {:.4e}",
            problem.model.name(),
            problem.lipschitz.kappa_a,
            problem.lipschitz.kappa_b,
            sampled.kappa_a,
            sampled.kappa_b
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pftc::Result<()> {
    run()
}
