//! Compares the certified invariant ellipsoid of a synthesized AUV2 gain with
//! that of the same gain detuned tenfold.
//!
//! ```text
//! cargo run --release --example region_of_attraction
//! ```

use pftc::bench::{auv2_problem, AuvParams};
use pftc::cegis;
use pftc::config::ellipse_polyline;
use pftc::error::Error;
use pftc::learner::{roa_for_fixed_gain, CegisConfig, RoaOutcome};

pub fn run() -> pftc::Result<()> {
    let problem = auv2_problem(&AuvParams::auv2_default())?;
    let config = CegisConfig::default();
    let outcome = cegis::run(&problem, &config, None)?;
    let k = outcome.controller().ok_or_else(|| Error::Config(outcome.summary()))?.k.clone();
    for (label, gain) in [("synthesized", k.clone()), ("detuned x0.1", &k * 0.1)] {
        match roa_for_fixed_gain(&gain, &problem, &config)? {
            RoaOutcome::Ellipsoid { q, iterations, .. } => {
                let pts = ellipse_polyline(&q, 8)?;
                println!("{label}: trace Q = {:.4} after {iterations} iterations", q.trace());
                println!("  boundary samples: {:?}", pts.iter().map(|p| [(p[0] * 1e3).round() / 1e3, (p[1] * 1e3).round() / 1e3]).collect::<Vec<_>>());
            }
            RoaOutcome::Infeasible { iterations } => println!("{label}: no invariant ellipsoid ({iterations} iterations)"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pftc::Result<()> {
    run()
}
