//! Simulates the published AUV2 tracking gain through a three-phase thruster
//! degradation and prints per-phase tracking metrics.
//!
//! ```text
//! cargo run --release --example fault_scenario
//! ```

use pftc::bench::{auv2, auv2_three_phase_scenario, published_auv2_gain, AuvParams, DEFAULT_DT};
use pftc::model::{FaultSet, InputBox};
use pftc::sim::{metrics, simulate, Feedback};

pub fn run() -> pftc::Result<()> {
    let params = AuvParams::auv2_default();
    let model = auv2(&params, DEFAULT_DT)?;
    let scenario = auv2_three_phase_scenario();
    let schedule = scenario.schedule(&FaultSet::new(model.p())?)?;
    let feedback = Feedback { k: published_auv2_gain(), inputs: InputBox::uniform(3, params.u_max)?, p: None };
    let x0 = scenario.initial_state(model.n())?;
    let trace = simulate(&model, &feedback, &x0, &schedule, &scenario.reference, scenario.horizon)?;
    let report = metrics(&trace)?;
    println!("{} samples, largest |u_i| / u_max = {:.3}", trace.len(), report.max_input_ratio);
    for ph in &report.phases {
        println!(
            "phase {} [{:5.2}, {:5.2}] s: |e| {:.4} -> {:.4} (max {:.4}), saturated {:?}",
            ph.phase, ph.t_start, ph.t_end, ph.initial_error, ph.final_error, ph.max_error, ph.saturation_duty
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> pftc::Result<()> {
    run()
}
