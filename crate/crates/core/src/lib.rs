//! Certified passive fault-tolerant static feedback synthesis for saturated
//! control-affine systems.
//!
//! A learner proposes an invariant ellipsoid and gain pair from a finite set of
//! Jacobian samples by solving an SDP; a global verifier (an exact vertex scan
//! for affine Jacobians, Lipschitz branch-and-bound otherwise) either certifies
//! the candidate over the whole state domain and every single-actuator fault,
//! or returns the worst Jacobian pair as a counterexample.
//!
//! ```
//! use pftc::{bench, cegis, learner::CegisConfig};
//!
//! let problem = bench::auv2_problem(&bench::AuvParams::auv2_default()).unwrap();
//! let outcome = cegis::run(&problem, &CegisConfig::default(), None).unwrap();
//! println!("{}", outcome.summary());
//! ```

// Links the system OpenBLAS that the conic backend's dense kernels call into.
use openblas_src as _;

pub mod bench;
pub mod cegis;
pub mod cli;
pub mod config;
pub mod conic;
pub mod error;
pub mod ldi;
pub mod learner;
pub mod model;
pub mod sim;
pub mod verifier;

pub use error::{Error, Result};
