//! Randomized invariants of the eigenvalue, LMI and I/O layers.

use nalgebra::{DMatrix, DVector};
use pftc::config::{ControllerFile, ScenarioConfig};
use pftc::ldi::{build_xi, enumerate_sign_matrices, min_eig, op_norm, saturate};
use pftc::model::{FaultSet, InputBox};
use pftc::sim::{FaultPhase, ReferenceSignal};
use proptest::prelude::*;

fn symmetric(n: usize, entries: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |r, c| entries[r * n + c]);
    (&m + m.transpose()) * 0.5
}

/// Scales `m` so its operator norm is at most `bound`.
fn clip(m: DMatrix<f64>, bound: f64) -> DMatrix<f64> {
    let s = op_norm(&m);
    if s > bound {
        m * (bound / s)
    } else {
        m
    }
}

prop_compose! {
    fn sym_pair()(n in 3usize..=12)
        (n in Just(n),
         k in prop::collection::vec(-10.0f64..10.0, n * n),
         l in prop::collection::vec(-10.0f64..10.0, n * n)) -> (DMatrix<f64>, DMatrix<f64>) {
        (symmetric(n, &k), symmetric(n, &l))
    }
}

prop_compose! {
    /// `[Q, Y, Z, A, B, ΔA, ΔB]` with `Q ≻ 0`, `‖Q‖ ≤ η` and `‖Y‖, ‖Z‖ ≤ η/2`.
    fn triplet(eta: f64)(n in 1usize..=5, p in 1usize..=3)
        (q in prop::collection::vec(-1.0f64..1.0, n * n),
         y in prop::collection::vec(-30.0f64..30.0, p * n),
         z in prop::collection::vec(-30.0f64..30.0, p * n),
         a in prop::collection::vec(-2.0f64..2.0, n * n),
         b in prop::collection::vec(-2.0f64..2.0, n * p),
         da in prop::collection::vec(-0.5f64..0.5, n * n),
         db in prop::collection::vec(-0.5f64..0.5, n * p),
         n in Just(n), p in Just(p)) -> [DMatrix<f64>; 7] {
        let g = DMatrix::from_row_slice(n, n, &q);
        [
            clip(&g * g.transpose() + DMatrix::identity(n, n) * 1e-3, eta),
            clip(DMatrix::from_row_slice(p, n, &y), eta / 2.0),
            clip(DMatrix::from_row_slice(p, n, &z), eta / 2.0),
            DMatrix::from_row_slice(n, n, &a),
            DMatrix::from_row_slice(n, p, &b),
            DMatrix::from_row_slice(n, n, &da),
            DMatrix::from_row_slice(n, p, &db),
        ]
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn eigenvalue_shift_is_bounded_by_the_perturbation_norm((k, l) in sym_pair()) {
        let lhs = (min_eig(&k).unwrap() - min_eig(&(&k + &l)).unwrap()).abs();
        prop_assert!(lhs <= op_norm(&l) + 1e-10, "shift {lhs} > norm {}", op_norm(&l));
    }

    #[test]
    fn xi_minimum_eigenvalue_is_lipschitz_in_the_jacobians(t in triplet(50.0), j in 0usize..8) {
        let eta = 50.0;
        let [q, y, z, a, b, da, db] = t;
        let signs = enumerate_sign_matrices(y.nrows()).unwrap();
        let e = signs.matrix(j % signs.len());
        let tau = 0.999;
        let before = build_xi(&q, &y, &z, &a, &b, &e, tau).unwrap().min_eig();
        let after = build_xi(&q, &y, &z, &(&a + &da), &(&b + &db), &e, tau).unwrap().min_eig();
        let bound = eta * (op_norm(&da) + op_norm(&db)) + 1e-8;
        prop_assert!((before - after).abs() <= bound, "shift {} > {bound}", (before - after).abs());
    }

    #[test]
    fn saturation_is_idempotent_and_nonexpansive(
        u in prop::collection::vec(-200.0f64..200.0, 1..6),
        cap in 0.1f64..100.0,
    ) {
        let u = DVector::from_vec(u);
        let bounds = InputBox::uniform(u.len(), cap).unwrap();
        let once = saturate(&u, &bounds);
        prop_assert_eq!(saturate(&once, &bounds), once.clone());
        prop_assert!(once.amax() <= u.amax());
        prop_assert!(once.amax() <= cap);
    }

    #[test]
    fn sign_patterns_and_complements_partition_the_identity(p in 1usize..=8) {
        let signs = enumerate_sign_matrices(p).unwrap();
        prop_assert_eq!(signs.len(), 1 << p);
        for j in 0..signs.len() {
            prop_assert_eq!(signs.matrix(j) + signs.complement(j), DMatrix::identity(p, p));
        }
    }

    #[test]
    fn scenarios_round_trip_through_toml(
        split in 0.5f64..9.5,
        level in 0.0f64..1.0,
        actuator in 0usize..3,
        x_ref in prop::collection::vec(-2.0f64..2.0, 2),
    ) {
        let faults = FaultSet::new(3).unwrap();
        let degraded = faults.fault_vector(actuator, level).unwrap();
        let scenario = ScenarioConfig {
            horizon: 10.0,
            x0: vec![0.0, 0.0],
            reference: ReferenceSignal::Constant { x_ref },
            phases: vec![
                FaultPhase { t_start: 0.0, t_end: split, phi: vec![1.0; 3] },
                FaultPhase { t_start: split, t_end: 10.0, phi: degraded.iter().copied().collect() },
            ],
        };
        let back = ScenarioConfig::from_toml_str(&scenario.to_toml().unwrap()).unwrap();
        prop_assert_eq!(&back, &scenario);
        let schedule = back.schedule(&faults).unwrap();
        prop_assert_eq!(schedule.at(10.0), degraded);
    }

    #[test]
    fn controller_files_round_trip_exactly(k in prop::collection::vec(-1e5f64..1e5, 6)) {
        let k = DMatrix::from_row_slice(3, 2, &k);
        let inputs = InputBox::uniform(3, 38.0).unwrap();
        let file = ControllerFile::from_gain(&k, &inputs, "auv2", None);
        let back = ControllerFile::from_toml_str(&file.to_toml().unwrap()).unwrap();
        prop_assert_eq!(back.gain().unwrap(), k);
    }
}
