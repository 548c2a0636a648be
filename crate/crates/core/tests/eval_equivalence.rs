//! Serial and layer-parallel evaluation agree bit-for-bit on the plaintext
//! and latency backends, for arbitrary worker counts; the latency model
//! changes timing, never values.

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strata_core::backend::{
    Backend, GateCostModel, LatencyBackend, PlainBackend, SecurityParams,
};
use strata_core::circuit::Circuit;
use strata_core::eval::{decrypt_outputs, encrypt_inputs, eval_parallel, eval_serial};
use strata_core::refcircuits::random::{random_circuit, random_inputs, RandomCircuitParams};
use strata_core::schedule::{assign_depths, build_schedule, topo_sort};

fn outputs_with<B: Backend>(
    circuit: &Circuit,
    backend: &B,
    inputs: &[Vec<bool>],
    k: Option<usize>,
) -> Vec<Vec<bool>> {
    let keys = backend.keygen(&SecurityParams::named("any")).unwrap();
    let values = encrypt_inputs(backend, &keys, inputs).unwrap();
    let report = match k {
        None => {
            let order = topo_sort(circuit).unwrap();
            eval_serial(circuit, &order, backend, &keys, &values).unwrap()
        }
        Some(k) => {
            let depths = assign_depths(circuit, &topo_sort(circuit).unwrap()).unwrap();
            let schedule = build_schedule(&depths, k).unwrap();
            eval_parallel(circuit, &schedule, backend, &keys, &values).unwrap()
        }
    };
    decrypt_outputs(backend, &keys, report).unwrap().outputs
}

#[test]
fn parallel_equals_serial_across_worker_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe0);
    let params = RandomCircuitParams {
        min_gates: 10,
        max_gates: 400,
        ..Default::default()
    };
    let plain = PlainBackend;
    for _ in 0..25 {
        let circuit = random_circuit(&mut rng, &params);
        for _ in 0..4 {
            let inputs = random_inputs(&mut rng, &circuit);
            let expected = outputs_with(&circuit, &plain, &inputs, None);
            for k in [1, 2, 3, 8, 16] {
                assert_eq!(
                    outputs_with(&circuit, &plain, &inputs, Some(k)),
                    expected,
                    "k = {k}"
                );
            }
        }
    }
}

#[test]
fn latency_backend_matches_plain_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe1);
    let plain = PlainBackend;
    let timed = LatencyBackend::new(GateCostModel::uniform(Duration::from_micros(20)));
    for _ in 0..10 {
        let circuit = random_circuit(
            &mut rng,
            &RandomCircuitParams {
                max_gates: 60,
                ..Default::default()
            },
        );
        let inputs = random_inputs(&mut rng, &circuit);
        assert_eq!(
            outputs_with(&circuit, &timed, &inputs, Some(4)),
            outputs_with(&circuit, &plain, &inputs, None)
        );
    }
}

#[test]
fn per_layer_counts_sum_to_gate_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xe2);
    let plain = PlainBackend;
    for _ in 0..10 {
        let circuit = random_circuit(&mut rng, &RandomCircuitParams::default());
        let keys = plain.keygen(&SecurityParams::named("plain")).unwrap();
        let inputs = encrypt_inputs(&plain, &keys, &random_inputs(&mut rng, &circuit)).unwrap();
        let depths = assign_depths(&circuit, &topo_sort(&circuit).unwrap()).unwrap();
        let k = rng.gen_range(1..=8);
        let schedule = build_schedule(&depths, k).unwrap();
        let report = eval_parallel(&circuit, &schedule, &plain, &keys, &inputs).unwrap();
        let layered: usize = report.per_layer.iter().map(|l| l.gates).sum();
        assert_eq!(layered, circuit.gate_count());
        assert_eq!(report.per_layer.len(), depths.circuit_depth());
        let max_layer = report
            .per_layer
            .iter()
            .map(|l| l.wall_time)
            .max()
            .unwrap_or(Duration::ZERO);
        assert!(report.total_wall_time >= max_layer);
    }
}

#[test]
fn latency_serial_time_tracks_model() {
    // 60 gates at 2 ms must take 120 ms, not 120 ms plus accumulated
    // overshoot
    let mut rng = ChaCha8Rng::seed_from_u64(0xe3);
    let circuit = random_circuit(
        &mut rng,
        &RandomCircuitParams {
            min_gates: 60,
            max_gates: 60,
            allow_consts: false,
            ..Default::default()
        },
    );
    let backend = LatencyBackend::new(GateCostModel::uniform(Duration::from_millis(2)));
    let keys = backend.keygen(&SecurityParams::named("latency")).unwrap();
    let inputs = encrypt_inputs(&backend, &keys, &random_inputs(&mut rng, &circuit)).unwrap();
    let order = topo_sort(&circuit).unwrap();
    let report = eval_serial(&circuit, &order, &backend, &keys, &inputs).unwrap();
    let expected = Duration::from_millis(2) * 60;
    assert!(report.total_wall_time >= expected);
    assert!(
        report.total_wall_time < expected + Duration::from_millis(30),
        "took {:?}",
        report.total_wall_time
    );
}
