//! Scheduling properties checked against independent oracles on random
//! circuits: depth assignment equals longest-path, is stable across
//! topological orders, and the equal-split law holds for every layer.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use strata_core::circuit::{Circuit, GateId, WireId};
use strata_core::refcircuits::random::{random_circuit, random_topo_order, RandomCircuitParams};
use strata_core::schedule::{assign_depths, build_schedule, layer_histogram, topo_sort};

/// Longest path from any primary input to the gate, by memoized recursion
/// over parents. Independent of the order-folding implementation under test.
fn longest_path_depths(circuit: &Circuit) -> Vec<usize> {
    let mut producer: HashMap<WireId, GateId> = HashMap::new();
    for (i, gate) in circuit.gates().iter().enumerate() {
        producer.insert(gate.output, GateId(i as u32));
    }
    fn depth_of(
        g: GateId,
        circuit: &Circuit,
        producer: &HashMap<WireId, GateId>,
        memo: &mut Vec<Option<usize>>,
    ) -> usize {
        if let Some(d) = memo[g.index()] {
            return d;
        }
        let mut best = 0;
        for w in &circuit.gate(g).inputs {
            if let Some(&p) = producer.get(w) {
                best = best.max(depth_of(p, circuit, producer, memo));
            }
        }
        memo[g.index()] = Some(best + 1);
        best + 1
    }
    let mut memo = vec![None; circuit.gate_count()];
    (0..circuit.gate_count())
        .map(|i| depth_of(GateId(i as u32), circuit, &producer, &mut memo))
        .collect()
}

/// Exhaustive path enumeration for tiny circuits: the length of the longest
/// input-to-gate path, walking every path.
fn enumerate_longest_path(circuit: &Circuit, g: GateId) -> usize {
    let mut producer: HashMap<WireId, GateId> = HashMap::new();
    for (i, gate) in circuit.gates().iter().enumerate() {
        producer.insert(gate.output, GateId(i as u32));
    }
    fn walk(g: GateId, circuit: &Circuit, producer: &HashMap<WireId, GateId>) -> usize {
        let mut best = 0;
        for w in &circuit.gate(g).inputs {
            if let Some(&p) = producer.get(w) {
                best = best.max(walk(p, circuit, producer));
            }
        }
        best + 1
    }
    walk(g, circuit, &producer)
}

#[test]
fn depths_equal_longest_paths_on_random_dags() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd0);
    let params = RandomCircuitParams {
        max_gates: 200,
        ..Default::default()
    };
    for _ in 0..100 {
        let circuit = random_circuit(&mut rng, &params);
        let order = topo_sort(&circuit).unwrap();
        let depths = assign_depths(&circuit, &order).unwrap();
        assert_eq!(depths.depths(), longest_path_depths(&circuit).as_slice());
    }
}

#[test]
fn depths_equal_exhaustive_path_enumeration_on_tiny_dags() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1);
    let params = RandomCircuitParams {
        max_gates: 18,
        ..Default::default()
    };
    for _ in 0..50 {
        let circuit = random_circuit(&mut rng, &params);
        let order = topo_sort(&circuit).unwrap();
        let depths = assign_depths(&circuit, &order).unwrap();
        for g in circuit.gate_ids() {
            assert_eq!(depths.depth(g), enumerate_longest_path(&circuit, g));
        }
    }
}

#[test]
fn depths_are_stable_across_topological_orders() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd2);
    let params = RandomCircuitParams {
        max_gates: 120,
        ..Default::default()
    };
    for _ in 0..40 {
        let circuit = random_circuit(&mut rng, &params);
        let reference = assign_depths(&circuit, &topo_sort(&circuit).unwrap()).unwrap();
        for _ in 0..5 {
            let order = random_topo_order(&mut rng, &circuit);
            let depths = assign_depths(&circuit, &order).unwrap();
            assert_eq!(depths, reference);
        }
    }
}

#[test]
fn equal_split_law_on_random_schedules() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd3);
    for _ in 0..60 {
        let circuit = random_circuit(&mut rng, &RandomCircuitParams::default());
        let depths = assign_depths(&circuit, &topo_sort(&circuit).unwrap()).unwrap();
        let k = rng.gen_range(1..=64);
        let schedule = build_schedule(&depths, k).unwrap();
        schedule.verify(&circuit).unwrap();
        for layer in schedule.layers() {
            let sizes: Vec<usize> = layer.chunks.iter().map(|c| c.len()).collect();
            let max = *sizes.iter().max().unwrap();
            let min = *sizes.iter().min().unwrap();
            // sizes differ by at most one even counting empty chunks
            assert!(max - min <= 1, "k={k} sizes={sizes:?}");
            let whole: Vec<usize> = layer.chunks.iter().flat_map(|c| c.clone()).collect();
            assert_eq!(whole, (0..layer.gates.len()).collect::<Vec<_>>());
        }
    }
}

#[test]
fn histogram_sums_to_gate_count_and_depth() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd4);
    for _ in 0..40 {
        let circuit = random_circuit(&mut rng, &RandomCircuitParams::default());
        let depths = assign_depths(&circuit, &topo_sort(&circuit).unwrap()).unwrap();
        let hist = layer_histogram(&depths);
        assert_eq!(hist.total_gates(), circuit.gate_count());
        assert_eq!(hist.layer_count(), depths.circuit_depth());
        assert!(hist.widths().iter().all(|&w| w > 0));
    }
}

#[test]
fn adding_a_back_edge_flips_validation() {
    // take a random chain-y circuit and wire an early gate to read a late
    // gate's output; validation must report a cycle
    let mut rng = ChaCha8Rng::seed_from_u64(0xd5);
    for _ in 0..30 {
        let circuit = random_circuit(
            &mut rng,
            &RandomCircuitParams {
                min_gates: 5,
                max_gates: 60,
                allow_consts: false,
                ..Default::default()
            },
        );
        assert!(circuit.validate().is_ok());
        let depths = assign_depths(&circuit, &topo_sort(&circuit).unwrap()).unwrap();
        // pick a gate with depth >= 2 and rewire one of its ancestors'
        // inputs to read its output
        let Some(late) = circuit
            .gate_ids()
            .filter(|&g| depths.depth(g) >= 2)
            .last()
        else {
            continue;
        };
        let mut gates = circuit.gates().to_vec();
        let victim_wire = gates[late.index()].inputs[0];
        let Some(victim) = circuit
            .gates()
            .iter()
            .position(|g| g.output == victim_wire)
        else {
            continue; // parent is a primary input; nothing to rewire
        };
        gates[victim].inputs[0] = gates[late.index()].output;
        let broken = Circuit::new(
            "broken",
            circuit.wire_count(),
            gates,
            circuit.inputs().to_vec(),
            circuit.outputs().to_vec(),
        );
        let report = broken.validate();
        assert!(
            report
                .violations
                .iter()
                .any(|v| matches!(v, strata_core::circuit::Violation::Cycle { .. })
                    || matches!(v, strata_core::circuit::Violation::SelfLoop { .. })),
            "expected a cycle: {report}"
        );
    }
}
