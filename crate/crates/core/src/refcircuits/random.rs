//! Seeded random circuit generation for property and stress tests.
//!
//! Gates pick their inputs from wires that already exist, so generated
//! circuits are acyclic with every wire produced, and the gate list is a
//! topological order by construction.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::circuit::{Circuit, CircuitBuilder, GateKind, WireId};

#[derive(Clone, Copy, Debug)]
pub struct RandomCircuitParams {
    pub min_gates: usize,
    pub max_gates: usize,
    pub max_inputs: usize,
    /// Bias toward recently created wires; keeps depth moderate.
    pub locality: usize,
    pub allow_consts: bool,
}

impl Default for RandomCircuitParams {
    fn default() -> Self {
        RandomCircuitParams {
            min_gates: 1,
            max_gates: 200,
            max_inputs: 8,
            locality: 24,
            allow_consts: true,
        }
    }
}

const PICKABLE: [GateKind; 11] = [
    GateKind::And,
    GateKind::Or,
    GateKind::Xor,
    GateKind::Nand,
    GateKind::Nor,
    GateKind::Xnor,
    GateKind::Not,
    GateKind::AndNot,
    GateKind::OrNot,
    GateKind::Mux,
    GateKind::Buf,
];

pub fn random_circuit(rng: &mut impl Rng, params: &RandomCircuitParams) -> Circuit {
    let n_gates = rng.gen_range(params.min_gates..=params.max_gates);
    let n_groups = rng.gen_range(1..=2);
    let mut b = CircuitBuilder::new("random");
    let mut wires: Vec<WireId> = Vec::new();
    for _ in 0..n_groups {
        let bits = rng.gen_range(1..=params.max_inputs.max(1));
        wires.extend(b.input_group(bits));
    }

    for _ in 0..n_gates {
        let kind = if params.allow_consts && rng.gen_ratio(1, 40) {
            if rng.gen() {
                GateKind::Const0
            } else {
                GateKind::Const1
            }
        } else {
            *PICKABLE.choose(rng).unwrap()
        };
        let pick = |rng: &mut dyn rand::RngCore, wires: &[WireId]| -> WireId {
            let window = params.locality.min(wires.len());
            if window > 0 && rng.gen_ratio(3, 4) {
                wires[wires.len() - 1 - rng.gen_range(0..window)]
            } else {
                wires[rng.gen_range(0..wires.len())]
            }
        };
        let inputs: Vec<WireId> = (0..kind.arity()).map(|_| pick(rng, &wires)).collect();
        wires.push(b.gate(kind, &inputs));
    }

    // a handful of output wires drawn from the newest half of the gates
    let gate_wires = &wires[wires.len() - n_gates..];
    let n_outputs = rng.gen_range(1..=8.min(gate_wires.len()));
    let lower = gate_wires.len() / 2;
    let mut chosen: Vec<WireId> = Vec::with_capacity(n_outputs);
    for _ in 0..n_outputs {
        let w = gate_wires[rng.gen_range(lower..gate_wires.len())];
        if !chosen.contains(&w) {
            chosen.push(w);
        }
    }
    b.output_group(chosen);
    b.finish()
}

/// Random bit assignment for every input group of a circuit.
pub fn random_inputs(rng: &mut impl Rng, circuit: &Circuit) -> Vec<Vec<bool>> {
    circuit
        .inputs()
        .iter()
        .map(|group| (0..group.len()).map(|_| rng.gen()).collect())
        .collect()
}

/// A uniformly perturbed valid topological order: repeatedly emits a random
/// gate whose parents have all been emitted. Useful for checking that
/// order-dependent computations are in fact order-independent.
pub fn random_topo_order(rng: &mut impl Rng, circuit: &Circuit) -> Vec<crate::circuit::GateId> {
    use crate::circuit::GateId;
    use std::collections::HashMap;

    let mut producer: HashMap<WireId, GateId> = HashMap::new();
    for (i, gate) in circuit.gates().iter().enumerate() {
        producer.insert(gate.output, GateId(i as u32));
    }
    // consumers per gate and remaining-parent counts
    let mut children: Vec<Vec<GateId>> = vec![Vec::new(); circuit.gate_count()];
    let mut missing: Vec<usize> = vec![0; circuit.gate_count()];
    for (i, gate) in circuit.gates().iter().enumerate() {
        for w in &gate.inputs {
            if let Some(&p) = producer.get(w) {
                children[p.index()].push(GateId(i as u32));
                missing[i] += 1;
            }
        }
    }
    let mut ready: Vec<GateId> = (0..circuit.gate_count())
        .filter(|&i| missing[i] == 0)
        .map(|i| GateId(i as u32))
        .collect();
    let mut order = Vec::with_capacity(circuit.gate_count());
    while !ready.is_empty() {
        let pick = rng.gen_range(0..ready.len());
        let g = ready.swap_remove(pick);
        order.push(g);
        for &child in &children[g.index()] {
            missing[child.index()] -= 1;
            if missing[child.index()] == 0 {
                ready.push(child);
            }
        }
    }
    assert_eq!(order.len(), circuit.gate_count(), "circuit is cyclic");
    order
}
