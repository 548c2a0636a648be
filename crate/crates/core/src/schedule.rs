//! Depth-layer scheduling.
//!
//! Turns a validated circuit into an execution schedule: a depth-first
//! topological sort, depth assignment (a gate's depth is the maximum of its
//! parents' depths plus one, with primary inputs at depth 0), layer formation
//! by depth, and an equal split of each layer into `k` contiguous chunks.
//!
//! The layering is oblivious to gate cost: `NOT`/`BUF` occupy layer slots
//! like any other kind, and parentless constant gates land in the first
//! layer.

use std::collections::HashMap;
use std::ops::Range;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{Circuit, GateId, WireId};

#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error("circuit contains a cycle through gates {}", fmt_ids(.witness))]
    Cycle { witness: Vec<GateId> },
    #[error("order is not a valid topological order: {reason}")]
    BadOrder { reason: String },
    #[error("worker count must be at least 1")]
    ZeroWorkers,
}

fn fmt_ids(ids: &[GateId]) -> String {
    let v: Vec<String> = ids.iter().map(|g| g.to_string()).collect();
    format!("[{}]", v.join(", "))
}

/// Per-gate depth assignment. `depth[g] >= 1` for every gate; primary inputs
/// sit at depth 0 and do not appear here.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthMap {
    depths: Vec<usize>,
    circuit_depth: usize,
}

impl DepthMap {
    pub fn depth(&self, gate: GateId) -> usize {
        self.depths[gate.index()]
    }

    pub fn depths(&self) -> &[usize] {
        &self.depths
    }

    /// Maximum gate depth; equals the number of layers.
    pub fn circuit_depth(&self) -> usize {
        self.circuit_depth
    }

    pub fn gate_count(&self) -> usize {
        self.depths.len()
    }
}

/// Gates grouped by depth, each layer pre-partitioned into `k` contiguous
/// chunks whose sizes differ by at most one.
#[derive(Clone, Debug)]
pub struct Schedule {
    k: usize,
    layers: Vec<Layer>,
}

#[derive(Clone, Debug)]
pub struct Layer {
    /// 1-based depth of every gate in this layer.
    pub depth: usize,
    /// Gate ids at this depth, in ascending id order.
    pub gates: Vec<GateId>,
    /// `k` index ranges into `gates`; first `len % k` chunks hold
    /// `ceil(len/k)` gates, the rest `floor(len/k)`. Empty ranges are
    /// allowed when the layer is narrower than `k`.
    pub chunks: Vec<Range<usize>>,
}

impl Schedule {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Checks the schedule invariants against a circuit: layers partition the
    /// gate ids, chunks partition each layer with the equal-split law, and no
    /// gate consumes the output of a gate in its own layer.
    pub fn verify(&self, circuit: &Circuit) -> Result<(), String> {
        let mut seen = vec![false; circuit.gate_count()];
        for layer in &self.layers {
            let mut cursor = 0usize;
            if self.k != layer.chunks.len() {
                return Err(format!("layer {}: expected {} chunks", layer.depth, self.k));
            }
            for chunk in &layer.chunks {
                if chunk.start != cursor {
                    return Err(format!("layer {}: chunks not contiguous", layer.depth));
                }
                cursor = chunk.end;
            }
            if cursor != layer.gates.len() {
                return Err(format!("layer {}: chunks do not cover layer", layer.depth));
            }
            let sizes: Vec<usize> = layer.chunks.iter().map(|c| c.len()).collect();
            let max = sizes.iter().copied().max().unwrap_or(0);
            let min_nonempty = sizes.iter().copied().filter(|&s| s > 0).min().unwrap_or(0);
            if max > 0 && max - min_nonempty > 1 {
                return Err(format!("layer {}: unequal split {:?}", layer.depth, sizes));
            }
            let in_layer: std::collections::HashSet<WireId> = layer
                .gates
                .iter()
                .map(|&g| circuit.gate(g).output)
                .collect();
            for &g in &layer.gates {
                if seen[g.index()] {
                    return Err(format!("gate {g} scheduled twice"));
                }
                seen[g.index()] = true;
                for w in &circuit.gate(g).inputs {
                    if in_layer.contains(w) {
                        return Err(format!(
                            "layer {}: gate {g} consumes a wire produced in its own layer",
                            layer.depth
                        ));
                    }
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err("schedule does not cover all gates".into());
        }
        Ok(())
    }

    /// JSON document for external consumers: `k`, then one object per layer
    /// with `depth`, `gates` and `chunks` (as `[start, end)` index pairs).
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct JsonLayer {
            depth: usize,
            gates: Vec<u32>,
            chunks: Vec<[usize; 2]>,
        }
        let layers: Vec<JsonLayer> = self
            .layers
            .iter()
            .map(|l| JsonLayer {
                depth: l.depth,
                gates: l.gates.iter().map(|g| g.0).collect(),
                chunks: l.chunks.iter().map(|c| [c.start, c.end]).collect(),
            })
            .collect();
        serde_json::json!({ "k": self.k, "layers": layers })
    }
}

/// Gate count per layer, plus summary figures over the width distribution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayerHistogram {
    widths: Vec<usize>,
}

impl LayerHistogram {
    /// `widths()[d]` is the number of gates at depth `d + 1`.
    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn layer_count(&self) -> usize {
        self.widths.len()
    }

    pub fn total_gates(&self) -> usize {
        self.widths.iter().sum()
    }

    pub fn max_width(&self) -> usize {
        self.widths.iter().copied().max().unwrap_or(0)
    }

    pub fn median_width(&self) -> usize {
        if self.widths.is_empty() {
            return 0;
        }
        let mut sorted = self.widths.clone();
        sorted.sort_unstable();
        sorted[sorted.len() / 2]
    }

    /// Fraction of layers with width strictly below `threshold`.
    pub fn fraction_below(&self, threshold: usize) -> f64 {
        if self.widths.is_empty() {
            return 0.0;
        }
        let n = self.widths.iter().filter(|&&w| w < threshold).count();
        n as f64 / self.widths.len() as f64
    }
}

/// Depth-first topological sort of the gate graph, seeded from every
/// parentless gate. Producers precede consumers in the result. Runs in
/// `O(gates + wire references)`.
///
/// A cycle (possible only for circuits that skipped validation) is reported
/// with a witness.
pub fn topo_sort(circuit: &Circuit) -> Result<Vec<GateId>, ScheduleError> {
    const WHITE: u8 = 0;
    const GREY: u8 = 1;
    const BLACK: u8 = 2;

    let mut producer: HashMap<WireId, GateId> = HashMap::with_capacity(circuit.gate_count());
    for (i, gate) in circuit.gates().iter().enumerate() {
        producer.entry(gate.output).or_insert(GateId(i as u32));
    }

    let mut color = vec![WHITE; circuit.gate_count()];
    let mut order: Vec<GateId> = Vec::with_capacity(circuit.gate_count());
    let mut path: Vec<GateId> = Vec::new();

    // DFS toward parents: a gate is appended once all gates feeding it are
    // placed, which makes `order` a producers-first order directly.
    for start in 0..circuit.gate_count() {
        if color[start] != WHITE {
            continue;
        }
        let mut stack: Vec<(GateId, usize)> = vec![(GateId(start as u32), 0)];
        color[start] = GREY;
        path.push(GateId(start as u32));
        while let Some(&mut (g, ref mut next)) = stack.last_mut() {
            let gate = circuit.gate(g);
            if *next < gate.inputs.len() {
                let wire = gate.inputs[*next];
                *next += 1;
                if let Some(&p) = producer.get(&wire) {
                    match color[p.index()] {
                        WHITE => {
                            color[p.index()] = GREY;
                            path.push(p);
                            stack.push((p, 0));
                        }
                        GREY => {
                            let pos = path.iter().position(|&x| x == p).unwrap();
                            let mut witness = path[pos..].to_vec();
                            witness.reverse();
                            return Err(ScheduleError::Cycle { witness });
                        }
                        _ => {}
                    }
                }
            } else {
                color[g.index()] = BLACK;
                order.push(g);
                stack.pop();
                path.pop();
            }
        }
    }
    Ok(order)
}

/// Assigns every gate its depth by folding over a topological order:
/// `depth = 1 + max(parent depths)`, where wires produced by primary inputs
/// contribute depth 0. The result is independent of which valid topological
/// order is supplied.
pub fn assign_depths(circuit: &Circuit, order: &[GateId]) -> Result<DepthMap, ScheduleError> {
    if order.len() != circuit.gate_count() {
        return Err(ScheduleError::BadOrder {
            reason: format!(
                "order has {} entries for {} gates",
                order.len(),
                circuit.gate_count()
            ),
        });
    }

    let mut producer: HashMap<WireId, GateId> = HashMap::with_capacity(circuit.gate_count());
    for (i, gate) in circuit.gates().iter().enumerate() {
        producer.entry(gate.output).or_insert(GateId(i as u32));
    }

    let mut depths = vec![0usize; circuit.gate_count()];
    let mut assigned = vec![false; circuit.gate_count()];
    let mut circuit_depth = 0;

    for &g in order {
        if assigned[g.index()] {
            return Err(ScheduleError::BadOrder {
                reason: format!("gate {g} appears twice"),
            });
        }
        let gate = circuit.gate(g);
        let mut max_parent = 0usize;
        for &w in &gate.inputs {
            if let Some(&p) = producer.get(&w) {
                if !assigned[p.index()] {
                    return Err(ScheduleError::BadOrder {
                        reason: format!("gate {g} read before its parent {p} was placed"),
                    });
                }
                max_parent = max_parent.max(depths[p.index()]);
            }
            // wires without a gate producer are primary inputs: depth 0
        }
        depths[g.index()] = max_parent + 1;
        assigned[g.index()] = true;
        circuit_depth = circuit_depth.max(max_parent + 1);
    }

    Ok(DepthMap {
        depths,
        circuit_depth,
    })
}

/// Groups gates into layers by depth and splits every layer into `k`
/// contiguous chunks of near-equal size (sizes differ by at most one; the
/// larger chunks come first).
pub fn build_schedule(depths: &DepthMap, k: usize) -> Result<Schedule, ScheduleError> {
    if k == 0 {
        return Err(ScheduleError::ZeroWorkers);
    }
    let mut layers: Vec<Layer> = (1..=depths.circuit_depth())
        .map(|d| Layer {
            depth: d,
            gates: Vec::new(),
            chunks: Vec::new(),
        })
        .collect();
    // ascending gate id within each layer, by construction
    for (i, &d) in depths.depths().iter().enumerate() {
        layers[d - 1].gates.push(GateId(i as u32));
    }
    for layer in &mut layers {
        layer.chunks = split_even(layer.gates.len(), k);
    }
    Ok(Schedule { k, layers })
}

/// `k` contiguous ranges covering `0..n`: the first `n % k` have
/// `ceil(n/k)` elements, the rest `floor(n/k)`.
pub fn split_even(n: usize, k: usize) -> Vec<Range<usize>> {
    let big = n.div_ceil(k);
    let small = n / k;
    let n_big = n % k;
    let mut chunks = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let len = if i < n_big { big } else { small };
        chunks.push(start..start + len);
        start += len;
    }
    debug_assert_eq!(start, n);
    chunks
}

/// Gate count per depth layer.
pub fn layer_histogram(depths: &DepthMap) -> LayerHistogram {
    let mut widths = vec![0usize; depths.circuit_depth()];
    for &d in depths.depths() {
        widths[d - 1] += 1;
    }
    LayerHistogram { widths }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{CircuitBuilder, GateKind};

    fn not_chain(n: usize) -> Circuit {
        let mut b = CircuitBuilder::new("chain");
        let input = b.input_group(1);
        let mut w = input[0];
        for _ in 0..n {
            w = b.gate(GateKind::Not, &[w]);
        }
        b.output_group(vec![w]);
        b.finish()
    }

    #[test]
    fn chain_sorts_in_dependency_order() {
        let c = not_chain(3);
        let order = topo_sort(&c).unwrap();
        assert_eq!(order, vec![GateId(0), GateId(1), GateId(2)]);
    }

    #[test]
    fn chain_depths_and_histogram() {
        let c = not_chain(3);
        let order = topo_sort(&c).unwrap();
        let depths = assign_depths(&c, &order).unwrap();
        assert_eq!(depths.depth(GateId(0)), 1);
        assert_eq!(depths.depth(GateId(2)), 3);
        assert_eq!(depths.circuit_depth(), 3);
        assert_eq!(layer_histogram(&depths).widths(), &[1, 1, 1]);
    }

    #[test]
    fn diamond_depths() {
        let mut b = CircuitBuilder::new("diamond");
        let input = b.input_group(2);
        let g1 = b.gate(GateKind::And, &[input[0], input[1]]);
        let g2 = b.gate(GateKind::Or, &[input[0], input[1]]);
        let _g3 = b.gate(GateKind::Xor, &[g1, g2]);
        b.output_group(vec![_g3]);
        let c = b.finish();
        let order = topo_sort(&c).unwrap();
        let depths = assign_depths(&c, &order).unwrap();
        assert_eq!(depths.depth(GateId(2)), 2);
        assert_eq!(layer_histogram(&depths).widths(), &[2, 1]);
    }

    #[test]
    fn single_xor_depth_one() {
        let mut b = CircuitBuilder::new("xor");
        let input = b.input_group(2);
        let g = b.gate(GateKind::Xor, &[input[0], input[1]]);
        b.output_group(vec![g]);
        let c = b.finish();
        let depths = assign_depths(&c, &topo_sort(&c).unwrap()).unwrap();
        assert_eq!(depths.depth(GateId(0)), 1);
        assert_eq!(depths.circuit_depth(), 1);
    }

    #[test]
    fn const_gates_land_in_first_layer() {
        let mut b = CircuitBuilder::new("consts");
        let input = b.input_group(1);
        let c0 = b.gate(GateKind::Const0, &[]);
        let x = b.gate(GateKind::And, &[input[0], c0]);
        b.output_group(vec![x]);
        let c = b.finish();
        let depths = assign_depths(&c, &topo_sort(&c).unwrap()).unwrap();
        assert_eq!(depths.depth(GateId(0)), 1); // the constant
        assert_eq!(depths.depth(GateId(1)), 2); // its consumer
    }

    #[test]
    fn split_matches_ceil_floor_rule() {
        let sizes = |n: usize, k: usize| -> Vec<usize> {
            split_even(n, k).iter().map(|c| c.len()).collect()
        };
        assert_eq!(sizes(10, 3), vec![4, 3, 3]);
        assert_eq!(sizes(2, 16)[..3], [1, 1, 0]);
        assert_eq!(sizes(2, 16).iter().sum::<usize>(), 2);
        assert_eq!(sizes(7, 1), vec![7]);
        assert_eq!(sizes(0, 4), vec![0, 0, 0, 0]);
    }

    #[test]
    fn schedule_k1_is_serial_level_order() {
        let c = not_chain(4);
        let depths = assign_depths(&c, &topo_sort(&c).unwrap()).unwrap();
        let s = build_schedule(&depths, 1).unwrap();
        assert_eq!(s.layers().len(), 4);
        for layer in s.layers() {
            assert_eq!(layer.chunks.len(), 1);
            assert_eq!(layer.chunks[0], 0..layer.gates.len());
        }
        s.verify(&c).unwrap();
    }

    #[test]
    fn topo_sort_reports_cycle_witness() {
        use crate::circuit::{Gate, WireId};
        let c = Circuit::new(
            "cyclic",
            4,
            vec![
                Gate::new(GateKind::And, vec![WireId(0), WireId(3)], WireId(2)),
                Gate::new(GateKind::And, vec![WireId(1), WireId(2)], WireId(3)),
            ],
            vec![vec![WireId(0)], vec![WireId(1)]],
            vec![vec![WireId(2)]],
        );
        match topo_sort(&c) {
            Err(ScheduleError::Cycle { witness }) => {
                let mut ids: Vec<u32> = witness.iter().map(|g| g.0).collect();
                ids.sort_unstable();
                assert_eq!(ids, vec![0, 1]);
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }
}
