//! Boolean circuit data model.
//!
//! A [`Circuit`] is a directed acyclic graph of single-output gates over
//! densely numbered wires. Wires are produced either by a primary input or
//! by exactly one gate; consumers reference producers through wire ids, so
//! the edge set is implicit. Construction does not validate — parsers are
//! expected to load questionable files for diagnosis — and [`Circuit::validate`]
//! performs the full structural check as a separate pass.

use std::collections::HashMap;
use std::fmt;

/// Identifier of a wire. Wires are dense integers `0..Circuit::wire_count()`;
/// input groups occupy the lowest indices, in group order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WireId(pub u32);

impl WireId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for WireId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

/// Identifier of a gate: its position in [`Circuit::gates`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GateId(pub u32);

impl GateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// The gate vocabulary: the cells a gate-level synthesis netlist can contain,
/// plus `CONST0`/`CONST1`/`BUF` for netlist hygiene.
///
/// `ANDNOT`/`ORNOT` take the first operand plain and negate the second
/// (`ANDNOT(a, b) = a & !b`). `MUX` inputs are ordered `select, a, b` and
/// yield `a` when the select bit is 0, `b` when it is 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    And,
    Or,
    Xor,
    Nand,
    Nor,
    Xnor,
    Not,
    AndNot,
    OrNot,
    Mux,
    Buf,
    Const0,
    Const1,
}

impl GateKind {
    pub const ALL: [GateKind; 13] = [
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
        GateKind::Const0,
        GateKind::Const1,
    ];

    /// Number of input wires the kind consumes.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Const0 | GateKind::Const1 => 0,
            GateKind::Not | GateKind::Buf => 1,
            GateKind::Mux => 3,
            _ => 2,
        }
    }

    /// Boolean function of the kind.
    ///
    /// Panics if `inputs.len() != self.arity()`; backends check arity before
    /// calling.
    pub fn apply(self, inputs: &[bool]) -> bool {
        assert_eq!(inputs.len(), self.arity(), "arity mismatch for {self}");
        match self {
            GateKind::And => inputs[0] && inputs[1],
            GateKind::Or => inputs[0] || inputs[1],
            GateKind::Xor => inputs[0] ^ inputs[1],
            GateKind::Nand => !(inputs[0] && inputs[1]),
            GateKind::Nor => !(inputs[0] || inputs[1]),
            GateKind::Xnor => !(inputs[0] ^ inputs[1]),
            GateKind::Not => !inputs[0],
            GateKind::AndNot => inputs[0] && !inputs[1],
            GateKind::OrNot => inputs[0] || !inputs[1],
            GateKind::Mux => {
                if inputs[0] {
                    inputs[2]
                } else {
                    inputs[1]
                }
            }
            GateKind::Buf => inputs[0],
            GateKind::Const0 => false,
            GateKind::Const1 => true,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Xor => "XOR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xnor => "XNOR",
            GateKind::Not => "NOT",
            GateKind::AndNot => "ANDNOT",
            GateKind::OrNot => "ORNOT",
            GateKind::Mux => "MUX",
            GateKind::Buf => "BUF",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One vertex of the circuit DAG: a gate kind, its ordered input wires and
/// its single output wire.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub inputs: Vec<WireId>,
    pub output: WireId,
}

impl Gate {
    pub fn new(kind: GateKind, inputs: Vec<WireId>, output: WireId) -> Self {
        Gate {
            kind,
            inputs,
            output,
        }
    }
}

/// An immutable boolean circuit: gates over `wire_count` wires, with ordered
/// input and output wire groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    name: String,
    wire_count: usize,
    gates: Vec<Gate>,
    inputs: Vec<Vec<WireId>>,
    outputs: Vec<Vec<WireId>>,
}

/// What produces a wire's value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Producer {
    /// Primary input: group index and position within the group.
    Input { group: usize, position: usize },
    Gate(GateId),
}

impl Circuit {
    pub fn new(
        name: impl Into<String>,
        wire_count: usize,
        gates: Vec<Gate>,
        inputs: Vec<Vec<WireId>>,
        outputs: Vec<Vec<WireId>>,
    ) -> Self {
        Circuit {
            name: name.into(),
            wire_count,
            gates,
            inputs,
            outputs,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: GateId) -> &Gate {
        &self.gates[id.index()]
    }

    pub fn gate_ids(&self) -> impl Iterator<Item = GateId> {
        (0..self.gates.len()).map(|i| GateId(i as u32))
    }

    pub fn inputs(&self) -> &[Vec<WireId>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Vec<WireId>] {
        &self.outputs
    }

    pub fn input_bits(&self) -> usize {
        self.inputs.iter().map(Vec::len).sum()
    }

    pub fn output_bits(&self) -> usize {
        self.outputs.iter().map(Vec::len).sum()
    }

    /// Map from wire id to its producer. Wires claimed by several producers
    /// keep the first claimant (validation reports the conflict); unproduced
    /// wires map to `None`.
    pub fn producers(&self) -> Vec<Option<Producer>> {
        let mut map: Vec<Option<Producer>> = vec![None; self.wire_count];
        for (g, group) in self.inputs.iter().enumerate() {
            for (i, w) in group.iter().enumerate() {
                if w.index() < self.wire_count && map[w.index()].is_none() {
                    map[w.index()] = Some(Producer::Input {
                        group: g,
                        position: i,
                    });
                }
            }
        }
        for (i, gate) in self.gates.iter().enumerate() {
            let w = gate.output;
            if w.index() < self.wire_count && map[w.index()].is_none() {
                map[w.index()] = Some(Producer::Gate(GateId(i as u32)));
            }
        }
        map
    }

    /// Full structural validation. Violations are data, not failures: the
    /// report lists every broken invariant it can find.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        let in_range = |w: WireId| w.index() < self.wire_count;

        // Wire ids within bounds.
        for (i, gate) in self.gates.iter().enumerate() {
            let id = GateId(i as u32);
            for &w in &gate.inputs {
                if !in_range(w) {
                    violations.push(Violation::WireOutOfRange { gate: id, wire: w });
                }
            }
            if !in_range(gate.output) {
                violations.push(Violation::WireOutOfRange {
                    gate: id,
                    wire: gate.output,
                });
            }
            if gate.inputs.len() != gate.kind.arity() {
                violations.push(Violation::BadArity {
                    gate: id,
                    kind: gate.kind,
                    got: gate.inputs.len(),
                });
            }
            if gate.inputs.contains(&gate.output) {
                violations.push(Violation::SelfLoop { gate: id });
            }
        }
        for group in self.inputs.iter().chain(self.outputs.iter()) {
            for &w in group {
                if !in_range(w) {
                    violations.push(Violation::GroupWireOutOfRange { wire: w });
                }
            }
        }
        if !violations.is_empty() {
            // Out-of-range wires poison every later check; stop here.
            return ValidationReport { violations };
        }

        // Single writer: each wire produced exactly once, by an input-group
        // slot or one gate output.
        let mut writers: Vec<Vec<Producer>> = vec![Vec::new(); self.wire_count];
        for (g, group) in self.inputs.iter().enumerate() {
            for (i, w) in group.iter().enumerate() {
                writers[w.index()].push(Producer::Input {
                    group: g,
                    position: i,
                });
            }
        }
        for (i, gate) in self.gates.iter().enumerate() {
            writers[gate.output.index()].push(Producer::Gate(GateId(i as u32)));
        }
        for (w, ws) in writers.iter().enumerate() {
            if ws.len() > 1 {
                let inputs_only = ws
                    .iter()
                    .all(|p| matches!(p, Producer::Input { .. }));
                if inputs_only {
                    violations.push(Violation::OverlappingInputGroups {
                        wire: WireId(w as u32),
                    });
                } else {
                    violations.push(Violation::MultipleProducers {
                        wire: WireId(w as u32),
                        producers: ws.clone(),
                    });
                }
            }
        }

        // Every gate input has a producer.
        for (i, gate) in self.gates.iter().enumerate() {
            for &w in &gate.inputs {
                if writers[w.index()].is_empty() {
                    violations.push(Violation::NoProducer {
                        gate: GateId(i as u32),
                        wire: w,
                    });
                }
            }
        }

        // Every wire produced at all (inputs or a gate).
        for (w, ws) in writers.iter().enumerate() {
            if ws.is_empty() {
                violations.push(Violation::UnproducedWire {
                    wire: WireId(w as u32),
                });
            }
        }

        // Acyclicity over the gate dependency graph.
        if let Some(cycle) = self.find_cycle() {
            violations.push(Violation::Cycle { witness: cycle });
        }

        ValidationReport { violations }
    }

    /// Iterative three-color DFS over gate dependencies; returns one witness
    /// cycle as a gate id sequence, if any exists.
    fn find_cycle(&self) -> Option<Vec<GateId>> {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;

        // wire -> producing gate (first writer wins; enough for a witness)
        let mut producer: HashMap<WireId, GateId> = HashMap::with_capacity(self.gates.len());
        for (i, gate) in self.gates.iter().enumerate() {
            producer.entry(gate.output).or_insert(GateId(i as u32));
        }

        let mut color = vec![WHITE; self.gates.len()];
        let mut path: Vec<GateId> = Vec::new();

        for start in 0..self.gates.len() {
            if color[start] != WHITE {
                continue;
            }
            // stack of (gate, next parent index to visit)
            let mut stack: Vec<(GateId, usize)> = vec![(GateId(start as u32), 0)];
            color[start] = GREY;
            path.push(GateId(start as u32));
            while let Some(&mut (g, ref mut next)) = stack.last_mut() {
                let gate = &self.gates[g.index()];
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
                                witness.reverse(); // dependency order
                                return Some(witness);
                            }
                            _ => {}
                        }
                    }
                } else {
                    color[g.index()] = BLACK;
                    stack.pop();
                    path.pop();
                }
            }
        }
        None
    }

    /// Gate-count figures for reporting.
    pub fn stats(&self) -> CircuitStats {
        let mut counts: HashMap<GateKind, usize> = HashMap::new();
        for gate in &self.gates {
            *counts.entry(gate.kind).or_insert(0) += 1;
        }
        CircuitStats {
            gate_count: self.gates.len(),
            wire_count: self.wire_count,
            counts_by_kind: counts,
            input_bits: self.input_bits(),
            output_bits: self.output_bits(),
        }
    }

    /// A copy of this circuit with gates permuted into `order` and gate ids
    /// reassigned accordingly. Wire numbering is unchanged.
    pub fn reordered(&self, order: &[GateId]) -> Circuit {
        assert_eq!(order.len(), self.gates.len());
        let gates = order.iter().map(|&g| self.gates[g.index()].clone()).collect();
        Circuit {
            name: self.name.clone(),
            wire_count: self.wire_count,
            gates,
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
        }
    }
}

/// Result of [`Circuit::validate`].
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// One broken circuit invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    WireOutOfRange { gate: GateId, wire: WireId },
    GroupWireOutOfRange { wire: WireId },
    BadArity { gate: GateId, kind: GateKind, got: usize },
    SelfLoop { gate: GateId },
    MultipleProducers { wire: WireId, producers: Vec<Producer> },
    OverlappingInputGroups { wire: WireId },
    NoProducer { gate: GateId, wire: WireId },
    UnproducedWire { wire: WireId },
    Cycle { witness: Vec<GateId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::WireOutOfRange { gate, wire } => {
                write!(f, "gate {gate} references out-of-range wire {wire}")
            }
            Violation::GroupWireOutOfRange { wire } => {
                write!(f, "i/o group references out-of-range wire {wire}")
            }
            Violation::BadArity { gate, kind, got } => write!(
                f,
                "gate {gate} of kind {kind} has {got} inputs, expected {}",
                kind.arity()
            ),
            Violation::SelfLoop { gate } => write!(f, "gate {gate} reads its own output wire"),
            Violation::MultipleProducers { wire, producers } => {
                write!(f, "multiple producers for wire {wire} ({} writers)", producers.len())
            }
            Violation::OverlappingInputGroups { wire } => {
                write!(f, "input groups overlap on wire {wire}")
            }
            Violation::NoProducer { gate, wire } => {
                write!(f, "gate {gate} reads wire {wire} which has no producer")
            }
            Violation::UnproducedWire { wire } => {
                write!(f, "wire {wire} is neither an input nor produced by a gate")
            }
            Violation::Cycle { witness } => {
                let ids: Vec<String> = witness.iter().map(|g| g.to_string()).collect();
                write!(f, "cycle through gates [{}]", ids.join(", "))
            }
        }
    }
}

/// Gate/wire counts of a circuit, grouped by kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitStats {
    pub gate_count: usize,
    pub wire_count: usize,
    pub counts_by_kind: HashMap<GateKind, usize>,
    pub input_bits: usize,
    pub output_bits: usize,
}

/// Incremental construction helper for generated circuits. Wires are handed
/// out densely, input groups first, so the result always satisfies the
/// inputs-lowest convention; gates are recorded in creation order, which is
/// a topological order by construction.
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    name: String,
    next_wire: u32,
    gates: Vec<Gate>,
    inputs: Vec<Vec<WireId>>,
    outputs: Vec<Vec<WireId>>,
}

impl CircuitBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        CircuitBuilder {
            name: name.into(),
            ..Default::default()
        }
    }

    /// Declares a fresh input group of `bits` wires. Must be called before
    /// any gate is added so inputs occupy the lowest indices.
    pub fn input_group(&mut self, bits: usize) -> Vec<WireId> {
        assert!(
            self.gates.is_empty(),
            "input groups must be declared before gates"
        );
        let group: Vec<WireId> = (0..bits).map(|_| self.fresh_wire()).collect();
        self.inputs.push(group.clone());
        group
    }

    fn fresh_wire(&mut self) -> WireId {
        let w = WireId(self.next_wire);
        self.next_wire += 1;
        w
    }

    /// Adds a gate and returns its (fresh) output wire.
    pub fn gate(&mut self, kind: GateKind, inputs: &[WireId]) -> WireId {
        assert_eq!(inputs.len(), kind.arity(), "arity mismatch for {kind}");
        let output = self.fresh_wire();
        self.gates.push(Gate::new(kind, inputs.to_vec(), output));
        output
    }

    pub fn output_group(&mut self, wires: Vec<WireId>) {
        self.outputs.push(wires);
    }

    pub fn finish(self) -> Circuit {
        Circuit::new(
            self.name,
            self.next_wire as usize,
            self.gates,
            self.inputs,
            self.outputs,
        )
    }
}
