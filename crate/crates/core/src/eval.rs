//! Circuit evaluation over a gate backend, serial or layer-parallel.
//!
//! The parallel path owns `k` worker threads for the duration of one
//! evaluation. Within a layer each worker evaluates its pre-assigned chunk,
//! writing only its own output slots; a full barrier separates consecutive
//! layers, so no gate of layer `d + 1` starts before every gate of layer `d`
//! has finished. Wire slots enforce write-once/read-after-write with atomic
//! state flags, so any scheduling defect surfaces as an error instead of a
//! torn value.

use std::cell::UnsafeCell;
use std::sync::atomic::{AtomicBool, AtomicU8, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread::{self, Thread};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::backend::{Backend, BackendError, GateCostModel};
use crate::bits::bits_to_hex;
use crate::circuit::{Circuit, GateId, WireId};
use crate::schedule::{LayerHistogram, Schedule};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("expected {expected} input groups, got {got}")]
    InputGroupCount { expected: usize, got: usize },
    #[error("input group {group} expects {expected} bits, got {got}")]
    InputGroupWidth {
        group: usize,
        expected: usize,
        got: usize,
    },
    #[error("schedule covers {scheduled} gates but the circuit has {actual}")]
    ScheduleMismatch { scheduled: usize, actual: usize },
    #[error("gate {gate}{} failed: {source}", layer_suffix(.layer))]
    GateFailed {
        gate: GateId,
        layer: Option<usize>,
        source: BackendError,
    },
    #[error("gate {gate}{} read wire {wire} before it was written", layer_suffix(.layer))]
    ReadBeforeWrite {
        gate: GateId,
        wire: WireId,
        layer: Option<usize>,
    },
    #[error("gate {gate}{} wrote wire {wire} twice", layer_suffix(.layer))]
    DoubleWrite {
        gate: GateId,
        wire: WireId,
        layer: Option<usize>,
    },
    #[error("output wire {wire} was never written")]
    OutputUnwritten { wire: WireId },
    #[error("input groups bind wire {wire} more than once")]
    DuplicateInputWire { wire: WireId },
}

fn layer_suffix(layer: &Option<usize>) -> String {
    match layer {
        Some(d) => format!(" (layer {d})"),
        None => String::new(),
    }
}

const SLOT_EMPTY: u8 = 0;
const SLOT_WRITING: u8 = 1;
const SLOT_WRITTEN: u8 = 2;

/// One slot per wire, written at most once per evaluation. Slot states are
/// tracked with atomics in every build, so read-before-write and double
/// writes are always detected.
pub struct WireStore<V> {
    slots: Vec<UnsafeCell<Option<V>>>,
    states: Vec<AtomicU8>,
}

// Safety: a slot's value is only mutated by the thread that wins the
// EMPTY -> WRITING transition, and is only read after the WRITTEN flag is
// observed with acquire ordering, at which point the value is immutable.
unsafe impl<V: Send + Sync> Sync for WireStore<V> {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WireStoreError {
    ReadBeforeWrite,
    DoubleWrite,
}

impl<V> WireStore<V> {
    pub fn new(wires: usize) -> Self {
        WireStore {
            slots: (0..wires).map(|_| UnsafeCell::new(None)).collect(),
            states: (0..wires).map(|_| AtomicU8::new(SLOT_EMPTY)).collect(),
        }
    }

    pub fn write(&self, wire: WireId, value: V) -> Result<(), WireStoreError> {
        let i = wire.index();
        if self.states[i]
            .compare_exchange(SLOT_EMPTY, SLOT_WRITING, Ordering::AcqRel, Ordering::Acquire)
            .is_err()
        {
            return Err(WireStoreError::DoubleWrite);
        }
        // Safety: we hold the unique WRITING claim on this slot.
        unsafe {
            *self.slots[i].get() = Some(value);
        }
        self.states[i].store(SLOT_WRITTEN, Ordering::Release);
        Ok(())
    }

    pub fn read(&self, wire: WireId) -> Result<&V, WireStoreError> {
        let i = wire.index();
        if self.states[i].load(Ordering::Acquire) != SLOT_WRITTEN {
            return Err(WireStoreError::ReadBeforeWrite);
        }
        // Safety: WRITTEN slots are immutable for the rest of the evaluation.
        let value = unsafe { &*self.slots[i].get() };
        Ok(value.as_ref().expect("written slot holds a value"))
    }
}

/// Outputs plus wall-clock accounting for one evaluation.
#[derive(Clone, Debug)]
pub struct EvalReport<V> {
    pub circuit: String,
    pub outputs: Vec<Vec<V>>,
    pub total_wall_time: Duration,
    pub per_layer: Vec<LayerTiming>,
    pub k: usize,
    pub backend: String,
    pub preset: String,
}

/// Wall time of one layer's dispatch-to-barrier window. For serial runs a
/// single entry with `depth = 0` covers the whole pass.
#[derive(Clone, Copy, Debug)]
pub struct LayerTiming {
    pub depth: usize,
    pub gates: usize,
    pub wall_time: Duration,
}

impl<V> EvalReport<V> {
    /// Applies a fallible transform to every output bit, keeping timings.
    /// Used to decrypt ciphertext outputs into a reportable form.
    pub fn try_map_outputs<U, E>(
        self,
        mut f: impl FnMut(&V) -> Result<U, E>,
    ) -> Result<EvalReport<U>, E> {
        let mut outputs = Vec::with_capacity(self.outputs.len());
        for group in &self.outputs {
            outputs.push(group.iter().map(&mut f).collect::<Result<Vec<U>, E>>()?);
        }
        Ok(EvalReport {
            circuit: self.circuit,
            outputs,
            total_wall_time: self.total_wall_time,
            per_layer: self.per_layer,
            k: self.k,
            backend: self.backend,
            preset: self.preset,
        })
    }
}

/// The stable JSON shape consumed by the bench comparison tooling.
#[derive(Clone, Debug, Serialize)]
pub struct JsonReport {
    pub circuit: String,
    pub backend: String,
    pub preset: String,
    pub k: usize,
    pub total_ms: f64,
    pub layers: Vec<JsonLayer>,
    pub outputs_hex: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phases: Option<PhaseTimings>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct JsonLayer {
    pub depth: usize,
    pub gates: usize,
    pub ms: f64,
}

/// Split of an end-to-end homomorphic run. Only `eval_ms` is comparable to
/// plain evaluation timing; the other phases are client-side work.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhaseTimings {
    pub keygen_ms: f64,
    pub enc_ms: f64,
    pub eval_ms: f64,
    pub dec_ms: f64,
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl EvalReport<bool> {
    pub fn to_json(&self) -> JsonReport {
        JsonReport {
            circuit: self.circuit.clone(),
            backend: self.backend.clone(),
            preset: self.preset.clone(),
            k: self.k,
            total_ms: ms(self.total_wall_time),
            layers: self
                .per_layer
                .iter()
                .map(|l| JsonLayer {
                    depth: l.depth,
                    gates: l.gates,
                    ms: ms(l.wall_time),
                })
                .collect(),
            outputs_hex: self.outputs.iter().map(|g| bits_to_hex(g)).collect(),
            phases: None,
        }
    }
}

/// Encrypts per-group plaintext bits into backend values.
pub fn encrypt_inputs<B: Backend>(
    backend: &B,
    keys: &B::Keys,
    bits: &[Vec<bool>],
) -> Result<Vec<Vec<B::Value>>, BackendError> {
    bits.iter()
        .map(|group| group.iter().map(|&b| backend.encrypt(keys, b)).collect())
        .collect()
}

/// Decrypts every output group of a report.
pub fn decrypt_outputs<B: Backend>(
    backend: &B,
    keys: &B::Keys,
    report: EvalReport<B::Value>,
) -> Result<EvalReport<bool>, BackendError> {
    report.try_map_outputs(|v| backend.decrypt(keys, v))
}

fn check_input_shape<V>(circuit: &Circuit, inputs: &[Vec<V>]) -> Result<(), EvalError> {
    if inputs.len() != circuit.inputs().len() {
        return Err(EvalError::InputGroupCount {
            expected: circuit.inputs().len(),
            got: inputs.len(),
        });
    }
    for (g, (group, values)) in circuit.inputs().iter().zip(inputs).enumerate() {
        if group.len() != values.len() {
            return Err(EvalError::InputGroupWidth {
                group: g,
                expected: group.len(),
                got: values.len(),
            });
        }
    }
    Ok(())
}

fn seed_inputs<V: Clone>(
    circuit: &Circuit,
    store: &WireStore<V>,
    inputs: &[Vec<V>],
) -> Result<(), EvalError> {
    for (group, values) in circuit.inputs().iter().zip(inputs) {
        for (&wire, value) in group.iter().zip(values) {
            store
                .write(wire, value.clone())
                .map_err(|_| EvalError::DuplicateInputWire { wire })?;
        }
    }
    Ok(())
}

fn extract_outputs<V: Clone>(
    circuit: &Circuit,
    store: &WireStore<V>,
) -> Result<Vec<Vec<V>>, EvalError> {
    circuit
        .outputs()
        .iter()
        .map(|group| {
            group
                .iter()
                .map(|&w| {
                    store
                        .read(w)
                        .cloned()
                        .map_err(|_| EvalError::OutputUnwritten { wire: w })
                })
                .collect()
        })
        .collect()
}

fn eval_one<B: Backend>(
    backend: &B,
    keys: &B::Keys,
    circuit: &Circuit,
    store: &WireStore<B::Value>,
    gate_id: GateId,
    layer: Option<usize>,
) -> Result<(), EvalError> {
    let gate = circuit.gate(gate_id);
    let mut in_values: Vec<&B::Value> = Vec::with_capacity(gate.inputs.len());
    for &w in &gate.inputs {
        let v = store.read(w).map_err(|_| EvalError::ReadBeforeWrite {
            gate: gate_id,
            wire: w,
            layer,
        })?;
        in_values.push(v);
    }
    let out = backend
        .eval_gate(keys, gate.kind, &in_values)
        .map_err(|source| EvalError::GateFailed {
            gate: gate_id,
            layer,
            source,
        })?;
    store.write(gate.output, out).map_err(|_| EvalError::DoubleWrite {
        gate: gate_id,
        wire: gate.output,
        layer,
    })
}

/// Evaluates every gate once, in the given topological order, on the calling
/// thread.
pub fn eval_serial<B: Backend>(
    circuit: &Circuit,
    order: &[GateId],
    backend: &B,
    keys: &B::Keys,
    inputs: &[Vec<B::Value>],
) -> Result<EvalReport<B::Value>, EvalError> {
    check_input_shape(circuit, inputs)?;
    if order.len() != circuit.gate_count() {
        return Err(EvalError::ScheduleMismatch {
            scheduled: order.len(),
            actual: circuit.gate_count(),
        });
    }
    let started = Instant::now();
    let store = WireStore::new(circuit.wire_count());
    seed_inputs(circuit, &store, inputs)?;

    let pass_start = Instant::now();
    backend.begin_batch(pass_start);
    for &g in order {
        eval_one(backend, keys, circuit, &store, g, None)?;
    }
    let pass_time = pass_start.elapsed();

    let outputs = extract_outputs(circuit, &store)?;
    Ok(EvalReport {
        circuit: circuit.name().to_string(),
        outputs,
        total_wall_time: started.elapsed(),
        per_layer: vec![LayerTiming {
            depth: 0,
            gates: circuit.gate_count(),
            wall_time: pass_time,
        }],
        k: 1,
        backend: backend.name().to_string(),
        preset: String::new(),
    })
}

/// Barrier for one evaluation's worker pool. Parties park between layers;
/// the last arriver timestamps the release and wakes everyone.
///
/// Each release carries two instants: the wall-clock release time (used for
/// layer timing) and a pacing anchor, which is the latest modeled position
/// reported by the arriving workers (falling back to the wall time). For
/// cost-modeling backends the anchor keeps per-layer wake-up latency out of
/// the modeled schedule: a worker released late simply sleeps less.
struct LayerBarrier {
    parties: usize,
    arrived: AtomicUsize,
    generation: AtomicUsize,
    pending_anchor: Mutex<Option<Instant>>,
    release: Mutex<(Instant, Instant)>,
    threads: Mutex<Vec<Thread>>,
}

impl LayerBarrier {
    fn new(parties: usize) -> Self {
        let now = Instant::now();
        LayerBarrier {
            parties,
            arrived: AtomicUsize::new(0),
            generation: AtomicUsize::new(0),
            pending_anchor: Mutex::new(None),
            release: Mutex::new((now, now)),
            threads: Mutex::new(Vec::new()),
        }
    }

    fn register(&self) {
        self.threads.lock().unwrap().push(thread::current());
    }

    /// Blocks until all parties arrive. Returns `(anchor, wall)` of the
    /// release that ends the wait.
    fn wait(&self, position: Option<Instant>) -> (Instant, Instant) {
        let generation = self.generation.load(Ordering::Acquire);
        if let Some(p) = position {
            let mut pending = self.pending_anchor.lock().unwrap();
            *pending = Some(pending.map_or(p, |m| m.max(p)));
        }
        if self.arrived.fetch_add(1, Ordering::AcqRel) + 1 == self.parties {
            let wall = Instant::now();
            let anchor = self.pending_anchor.lock().unwrap().take().unwrap_or(wall);
            *self.release.lock().unwrap() = (anchor, wall);
            self.arrived.store(0, Ordering::Release);
            self.generation.store(generation + 1, Ordering::Release);
            let me = thread::current().id();
            for t in self.threads.lock().unwrap().iter() {
                if t.id() != me {
                    t.unpark();
                }
            }
            (anchor, wall)
        } else {
            while self.generation.load(Ordering::Acquire) == generation {
                thread::park();
            }
            *self.release.lock().unwrap()
        }
    }
}

/// Evaluates a scheduled circuit with `schedule.k()` persistent workers.
///
/// Within a layer the `k` chunks run concurrently, each worker writing only
/// its own chunk's output slots; a barrier separates layers. Worker failures
/// abort the evaluation and surface the failing gate and layer.
pub fn eval_parallel<B: Backend>(
    circuit: &Circuit,
    schedule: &Schedule,
    backend: &B,
    keys: &B::Keys,
    inputs: &[Vec<B::Value>],
) -> Result<EvalReport<B::Value>, EvalError> {
    check_input_shape(circuit, inputs)?;
    let scheduled: usize = schedule.layers().iter().map(|l| l.gates.len()).sum();
    if scheduled != circuit.gate_count() {
        return Err(EvalError::ScheduleMismatch {
            scheduled,
            actual: circuit.gate_count(),
        });
    }

    let started = Instant::now();
    let store = WireStore::new(circuit.wire_count());
    seed_inputs(circuit, &store, inputs)?;

    let k = schedule.k();
    let barrier = LayerBarrier::new(k + 1);
    let abort = AtomicBool::new(false);
    let failure: Mutex<Option<EvalError>> = Mutex::new(None);
    let mut walls: Vec<Instant> = Vec::with_capacity(schedule.layers().len() + 1);

    thread::scope(|scope| {
        for worker in 0..k {
            let barrier = &barrier;
            let store = &store;
            let abort = &abort;
            let failure = &failure;
            scope.spawn(move || {
                barrier.register();
                let (mut anchor, _) = barrier.wait(None);
                for layer in schedule.layers() {
                    let mut position = None;
                    if !abort.load(Ordering::Acquire) {
                        backend.begin_batch(anchor);
                        let chunk = &layer.chunks[worker];
                        for idx in chunk.clone() {
                            let gate = layer.gates[idx];
                            if let Err(e) =
                                eval_one(backend, keys, circuit, store, gate, Some(layer.depth))
                            {
                                let mut slot = failure.lock().unwrap();
                                if slot.is_none() {
                                    *slot = Some(e);
                                }
                                abort.store(true, Ordering::Release);
                                break;
                            }
                        }
                        position = backend.batch_position();
                    }
                    (anchor, _) = barrier.wait(position);
                }
            });
        }

        barrier.register();
        let (_, wall) = barrier.wait(None);
        walls.push(wall);
        for _ in schedule.layers() {
            let (_, wall) = barrier.wait(None);
            walls.push(wall);
        }
    });

    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }

    let per_layer = schedule
        .layers()
        .iter()
        .enumerate()
        .map(|(i, layer)| LayerTiming {
            depth: layer.depth,
            gates: layer.gates.len(),
            wall_time: walls[i + 1] - walls[i],
        })
        .collect();

    let outputs = extract_outputs(circuit, &store)?;
    Ok(EvalReport {
        circuit: circuit.name().to_string(),
        outputs,
        total_wall_time: started.elapsed(),
        per_layer,
        k,
        backend: backend.name().to_string(),
        preset: String::new(),
    })
}

/// Closed-form prediction of layer-parallel wall time under a uniform
/// per-gate cost: sum over layers of `ceil(width / k)` times the model's
/// default latency. Non-increasing in `k` and constant once `k` reaches the
/// maximum layer width. Per-kind overrides are outside the prediction model.
pub fn predict_parallel_time(
    histogram: &LayerHistogram,
    model: &GateCostModel,
    k: usize,
) -> Duration {
    assert!(k >= 1, "worker count must be at least 1");
    let slots: u64 = histogram.widths().iter().map(|&w| w.div_ceil(k) as u64).sum();
    model.default_latency() * u32::try_from(slots).unwrap_or(u32::MAX)
}
