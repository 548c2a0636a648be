//! Boolean circuit evaluation with pluggable gate backends and layer-wise
//! parallel scheduling.
//!
//! The pipeline: load a netlist ([`netlist`]), validate the circuit model
//! ([`circuit`]), assign every gate a depth layer and split layers across
//! workers ([`schedule`]), then execute serially or layer-parallel over a
//! gate backend ([`eval`], [`backend`]). [`refcircuits`] supplies benchmark
//! workloads (AES-128, database selection) together with independent
//! software oracles.

pub mod backend;
pub mod bits;
pub mod circuit;
pub mod eval;
pub mod netlist;
pub mod refcircuits;
pub mod schedule;

pub use backend::{Backend, BackendError, GateCostModel, SecurityParams};
pub use circuit::{Circuit, CircuitBuilder, CircuitStats, Gate, GateId, GateKind, WireId};
pub use eval::{eval_parallel, eval_serial, predict_parallel_time, EvalError, EvalReport};
pub use schedule::{
    assign_depths, build_schedule, layer_histogram, topo_sort, DepthMap, LayerHistogram, Schedule,
};
