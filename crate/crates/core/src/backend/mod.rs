//! Gate-evaluation backends.
//!
//! A [`Backend`] packages the homomorphic-scheme algorithm quadruple —
//! key generation, encryption, per-gate evaluation and decryption — behind
//! one contract, so the evaluator can run the same circuit over a plaintext
//! oracle, a deterministic latency model, or real ciphertexts.
//!
//! Values and keys are tied to the backend *instance* that created them
//! (each key pair carries a fresh instance id); mixing material across
//! instances is reported as an error rather than silently producing noise.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::circuit::GateKind;

mod latency;
mod plain;

pub use latency::{LatencyBackend, LatencyBit, LatencyKeys};
pub use plain::{PlainBackend, PlainBit, PlainKeys};

/// Security parameterization requested from `keygen`, addressed by preset
/// name. `lambda` is the claimed security level in bits; presets that exist
/// only to make tests fast claim 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecurityParams {
    pub lambda: u32,
    pub preset: String,
}

impl SecurityParams {
    /// The 128-bit production preset.
    pub fn default_128() -> Self {
        SecurityParams {
            lambda: 128,
            preset: "default".into(),
        }
    }

    /// Small, fast, NON-SECURE parameters for CI and unit tests.
    pub fn reduced() -> Self {
        SecurityParams {
            lambda: 0,
            preset: "reduced".into(),
        }
    }

    pub fn named(preset: &str) -> Self {
        match preset {
            "reduced" => Self::reduced(),
            _ => SecurityParams {
                lambda: 128,
                preset: preset.into(),
            },
        }
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("unknown parameter preset `{0}`")]
    UnknownPreset(String),
    #[error("value belongs to backend instance {got}, expected {expected}")]
    ForeignValue { expected: u64, got: u64 },
    #[error("{kind} takes {expected} inputs, got {got}")]
    ArityMismatch {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("malformed ciphertext: {0}")]
    Malformed(String),
    #[error("{0}")]
    Crypto(String),
}

/// Fresh id for a key-pair instance; used to police cross-instance mixing.
pub(crate) fn next_instance_id() -> u64 {
    static NEXT: AtomicU64 = AtomicU64::new(1);
    NEXT.fetch_add(1, Ordering::Relaxed)
}

/// The gate-evaluation contract.
///
/// `eval_gate` must be safe to call concurrently from multiple workers
/// sharing the same keys, as long as each worker writes its outputs to
/// distinct locations; implementations keep any mutable state thread-local.
///
/// `begin_batch`/`batch_position` exist for backends that model wall-clock
/// cost: evaluators call `begin_batch` when a worker starts a contiguous run
/// of gates, passing a shared anchor instant, and collect `batch_position`
/// afterwards. Value-only backends ignore both.
pub trait Backend: Sync {
    type Keys: Send + Sync;
    type Value: Clone + Send + Sync;

    fn name(&self) -> &'static str;

    fn keygen(&self, params: &SecurityParams) -> Result<Self::Keys, BackendError>;

    fn encrypt(&self, keys: &Self::Keys, bit: bool) -> Result<Self::Value, BackendError>;

    fn eval_gate(
        &self,
        keys: &Self::Keys,
        kind: GateKind,
        inputs: &[&Self::Value],
    ) -> Result<Self::Value, BackendError>;

    fn decrypt(&self, keys: &Self::Keys, value: &Self::Value) -> Result<bool, BackendError>;

    fn begin_batch(&self, _anchor: Instant) {}

    fn batch_position(&self) -> Option<Instant> {
        None
    }
}

pub(crate) fn check_arity(kind: GateKind, got: usize) -> Result<(), BackendError> {
    if got != kind.arity() {
        return Err(BackendError::ArityMismatch {
            kind,
            expected: kind.arity(),
            got,
        });
    }
    Ok(())
}

/// Modeled evaluation cost per gate kind, with a fallback for kinds that
/// carry no explicit entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GateCostModel {
    per_gate_latency: Vec<(GateKind, Duration)>,
    default_latency: Duration,
}

/// Serial AES time over gate count from the reference measurements:
/// 311.301 s / 27987 gates ~= 11.1 ms per bootstrapped gate.
pub const BOOTSTRAP_GATE_LATENCY: Duration = Duration::from_micros(11_100);

impl GateCostModel {
    /// Same cost for every kind.
    pub fn uniform(latency: Duration) -> Self {
        GateCostModel {
            per_gate_latency: Vec::new(),
            default_latency: latency,
        }
    }

    /// The calibrated bootstrapping model: `latency` (11.1 ms by default)
    /// for every bootstrapped kind, zero for `NOT`, `BUF` and constants,
    /// which gate-bootstrapping schemes evaluate essentially for free.
    pub fn bootstrap(latency: Duration) -> Self {
        GateCostModel {
            per_gate_latency: vec![
                (GateKind::Not, Duration::ZERO),
                (GateKind::Buf, Duration::ZERO),
                (GateKind::Const0, Duration::ZERO),
                (GateKind::Const1, Duration::ZERO),
            ],
            default_latency: latency,
        }
    }

    pub fn calibrated() -> Self {
        Self::bootstrap(BOOTSTRAP_GATE_LATENCY)
    }

    pub fn with_latency(mut self, kind: GateKind, latency: Duration) -> Self {
        self.per_gate_latency.retain(|(k, _)| *k != kind);
        self.per_gate_latency.push((kind, latency));
        self
    }

    /// The per-kind entry if present, the default otherwise.
    pub fn latency_of(&self, kind: GateKind) -> Duration {
        self.per_gate_latency
            .iter()
            .find(|(k, _)| *k == kind)
            .map(|(_, d)| *d)
            .unwrap_or(self.default_latency)
    }

    pub fn default_latency(&self) -> Duration {
        self.default_latency
    }
}
