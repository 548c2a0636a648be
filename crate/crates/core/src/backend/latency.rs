//! Deterministic latency-model backend.
//!
//! Computes the same truth tables as the plaintext backend but holds each
//! gate for its modeled duration, so speedup structure can be measured
//! without hours of homomorphic compute.
//!
//! Pacing is absolute rather than per-call: each thread tracks an anchor
//! instant plus the accumulated modeled cost, and every gate sleeps until
//! `anchor + accumulated`. Per-call sleep overshoot therefore does not
//! accumulate — a worker that wakes late simply sleeps less for the next
//! gate. Evaluators reset the anchor through [`Backend::begin_batch`] at the
//! start of each contiguous run and read the modeled finish time back via
//! [`Backend::batch_position`].

use std::cell::Cell;
use std::thread;
use std::time::{Duration, Instant};

use crate::backend::{
    check_arity, next_instance_id, Backend, BackendError, GateCostModel, SecurityParams,
};
use crate::circuit::GateKind;

#[derive(Clone, Debug)]
pub struct LatencyBackend {
    model: GateCostModel,
}

#[derive(Clone, Debug)]
pub struct LatencyKeys {
    instance: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatencyBit {
    pub value: bool,
    instance: u64,
}

thread_local! {
    /// (anchor, modeled cost accumulated since the anchor)
    static PACE: Cell<Option<(Instant, Duration)>> = const { Cell::new(None) };
}

impl LatencyBackend {
    pub fn new(model: GateCostModel) -> Self {
        LatencyBackend { model }
    }

    /// The calibrated bootstrapping model (11.1 ms per bootstrapped gate).
    pub fn calibrated() -> Self {
        Self::new(GateCostModel::calibrated())
    }

    pub fn model(&self) -> &GateCostModel {
        &self.model
    }

    fn pace(&self, cost: Duration) {
        let (anchor, acc) = PACE.with(|p| {
            let (anchor, acc) = p
                .get()
                .unwrap_or_else(|| (Instant::now(), Duration::ZERO));
            let acc = acc + cost;
            p.set(Some((anchor, acc)));
            (anchor, acc)
        });
        let target = anchor + acc;
        let now = Instant::now();
        if target > now {
            thread::sleep(target - now);
        }
    }
}

impl Backend for LatencyBackend {
    type Keys = LatencyKeys;
    type Value = LatencyBit;

    fn name(&self) -> &'static str {
        "latency"
    }

    fn keygen(&self, _params: &SecurityParams) -> Result<LatencyKeys, BackendError> {
        Ok(LatencyKeys {
            instance: next_instance_id(),
        })
    }

    fn encrypt(&self, keys: &LatencyKeys, bit: bool) -> Result<LatencyBit, BackendError> {
        Ok(LatencyBit {
            value: bit,
            instance: keys.instance,
        })
    }

    fn eval_gate(
        &self,
        keys: &LatencyKeys,
        kind: GateKind,
        inputs: &[&LatencyBit],
    ) -> Result<LatencyBit, BackendError> {
        check_arity(kind, inputs.len())?;
        let mut bits = [false; 3];
        for (i, input) in inputs.iter().enumerate() {
            if input.instance != keys.instance {
                return Err(BackendError::ForeignValue {
                    expected: keys.instance,
                    got: input.instance,
                });
            }
            bits[i] = input.value;
        }
        let value = kind.apply(&bits[..inputs.len()]);
        self.pace(self.model.latency_of(kind));
        Ok(LatencyBit {
            value,
            instance: keys.instance,
        })
    }

    fn decrypt(&self, keys: &LatencyKeys, value: &LatencyBit) -> Result<bool, BackendError> {
        if value.instance != keys.instance {
            return Err(BackendError::ForeignValue {
                expected: keys.instance,
                got: value.instance,
            });
        }
        Ok(value.value)
    }

    fn begin_batch(&self, anchor: Instant) {
        PACE.with(|p| p.set(Some((anchor, Duration::ZERO))));
    }

    fn batch_position(&self) -> Option<Instant> {
        PACE.with(|p| p.get().map(|(anchor, acc)| anchor + acc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_truth_tables_as_plain() {
        let b = LatencyBackend::new(GateCostModel::uniform(Duration::ZERO));
        let keys = b.keygen(&SecurityParams::named("latency")).unwrap();
        for kind in GateKind::ALL {
            let arity = kind.arity();
            for combo in 0..(1u8 << arity) {
                let bits: Vec<bool> = (0..arity).map(|i| combo >> i & 1 == 1).collect();
                let cts: Vec<LatencyBit> = bits
                    .iter()
                    .map(|&bit| b.encrypt(&keys, bit).unwrap())
                    .collect();
                let refs: Vec<&LatencyBit> = cts.iter().collect();
                let out = b.eval_gate(&keys, kind, &refs).unwrap();
                assert_eq!(b.decrypt(&keys, &out).unwrap(), kind.apply(&bits));
            }
        }
    }

    #[test]
    fn batch_pacing_tracks_model_cost() {
        let b = LatencyBackend::new(GateCostModel::uniform(Duration::from_millis(2)));
        let keys = b.keygen(&SecurityParams::named("latency")).unwrap();
        let ct = b.encrypt(&keys, true).unwrap();
        let start = Instant::now();
        b.begin_batch(start);
        for _ in 0..10 {
            b.eval_gate(&keys, GateKind::Not, &[&ct]).unwrap();
        }
        let elapsed = start.elapsed();
        assert!(elapsed >= Duration::from_millis(20));
        assert!(elapsed < Duration::from_millis(40), "paced run took {elapsed:?}");
        assert_eq!(b.batch_position(), Some(start + Duration::from_millis(20)));
    }

    #[test]
    fn zero_cost_kinds_do_not_sleep() {
        let b = LatencyBackend::calibrated();
        let keys = b.keygen(&SecurityParams::named("latency")).unwrap();
        let ct = b.encrypt(&keys, false).unwrap();
        let start = Instant::now();
        b.begin_batch(start);
        for _ in 0..100 {
            b.eval_gate(&keys, GateKind::Not, &[&ct]).unwrap();
        }
        assert!(start.elapsed() < Duration::from_millis(50));
    }
}
