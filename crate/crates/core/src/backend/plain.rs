//! Plaintext oracle backend: "encryption" is the identity on bits.

use std::time::Instant;

use crate::backend::{check_arity, next_instance_id, Backend, BackendError, SecurityParams};
use crate::circuit::GateKind;

#[derive(Clone, Copy, Debug, Default)]
pub struct PlainBackend;

#[derive(Clone, Debug)]
pub struct PlainKeys {
    instance: u64,
}

/// A bit tagged with the key-pair instance that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlainBit {
    pub value: bool,
    instance: u64,
}

impl Backend for PlainBackend {
    type Keys = PlainKeys;
    type Value = PlainBit;

    fn name(&self) -> &'static str {
        "plain"
    }

    fn keygen(&self, _params: &SecurityParams) -> Result<PlainKeys, BackendError> {
        Ok(PlainKeys {
            instance: next_instance_id(),
        })
    }

    fn encrypt(&self, keys: &PlainKeys, bit: bool) -> Result<PlainBit, BackendError> {
        Ok(PlainBit {
            value: bit,
            instance: keys.instance,
        })
    }

    fn eval_gate(
        &self,
        keys: &PlainKeys,
        kind: GateKind,
        inputs: &[&PlainBit],
    ) -> Result<PlainBit, BackendError> {
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
        Ok(PlainBit {
            value: kind.apply(&bits[..inputs.len()]),
            instance: keys.instance,
        })
    }

    fn decrypt(&self, keys: &PlainKeys, value: &PlainBit) -> Result<bool, BackendError> {
        if value.instance != keys.instance {
            return Err(BackendError::ForeignValue {
                expected: keys.instance,
                got: value.instance,
            });
        }
        Ok(value.value)
    }

    fn begin_batch(&self, _anchor: Instant) {}
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enc_dec_identity() {
        let b = PlainBackend;
        let keys = b.keygen(&SecurityParams::named("anything")).unwrap();
        for bit in [false, true] {
            let ct = b.encrypt(&keys, bit).unwrap();
            assert_eq!(b.decrypt(&keys, &ct).unwrap(), bit);
        }
    }

    #[test]
    fn not_flips() {
        let b = PlainBackend;
        let keys = b.keygen(&SecurityParams::default_128()).unwrap();
        let ct = b.encrypt(&keys, true).unwrap();
        let out = b.eval_gate(&keys, GateKind::Not, &[&ct]).unwrap();
        assert!(!b.decrypt(&keys, &out).unwrap());
    }

    #[test]
    fn cross_instance_mixing_is_rejected() {
        let b = PlainBackend;
        let k1 = b.keygen(&SecurityParams::default_128()).unwrap();
        let k2 = b.keygen(&SecurityParams::default_128()).unwrap();
        let ct = b.encrypt(&k1, true).unwrap();
        let err = b.eval_gate(&k2, GateKind::Not, &[&ct]).unwrap_err();
        assert!(matches!(err, BackendError::ForeignValue { .. }));
        assert!(b.decrypt(&k2, &ct).is_err());
    }

    #[test]
    fn arity_is_checked() {
        let b = PlainBackend;
        let keys = b.keygen(&SecurityParams::default_128()).unwrap();
        let ct = b.encrypt(&keys, true).unwrap();
        let err = b.eval_gate(&keys, GateKind::And, &[&ct]).unwrap_err();
        assert!(matches!(err, BackendError::ArityMismatch { .. }));
    }
}
