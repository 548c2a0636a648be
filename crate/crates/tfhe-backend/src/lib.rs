//! Gate-bootstrapping FHE backend.
//!
//! Implements the [`Backend`] contract over boolean TFHE ciphertexts: every
//! two-input gate and `MUX` performs a bootstrap, so noise does not
//! accumulate with circuit depth; `NOT` is bootstrap-free and constants are
//! trivial encryptions. Gate evaluation is safe to share across worker
//! threads (the underlying engine is thread-local).
//!
//! Two parameter presets are exposed: `default` (at least 128-bit security)
//! and `reduced`, a small, fast, NON-SECURE set for tests and CI.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use tfhe::boolean::prelude::*;

pub use tfhe;

use strata_core::backend::{Backend, BackendError, SecurityParams};
use strata_core::circuit::GateKind;

/// Small and fast but NON-SECURE parameters; roughly 5x faster than the
/// default set. The tiny noise keeps the decryption failure rate negligible
/// despite the shrunk dimensions.
pub const REDUCED_PARAMETERS: BooleanParameters = BooleanParameters {
    lwe_dimension: LweDimension(500),
    glwe_dimension: GlweDimension(1),
    polynomial_size: PolynomialSize(512),
    lwe_noise_distribution: DynamicDistribution::new_gaussian_from_std_dev(StandardDev(1e-9)),
    glwe_noise_distribution: DynamicDistribution::new_gaussian_from_std_dev(StandardDev(1e-15)),
    pbs_base_log: DecompositionBaseLog(10),
    pbs_level: DecompositionLevelCount(2),
    ks_base_log: DecompositionBaseLog(4),
    ks_level: DecompositionLevelCount(3),
    encryption_key_choice: EncryptionKeyChoice::Small,
};

pub fn parameters_for_preset(preset: &str) -> Result<BooleanParameters, BackendError> {
    match preset {
        "default" => Ok(DEFAULT_PARAMETERS),
        "reduced" => Ok(REDUCED_PARAMETERS),
        other => Err(BackendError::UnknownPreset(other.to_string())),
    }
}

fn next_instance_id() -> u64 {
    static NEXT: AtomicU64 = AtomicU64::new(1);
    NEXT.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TfheBackend;

pub struct TfheKeys {
    instance: u64,
    preset: String,
    client: ClientKey,
    server: ServerKey,
}

impl TfheKeys {
    pub fn preset(&self) -> &str {
        &self.preset
    }

    pub fn client_key(&self) -> &ClientKey {
        &self.client
    }
}

/// A boolean ciphertext tagged with its key-pair instance.
#[derive(Clone)]
pub struct TfheBit {
    instance: u64,
    ct: Ciphertext,
}

/// Secret key material in serializable form, for the keygen/enc/dec CLI
/// round trip. Carries the preset so the evaluation side can rebuild a
/// matching server key.
#[derive(Serialize, Deserialize)]
pub struct ExportableSecretKey {
    pub preset: String,
    pub client: ClientKey,
}

impl TfheBackend {
    /// Rebuilds full keys (including a fresh server key) from an exported
    /// secret key.
    pub fn import_keys(&self, exported: ExportableSecretKey) -> Result<TfheKeys, BackendError> {
        parameters_for_preset(&exported.preset)?;
        let server = ServerKey::new(&exported.client);
        Ok(TfheKeys {
            instance: next_instance_id(),
            preset: exported.preset,
            client: exported.client,
            server,
        })
    }

    pub fn export_secret_key(&self, keys: &TfheKeys) -> ExportableSecretKey {
        ExportableSecretKey {
            preset: keys.preset.clone(),
            client: keys.client.clone(),
        }
    }

    /// Serializes a ciphertext vector (instance tags are not portable across
    /// processes and are dropped).
    pub fn export_bits(&self, bits: &[TfheBit]) -> Vec<Ciphertext> {
        bits.iter().map(|b| b.ct.clone()).collect()
    }

    /// Adopts ciphertexts produced under `keys` in another process.
    pub fn import_bits(&self, keys: &TfheKeys, cts: Vec<Ciphertext>) -> Vec<TfheBit> {
        cts.into_iter()
            .map(|ct| TfheBit {
                instance: keys.instance,
                ct,
            })
            .collect()
    }

    fn own<'a>(
        &self,
        keys: &TfheKeys,
        value: &'a TfheBit,
    ) -> Result<&'a Ciphertext, BackendError> {
        if value.instance != keys.instance {
            return Err(BackendError::ForeignValue {
                expected: keys.instance,
                got: value.instance,
            });
        }
        Ok(&value.ct)
    }
}

impl Backend for TfheBackend {
    type Keys = TfheKeys;
    type Value = TfheBit;

    fn name(&self) -> &'static str {
        "fhe"
    }

    fn keygen(&self, params: &SecurityParams) -> Result<TfheKeys, BackendError> {
        let parameters = parameters_for_preset(&params.preset)?;
        let client = ClientKey::new(&parameters);
        let server = ServerKey::new(&client);
        Ok(TfheKeys {
            instance: next_instance_id(),
            preset: params.preset.clone(),
            client,
            server,
        })
    }

    fn encrypt(&self, keys: &TfheKeys, bit: bool) -> Result<TfheBit, BackendError> {
        Ok(TfheBit {
            instance: keys.instance,
            ct: keys.client.encrypt(bit),
        })
    }

    fn eval_gate(
        &self,
        keys: &TfheKeys,
        kind: GateKind,
        inputs: &[&TfheBit],
    ) -> Result<TfheBit, BackendError> {
        if inputs.len() != kind.arity() {
            return Err(BackendError::ArityMismatch {
                kind,
                expected: kind.arity(),
                got: inputs.len(),
            });
        }
        let sk = &keys.server;
        let ct = match kind {
            GateKind::And => sk.and(self.own(keys, inputs[0])?, self.own(keys, inputs[1])?),
            GateKind::Or => sk.or(self.own(keys, inputs[0])?, self.own(keys, inputs[1])?),
            GateKind::Xor => sk.xor(self.own(keys, inputs[0])?, self.own(keys, inputs[1])?),
            GateKind::Nand => sk.nand(self.own(keys, inputs[0])?, self.own(keys, inputs[1])?),
            GateKind::Nor => sk.nor(self.own(keys, inputs[0])?, self.own(keys, inputs[1])?),
            GateKind::Xnor => sk.xnor(self.own(keys, inputs[0])?, self.own(keys, inputs[1])?),
            GateKind::Not => sk.not(self.own(keys, inputs[0])?),
            GateKind::AndNot => {
                let negated = sk.not(self.own(keys, inputs[1])?);
                sk.and(self.own(keys, inputs[0])?, &negated)
            }
            GateKind::OrNot => {
                let negated = sk.not(self.own(keys, inputs[1])?);
                sk.or(self.own(keys, inputs[0])?, &negated)
            }
            // mux(condition, then, else): our input order is select, a, b
            // with select = 1 choosing b
            GateKind::Mux => sk.mux(
                self.own(keys, inputs[0])?,
                self.own(keys, inputs[2])?,
                self.own(keys, inputs[1])?,
            ),
            GateKind::Buf => self.own(keys, inputs[0])?.clone(),
            GateKind::Const0 => sk.trivial_encrypt(false),
            GateKind::Const1 => sk.trivial_encrypt(true),
        };
        Ok(TfheBit {
            instance: keys.instance,
            ct,
        })
    }

    fn decrypt(&self, keys: &TfheKeys, value: &TfheBit) -> Result<bool, BackendError> {
        Ok(keys.client.decrypt(self.own(keys, value)?))
    }
}
