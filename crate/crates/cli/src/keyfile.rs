//! Opaque binary files for the keygen/enc/dec round trip.
//!
//! Layout: 8-byte magic (`STRATAK\x01` for keys, `STRATAC\x01` for
//! ciphertexts), a length-prefixed preset name, then a bincode payload. The
//! version rides in the magic's final byte.

use std::fs;
use std::path::Path;

use strata_tfhe::tfhe::boolean::ciphertext::Ciphertext;
use strata_tfhe::ExportableSecretKey;

const KEY_MAGIC: &[u8; 8] = b"STRATAK\x01";
const CT_MAGIC: &[u8; 8] = b"STRATAC\x01";

fn encode(magic: &[u8; 8], preset: &str, payload: Vec<u8>) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + 4 + preset.len() + payload.len());
    out.extend_from_slice(magic);
    out.extend_from_slice(&(preset.len() as u32).to_le_bytes());
    out.extend_from_slice(preset.as_bytes());
    out.extend_from_slice(&payload);
    out
}

fn decode<'a>(bytes: &'a [u8], magic: &[u8; 8], what: &str) -> Result<(String, &'a [u8]), String> {
    if bytes.len() < 12 || &bytes[..8] != magic {
        return Err(format!("not a strata {what} file (bad header)"));
    }
    let len = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if bytes.len() < 12 + len {
        return Err(format!("truncated {what} file"));
    }
    let preset = String::from_utf8(bytes[12..12 + len].to_vec())
        .map_err(|_| format!("corrupt preset name in {what} file"))?;
    Ok((preset, &bytes[12 + len..]))
}

pub fn write_secret_key(path: &Path, key: &ExportableSecretKey) -> Result<(), String> {
    let payload = bincode::serialize(key).map_err(|e| e.to_string())?;
    fs::write(path, encode(KEY_MAGIC, &key.preset, payload))
        .map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_secret_key(path: &Path) -> Result<ExportableSecretKey, String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (_preset, payload) = decode(&bytes, KEY_MAGIC, "key")?;
    bincode::deserialize(payload).map_err(|e| format!("corrupt key file: {e}"))
}

pub fn write_ciphertexts(path: &Path, preset: &str, cts: &[Ciphertext]) -> Result<(), String> {
    let payload = bincode::serialize(cts).map_err(|e| e.to_string())?;
    fs::write(path, encode(CT_MAGIC, preset, payload))
        .map_err(|e| format!("{}: {e}", path.display()))
}

pub fn read_ciphertexts(path: &Path) -> Result<(String, Vec<Ciphertext>), String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let (preset, payload) = decode(&bytes, CT_MAGIC, "ciphertext")?;
    let cts = bincode::deserialize(payload).map_err(|e| format!("corrupt ciphertext file: {e}"))?;
    Ok((preset, cts))
}
