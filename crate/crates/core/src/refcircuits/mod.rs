//! Benchmark and test workloads: the bundled AES-128 circuit with its
//! software oracle, a private-information-retrieval selection circuit, a
//! ripple-carry adder and a random-circuit generator for property tests.

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitBuilder, GateKind, WireId};
use crate::netlist::parse_bristol;

pub mod aes;
pub mod aesgen;
pub mod random;
mod sbox;

pub use aes::{key_expansion, reference_aes128, AesVector, KNOWN_VECTORS};
pub use aesgen::build_aes128_circuit;

/// Manifest and data files for the circuits shipped with the crate.
const AES_128_BRISTOL: &str = include_str!("../../circuits/aes_128.txt");
const MANIFEST: &str = include_str!("../../circuits/manifest.json");

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("bundled circuit `{name}` is corrupt: sha256 {got} != {expected}")]
    ChecksumMismatch {
        name: String,
        expected: String,
        got: String,
    },
    #[error("bundled circuit `{name}` failed to parse: {message}")]
    Unparseable { name: String, message: String },
    #[error("manifest is invalid: {0}")]
    BadManifest(String),
}

/// The bundled AES-128 encryption circuit (Bristol Fashion, checked against
/// the manifest checksum). Input groups: 128-bit plaintext, then the
/// 1408-bit expanded key (11 round keys, client-precomputed); output group:
/// the 128-bit ciphertext. All groups MSB-first.
pub fn bundled_aes_circuit() -> Result<Circuit, BundleError> {
    let manifest: serde_json::Value =
        serde_json::from_str(MANIFEST).map_err(|e| BundleError::BadManifest(e.to_string()))?;
    let expected = manifest["circuits"]["aes_128"]["sha256"]
        .as_str()
        .ok_or_else(|| BundleError::BadManifest("missing aes_128 sha256".into()))?
        .to_string();
    let got = hex_digest(AES_128_BRISTOL.as_bytes());
    if got != expected {
        return Err(BundleError::ChecksumMismatch {
            name: "aes_128".into(),
            expected,
            got,
        });
    }
    let parsed = parse_bristol(AES_128_BRISTOL).map_err(|e| BundleError::Unparseable {
        name: "aes_128".into(),
        message: e.to_string(),
    })?;
    Ok(parsed.circuit)
}

/// Raw text of the bundled AES file, for round-trip tests and export.
pub fn bundled_aes_text() -> &'static str {
    AES_128_BRISTOL
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Ripple-carry adder over two `n`-bit inputs (MSB-first groups); the output
/// group is `n + 1` bits, carry-out first, so it reads as the full sum.
pub fn gen_adder(n_bits: usize) -> Circuit {
    assert!(n_bits >= 1);
    let mut b = CircuitBuilder::new(format!("adder_{n_bits}"));
    let a = b.input_group(n_bits);
    let y = b.input_group(n_bits);

    let mut sums: Vec<WireId> = Vec::with_capacity(n_bits);
    let mut carry: Option<WireId> = None;
    // groups are MSB-first; ripple from the last wire (the LSB) upward
    for bit in (0..n_bits).rev() {
        let (ai, yi) = (a[bit], y[bit]);
        let axy = b.gate(GateKind::Xor, &[ai, yi]);
        match carry {
            None => {
                sums.push(axy);
                carry = Some(b.gate(GateKind::And, &[ai, yi]));
            }
            Some(c) => {
                sums.push(b.gate(GateKind::Xor, &[axy, c]));
                let and_in = b.gate(GateKind::And, &[ai, yi]);
                let and_carry = b.gate(GateKind::And, &[axy, c]);
                carry = Some(b.gate(GateKind::Or, &[and_in, and_carry]));
            }
        }
    }
    sums.push(carry.unwrap());
    sums.reverse(); // carry-out first, then sum bits MSB-first
    b.output_group(sums);
    b.finish()
}

/// Database selection circuit: input groups are the `ceil(log2 n)` selector
/// bits (MSB-first; empty for a single entry) and the database as one group
/// of `n_entries * entry_bits` bits (entry 0 first). The output group holds
/// the selected entry.
///
/// Built as a balanced MUX tree per output bit, padded to the next power of
/// two with constant-zero entries. Selector values addressing padding slots
/// are outside the contract and return zeros.
pub fn gen_pir_circuit(n_entries: usize, entry_bits: usize) -> Circuit {
    assert!(n_entries >= 1, "database must have at least one entry");
    assert!(entry_bits >= 1);
    let selector_bits = usize::max(n_entries.next_power_of_two().trailing_zeros() as usize, 0);
    let padded = 1usize << selector_bits;

    let mut b = CircuitBuilder::new(format!("pir_{n_entries}x{entry_bits}"));
    let selector = b.input_group(selector_bits);
    let db = b.input_group(n_entries * entry_bits);

    let mut level: Vec<Vec<WireId>> = Vec::with_capacity(padded);
    for e in 0..n_entries {
        level.push(db[e * entry_bits..(e + 1) * entry_bits].to_vec());
    }
    if n_entries < padded {
        let zeros: Vec<WireId> = (0..entry_bits)
            .map(|_| b.gate(GateKind::Const0, &[]))
            .collect();
        level.resize_with(padded, || zeros.clone());
    }

    if selector_bits == 0 {
        // single entry: buffer it through so the output has its own producer
        let out: Vec<WireId> = level[0]
            .iter()
            .map(|&w| b.gate(GateKind::Buf, &[w]))
            .collect();
        b.output_group(out);
        return b.finish();
    }

    // combine pairs with the least significant selector bit first
    for round in 0..selector_bits {
        let select = selector[selector_bits - 1 - round];
        level = level
            .chunks(2)
            .map(|pair| {
                pair[0]
                    .iter()
                    .zip(&pair[1])
                    .map(|(&lo, &hi)| b.gate(GateKind::Mux, &[select, lo, hi]))
                    .collect()
            })
            .collect();
    }
    debug_assert_eq!(level.len(), 1);
    let out = level.pop().unwrap();
    b.output_group(out);
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{Backend, PlainBackend, SecurityParams};
    use crate::bits::{bits_to_uint, uint_to_bits};
    use crate::eval::{decrypt_outputs, encrypt_inputs, eval_serial};
    use crate::schedule::topo_sort;
    use rand::{Rng, SeedableRng};

    fn eval_plain(circuit: &Circuit, groups: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let backend = PlainBackend;
        let keys = backend.keygen(&SecurityParams::default_128()).unwrap();
        let inputs = encrypt_inputs(&backend, &keys, groups).unwrap();
        let order = topo_sort(circuit).unwrap();
        let report = eval_serial(circuit, &order, &backend, &keys, &inputs).unwrap();
        decrypt_outputs(&backend, &keys, report).unwrap().outputs
    }

    #[test]
    fn one_bit_adder_truth() {
        let c = gen_adder(1);
        assert!(c.validate().is_ok());
        let out = eval_plain(&c, &[vec![true], vec![true]]);
        // 1 + 1 = 10b
        assert_eq!(bits_to_uint(&out[0]), 2);
    }

    #[test]
    fn eight_bit_adder_matches_integers() {
        let c = gen_adder(8);
        let out = eval_plain(&c, &[uint_to_bits(200, 8), uint_to_bits(100, 8)]);
        assert_eq!(bits_to_uint(&out[0]), 300);
    }

    #[test]
    fn four_bit_adder_exhaustive() {
        let c = gen_adder(4);
        for a in 0..16u64 {
            for b in 0..16u64 {
                let out = eval_plain(&c, &[uint_to_bits(a, 4), uint_to_bits(b, 4)]);
                assert_eq!(bits_to_uint(&out[0]), a + b, "{a} + {b}");
            }
        }
    }

    #[test]
    fn adder_gate_tally_matches_per_bit_construction() {
        // lsb cell: XOR + AND; each other bit: 2 XOR + 2 AND + OR
        let c = gen_adder(32);
        let stats = c.stats();
        assert_eq!(stats.gate_count, 2 + 31 * 5);
        assert_eq!(stats.counts_by_kind[&GateKind::Xor], 1 + 31 * 2);
        assert_eq!(stats.counts_by_kind[&GateKind::And], 1 + 31 * 2);
        assert_eq!(stats.counts_by_kind[&GateKind::Or], 31);
    }

    #[test]
    fn pir_single_entry_buffers_through() {
        let c = gen_pir_circuit(1, 4);
        assert!(c.validate().is_ok());
        assert_eq!(c.inputs()[0].len(), 0);
        assert!(c.gates().iter().all(|g| g.kind == GateKind::Buf));
        let out = eval_plain(&c, &[vec![], uint_to_bits(0xa, 4)]);
        assert_eq!(bits_to_uint(&out[0]), 0xa);
    }

    #[test]
    fn pir_four_entries_exhaustive() {
        let c = gen_pir_circuit(4, 4);
        let db = [0xau64, 0xb, 0xc, 0xd];
        let mut db_bits = Vec::new();
        for &e in &db {
            db_bits.extend(uint_to_bits(e, 4));
        }
        for index in 0..4u64 {
            let out = eval_plain(&c, &[uint_to_bits(index, 2), db_bits.clone()]);
            assert_eq!(bits_to_uint(&out[0]), db[index as usize], "index {index}");
        }
    }

    #[test]
    fn pir_100_random_trials() {
        let c = gen_pir_circuit(100, 32);
        assert!(c.validate().is_ok());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(100);
        for _ in 0..10 {
            let db: Vec<u64> = (0..100).map(|_| rng.gen::<u32>() as u64).collect();
            let mut db_bits = Vec::new();
            for &e in &db {
                db_bits.extend(uint_to_bits(e, 32));
            }
            let index = rng.gen_range(0..100u64);
            let out = eval_plain(&c, &[uint_to_bits(index, 7), db_bits]);
            assert_eq!(bits_to_uint(&out[0]), db[index as usize]);
        }
    }

    #[test]
    fn bundled_aes_parses_with_manifest_checksum() {
        let c = bundled_aes_circuit().unwrap();
        assert!(c.validate().is_ok());
        assert_eq!(c.inputs()[0].len(), 128);
        assert_eq!(c.inputs()[1].len(), 1408);
        assert_eq!(c.outputs()[0].len(), 128);
    }

    #[test]
    fn bundled_aes_header_matches_stats() {
        let text = bundled_aes_text();
        let mut header = text.lines().next().unwrap().split_whitespace();
        let ngates: usize = header.next().unwrap().parse().unwrap();
        let nwires: usize = header.next().unwrap().parse().unwrap();
        let c = bundled_aes_circuit().unwrap();
        assert_eq!(c.gate_count(), ngates);
        assert_eq!(c.wire_count(), nwires);
        // the gate-line count of the file equals the header figure
        let gate_lines = text
            .lines()
            .skip(3)
            .filter(|l| !l.trim().is_empty())
            .count();
        assert_eq!(gate_lines, ngates);
    }

    #[test]
    fn bundled_aes_equals_generator_output() {
        let generated = build_aes128_circuit();
        let written = crate::netlist::write_bristol(&generated).unwrap();
        assert_eq!(written, bundled_aes_text());
    }
}
