//! Gate-level construction of the AES-128 encryption circuit.
//!
//! Two input groups — the 128-bit plaintext and the 1408-bit expanded key
//! (11 round keys of 128 bits, as produced by
//! [`key_expansion`](super::aes::key_expansion)) — and one 128-bit output
//! group, every group MSB-first. Key expansion itself is not part of the
//! circuit; clients precompute it.
//!
//! SubBytes instantiates the straight-line S-box program per byte,
//! ShiftRows is pure rewiring, MixColumns and AddRoundKey are XOR networks.
//! The only gate kinds used are XOR, XNOR and AND.

use crate::circuit::{Circuit, CircuitBuilder, GateKind, WireId};
use crate::refcircuits::sbox::{SboxOp, OPS, OUTPUT_SLOTS};

type ByteWires = [WireId; 8];

fn sbox_gates(b: &mut CircuitBuilder, byte: ByteWires) -> ByteWires {
    let mut reg: Vec<WireId> = Vec::with_capacity(8 + OPS.len());
    reg.extend_from_slice(&byte);
    for (op, a, bb) in OPS {
        let kind = match op {
            SboxOp::Xor => GateKind::Xor,
            SboxOp::And => GateKind::And,
            SboxOp::Xnor => GateKind::Xnor,
        };
        let w = b.gate(kind, &[reg[a], reg[bb]]);
        reg.push(w);
    }
    OUTPUT_SLOTS.map(|s| reg[s])
}

fn xor_bytes(b: &mut CircuitBuilder, x: ByteWires, y: ByteWires) -> ByteWires {
    core::array::from_fn(|i| b.gate(GateKind::Xor, &[x[i], y[i]]))
}

fn xtime_wires(b: &mut CircuitBuilder, x: ByteWires) -> ByteWires {
    [
        x[1],
        x[2],
        x[3],
        b.gate(GateKind::Xor, &[x[4], x[0]]),
        b.gate(GateKind::Xor, &[x[5], x[0]]),
        x[6],
        b.gate(GateKind::Xor, &[x[7], x[0]]),
        x[0],
    ]
}

fn xor4(b: &mut CircuitBuilder, terms: [ByteWires; 4]) -> ByteWires {
    let t = xor_bytes(b, terms[0], terms[1]);
    let u = xor_bytes(b, t, terms[2]);
    xor_bytes(b, u, terms[3])
}

/// Builds the AES-128 encryption circuit.
pub fn build_aes128_circuit() -> Circuit {
    let mut b = CircuitBuilder::new("aes_128");
    let plaintext = b.input_group(128);
    let expanded_key = b.input_group(11 * 128);

    let byte_of = |wires: &[WireId], byte: usize| -> ByteWires {
        core::array::from_fn(|bit| wires[8 * byte + bit])
    };
    let round_key = |round: usize, byte: usize| -> ByteWires {
        core::array::from_fn(|bit| expanded_key[128 * round + 8 * byte + bit])
    };

    let mut state: [ByteWires; 16] = core::array::from_fn(|i| byte_of(&plaintext, i));

    for i in 0..16 {
        let rk = round_key(0, i);
        state[i] = xor_bytes(&mut b, state[i], rk);
    }

    for round in 1..=10 {
        state = {
            let mut sb = state;
            for byte in &mut sb {
                *byte = sbox_gates(&mut b, *byte);
            }
            sb
        };
        // ShiftRows: row r rotates left by r (byte index = row + 4 * column)
        let old = state;
        for r in 0..4 {
            for c in 0..4 {
                state[r + 4 * c] = old[r + 4 * ((c + r) % 4)];
            }
        }
        if round < 10 {
            for c in 0..4 {
                let col: [ByteWires; 4] = core::array::from_fn(|r| state[4 * c + r]);
                let double: [ByteWires; 4] =
                    core::array::from_fn(|r| xtime_wires(&mut b, col[r]));
                let triple: [ByteWires; 4] =
                    core::array::from_fn(|r| xor_bytes(&mut b, double[r], col[r]));
                state[4 * c] = xor4(&mut b, [double[0], triple[1], col[2], col[3]]);
                state[4 * c + 1] = xor4(&mut b, [col[0], double[1], triple[2], col[3]]);
                state[4 * c + 2] = xor4(&mut b, [col[0], col[1], double[2], triple[3]]);
                state[4 * c + 3] = xor4(&mut b, [triple[0], col[1], col[2], double[3]]);
            }
        }
        for i in 0..16 {
            let rk = round_key(round, i);
            state[i] = xor_bytes(&mut b, state[i], rk);
        }
    }

    let output: Vec<WireId> = state.iter().flat_map(|byte| byte.iter().copied()).collect();
    b.output_group(output);
    b.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::{Backend, PlainBackend, SecurityParams};
    use crate::bits::{bits_to_bytes, bytes_to_bits};
    use crate::eval::{decrypt_outputs, encrypt_inputs, eval_serial};
    use crate::refcircuits::aes::{key_expansion, reference_aes128, KNOWN_VECTORS};
    use crate::schedule::topo_sort;
    use rand::{Rng, SeedableRng};

    fn run_circuit(circuit: &Circuit, key: &[u8; 16], pt: &[u8; 16]) -> [u8; 16] {
        let round_keys = key_expansion(key);
        let mut key_bits = Vec::with_capacity(1408);
        for rk in &round_keys {
            key_bits.extend(bytes_to_bits(rk));
        }
        let backend = PlainBackend;
        let keys = backend.keygen(&SecurityParams::default_128()).unwrap();
        let inputs =
            encrypt_inputs(&backend, &keys, &[bytes_to_bits(pt), key_bits]).unwrap();
        let order = topo_sort(circuit).unwrap();
        let report = eval_serial(circuit, &order, &backend, &keys, &inputs).unwrap();
        let outs = decrypt_outputs(&backend, &keys, report).unwrap();
        bits_to_bytes(&outs.outputs[0]).try_into().unwrap()
    }

    #[test]
    fn circuit_is_valid_and_xor_and_xnor_only() {
        let c = build_aes128_circuit();
        assert!(c.validate().is_ok());
        assert!(c.gates().iter().all(|g| matches!(
            g.kind,
            GateKind::Xor | GateKind::And | GateKind::Xnor
        )));
        assert_eq!(c.input_bits(), 128 + 1408);
        assert_eq!(c.output_bits(), 128);
    }

    #[test]
    fn circuit_matches_oracle_on_known_vectors() {
        let c = build_aes128_circuit();
        for v in KNOWN_VECTORS {
            assert_eq!(run_circuit(&c, &v.key, &v.plaintext), v.ciphertext);
        }
    }

    #[test]
    fn circuit_matches_oracle_on_random_blocks() {
        let c = build_aes128_circuit();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let key: [u8; 16] = rng.gen();
            let pt: [u8; 16] = rng.gen();
            assert_eq!(run_circuit(&c, &key, &pt), reference_aes128(&key, &pt));
        }
    }
}
