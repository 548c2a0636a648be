//! Software AES-128 encryption oracles.
//!
//! Two structurally different implementations back each other: a classic
//! table-driven one ([`encrypt_table`], also exported as
//! [`reference_aes128`]) and a bit-level one ([`encrypt_bitwise`]) built on
//! the straight-line S-box program from [`super::sbox`]. Tests require both
//! to agree with each other and with the pinned known-answer vectors before
//! either is trusted as an oracle.

use crate::refcircuits::sbox::sbox_bits;

pub const SBOX: [u8; 256] = [
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab,
    0x76, 0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4,
    0x72, 0xc0, 0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71,
    0xd8, 0x31, 0x15, 0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2,
    0xeb, 0x27, 0xb2, 0x75, 0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6,
    0xb3, 0x29, 0xe3, 0x2f, 0x84, 0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb,
    0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf, 0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45,
    0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8, 0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5,
    0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2, 0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44,
    0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73, 0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a,
    0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb, 0xe0, 0x32, 0x3a, 0x0a, 0x49,
    0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79, 0xe7, 0xc8, 0x37, 0x6d,
    0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08, 0xba, 0x78, 0x25,
    0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a, 0x70, 0x3e,
    0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e, 0xe1,
    0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb,
    0x16,
];

const RCON: [u8; 10] = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36];

/// A pinned (key, plaintext, ciphertext) triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AesVector {
    pub key: [u8; 16],
    pub plaintext: [u8; 16],
    pub ciphertext: [u8; 16],
}

/// Golden known-answer vectors, cross-checked against an independent AES
/// implementation before being pinned here.
pub const KNOWN_VECTORS: [AesVector; 3] = [
    AesVector {
        key: [
            0x2b, 0x7e, 0x15, 0x16, 0x28, 0xae, 0xd2, 0xa6, 0xab, 0xf7, 0x15, 0x88, 0x09, 0xcf,
            0x4f, 0x3c,
        ],
        plaintext: [
            0x32, 0x43, 0xf6, 0xa8, 0x88, 0x5a, 0x30, 0x8d, 0x31, 0x31, 0x98, 0xa2, 0xe0, 0x37,
            0x07, 0x34,
        ],
        ciphertext: [
            0x39, 0x25, 0x84, 0x1d, 0x02, 0xdc, 0x09, 0xfb, 0xdc, 0x11, 0x85, 0x97, 0x19, 0x6a,
            0x0b, 0x32,
        ],
    },
    AesVector {
        key: [
            0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08, 0x09, 0x0a, 0x0b, 0x0c, 0x0d,
            0x0e, 0x0f,
        ],
        plaintext: [
            0x00, 0x11, 0x22, 0x33, 0x44, 0x55, 0x66, 0x77, 0x88, 0x99, 0xaa, 0xbb, 0xcc, 0xdd,
            0xee, 0xff,
        ],
        ciphertext: [
            0x69, 0xc4, 0xe0, 0xd8, 0x6a, 0x7b, 0x04, 0x30, 0xd8, 0xcd, 0xb7, 0x80, 0x70, 0xb4,
            0xc5, 0x5a,
        ],
    },
    AesVector {
        key: [0; 16],
        plaintext: [0; 16],
        ciphertext: [
            0x66, 0xe9, 0x4b, 0xd4, 0xef, 0x8a, 0x2c, 0x3b, 0x88, 0x4c, 0xfa, 0x59, 0xca, 0x34,
            0x2b, 0x2e,
        ],
    },
];

/// Expands a 128-bit key into the 11 round keys.
pub fn key_expansion(key: &[u8; 16]) -> [[u8; 16]; 11] {
    let mut words = [[0u8; 4]; 44];
    for i in 0..4 {
        words[i].copy_from_slice(&key[4 * i..4 * i + 4]);
    }
    for i in 4..44 {
        let mut temp = words[i - 1];
        if i % 4 == 0 {
            temp.rotate_left(1);
            for b in &mut temp {
                *b = SBOX[*b as usize];
            }
            temp[0] ^= RCON[i / 4 - 1];
        }
        for j in 0..4 {
            words[i][j] = words[i - 4][j] ^ temp[j];
        }
    }
    core::array::from_fn(|r| {
        let mut rk = [0u8; 16];
        for w in 0..4 {
            rk[4 * w..4 * w + 4].copy_from_slice(&words[4 * r + w]);
        }
        rk
    })
}

fn xtime(b: u8) -> u8 {
    (b << 1) ^ if b & 0x80 != 0 { 0x1b } else { 0 }
}

fn mix_columns(state: &mut [u8; 16]) {
    for c in 0..4 {
        let col = [state[4 * c], state[4 * c + 1], state[4 * c + 2], state[4 * c + 3]];
        state[4 * c] = xtime(col[0]) ^ xtime(col[1]) ^ col[1] ^ col[2] ^ col[3];
        state[4 * c + 1] = col[0] ^ xtime(col[1]) ^ xtime(col[2]) ^ col[2] ^ col[3];
        state[4 * c + 2] = col[0] ^ col[1] ^ xtime(col[2]) ^ xtime(col[3]) ^ col[3];
        state[4 * c + 3] = xtime(col[0]) ^ col[0] ^ col[1] ^ col[2] ^ xtime(col[3]);
    }
}

fn shift_rows(state: &mut [u8; 16]) {
    let old = *state;
    for r in 0..4 {
        for c in 0..4 {
            state[r + 4 * c] = old[r + 4 * ((c + r) % 4)];
        }
    }
}

/// Table-driven AES-128 encryption of one block.
pub fn encrypt_table(key: &[u8; 16], plaintext: &[u8; 16]) -> [u8; 16] {
    let round_keys = key_expansion(key);
    let mut state = *plaintext;
    for (s, k) in state.iter_mut().zip(&round_keys[0]) {
        *s ^= k;
    }
    for round in 1..=10 {
        for s in &mut state {
            *s = SBOX[*s as usize];
        }
        shift_rows(&mut state);
        if round < 10 {
            mix_columns(&mut state);
        }
        for (s, k) in state.iter_mut().zip(&round_keys[round]) {
            *s ^= k;
        }
    }
    state
}

/// The reference oracle used by tests and benchmarks. Table-driven; its twin
/// [`encrypt_bitwise`] plus the pinned vectors keep it honest.
pub fn reference_aes128(key: &[u8; 16], plaintext: &[u8; 16]) -> [u8; 16] {
    encrypt_table(key, plaintext)
}

// Bit-level implementation: bytes as [bool; 8], most significant bit first.

type BitByte = [bool; 8];

fn to_bits(byte: u8) -> BitByte {
    core::array::from_fn(|i| byte >> (7 - i) & 1 == 1)
}

fn from_bits(bits: BitByte) -> u8 {
    bits.iter().fold(0, |acc, &b| acc << 1 | u8::from(b))
}

fn xor_bits(a: BitByte, b: BitByte) -> BitByte {
    core::array::from_fn(|i| a[i] ^ b[i])
}

fn xtime_bits(b: BitByte) -> BitByte {
    // shift left, fold the dropped msb back in at 0x1b's positions
    [b[1], b[2], b[3], b[4] ^ b[0], b[5] ^ b[0], b[6], b[7] ^ b[0], b[0]]
}

fn bitwise_key_expansion(key: &[u8; 16]) -> [[BitByte; 16]; 11] {
    let mut words: Vec<[BitByte; 4]> = Vec::with_capacity(44);
    for i in 0..4 {
        words.push(core::array::from_fn(|j| to_bits(key[4 * i + j])));
    }
    for i in 4..44 {
        let mut temp = words[i - 1];
        if i % 4 == 0 {
            temp.rotate_left(1);
            temp = temp.map(sbox_bits);
            temp[0] = xor_bits(temp[0], to_bits(RCON[i / 4 - 1]));
        }
        let prev = words[i - 4];
        words.push(core::array::from_fn(|j| xor_bits(prev[j], temp[j])));
    }
    core::array::from_fn(|r| {
        core::array::from_fn(|i| words[4 * r + i / 4][i % 4])
    })
}

/// Bit-level AES-128 encryption of one block; structurally independent of
/// [`encrypt_table`].
pub fn encrypt_bitwise(key: &[u8; 16], plaintext: &[u8; 16]) -> [u8; 16] {
    let round_keys = bitwise_key_expansion(key);
    let mut state: [BitByte; 16] = core::array::from_fn(|i| to_bits(plaintext[i]));
    let ark = |state: &mut [BitByte; 16], rk: &[BitByte; 16]| {
        for (s, k) in state.iter_mut().zip(rk) {
            *s = xor_bits(*s, *k);
        }
    };
    ark(&mut state, &round_keys[0]);
    for round in 1..=10 {
        state = state.map(sbox_bits);
        let old = state;
        for r in 0..4 {
            for c in 0..4 {
                state[r + 4 * c] = old[r + 4 * ((c + r) % 4)];
            }
        }
        if round < 10 {
            for c in 0..4 {
                let col: [BitByte; 4] = core::array::from_fn(|r| state[4 * c + r]);
                state[4 * c] = [
                    xtime_bits(col[0]),
                    xor_bits(xtime_bits(col[1]), col[1]),
                    col[2],
                    col[3],
                ]
                .into_iter()
                .reduce(xor_bits)
                .unwrap();
                state[4 * c + 1] = [
                    col[0],
                    xtime_bits(col[1]),
                    xor_bits(xtime_bits(col[2]), col[2]),
                    col[3],
                ]
                .into_iter()
                .reduce(xor_bits)
                .unwrap();
                state[4 * c + 2] = [
                    col[0],
                    col[1],
                    xtime_bits(col[2]),
                    xor_bits(xtime_bits(col[3]), col[3]),
                ]
                .into_iter()
                .reduce(xor_bits)
                .unwrap();
                state[4 * c + 3] = [
                    xor_bits(xtime_bits(col[0]), col[0]),
                    col[1],
                    col[2],
                    xtime_bits(col[3]),
                ]
                .into_iter()
                .reduce(xor_bits)
                .unwrap();
            }
        }
        ark(&mut state, &round_keys[round]);
    }
    core::array::from_fn(|i| from_bits(state[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn known_vectors_pass_on_both_implementations() {
        for v in KNOWN_VECTORS {
            assert_eq!(encrypt_table(&v.key, &v.plaintext), v.ciphertext);
            assert_eq!(encrypt_bitwise(&v.key, &v.plaintext), v.ciphertext);
        }
    }

    #[test]
    fn implementations_agree_on_random_blocks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xae5);
        for _ in 0..1000 {
            let key: [u8; 16] = rng.gen();
            let pt: [u8; 16] = rng.gen();
            assert_eq!(encrypt_table(&key, &pt), encrypt_bitwise(&key, &pt));
        }
    }

    #[test]
    fn expanded_key_starts_with_the_key() {
        let v = KNOWN_VECTORS[0];
        let rks = key_expansion(&v.key);
        assert_eq!(rks[0], v.key);
        // FIPS-197 appendix A.1 final round key for this key
        assert_eq!(
            rks[10],
            [
                0xd0, 0x14, 0xf9, 0xa8, 0xc9, 0xee, 0x25, 0x89, 0xe1, 0x3f, 0x0c, 0xc8, 0xb6,
                0x63, 0x0c, 0xa6
            ]
        );
    }
}
