//! Bit-vector helpers shared by the evaluator, the reference circuits and
//! the CLI. Bit slices are MSB-first throughout: index 0 is the most
//! significant bit, matching how hex literals read left to right.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BitsError {
    #[error("invalid hex digit `{0}`")]
    InvalidDigit(char),
    #[error("hex string encodes {got} bits but {expected} were expected")]
    WrongLength { expected: usize, got: usize },
}

/// MSB-first bits to lowercase hex, left-padded to whole digits
/// (9 bits -> 3 hex chars).
pub fn bits_to_hex(bits: &[bool]) -> String {
    if bits.is_empty() {
        return String::new();
    }
    let digits = bits.len().div_ceil(4);
    let pad = digits * 4 - bits.len();
    let mut out = String::with_capacity(digits);
    let mut nibble = 0u8;
    let mut filled = pad;
    for &bit in bits {
        nibble = nibble << 1 | u8::from(bit);
        filled += 1;
        if filled == 4 {
            out.push(char::from_digit(nibble as u32, 16).unwrap());
            nibble = 0;
            filled = 0;
        }
    }
    out
}

/// Parses a hex string into exactly `expected_bits` MSB-first bits. The
/// string must be exactly `ceil(expected_bits / 4)` digits and any padding
/// bits in the leading digit must be zero.
pub fn hex_to_bits(hex: &str, expected_bits: usize) -> Result<Vec<bool>, BitsError> {
    let digits = expected_bits.div_ceil(4);
    let chars: Vec<char> = hex.trim().chars().collect();
    if chars.len() != digits {
        return Err(BitsError::WrongLength {
            expected: expected_bits,
            got: chars.len() * 4,
        });
    }
    let mut all = Vec::with_capacity(digits * 4);
    for c in chars {
        let v = c.to_digit(16).ok_or(BitsError::InvalidDigit(c))? as u8;
        for shift in (0..4).rev() {
            all.push(v >> shift & 1 == 1);
        }
    }
    let pad = digits * 4 - expected_bits;
    if all[..pad].iter().any(|&b| b) {
        return Err(BitsError::WrongLength {
            expected: expected_bits,
            got: digits * 4,
        });
    }
    Ok(all.split_off(pad))
}

/// The low `n` bits of `value`, MSB-first.
pub fn uint_to_bits(value: u64, n: usize) -> Vec<bool> {
    (0..n).rev().map(|i| value >> i & 1 == 1).collect()
}

/// MSB-first bits to an integer. Panics if more than 64 bits.
pub fn bits_to_uint(bits: &[bool]) -> u64 {
    assert!(bits.len() <= 64);
    bits.iter().fold(0, |acc, &b| acc << 1 | u64::from(b))
}

/// Bytes to MSB-first bits (byte 0 first, high bit first).
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |i| byte >> i & 1 == 1))
        .collect()
}

/// MSB-first bits to bytes. Panics unless the length is a multiple of 8.
pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    assert_eq!(bits.len() % 8, 0);
    bits.chunks(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| acc << 1 | u8::from(b)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let bits = uint_to_bits(0x1a5, 9);
        assert_eq!(bits_to_hex(&bits), "1a5");
        assert_eq!(hex_to_bits("1a5", 9).unwrap(), bits);
        assert_eq!(bits_to_uint(&bits), 0x1a5);
    }

    #[test]
    fn nine_bit_groups_pad_left() {
        // 9-bit value 8 prints as "008"
        assert_eq!(bits_to_hex(&uint_to_bits(8, 9)), "008");
        assert_eq!(hex_to_bits("008", 9).unwrap(), uint_to_bits(8, 9));
    }

    #[test]
    fn bad_hex_is_rejected() {
        assert_eq!(hex_to_bits("0g", 8), Err(BitsError::InvalidDigit('g')));
        assert!(matches!(hex_to_bits("ff", 9), Err(BitsError::WrongLength { .. })));
        // padding bit set: 9 bits need 3 digits with top 3 bits clear
        assert!(hex_to_bits("fff", 9).is_err());
    }

    #[test]
    fn byte_round_trip() {
        let bytes = [0xde, 0xad, 0x01];
        assert_eq!(bits_to_bytes(&bytes_to_bits(&bytes)), bytes);
    }
}
