//! The AES byte substitution as a 128-operation straight-line program
//! (34 AND, 90 XOR, 4 XNOR, depth 16), the forward S-box circuit of Boyar
//! and Peralta. Preferred over a table lookup wherever the S-box has to be
//! expressed in gates.
//!
//! Operands index a register file: slots 0..8 hold the input bits (slot 0 is
//! the byte's most significant bit) and slot `8 + i` holds the result of
//! `OPS[i]`. The output byte is read from [`OUTPUT_SLOTS`], most significant
//! bit first.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SboxOp {
    Xor,
    And,
    Xnor,
}

pub const REGISTERS: usize = 8 + OPS.len();

pub const OUTPUT_SLOTS: [usize; 8] = [128, 129, 130, 131, 132, 133, 134, 135];

pub const OPS: [(SboxOp, usize, usize); 128] = [
    (SboxOp::Xor, 0, 3),
    (SboxOp::Xor, 0, 5),
    (SboxOp::Xor, 0, 6),
    (SboxOp::Xor, 3, 5),
    (SboxOp::Xor, 4, 6),
    (SboxOp::Xor, 8, 12),
    (SboxOp::Xor, 1, 2),
    (SboxOp::Xor, 7, 13),
    (SboxOp::Xor, 7, 14),
    (SboxOp::Xor, 13, 14),
    (SboxOp::Xor, 1, 5),
    (SboxOp::Xor, 2, 5),
    (SboxOp::Xor, 10, 11),
    (SboxOp::Xor, 13, 18),
    (SboxOp::Xor, 12, 18),
    (SboxOp::Xor, 12, 19),
    (SboxOp::Xor, 16, 23),
    (SboxOp::Xor, 3, 7),
    (SboxOp::Xor, 14, 25),
    (SboxOp::Xor, 8, 26),
    (SboxOp::Xor, 6, 7),
    (SboxOp::Xor, 14, 28),
    (SboxOp::Xor, 9, 29),
    (SboxOp::Xor, 9, 17),
    (SboxOp::Xor, 27, 24),
    (SboxOp::Xor, 10, 23),
    (SboxOp::Xor, 8, 19),
    (SboxOp::And, 20, 13),
    (SboxOp::And, 30, 15),
    (SboxOp::Xor, 21, 35),
    (SboxOp::And, 26, 7),
    (SboxOp::Xor, 38, 35),
    (SboxOp::And, 10, 23),
    (SboxOp::And, 29, 16),
    (SboxOp::Xor, 33, 40),
    (SboxOp::And, 27, 24),
    (SboxOp::Xor, 43, 40),
    (SboxOp::And, 8, 22),
    (SboxOp::And, 11, 34),
    (SboxOp::Xor, 46, 45),
    (SboxOp::And, 9, 17),
    (SboxOp::Xor, 48, 45),
    (SboxOp::Xor, 37, 36),
    (SboxOp::Xor, 39, 31),
    (SboxOp::Xor, 42, 41),
    (SboxOp::Xor, 44, 49),
    (SboxOp::Xor, 50, 47),
    (SboxOp::Xor, 51, 49),
    (SboxOp::Xor, 52, 47),
    (SboxOp::Xor, 53, 32),
    (SboxOp::Xor, 56, 57),
    (SboxOp::And, 56, 54),
    (SboxOp::Xor, 55, 59),
    (SboxOp::Xor, 54, 55),
    (SboxOp::Xor, 57, 59),
    (SboxOp::And, 62, 61),
    (SboxOp::And, 60, 58),
    (SboxOp::And, 54, 57),
    (SboxOp::And, 61, 65),
    (SboxOp::Xor, 61, 59),
    (SboxOp::And, 55, 56),
    (SboxOp::And, 58, 68),
    (SboxOp::Xor, 58, 59),
    (SboxOp::Xor, 55, 63),
    (SboxOp::Xor, 66, 67),
    (SboxOp::Xor, 57, 64),
    (SboxOp::Xor, 69, 70),
    (SboxOp::Xor, 72, 74),
    (SboxOp::Xor, 71, 73),
    (SboxOp::Xor, 71, 72),
    (SboxOp::Xor, 73, 74),
    (SboxOp::Xor, 76, 75),
    (SboxOp::And, 78, 13),
    (SboxOp::And, 74, 15),
    (SboxOp::And, 73, 7),
    (SboxOp::And, 77, 23),
    (SboxOp::And, 72, 16),
    (SboxOp::And, 71, 24),
    (SboxOp::And, 76, 22),
    (SboxOp::And, 79, 34),
    (SboxOp::And, 75, 17),
    (SboxOp::And, 78, 20),
    (SboxOp::And, 74, 30),
    (SboxOp::And, 73, 26),
    (SboxOp::And, 77, 10),
    (SboxOp::And, 72, 29),
    (SboxOp::And, 71, 27),
    (SboxOp::And, 76, 8),
    (SboxOp::And, 79, 11),
    (SboxOp::And, 75, 9),
    (SboxOp::Xor, 95, 96),
    (SboxOp::Xor, 84, 90),
    (SboxOp::Xor, 80, 82),
    (SboxOp::Xor, 81, 89),
    (SboxOp::Xor, 88, 92),
    (SboxOp::Xor, 83, 95),
    (SboxOp::Xor, 96, 103),
    (SboxOp::Xor, 80, 101),
    (SboxOp::Xor, 85, 93),
    (SboxOp::Xor, 86, 87),
    (SboxOp::Xor, 87, 102),
    (SboxOp::Xor, 94, 100),
    (SboxOp::Xor, 82, 85),
    (SboxOp::Xor, 84, 98),
    (SboxOp::Xor, 86, 95),
    (SboxOp::Xor, 89, 99),
    (SboxOp::Xor, 90, 98),
    (SboxOp::Xor, 91, 99),
    (SboxOp::Xor, 92, 106),
    (SboxOp::Xor, 97, 102),
    (SboxOp::Xor, 98, 99),
    (SboxOp::Xor, 99, 105),
    (SboxOp::Xor, 101, 110),
    (SboxOp::Xor, 116, 100),
    (SboxOp::Xor, 113, 107),
    (SboxOp::Xor, 104, 108),
    (SboxOp::Xor, 105, 107),
    (SboxOp::Xor, 106, 108),
    (SboxOp::Xor, 109, 112),
    (SboxOp::Xor, 109, 115),
    (SboxOp::Xor, 104, 122),
    (SboxOp::Xnor, 114, 124),
    (SboxOp::Xnor, 117, 126),
    (SboxOp::Xor, 104, 119),
    (SboxOp::Xor, 118, 120),
    (SboxOp::Xor, 123, 127),
    (SboxOp::Xnor, 111, 125),
    (SboxOp::Xnor, 104, 121),
];

/// Runs the straight-line program on plain bits. `byte` bits are taken most
/// significant first.
pub fn sbox_bits(byte: [bool; 8]) -> [bool; 8] {
    let mut reg = [false; REGISTERS];
    reg[..8].copy_from_slice(&byte);
    for (i, (op, a, b)) in OPS.iter().enumerate() {
        reg[8 + i] = match op {
            SboxOp::Xor => reg[*a] ^ reg[*b],
            SboxOp::And => reg[*a] & reg[*b],
            SboxOp::Xnor => !(reg[*a] ^ reg[*b]),
        };
    }
    OUTPUT_SLOTS.map(|s| reg[s])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::refcircuits::aes::SBOX;

    #[test]
    fn matches_the_table_exhaustively() {
        for value in 0..=255u8 {
            let bits = core::array::from_fn(|i| value >> (7 - i) & 1 == 1);
            let out = sbox_bits(bits);
            let folded = out.iter().fold(0u8, |acc, &b| acc << 1 | u8::from(b));
            assert_eq!(folded, SBOX[value as usize], "S-box({value:#04x})");
        }
    }
}
