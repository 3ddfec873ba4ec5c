//! Self-delimiting code for positive integers.
//!
//! An integer `z ≥ 1` is sent in two phases:
//!
//! 1. `y = ⌈log2 z⌉` in base 3, most significant digit first, each digit as a
//!    two-bit letter (`00`, `01`, `10`), followed by the terminator `11`.
//!    `y = 0` is sent as the single digit `00`.
//! 2. For `y ≥ 1`, the offset `z − 2^{y−1} − 1` in exactly `y − 1` bits,
//!    most significant bit first. Since `2^{y−1} < z ≤ 2^y` the offset fits.
//!
//! The receiver learns `y` in phase 1 and so knows where phase 2 ends, which
//! lets encodings be concatenated. Encoding `z` costs at most
//! `log2 z + 1.262·log2(log2 z) + 6.3` bits for `z ≥ 2`.
//!
//! Bit sequences serialize to bytes MSB-first with zero padding at the tail.

use crate::error::{domain, Error, Result};

/// Append-only bit buffer.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        for i in (0..width).rev() {
            self.bits.push(value >> i & 1 == 1);
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        bits_to_bytes(&self.bits)
    }
}

/// Cursor over a bit slice.
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        let b = *self.bits.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    /// Reads `width ≤ 64` bits as an unsigned integer, MSB first. Consumes
    /// nothing if fewer than `width` bits remain.
    pub fn read_bits(&mut self, width: u32) -> Option<u64> {
        debug_assert!(width <= 64);
        if self.remaining() < width as usize {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = v << 1 | self.read_bit()? as u64;
        }
        Some(v)
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub fn rest(&self) -> &'a [bool] {
        &self.bits[self.pos..]
    }
}

const TERMINATOR: u64 = 0b11;

/// Writes the encoding of `z` to `w`.
pub fn encode_into(w: &mut BitWriter, z: u64) -> Result<()> {
    if z < 1 {
        return Err(domain("only positive integers can be encoded"));
    }
    let y = ceil_log2(z);
    let mut digits = Vec::new();
    let mut rest = y;
    loop {
        digits.push(rest % 3);
        rest /= 3;
        if rest == 0 {
            break;
        }
    }
    for &d in digits.iter().rev() {
        w.push_bits(d as u64, 2);
    }
    w.push_bits(TERMINATOR, 2);
    if y >= 1 {
        let offset = z - (1u64 << (y - 1)) - 1;
        w.push_bits(offset, y - 1);
    }
    Ok(())
}

pub fn encode_integer(z: u64) -> Result<Vec<bool>> {
    let mut w = BitWriter::new();
    encode_into(&mut w, z)?;
    Ok(w.into_bits())
}

/// Reads one encoded integer from `r`.
pub fn decode_from(r: &mut BitReader<'_>) -> Result<u64> {
    let truncated = || Error::Malformed("stream ends inside an encoding".into());
    let mut y: u32 = 0;
    let mut digits = 0;
    loop {
        let letter = r.read_bits(2).ok_or_else(truncated)?;
        if letter == TERMINATOR {
            break;
        }
        if digits > 0 && y == 0 {
            return Err(Error::Malformed("leading zero digit in length prefix".into()));
        }
        y = y * 3 + letter as u32;
        digits += 1;
        if y > 64 {
            return Err(Error::Malformed(format!("length prefix {y} exceeds 64 bits")));
        }
    }
    if digits == 0 {
        return Err(Error::Malformed("terminator before any length digit".into()));
    }
    if y == 0 {
        return Ok(1);
    }
    let offset = r.read_bits(y - 1).ok_or_else(truncated)?;
    (1u64 << (y - 1))
        .checked_add(1)
        .and_then(|base| base.checked_add(offset))
        .ok_or_else(|| Error::Malformed("decoded value exceeds 64 bits".into()))
}

/// Decodes the integer at the start of `bits`; returns it with the number of
/// bits consumed.
pub fn decode_integer(bits: &[bool]) -> Result<(u64, usize)> {
    let mut r = BitReader::new(bits);
    let z = decode_from(&mut r)?;
    Ok((z, r.position()))
}

/// Decodes back-to-back encodings until only zero padding remains. An
/// all-zero tail can never start a valid encoding, so padding is unambiguous.
pub fn decode_stream(bits: &[bool]) -> Result<Vec<u64>> {
    let mut r = BitReader::new(bits);
    let mut out = Vec::new();
    while r.rest().iter().any(|&b| b) {
        out.push(decode_from(&mut r)?);
    }
    Ok(out)
}

pub fn bits_to_bytes(bits: &[bool]) -> Vec<u8> {
    bits.chunks(8)
        .map(|chunk| chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b as u8) << (7 - i)))
        .collect()
}

pub fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    bytes.iter().flat_map(|&byte| (0..8).rev().map(move |i| byte >> i & 1 == 1)).collect()
}

/// Renders bits as a `0`/`1` string.
pub fn bit_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Parses a `0`/`1` string, ignoring ASCII whitespace and `_`.
pub fn parse_bit_string(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .filter(|c| !c.is_ascii_whitespace() && *c != '_')
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Malformed(format!("invalid bit character {other:?}"))),
        })
        .collect()
}

/// The bit-length guarantee `log2 z + 1.262·log2(log2 z) + 6.3` for `z ≥ 2`.
pub fn length_bound(z: u64) -> f64 {
    let l = (z as f64).log2();
    l + 1.262 * l.log2() + 6.3
}

fn ceil_log2(z: u64) -> u32 {
    crate::problem::ceil_log2(z)
}
