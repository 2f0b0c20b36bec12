//! Packed bit stream, most-significant-bit-first within each byte.

use crate::error::Error;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitStream {
    bytes: Vec<u8>,
    len: usize,
}

impl BitStream {
    pub fn new() -> Self {
        BitStream::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitStream {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Reinterprets packed bytes as a stream of `len` bits; any padding
    /// bits beyond `len` in the final byte are ignored.
    pub fn from_bytes(bytes: Vec<u8>, len: usize) -> Result<Self, Error> {
        if len > bytes.len() * 8 {
            return Err(Error::Validation(format!(
                "bit length {len} exceeds {} available bits",
                bytes.len() * 8
            )));
        }
        Ok(BitStream { bytes, len })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.bytes[i / 8] >> (7 - (i % 8))) & 1 == 1
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 1 << (7 - (self.len % 8));
        }
        self.len += 1;
    }

    /// Appends the low `count` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        for k in (0..count).rev() {
            self.push((value >> k) & 1 == 1);
        }
    }

    /// Number of set bits in [start, start+len), using byte-wise popcount.
    pub fn count_ones(&self, start: usize, len: usize) -> usize {
        assert!(start + len <= self.len, "bit range out of bounds");
        if len == 0 {
            return 0;
        }
        let end = start + len;
        let first_byte = start / 8;
        let last_byte = (end - 1) / 8;
        if first_byte == last_byte {
            let mask = (0xFFu8 >> (start % 8)) & (0xFFu8 << (7 - ((end - 1) % 8)));
            return (self.bytes[first_byte] & mask).count_ones() as usize;
        }
        let head = self.bytes[first_byte] & (0xFF >> (start % 8));
        let tail = self.bytes[last_byte] & (0xFFu8 << (7 - ((end - 1) % 8)));
        let mut total = head.count_ones() as usize + tail.count_ones() as usize;
        for &b in &self.bytes[first_byte + 1..last_byte] {
            total += b.count_ones() as usize;
        }
        total
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    /// Packed bytes; bits past `len()` in the final byte are zero padding.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }

    /// '0'/'1' character rendering for the textual export flag.
    pub fn to_text(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }
}
