use std::fmt;

use crate::error::{Error, Result};

/// Dense binary vector over GF(2).
///
/// Bits are packed LSB-first into 64-bit words: index `i` lives in bit
/// `i % 64` of word `i / 64`. Bits past `len` are always zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.clear_tail();
        v
    }

    /// Unit vector `e_index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    /// Builds a vector from 0/1 values. Any nonzero byte counts as a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Indicator vector of `indices`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, indices: I) -> Result<Self> {
        let mut v = Self::zeros(len);
        for i in indices {
            if i >= len {
                return Err(Error::IndexOutOfRange { index: i, len });
            }
            v.set(i, true);
        }
        Ok(v)
    }

    /// Low `len` bits of `word`, bit `i` becoming index `i`. Requires `len <= 64`.
    pub fn from_u64(word: u64, len: usize) -> Self {
        assert!(len <= 64, "from_u64 supports at most 64 bits");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = word;
            v.clear_tail();
        }
        v
    }

    /// Parses a string of '0'/'1' characters, first character is index 0.
    pub fn parse_bits(s: &str) -> Result<Self> {
        let bits: Vec<u8> = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(Self::from_bits(&bits))
    }

    /// First word of the vector. Meaningful for `len <= 64`.
    pub fn as_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        self.get(i) as u8
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Sorted indices of the nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.weight());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                out.push(wi * 64 + b);
                w &= w - 1;
            }
        }
        out
    }

    /// Smallest index holding a one.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(wi, &w)| wi * 64 + w.trailing_zeros() as usize)
    }

    /// Largest index holding a one.
    pub fn last_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(wi, &w)| wi * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        assert_eq!(self.len, other.len, "length mismatch in and");
        BitVec {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
            len: self.len,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(|b| b as u8).collect()
    }

    /// Coordinates at `indices`, in the given order.
    pub fn gather(&self, indices: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            if self.get(i) {
                out.set(k, true);
            }
        }
        out
    }

    /// Writes `values[k]` to coordinate `indices[k]`.
    pub fn scatter(&mut self, indices: &[usize], values: &BitVec) {
        assert_eq!(indices.len(), values.len(), "scatter length mismatch");
        for (k, &i) in indices.iter().enumerate() {
            self.set(i, values.get(k));
        }
    }

    /// Contiguous slice `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        let mut out = BitVec::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.support() {
            out.set(i, true);
        }
        for i in other.support() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Overwrites `self` with `other` without reallocating. Lengths must match.
    pub fn copy_from(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in copy_from");
        self.words.copy_from_slice(&other.words);
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    fn clear_tail(&mut self) {
        let rem = self.len & 63;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_weight() {
        let mut v = BitVec::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.weight(), 3);
        assert_eq!(v.support(), vec![0, 64, 129]);
        assert_eq!(v.first_one(), Some(0));
        assert_eq!(v.last_one(), Some(129));
        v.flip(64);
        assert!(!v.get(64));
        assert_eq!(v.weight(), 2);
    }

    #[test]
    fn ones_respects_length() {
        let v = BitVec::ones(70);
        assert_eq!(v.weight(), 70);
        assert_eq!(BitVec::ones(64).weight(), 64);
    }

    #[test]
    fn parse_and_display() {
        let v = BitVec::parse_bits("1011").unwrap();
        assert_eq!(v.support(), vec![0, 2, 3]);
        assert_eq!(v.to_string(), "1011");
        assert!(BitVec::parse_bits("10x1").is_err());
    }

    #[test]
    fn from_indices_rejects_out_of_range() {
        assert!(matches!(
            BitVec::from_indices(4, [1, 4]),
            Err(Error::IndexOutOfRange { index: 4, len: 4 })
        ));
    }

    #[test]
    fn gather_scatter() {
        let v = BitVec::parse_bits("01101").unwrap();
        let g = v.gather(&[4, 1, 0]);
        assert_eq!(g.to_string(), "110");
        let mut w = BitVec::zeros(5);
        w.scatter(&[4, 1, 0], &g);
        assert_eq!(w.to_string(), "01001");
    }
}
