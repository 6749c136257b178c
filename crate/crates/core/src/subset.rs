//! Bitmask subsets of the input dimensions `[n]`.
//!
//! Index `i` (0-based) is stored in bit `i`. Text forms (`Display`, task
//! files, CLI output) use the 1-based indexing of the `[n] = {1, ..., n}`
//! convention.

use std::fmt;

use crate::error::{invalid, Result};

/// Hard upper bound on the ambient dimension.
pub const MAX_DIM: usize = 32;

/// A subset `I` of the input indices `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FeatureSet {
    bits: u32,
    n: u8,
}

fn full_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl FeatureSet {
    pub fn empty(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "dimension {n} outside [1, {MAX_DIM}]");
        Self { bits: 0, n: n as u8 }
    }

    pub fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        s.bits = full_mask(n);
        s
    }

    /// Builds a set from a raw mask, rejecting bits at positions `>= n`.
    pub fn from_bits(n: usize, bits: u32) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return Err(invalid(format!("dimension {n} outside [1, {MAX_DIM}]")));
        }
        if bits & !full_mask(n) != 0 {
            return Err(invalid(format!("mask {bits:#b} has bits at or above n = {n}")));
        }
        Ok(Self { bits, n: n as u8 })
    }

    /// Builds a set from 0-based indices.
    pub fn from_indices(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut s = Self::empty(n);
        for i in indices {
            if i >= n {
                return Err(invalid(format!("index {i} out of range for n = {n}")));
            }
            s.bits |= 1 << i;
        }
        Ok(s)
    }

    /// Builds a set from 1-based indices, as written in task files.
    pub fn from_one_based(n: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut zero_based = Vec::new();
        for i in indices {
            if i == 0 || i > n {
                return Err(invalid(format!("1-based index {i} out of range for n = {n}")));
            }
            zero_based.push(i - 1);
        }
        Self::from_indices(n, zero_based)
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.bits
    }

    #[inline]
    pub fn dim(self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < self.dim() && self.bits & (1 << i) != 0
    }

    #[must_use]
    pub fn with(self, i: usize) -> Self {
        assert!(i < self.dim(), "index {i} out of range for n = {}", self.n);
        Self { bits: self.bits | (1 << i), n: self.n }
    }

    #[must_use]
    pub fn without(self, i: usize) -> Self {
        assert!(i < self.dim(), "index {i} out of range for n = {}", self.n);
        Self { bits: self.bits & !(1 << i), n: self.n }
    }

    #[must_use]
    pub fn union(self, other: Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { bits: self.bits | other.bits, n: self.n }
    }

    #[must_use]
    pub fn intersection(self, other: Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self { bits: self.bits & other.bits, n: self.n }
    }

    #[must_use]
    pub fn complement(self) -> Self {
        Self { bits: !self.bits & full_mask(self.dim()), n: self.n }
    }

    #[inline]
    pub fn is_subset(self, other: Self) -> bool {
        self.bits & !other.bits == 0
    }

    /// 0-based indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.bits;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    /// 1-based indices in ascending order.
    pub fn to_one_based(self) -> Vec<usize> {
        self.iter().map(|i| i + 1).collect()
    }

    /// All subsets of `[n]` with exactly `k` elements, in ascending mask order.
    pub fn subsets_of_size(n: usize, k: usize) -> SubsetsOfSize {
        assert!((1..=MAX_DIM).contains(&n));
        SubsetsOfSize {
            n,
            next: if k > n {
                None
            } else if k == 0 {
                Some(0)
            } else {
                Some(full_mask(k) as u64)
            },
        }
    }

    /// All `2^n` subsets, ordered by cardinality then by ascending mask.
    pub fn lattice(n: usize) -> impl Iterator<Item = FeatureSet> {
        (0..=n).flat_map(move |k| Self::subsets_of_size(n, k))
    }

    /// All subsets of `self`, in ascending mask order (including `self` and `∅`).
    pub fn subsets(self) -> impl Iterator<Item = FeatureSet> {
        let n = self.n;
        let full = self.bits;
        let mut cur = Some(0u32);
        std::iter::from_fn(move || {
            let bits = cur?;
            cur = if bits == full { None } else { Some((bits.wrapping_sub(full)) & full) };
            Some(FeatureSet { bits, n })
        })
    }
}

/// Gosper-hack iterator over fixed-cardinality masks.
pub struct SubsetsOfSize {
    n: usize,
    next: Option<u64>,
}

impl Iterator for SubsetsOfSize {
    type Item = FeatureSet;

    fn next(&mut self) -> Option<FeatureSet> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let nxt = (((r ^ cur) >> 2) / c) | r;
            (nxt < (1u64 << self.n)).then_some(nxt)
        };
        Some(FeatureSet { bits: cur as u32, n: self.n as u8 })
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FeatureSet{self}/{}", self.n)
    }
}
