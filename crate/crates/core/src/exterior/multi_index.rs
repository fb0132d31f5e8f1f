use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Strictly increasing index set in `1..=n`, stored as a bitmask
/// (bit `k-1` set for entry `k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(u32);

pub const MAX_DIM: usize = 16;

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(0)
    }

    /// Validate and build from 1-based entries.
    pub fn new(entries: &[usize], n: usize) -> Result<Self> {
        let bad = || Error::InvalidMultiIndex {
            entries: entries.to_vec(),
            n,
        };
        if n > MAX_DIM || entries.len() > n {
            return Err(bad());
        }
        let mut bits = 0u32;
        let mut prev = 0;
        for &e in entries {
            if e <= prev || e > n {
                return Err(bad());
            }
            bits |= 1 << (e - 1);
            prev = e;
        }
        Ok(MultiIndex(bits))
    }

    pub fn single(k: usize) -> Self {
        MultiIndex(1 << (k - 1))
    }

    pub fn from_bits(bits: u32) -> Self {
        MultiIndex(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, k: usize) -> bool {
        k >= 1 && self.0 & (1 << (k - 1)) != 0
    }

    pub fn entries(self) -> Vec<usize> {
        (1..=32).filter(|&k| self.contains(k)).collect()
    }

    pub fn full(n: usize) -> Self {
        MultiIndex(((1u64 << n) - 1) as u32)
    }

    pub fn complement(self, n: usize) -> Self {
        MultiIndex(Self::full(n).0 & !self.0)
    }

    pub fn union(self, other: Self) -> Self {
        MultiIndex(self.0 | other.0)
    }

    /// All index sets of size `k` in `1..=n`, lexicographic in entries.
    pub fn all(n: usize, k: usize) -> Vec<MultiIndex> {
        fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if cur.len() == k {
                let bits = cur.iter().fold(0u32, |b, &e| b | 1 << (e - 1));
                out.push(MultiIndex(bits));
                return;
            }
            for e in start..=n {
                cur.push(e);
                rec(e + 1, n, k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if k <= n {
            rec(1, n, k, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e: Vec<String> = self.entries().iter().map(|k| k.to_string()).collect();
        write!(f, "({})", e.join(","))
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.entries().serialize(s)
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<usize>::deserialize(d)?;
        MultiIndex::new(&entries, MAX_DIM).map_err(serde::de::Error::custom)
    }
}

/// Sign of sorting the concatenation `A ++ B` of two sorted sets, or 0 if
/// they intersect.
pub fn merge_sign(a: MultiIndex, b: MultiIndex) -> i32 {
    if a.0 & b.0 != 0 {
        return 0;
    }
    // count pairs (x in A, y in B) with x > y
    let mut inversions = 0u32;
    let mut bb = b.0;
    while bb != 0 {
        let y = bb.trailing_zeros();
        bb &= bb - 1;
        let above = if y >= 31 { 0 } else { a.0 >> (y + 1) };
        inversions += above.count_ones();
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the permutation taking the list `a` to the list `b`; zero if they
/// differ as sets, have different lengths, or contain repeats.
pub fn eps_sign(a: &[usize], b: &[usize]) -> i32 {
    if a.len() != b.len() {
        return 0;
    }
    // position of each entry of b inside a
    let mut perm = Vec::with_capacity(a.len());
    for (i, x) in b.iter().enumerate() {
        if b[..i].contains(x) {
            return 0;
        }
        match a.iter().position(|y| y == x) {
            Some(p) => perm.push(p),
            None => return 0,
        }
    }
    for (i, x) in a.iter().enumerate() {
        if a[..i].contains(x) {
            return 0;
        }
    }
    let mut seen = vec![false; perm.len()];
    let mut sign = 1;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}
