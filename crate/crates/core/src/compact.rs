//! Compact edge dictionary: insert + membership over a pair-encoded universe
//! with exact bit accounting.
//!
//! The structure is a bucketed quotienting hash table. A key `k` in the
//! universe `0..u` lands in bucket `k % b` and only its quotient `k / b` is
//! stored, bit-packed at `qbits = ceil(log2(ceil(u / b)))` bits per entry.
//! Bucket index plus quotient reconstruct the key exactly, so membership has
//! no false positives and no false negatives.
//!
//! With `b = ceil(s / 8)` buckets the accounted cost is
//!
//! ```text
//! bits_used = sum_i len_i * qbits + 16 * b
//! ```
//!
//! (16 bits per bucket for its length counter). Since
//! `qbits <= log2(u/s) + 4` and the length counters amortize to 2 bits per
//! slot, `bits_used <= s * log2(u/s) + 6s + 16` for any fill `<= s`:
//! the `c * s * log2(u/s) + O(s)` shape with `c = 1`.

use crate::error::{Error, Result};

const BUCKET_TARGET: usize = 8;
const LEN_COUNTER_BITS: u64 = 16;

#[derive(Debug, Clone)]
pub struct CompactEdgeDict {
    universe: u64,
    capacity: usize,
    buckets: usize,
    qbits: u32,
    /// Bit-packed quotients, one blob per bucket.
    blobs: Vec<Vec<u64>>,
    lens: Vec<u32>,
    len: usize,
}

impl CompactEdgeDict {
    /// Dictionary over `0..universe` holding at most `capacity` keys.
    pub fn new(universe: u64, capacity: usize) -> Self {
        let buckets = capacity.div_ceil(BUCKET_TARGET).max(1);
        let quotient_range = universe.div_ceil(buckets as u64).max(1);
        let qbits = if quotient_range <= 1 {
            1
        } else {
            64 - (quotient_range - 1).leading_zeros()
        };
        CompactEdgeDict {
            universe,
            capacity,
            buckets,
            qbits: qbits.max(1),
            blobs: vec![Vec::new(); buckets],
            lens: vec![0; buckets],
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    /// Exact storage accounting in bits for the documented encoding.
    pub fn bits_used(&self) -> u64 {
        self.len as u64 * self.qbits as u64 + LEN_COUNTER_BITS * self.buckets as u64
    }

    /// Upper bound the accounting must respect: `s*log2(u/s) + 6s + 16`.
    pub fn bits_bound(&self) -> f64 {
        let s = self.capacity.max(1) as f64;
        let ratio = (self.universe as f64 / s).max(1.0);
        s * ratio.log2() + 6.0 * s + 16.0
    }

    #[inline]
    fn read(&self, bucket: usize, slot: usize) -> u64 {
        let qbits = self.qbits as u64;
        let bit = slot as u64 * qbits;
        let word = (bit / 64) as usize;
        let off = bit % 64;
        let blob = &self.blobs[bucket];
        let lo = blob[word] >> off;
        if off + qbits <= 64 {
            lo & mask(qbits)
        } else {
            let hi = blob[word + 1] << (64 - off);
            (lo | hi) & mask(qbits)
        }
    }

    fn push(&mut self, bucket: usize, value: u64) {
        let qbits = self.qbits as u64;
        let slot = self.lens[bucket] as u64;
        let bit = slot * qbits;
        let word = (bit / 64) as usize;
        let off = bit % 64;
        let blob = &mut self.blobs[bucket];
        while blob.len() <= ((bit + qbits - 1) / 64) as usize {
            blob.push(0);
        }
        blob[word] |= (value & mask(qbits)) << off;
        if off + qbits > 64 {
            blob[word + 1] |= (value & mask(qbits)) >> (64 - off);
        }
        self.lens[bucket] += 1;
    }

    pub fn member(&self, key: u64) -> bool {
        debug_assert!(key < self.universe);
        let bucket = (key % self.buckets as u64) as usize;
        let quotient = key / self.buckets as u64;
        (0..self.lens[bucket] as usize).any(|slot| self.read(bucket, slot) == quotient)
    }

    /// Insert a key. Returns `true` if newly inserted. Errors once the
    /// capacity would be exceeded.
    pub fn insert(&mut self, key: u64) -> Result<bool> {
        debug_assert!(key < self.universe);
        if self.member(key) {
            return Ok(false);
        }
        if self.len >= self.capacity {
            return Err(Error::DictCapacityExceeded { capacity: self.capacity });
        }
        let bucket = (key % self.buckets as u64) as usize;
        let quotient = key / self.buckets as u64;
        self.push(bucket, quotient);
        self.len += 1;
        Ok(true)
    }

    /// Stored keys in ascending order.
    pub fn keys(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len);
        for bucket in 0..self.buckets {
            for slot in 0..self.lens[bucket] as usize {
                out.push(self.read(bucket, slot) * self.buckets as u64 + bucket as u64);
            }
        }
        out.sort_unstable();
        out
    }

    pub fn clear(&mut self) {
        for blob in &mut self.blobs {
            blob.clear();
        }
        self.lens.fill(0);
        self.len = 0;
    }
}

#[inline]
fn mask(bits: u64) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashSet;

    #[test]
    fn randomized_roundtrip_100k_ops() {
        // no false negatives, no positives for never-inserted keys
        let universe = crate::graph::pair_universe(512);
        let mut dict = CompactEdgeDict::new(universe, 60_000);
        let mut reference = HashSet::new();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100_000 {
            let key = rng.random_range(0..universe);
            if rng.random::<bool>() && reference.len() < dict.capacity() {
                dict.insert(key).unwrap();
                reference.insert(key);
            } else {
                assert_eq!(dict.member(key), reference.contains(&key));
            }
        }
        for &key in reference.iter().take(5000) {
            assert!(dict.member(key));
        }
        assert_eq!(dict.len(), reference.len());
        let mut keys = reference.into_iter().collect::<Vec<_>>();
        keys.sort_unstable();
        assert_eq!(dict.keys(), keys);
    }

    #[test]
    fn capacity_is_enforced() {
        let mut dict = CompactEdgeDict::new(100, 3);
        for key in [1u64, 7, 13] {
            dict.insert(key).unwrap();
        }
        assert!(!dict.insert(1).unwrap(), "duplicate insert is a no-op");
        assert!(matches!(
            dict.insert(99),
            Err(Error::DictCapacityExceeded { capacity: 3 })
        ));
    }

    #[test]
    fn bits_within_documented_bound() {
        for (universe, capacity) in [(1_000u64, 100usize), (130_816, 19_661), (32_640, 32_640), (45, 45)] {
            let mut dict = CompactEdgeDict::new(universe, capacity);
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            while dict.len() < capacity {
                let _ = dict.insert(rng.random_range(0..universe));
            }
            assert!(
                (dict.bits_used() as f64) <= dict.bits_bound(),
                "u={universe} s={capacity}: {} > {}",
                dict.bits_used(),
                dict.bits_bound()
            );
        }
    }

    #[test]
    fn clear_resets_accounting() {
        let mut dict = CompactEdgeDict::new(1000, 64);
        for key in 0..64 {
            dict.insert(key * 15).unwrap();
        }
        let full = dict.bits_used();
        dict.clear();
        assert!(dict.is_empty());
        assert!(dict.bits_used() < full);
        assert!(!dict.member(15));
        dict.insert(15).unwrap();
        assert!(dict.member(15));
    }
}
