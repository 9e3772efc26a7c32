//! Counter-mode SHA-256 byte stream used wherever the pipeline needs
//! reproducible pseudo-randomness (secret sampling, record permutations).
//!
//! Stream block i is SHA-256(SHA-256(seed) || i_be64); records produced on
//! any implementation of this construction are interoperable.

use sha2::{Digest, Sha256};

pub struct Drbg {
    key: [u8; 32],
    counter: u64,
    block: [u8; 32],
    used: usize,
}

impl Drbg {
    pub fn new(seed: &[u8]) -> Self {
        let key: [u8; 32] = Sha256::digest(seed).into();
        Drbg { key, counter: 0, block: [0; 32], used: 32 }
    }

    fn refill(&mut self) {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update(self.counter.to_be_bytes());
        self.block = h.finalize().into();
        self.counter += 1;
        self.used = 0;
    }

    pub fn next_byte(&mut self) -> u8 {
        if self.used == 32 {
            self.refill();
        }
        let b = self.block[self.used];
        self.used += 1;
        b
    }

    pub fn next_u16(&mut self) -> u16 {
        u16::from_be_bytes([self.next_byte(), self.next_byte()])
    }

    pub fn next_u32(&mut self) -> u32 {
        u32::from_be_bytes([
            self.next_byte(),
            self.next_byte(),
            self.next_byte(),
            self.next_byte(),
        ])
    }

    /// Uniform draw from `[0, bound)` by rejection sampling.
    pub fn uniform(&mut self, bound: u32) -> u32 {
        debug_assert!(bound > 0);
        let limit = u32::MAX - u32::MAX % bound;
        loop {
            let v = self.next_u32();
            if v < limit {
                return v % bound;
            }
        }
    }
}
