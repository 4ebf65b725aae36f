//! Deterministic byte-level mutations for robustness testing.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const INTERESTING_U32: [u32; 8] = [0, 1, 0x7f, 0x80, 0xffff, 0x7fff_ffff, 0x8000_0000, 0xffff_ffff];

/// Yields `count` mutants of `seed`, each with one to four edits: bit flips,
/// boundary-value overwrites of aligned words, truncation, duplication or
/// deletion of a span, and random byte insertion.
pub struct Mutator {
    rng: StdRng,
}

impl Mutator {
    pub fn new(seed: u64) -> Self {
        Mutator { rng: StdRng::seed_from_u64(seed) }
    }

    pub fn mutate(&mut self, input: &[u8]) -> Vec<u8> {
        let mut out = input.to_vec();
        for _ in 0..self.rng.random_range(1..=4) {
            self.edit(&mut out);
        }
        out
    }

    fn edit(&mut self, out: &mut Vec<u8>) {
        if out.is_empty() {
            out.push(self.rng.random());
            return;
        }
        let len = out.len();
        match self.rng.random_range(0..7) {
            0 => {
                let i = self.rng.random_range(0..len);
                out[i] ^= 1 << self.rng.random_range(0..8);
            }
            1 => {
                let i = self.rng.random_range(0..len);
                out[i] = self.rng.random();
            }
            2 if len >= 4 => {
                let i = self.rng.random_range(0..len / 4) * 4;
                let v = INTERESTING_U32[self.rng.random_range(0..INTERESTING_U32.len())];
                out[i..i + 4].copy_from_slice(&v.to_le_bytes());
            }
            3 => out.truncate(self.rng.random_range(0..len)),
            4 => {
                let start = self.rng.random_range(0..len);
                let end = (start + self.rng.random_range(1..64)).min(len);
                let span = out[start..end].to_vec();
                let at = self.rng.random_range(0..=out.len());
                out.splice(at..at, span);
            }
            5 => {
                let start = self.rng.random_range(0..len);
                let end = (start + self.rng.random_range(1..64)).min(len);
                out.drain(start..end);
            }
            _ => {
                let at = self.rng.random_range(0..=len);
                let n = self.rng.random_range(1..16);
                let bytes: Vec<u8> = (0..n).map(|_| self.rng.random()).collect();
                out.splice(at..at, bytes);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_different() {
        let input = vec![0u8; 64];
        let a: Vec<_> = (0..10).scan(Mutator::new(1), |m, _| Some(m.mutate(&input))).collect();
        let b: Vec<_> = (0..10).scan(Mutator::new(1), |m, _| Some(m.mutate(&input))).collect();
        assert_eq!(a, b);
        assert!(a.iter().any(|x| *x != input));
    }
}
