//! Deterministic pseudorandom source shared by the CLI and the test suites.
//!
//! 64-bit linear congruential generator `x ← a·x + c (mod 2^64)` with
//! `a = 6364136223846793005`, `c = 1442695040888963407`; outputs use the high
//! 32 bits of the state.

use crate::algebra::Rat;

pub const LCG_MULTIPLIER: u64 = 6364136223846793005;
pub const LCG_INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 { state: seed }
    }

    pub fn next_u32(&mut self) -> u32 {
        self.state = self.state.wrapping_mul(LCG_MULTIPLIER).wrapping_add(LCG_INCREMENT);
        (self.state >> 32) as u32
    }

    /// Uniform integer in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        let span = (hi - lo + 1) as u64;
        lo + (self.next_u32() as u64 % span) as i64
    }

    /// Rational `p/q` with `|p| ≤ bound`, `1 ≤ q ≤ bound`.
    pub fn rat(&mut self, bound: i64) -> Rat {
        let p = self.range(-bound, bound);
        let q = self.range(1, bound);
        Rat::new(p, q)
    }

    /// Nonzero rational with the same bounds.
    pub fn nonzero_rat(&mut self, bound: i64) -> Rat {
        loop {
            let r = self.rat(bound);
            if r != Rat::from_int(0) {
                return r;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_sequence() {
        let mut a = Lcg64::new(0);
        let mut b = Lcg64::new(0);
        let xs: Vec<u32> = (0..5).map(|_| a.next_u32()).collect();
        let ys: Vec<u32> = (0..5).map(|_| b.next_u32()).collect();
        assert_eq!(xs, ys);
        // first state is the increment itself
        assert_eq!(xs[0], (LCG_INCREMENT >> 32) as u32);
    }

    #[test]
    fn bounded_rationals() {
        let mut g = Lcg64::new(7);
        for _ in 0..200 {
            let r = g.rat(1000);
            assert!(r.numer().magnitude() <= &1000u32.into());
            assert!(r.denom() <= &1000.into());
        }
    }
}
