use rand_core::RngCore;

use crate::error::{config, Result};
use crate::oracle::{mask, BlockFunction};
use crate::seed;

/// A Simon function with a planted period: `g(i) = h(min(i, i ⊕ s))` for a
/// random injection `h`, so `g(i) = g(j)` exactly when `j ∈ {i, i ⊕ s}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedPeriod {
    n: u32,
    period: u64,
    h: Vec<u32>,
}

impl PlantedPeriod {
    pub fn new(n: u32, period: u64, rng: &mut impl RngCore) -> Result<Self> {
        if n == 0 || n > 24 {
            return config(format!("planted-period width {n} out of range"));
        }
        if period == 0 || period > mask(n) {
            return config("the period must be a nonzero n-bit string");
        }
        Ok(PlantedPeriod { n, period, h: seed::fisher_yates(rng, 1usize << n) })
    }

    pub fn period(&self) -> u64 {
        self.period
    }
}

impl BlockFunction for PlantedPeriod {
    fn input_bits(&self) -> u32 {
        self.n
    }

    fn output_bits(&self) -> u32 {
        self.n
    }

    fn apply(&self, input: u64) -> u64 {
        u64::from(self.h[input.min(input ^ self.period) as usize])
    }
}
