use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AlgorithmConfig, CircuitPlan};
use crate::error::Result;
use crate::oracle::BlockFunction;

/// Fiber-size histogram of a statistic over the full input domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    /// Input-register width.
    pub n: u32,
    /// fiber size -> number of fibers of that size (nonempty fibers only).
    pub histogram: BTreeMap<usize, usize>,
}

impl Census {
    /// Census of `plan`'s statistic, evaluated classically on every input.
    pub fn of_plan(oracle: &dyn BlockFunction, plan: &CircuitPlan) -> Result<Self> {
        plan.check(oracle)?;
        let n = plan.layout.width(plan.input_reg);
        let mut fibers: BTreeMap<u64, usize> = BTreeMap::new();
        for i in 0..1u64 << n {
            *fibers.entry(plan.statistic(oracle, i)).or_default() += 1;
        }
        Ok(Self::from_fiber_sizes(n, fibers.into_values()))
    }

    pub fn from_fiber_sizes(n: u32, sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut histogram = BTreeMap::new();
        for s in sizes {
            *histogram.entry(s).or_default() += 1;
        }
        Census { n, histogram }
    }

    pub fn domain(&self) -> usize {
        1usize << self.n
    }

    pub fn fibers(&self) -> usize {
        self.histogram.values().sum()
    }

    /// Mean size of a nonempty fiber.
    pub fn mean_fiber_size(&self) -> f64 {
        self.domain() as f64 / self.fibers() as f64
    }

    /// Number of colliding pairs `Σ C(m, 2)`.
    pub fn collision_pairs(&self) -> u64 {
        self.histogram.iter().map(|(&m, &c)| (m * m.saturating_sub(1) / 2 * c) as u64).sum()
    }

    /// `P(collapse onto a fiber of size m) = m · #{fibers of size m} / 2^n`.
    pub fn collapse_distribution(&self) -> BTreeMap<usize, f64> {
        let d = self.domain() as f64;
        self.histogram.iter().map(|(&m, &c)| (m, (m * c) as f64 / d)).collect()
    }
}

/// Census of the statistic a distinguisher configuration measures.
pub fn coset_census(oracle: &dyn BlockFunction, config: &AlgorithmConfig) -> Result<Census> {
    Census::of_plan(oracle, &config.plan()?)
}
