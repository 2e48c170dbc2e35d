//! Statevector simulation over a fixed multi-register layout.
//!
//! Basis labels are packed `u64`s holding the registers in layout order with
//! register 0 in the most significant position. Registers are addressed by
//! 0-based index throughout this module.
//!
//! Two engines implement [`QuantumEngine`]: [`SparseState`], which stores only
//! the nonzero amplitudes and is what the distinguishers run on, and
//! [`DenseState`], a full `2^total` vector kept as a reference for testing.

mod dense;
mod script;
mod sparse;

pub use dense::{DenseState, DEFAULT_DENSE_QUBIT_CAP};
pub use script::{dense_reference_run, run_script, Script, ScriptRun, Step};
pub use sparse::SparseState;

use num_complex::Complex64;
use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::oracle::{mask, BlockFunction};
use crate::seed;

/// Amplitudes with magnitude below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Widths of the registers, in order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegisterLayout {
    widths: Vec<u32>,
    shifts: Vec<u32>,
}

impl RegisterLayout {
    pub fn new(widths: Vec<u32>) -> Result<Self> {
        if widths.is_empty() {
            return config("layout needs at least one register");
        }
        if let Some(w) = widths.iter().find(|&&w| w == 0 || w > 32) {
            return config(format!("register widths must be in 1..=32, got {w}"));
        }
        let total: u32 = widths.iter().sum();
        if total > 64 {
            return Err(Error::Capacity(format!("layout needs {total} qubits; labels are limited to 64")));
        }
        let mut shifts = vec![0; widths.len()];
        let mut acc = 0;
        for (i, w) in widths.iter().enumerate().rev() {
            shifts[i] = acc;
            acc += w;
        }
        Ok(RegisterLayout { widths, shifts })
    }

    /// `count` registers of `width` qubits each.
    pub fn uniform(width: u32, count: usize) -> Result<Self> {
        Self::new(vec![width; count])
    }

    pub fn widths(&self) -> &[u32] {
        &self.widths
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    pub fn total_qubits(&self) -> u32 {
        self.widths.iter().sum()
    }

    pub fn check(&self, reg: usize) -> Result<()> {
        if reg >= self.widths.len() {
            return config(format!("register {reg} out of range for a {}-register layout", self.widths.len()));
        }
        Ok(())
    }

    pub fn width(&self, reg: usize) -> u32 {
        self.widths[reg]
    }

    /// Bit mask of `reg` inside a label.
    pub fn reg_mask(&self, reg: usize) -> u64 {
        mask(self.widths[reg]) << self.shifts[reg]
    }

    #[inline]
    pub fn get(&self, label: u64, reg: usize) -> u64 {
        (label >> self.shifts[reg]) & mask(self.widths[reg])
    }

    #[inline]
    pub fn set(&self, label: u64, reg: usize, value: u64) -> u64 {
        (label & !self.reg_mask(reg)) | ((value & mask(self.widths[reg])) << self.shifts[reg])
    }

    /// Concatenates the given registers, first one most significant.
    #[inline]
    pub fn gather(&self, label: u64, regs: &[usize]) -> u64 {
        regs.iter().fold(0, |acc, &r| (acc << self.widths[r]) | self.get(label, r))
    }

    /// XORs `value` (laid out as by [`gather`](Self::gather)) into the given registers.
    #[inline]
    pub fn scatter_xor(&self, label: u64, regs: &[usize], mut value: u64) -> u64 {
        let mut out = label;
        for &r in regs.iter().rev() {
            out ^= (value & mask(self.widths[r])) << self.shifts[r];
            value >>= self.widths[r];
        }
        out
    }

    fn span_width(&self, regs: &[usize]) -> u32 {
        regs.iter().map(|&r| self.widths[r]).sum()
    }

    /// Validates an oracle embedding: registers exist, are distinct and match the oracle widths.
    pub fn check_oracle(&self, oracle: &dyn BlockFunction, in_regs: &[usize], out_regs: &[usize]) -> Result<()> {
        for &r in in_regs.iter().chain(out_regs) {
            self.check(r)?;
        }
        let mut all: Vec<usize> = in_regs.iter().chain(out_regs).copied().collect();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return config("oracle input and output registers must be distinct");
        }
        if self.span_width(in_regs) != oracle.input_bits() {
            return config(format!(
                "input registers span {} bits, oracle takes {}",
                self.span_width(in_regs),
                oracle.input_bits()
            ));
        }
        if self.span_width(out_regs) != oracle.output_bits() {
            return config(format!(
                "output registers span {} bits, oracle returns {}",
                self.span_width(out_regs),
                oracle.output_bits()
            ));
        }
        Ok(())
    }

    pub fn check_xor(&self, src: usize, dst: usize) -> Result<()> {
        self.check(src)?;
        self.check(dst)?;
        if src == dst {
            return config("XOR source and destination must differ");
        }
        if self.widths[src] != self.widths[dst] {
            return config("XOR registers must have equal widths");
        }
        Ok(())
    }

    /// Maps a label through `U_O`: out registers ^= O(in registers).
    #[inline]
    pub fn oracle_target(&self, label: u64, oracle: &dyn BlockFunction, in_regs: &[usize], out_regs: &[usize]) -> u64 {
        self.scatter_xor(label, out_regs, oracle.apply(self.gather(label, in_regs)))
    }

    #[inline]
    pub fn xor_target(&self, label: u64, src: usize, dst: usize) -> u64 {
        label ^ (self.get(label, src) << self.shifts[dst])
    }
}

/// Outcome of measuring one register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub register: usize,
    pub value: u64,
    /// Number of basis labels carrying `value` just before the collapse.
    pub preimage_size: usize,
}

/// The operations the distinguishers need from a state.
pub trait QuantumEngine: Sized {
    fn layout(&self) -> &RegisterLayout;

    /// XOR-embeds `oracle`: `|x⟩_in |y⟩_out -> |x⟩_in |y ⊕ O(x)⟩_out`.
    fn apply_oracle_xor(&mut self, oracle: &dyn BlockFunction, in_regs: &[usize], out_regs: &[usize]) -> Result<()>;

    /// `dst ^= src`.
    fn apply_xor_regs(&mut self, src: usize, dst: usize) -> Result<()>;

    /// Walsh-Hadamard transform on one register.
    fn hadamard_register(&mut self, reg: usize) -> Result<()>;

    /// `(value, probability, label count)` for every value of `reg` with nonzero weight, ascending by value.
    fn marginal(&self, reg: usize) -> Result<Vec<(u64, f64, usize)>>;

    /// Projects onto `reg == value` and renormalizes; returns the surviving label count.
    fn collapse(&mut self, reg: usize, value: u64) -> Result<usize>;

    fn amplitude(&self, label: u64) -> Complex64;

    fn norm_sqr(&self) -> f64;

    /// Nonzero amplitudes sorted by label.
    fn support(&self) -> Vec<(u64, Complex64)>;
}

fn pick(marginal: &[(u64, f64, usize)], u: f64) -> (u64, f64, usize) {
    let total: f64 = marginal.iter().map(|m| m.1).sum();
    let target = u * total;
    let mut acc = 0.0;
    for &m in marginal {
        acc += m.1;
        if target < acc {
            return m;
        }
    }
    *marginal.last().expect("nonempty marginal")
}

/// Measures `reg`, collapsing the state onto the observed value.
pub fn measure_register<E: QuantumEngine, R: RngCore + ?Sized>(
    state: &mut E,
    reg: usize,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    let marginal = state.marginal(reg)?;
    if marginal.is_empty() {
        return Err(Error::Invariant("measuring a zero-norm state".into()));
    }
    let (value, _, _) = pick(&marginal, seed::unit_f64(rng));
    let preimage_size = state.collapse(reg, value)?;
    Ok(MeasurementRecord { register: reg, value, preimage_size })
}

/// Collapses `reg` onto a prescribed value (postselection), as if it had been observed.
pub fn force_measurement<E: QuantumEngine>(state: &mut E, reg: usize, value: u64) -> Result<MeasurementRecord> {
    let preimage_size = state.collapse(reg, value)?;
    Ok(MeasurementRecord { register: reg, value, preimage_size })
}

/// Draws a value of `reg` from its marginal without disturbing the state.
pub fn sample_register<E: QuantumEngine, R: RngCore + ?Sized>(state: &E, reg: usize, rng: &mut R) -> Result<u64> {
    let marginal = state.marginal(reg)?;
    if marginal.is_empty() {
        return Err(Error::Invariant("sampling a zero-norm state".into()));
    }
    Ok(pick(&marginal, seed::unit_f64(rng)).0)
}

/// Draws one value from a precomputed marginal, as [`sample_register`] would.
pub fn sample_marginal<R: RngCore + ?Sized>(marginal: &[(u64, f64, usize)], rng: &mut R) -> u64 {
    pick(marginal, seed::unit_f64(rng)).0
}

/// In-place unnormalized fast Walsh-Hadamard transform; `data.len()` must be a power of two.
pub fn fwht(data: &mut [Complex64]) {
    let len = data.len();
    debug_assert!(len.is_power_of_two());
    let mut h = 1;
    while h < len {
        for block in data.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = a + b;
                *y = a - b;
            }
        }
        h *= 2;
    }
}
