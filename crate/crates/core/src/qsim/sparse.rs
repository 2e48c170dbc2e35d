use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{fwht, QuantumEngine, RegisterLayout, PRUNE_THRESHOLD};
use crate::error::{config, Error, Result};
use crate::oracle::BlockFunction;

/// A pure state stored as label -> amplitude, nonzero entries only.
///
/// Ordered storage keeps every traversal, and therefore every floating-point
/// sum and measurement, independent of hashing.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    layout: RegisterLayout,
    amps: BTreeMap<u64, Complex64>,
}

impl SparseState {
    /// `2^{-w/2} Σ_i |…, i, …⟩` over register `reg`, all other registers zero.
    pub fn prepare_uniform(layout: &RegisterLayout, reg: usize) -> Result<Self> {
        layout.check(reg)?;
        let w = layout.width(reg);
        let amp = Complex64::new((-(f64::from(w)) / 2.0).exp2(), 0.0);
        let amps = (0..1u64 << w).map(|i| (layout.set(0, reg, i), amp)).collect();
        Ok(SparseState { layout: layout.clone(), amps })
    }

    /// Builds a state from explicit amplitudes (normalized on the way in).
    pub fn from_amplitudes(layout: &RegisterLayout, amps: impl IntoIterator<Item = (u64, Complex64)>) -> Result<Self> {
        let limit = crate::oracle::mask(layout.total_qubits());
        let mut map = BTreeMap::new();
        for (label, a) in amps {
            if label > limit {
                return config(format!("label {label:#x} does not fit the layout"));
            }
            *map.entry(label).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        let mut s = SparseState { layout: layout.clone(), amps: map };
        s.prune();
        let norm = s.norm_sqr();
        if norm == 0.0 {
            return config("state has zero norm");
        }
        s.scale(1.0 / norm.sqrt());
        Ok(s)
    }

    pub fn support_size(&self) -> usize {
        self.amps.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &Complex64)> {
        self.amps.iter()
    }

    fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }

    fn scale(&mut self, factor: f64) {
        for a in self.amps.values_mut() {
            *a *= factor;
        }
    }

    /// Debug dump: one `label_hex re im` line per nonzero amplitude, sorted by label.
    pub fn dump(&self) -> String {
        let digits = (self.layout.total_qubits() as usize).div_ceil(4).max(1);
        let mut out = String::new();
        for (label, a) in &self.amps {
            let _ = writeln!(out, "{label:0digits$x} {:e} {:e}", a.re, a.im);
        }
        out
    }

    fn permute_labels(&mut self, f: impl Fn(u64) -> u64) {
        let old = std::mem::take(&mut self.amps);
        self.amps = old.into_iter().map(|(l, a)| (f(l), a)).collect();
    }
}

impl QuantumEngine for SparseState {
    fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    fn apply_oracle_xor(&mut self, oracle: &dyn BlockFunction, in_regs: &[usize], out_regs: &[usize]) -> Result<()> {
        self.layout.check_oracle(oracle, in_regs, out_regs)?;
        let layout = self.layout.clone();
        self.permute_labels(|l| layout.oracle_target(l, oracle, in_regs, out_regs));
        Ok(())
    }

    fn apply_xor_regs(&mut self, src: usize, dst: usize) -> Result<()> {
        self.layout.check_xor(src, dst)?;
        let layout = self.layout.clone();
        self.permute_labels(|l| layout.xor_target(l, src, dst));
        Ok(())
    }

    fn hadamard_register(&mut self, reg: usize) -> Result<()> {
        self.layout.check(reg)?;
        let w = self.layout.width(reg);
        let reg_mask = self.layout.reg_mask(reg);
        let mut groups: BTreeMap<u64, Vec<Complex64>> = BTreeMap::new();
        for (&label, &a) in &self.amps {
            let slot = groups
                .entry(label & !reg_mask)
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); 1usize << w]);
            slot[self.layout.get(label, reg) as usize] = a;
        }
        let norm = (-(f64::from(w)) / 2.0).exp2();
        let mut amps = BTreeMap::new();
        for (rest, mut vec) in groups {
            fwht(&mut vec);
            for (y, a) in vec.into_iter().enumerate() {
                let a = a * norm;
                if a.norm() >= PRUNE_THRESHOLD {
                    amps.insert(self.layout.set(rest, reg, y as u64), a);
                }
            }
        }
        self.amps = amps;
        Ok(())
    }

    fn marginal(&self, reg: usize) -> Result<Vec<(u64, f64, usize)>> {
        self.layout.check(reg)?;
        let mut acc: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
        for (&label, a) in &self.amps {
            let e = acc.entry(self.layout.get(label, reg)).or_insert((0.0, 0));
            e.0 += a.norm_sqr();
            e.1 += 1;
        }
        Ok(acc.into_iter().map(|(v, (p, c))| (v, p, c)).collect())
    }

    fn collapse(&mut self, reg: usize, value: u64) -> Result<usize> {
        self.layout.check(reg)?;
        let layout = &self.layout;
        self.amps.retain(|&l, _| layout.get(l, reg) == value);
        let norm = self.norm_sqr();
        if norm == 0.0 || self.amps.is_empty() {
            return Err(Error::Invariant(format!("register {reg} never holds {value:#x}")));
        }
        self.scale(1.0 / norm.sqrt());
        Ok(self.amps.len())
    }

    fn amplitude(&self, label: u64) -> Complex64 {
        self.amps.get(&label).copied().unwrap_or_default()
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    fn support(&self) -> Vec<(u64, Complex64)> {
        self.amps.iter().map(|(&l, &a)| (l, a)).collect()
    }
}
