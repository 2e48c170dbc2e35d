use num_complex::Complex64;

use super::{QuantumEngine, RegisterLayout, PRUNE_THRESHOLD};
use crate::error::{Error, Result};
use crate::oracle::BlockFunction;

pub const DEFAULT_DENSE_QUBIT_CAP: u32 = 20;

/// Full `2^total` amplitude vector; the reference the sparse engine is checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
}

impl DenseState {
    pub fn prepare_uniform(layout: &RegisterLayout, reg: usize) -> Result<Self> {
        Self::prepare_uniform_capped(layout, reg, DEFAULT_DENSE_QUBIT_CAP)
    }

    pub fn prepare_uniform_capped(layout: &RegisterLayout, reg: usize, cap: u32) -> Result<Self> {
        layout.check(reg)?;
        let total = layout.total_qubits();
        if total > cap {
            return Err(Error::Capacity(format!("dense engine refuses {total} qubits (cap {cap})")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << total];
        let w = layout.width(reg);
        let a = (-(f64::from(w)) / 2.0).exp2();
        for i in 0..1u64 << w {
            amps[layout.set(0, reg, i) as usize] = Complex64::new(a, 0.0);
        }
        Ok(DenseState { layout: layout.clone(), amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `|amp|²` for every label.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    // Applies a label involution in place.
    fn swap_involution(&mut self, f: impl Fn(u64) -> u64) {
        for j in 0..self.amps.len() {
            let t = f(j as u64) as usize;
            if t > j {
                self.amps.swap(j, t);
            }
        }
    }
}

impl QuantumEngine for DenseState {
    fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    fn apply_oracle_xor(&mut self, oracle: &dyn BlockFunction, in_regs: &[usize], out_regs: &[usize]) -> Result<()> {
        self.layout.check_oracle(oracle, in_regs, out_regs)?;
        let layout = self.layout.clone();
        self.swap_involution(|l| layout.oracle_target(l, oracle, in_regs, out_regs));
        Ok(())
    }

    fn apply_xor_regs(&mut self, src: usize, dst: usize) -> Result<()> {
        self.layout.check_xor(src, dst)?;
        let layout = self.layout.clone();
        self.swap_involution(|l| layout.xor_target(l, src, dst));
        Ok(())
    }

    fn hadamard_register(&mut self, reg: usize) -> Result<()> {
        self.layout.check(reg)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let reg_mask = self.layout.reg_mask(reg);
        for bit in 0..64 {
            let b = 1u64 << bit;
            if reg_mask & b == 0 {
                continue;
            }
            let b = b as usize;
            for i in 0..self.amps.len() {
                if i & b == 0 {
                    let (x, y) = (self.amps[i], self.amps[i | b]);
                    self.amps[i] = (x + y) * s;
                    self.amps[i | b] = (x - y) * s;
                }
            }
        }
        Ok(())
    }

    fn marginal(&self, reg: usize) -> Result<Vec<(u64, f64, usize)>> {
        self.layout.check(reg)?;
        let w = self.layout.width(reg);
        let mut acc = vec![(0.0f64, 0usize); 1usize << w];
        for (label, a) in self.amps.iter().enumerate() {
            if a.norm() >= PRUNE_THRESHOLD {
                let e = &mut acc[self.layout.get(label as u64, reg) as usize];
                e.0 += a.norm_sqr();
                e.1 += 1;
            }
        }
        Ok(acc.into_iter().enumerate().filter(|(_, e)| e.1 > 0).map(|(v, (p, c))| (v as u64, p, c)).collect())
    }

    fn collapse(&mut self, reg: usize, value: u64) -> Result<usize> {
        self.layout.check(reg)?;
        let mut count = 0;
        let mut norm = 0.0;
        for (label, a) in self.amps.iter_mut().enumerate() {
            if self.layout.get(label as u64, reg) != value {
                *a = Complex64::new(0.0, 0.0);
            } else if a.norm() >= PRUNE_THRESHOLD {
                count += 1;
                norm += a.norm_sqr();
            }
        }
        if count == 0 {
            return Err(Error::Invariant(format!("register {reg} never holds {value:#x}")));
        }
        let f = 1.0 / norm.sqrt();
        for a in &mut self.amps {
            *a *= f;
        }
        Ok(count)
    }

    fn amplitude(&self, label: u64) -> Complex64 {
        self.amps.get(label as usize).copied().unwrap_or_default()
    }

    fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn support(&self) -> Vec<(u64, Complex64)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() >= PRUNE_THRESHOLD)
            .map(|(l, &a)| (l as u64, a))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_is_enforced() {
        let l = RegisterLayout::uniform(3, 7).unwrap();
        assert!(matches!(DenseState::prepare_uniform(&l, 0), Err(Error::Capacity(_))));
        assert!(DenseState::prepare_uniform_capped(&l, 0, 21).is_ok());
    }

    #[test]
    fn prepare_then_hadamard_returns_zero_register() {
        let l = RegisterLayout::uniform(3, 2).unwrap();
        let mut s = DenseState::prepare_uniform(&l, 0).unwrap();
        s.hadamard_register(0).unwrap();
        assert!((s.amplitude(0).re - 1.0).abs() < 1e-12);
        assert_eq!(s.support().len(), 1);
    }
}
