use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::{
    force_measurement, measure_register, sample_register, DenseState, MeasurementRecord, QuantumEngine,
    RegisterLayout,
};
use crate::error::{config, Result};
use crate::oracle::BlockFunction;
use crate::seed;

/// One step of a circuit over a [`RegisterLayout`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    Prepare { reg: usize },
    Oracle { in_regs: Vec<usize>, out_regs: Vec<usize> },
    Xor { src: usize, dst: usize },
    Measure { reg: usize },
    Hadamard { reg: usize },
    Sample { reg: usize },
}

/// A straight-line circuit; the first step must be `Prepare`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Script {
    pub layout: RegisterLayout,
    pub steps: Vec<Step>,
}

/// What running a script observed, plus the final state.
#[derive(Debug, Clone)]
pub struct ScriptRun<E> {
    pub state: E,
    pub measurements: Vec<MeasurementRecord>,
    pub samples: Vec<u64>,
    pub oracle_calls: usize,
}

/// Runs `script` on the engine built by `prepare`.
///
/// When `forced` is given, the `j`-th `Measure` step collapses onto
/// `forced[j]` instead of sampling, so two engines can be driven through
/// identical branches and compared amplitude by amplitude.
pub fn run_script<E, R>(
    script: &Script,
    oracle: &dyn BlockFunction,
    prepare: impl FnOnce(&RegisterLayout, usize) -> Result<E>,
    rng: &mut R,
    forced: Option<&[u64]>,
) -> Result<ScriptRun<E>>
where
    E: QuantumEngine,
    R: RngCore + ?Sized,
{
    let (first, rest) = match script.steps.split_first() {
        Some((Step::Prepare { reg }, rest)) => (*reg, rest),
        _ => return config("a script starts with a Prepare step"),
    };
    let mut state = prepare(&script.layout, first)?;
    let mut measurements = Vec::new();
    let mut samples = Vec::new();
    let mut oracle_calls = 0;
    for step in rest {
        match step {
            Step::Prepare { .. } => return config("Prepare may only appear first"),
            Step::Oracle { in_regs, out_regs } => {
                state.apply_oracle_xor(oracle, in_regs, out_regs)?;
                oracle_calls += 1;
            }
            Step::Xor { src, dst } => state.apply_xor_regs(*src, *dst)?,
            Step::Hadamard { reg } => state.hadamard_register(*reg)?,
            Step::Measure { reg } => {
                let rec = match forced.and_then(|f| f.get(measurements.len())) {
                    Some(&v) => force_measurement(&mut state, *reg, v)?,
                    None => measure_register(&mut state, *reg, rng)?,
                };
                measurements.push(rec);
            }
            Step::Sample { reg } => samples.push(sample_register(&state, *reg, rng)?),
        }
    }
    Ok(ScriptRun { state, measurements, samples, oracle_calls })
}

/// Runs `script` on the dense engine under a qubit cap, seeding measurements from `seed`.
pub fn dense_reference_run(
    script: &Script,
    oracle: &dyn BlockFunction,
    seed: u64,
    qubit_cap: u32,
    forced: Option<&[u64]>,
) -> Result<ScriptRun<DenseState>> {
    let mut rng = seed::stream(seed);
    run_script(script, oracle, |l, r| DenseState::prepare_uniform_capped(l, r, qubit_cap), &mut rng, forced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{BlockParams, OracleInstance, OracleKind};
    use crate::qsim::SparseState;

    #[test]
    fn prepare_only_agrees() {
        let l = RegisterLayout::uniform(2, 4).unwrap();
        let script = Script { layout: l.clone(), steps: vec![Step::Prepare { reg: 0 }] };
        let o = OracleInstance::build(OracleKind::Vfs, BlockParams::balanced(2, 3).unwrap(), 1).unwrap();
        let dense = dense_reference_run(&script, &o, 0, 20, None).unwrap();
        let sparse = run_script(&script, &o, SparseState::prepare_uniform, &mut seed::stream(0), None).unwrap();
        for (label, a) in sparse.state.support() {
            assert!((dense.state.amplitude(label) - a).norm() < 1e-15);
            assert!((a.norm_sqr() - 0.25).abs() < 1e-15);
        }
        assert_eq!(dense.state.support().len(), 4);
    }

    #[test]
    fn script_must_start_with_prepare() {
        let l = RegisterLayout::uniform(1, 2).unwrap();
        let o = OracleInstance::build(OracleKind::RandomPermutation, BlockParams::new(1, 2, 1).unwrap(), 1).unwrap();
        let script = Script { layout: l, steps: vec![Step::Hadamard { reg: 0 }] };
        assert!(dense_reference_run(&script, &o, 0, 20, None).is_err());
    }
}
