//! Simon-style distinguishers for Feistel schemes against random permutations.
//!
//! Every algorithm is the same inner loop run over a different circuit:
//! prepare a uniform superposition in the input register, apply `U_C` (and
//! `U_D` where the statistic needs it), measure the statistic register,
//! uncompute, Hadamard the input register and read one `y`. A trial stacks
//! `n + 5` such `y` into a matrix and asks whether `My = 0` has a nonzero
//! solution. The algorithms differ in their layout and decision rule:
//!
//! | algorithm | layout    | input reg | statistic register             | decision            |
//! |-----------|-----------|-----------|--------------------------------|---------------------|
//! | `Alg1`    | `[n; 4]`  | 1         | 4 (`d`), or 3 (`c`)            | scheme iff all `x=0`|
//! | `Alg2`    | `[n; 4]`  | 1         | 3 after `U_D` (`i ⊕ c`)        | RP iff `N₁ > N₀`    |
//! | `Alg3`    | `[n; 6]`  | 2         | 4 after `U_D` (`I² ⊕ S¹`)      | RP iff `N₁ > N₀`    |
//! | `KPlus1`  | `[n; 2k]` | 1         | `k+1` (`S¹`)                   | RP iff `N₁ > N₀`    |
//!
//! Register numbers in [`AlgorithmConfig`] are 1-based to match the usual
//! description of these circuits; the engine itself is 0-based.

mod census;
mod planted;

pub use census::{coset_census, Census};
pub use planted::PlantedPeriod;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::gf2::{min_nonzero_in_span, BitMatrix};
use crate::oracle::{BlockFunction, BlockParams, OracleKind};
use crate::qsim::{
    force_measurement, measure_register, sample_register, QuantumEngine, RegisterLayout, Script, SparseState,
    Step,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    /// Three-round variant with a permutation middle round (VFS) vs RP.
    Alg1,
    /// Four-round balanced scheme vs RP.
    Alg2,
    /// `G_3^4` vs RP.
    Alg3,
    /// `G_k^{k+1}`, `k ≥ 4`, vs RP.
    #[serde(rename = "gk")]
    KPlus1,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Alg1, Algorithm::Alg2, Algorithm::Alg3, Algorithm::KPlus1];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Alg1 => "alg1",
            Algorithm::Alg2 => "alg2",
            Algorithm::Alg3 => "alg3",
            Algorithm::KPlus1 => "gk",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "alg1" => Ok(Algorithm::Alg1),
            "alg2" => Ok(Algorithm::Alg2),
            "alg3" => Ok(Algorithm::Alg3),
            "gk" => Ok(Algorithm::KPlus1),
            other => config(format!("unknown algorithm `{other}` (expected alg1, alg2, alg3 or gk)")),
        }
    }

    /// Uses the majority rule over `x_k` rather than the all-zero rule.
    pub fn is_majority(self) -> bool {
        self != Algorithm::Alg1
    }

    /// The sub-block count `k` this algorithm runs on; `requested` only matters for `KPlus1`.
    pub fn sub_blocks(self, requested: Option<u32>) -> Result<u32> {
        let fixed = match self {
            Algorithm::Alg1 | Algorithm::Alg2 => 2,
            Algorithm::Alg3 => 3,
            Algorithm::KPlus1 => {
                let k = requested.unwrap_or(4);
                if k < 4 {
                    return config(format!("the k+1 round attack needs k >= 4, got k = {k}"));
                }
                return Ok(k);
            }
        };
        match requested {
            Some(k) if k != fixed => config(format!("{} runs on k = {fixed}, got k = {k}", self.name())),
            _ => Ok(fixed),
        }
    }

    /// The scheme class this algorithm separates from RP, with its parameters.
    pub fn scheme(self, n: u32, k: u32) -> Result<(OracleKind, BlockParams)> {
        Ok(match self {
            Algorithm::Alg1 => (OracleKind::Vfs, BlockParams::new(n, 2, 3)?),
            Algorithm::Alg2 => (OracleKind::Feistel, BlockParams::new(n, 2, 4)?),
            Algorithm::Alg3 => (OracleKind::Unbalanced, BlockParams::new(n, 3, 4)?),
            Algorithm::KPlus1 => (OracleKind::Unbalanced, BlockParams::new(n, k, k + 1)?),
        })
    }

    /// 1-based register measured by the literal circuit.
    pub fn default_measured_register(self, k: u32) -> usize {
        match self {
            Algorithm::Alg1 => 4,
            Algorithm::Alg2 => 3,
            Algorithm::Alg3 => 4,
            Algorithm::KPlus1 => k as usize + 1,
        }
    }

    /// Claimed `P(x_k = 1)` for (scheme, RP); used for side-by-side reporting only.
    pub fn claimed_x_rates(self) -> (f64, f64) {
        match self {
            Algorithm::Alg1 => (0.0, 2.0 / 3.0),
            _ => (1.0 / 3.0, 2.0 / 3.0),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How the `n + 5` samples of one trial relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticMode {
    /// Every inner iteration measures afresh and may land in a different fiber.
    Stacked,
    /// The first iteration's outcome is reused: later iterations are postselected
    /// onto the same value, so all samples come from one coset state.
    PerCoset,
}

impl StatisticMode {
    pub fn name(self) -> &'static str {
        match self {
            StatisticMode::Stacked => "stacked",
            StatisticMode::PerCoset => "per-coset",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "stacked" => Ok(StatisticMode::Stacked),
            "per-coset" | "per_coset" => Ok(StatisticMode::PerCoset),
            other => config(format!("unknown mode `{other}` (expected stacked or per-coset)")),
        }
    }
}

/// Either a target error or an explicit trial count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Epsilon(f64),
    Queries(u32),
}

/// Trial count `q` for a target error `epsilon`:
/// `⌈-log₃ ε⌉` for `Alg1`, `⌈-20 log₃ ε⌉` otherwise, never below 1.
pub fn query_budget(algorithm: Algorithm, epsilon: f64) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return config(format!("epsilon must lie in (0, 1), got {epsilon}"));
    }
    let factor = if algorithm.is_majority() { 20.0 } else { 1.0 };
    let x = -factor * epsilon.ln() / 3f64.ln();
    // Exact powers of 1/3 land a few ulps above the integer.
    let rounded = x.round();
    let q = if (x - rounded).abs() < 1e-9 { rounded } else { x.ceil() };
    Ok((q as u32).max(1))
}

/// The error bound attached to a budget: `3^{-q}` for `Alg1`, and
/// `2^{3r} / 3^{2r+1}` with `r = q/2` for the majority-rule algorithms.
pub fn error_bound(algorithm: Algorithm, q: u32) -> f64 {
    let q = f64::from(q);
    if algorithm.is_majority() {
        let r = q / 2.0;
        (8f64 / 9.0).powf(r) / 3.0
    } else {
        3f64.powf(-q)
    }
}

/// Full configuration of one distinguisher.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub algorithm: Algorithm,
    pub n: u32,
    pub k: u32,
    pub budget: Budget,
    pub samples_per_trial: usize,
    /// 1-based.
    pub measured_register: usize,
    pub mode: StatisticMode,
}

impl AlgorithmConfig {
    /// Literal configuration: default register, stacked samples, `n + 5` per trial.
    pub fn new(algorithm: Algorithm, n: u32, k: Option<u32>, budget: Budget) -> Result<Self> {
        let k = algorithm.sub_blocks(k)?;
        let cfg = AlgorithmConfig {
            algorithm,
            n,
            k,
            budget,
            samples_per_trial: n as usize + 5,
            measured_register: algorithm.default_measured_register(k),
            mode: StatisticMode::Stacked,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_measured_register(mut self, reg: usize) -> Result<Self> {
        self.measured_register = reg;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: StatisticMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.algorithm.sub_blocks(Some(self.k))?;
        self.algorithm.scheme(self.n, self.k)?;
        self.q()?;
        if self.samples_per_trial == 0 {
            return config("samples per trial must be at least 1");
        }
        let regs = self.layout()?.len();
        if self.measured_register == 0 || self.measured_register > regs {
            return config(format!("measured register must be in 1..={regs}, got {}", self.measured_register));
        }
        if self.measured_register - 1 == self.input_register() {
            return config("the measured register cannot be the superposed input register");
        }
        Ok(())
    }

    /// Number of trials `q`.
    pub fn q(&self) -> Result<u32> {
        match self.budget {
            Budget::Epsilon(e) => query_budget(self.algorithm, e),
            Budget::Queries(0) => config("q must be at least 1"),
            Budget::Queries(q) => Ok(q),
        }
    }

    pub fn is_literal(&self) -> bool {
        self.mode == StatisticMode::Stacked
            && self.measured_register == self.algorithm.default_measured_register(self.k)
            && self.samples_per_trial == self.n as usize + 5
    }

    pub fn layout(&self) -> Result<RegisterLayout> {
        RegisterLayout::uniform(self.n, 2 * self.k as usize)
    }

    fn input_register(&self) -> usize {
        match self.algorithm {
            Algorithm::Alg3 => 1,
            _ => 0,
        }
    }

    /// The circuit one inner iteration runs.
    pub fn plan(&self) -> Result<CircuitPlan> {
        self.validate()?;
        let k = self.k as usize;
        let layout = self.layout()?;
        let input = self.input_register();
        let oracle = Gate::Oracle { in_regs: (0..k).collect(), out_regs: (k..2 * k).collect() };
        let forward = match self.algorithm {
            Algorithm::Alg1 | Algorithm::KPlus1 => vec![oracle],
            Algorithm::Alg2 => vec![oracle, Gate::Xor { src: 0, dst: 2 }],
            Algorithm::Alg3 => vec![oracle, Gate::Xor { src: 1, dst: 3 }],
        };
        Ok(CircuitPlan { layout, input_reg: input, forward, measured_reg: self.measured_register - 1 })
    }
}

/// A reversible gate of the compute stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    Oracle { in_regs: Vec<usize>, out_regs: Vec<usize> },
    Xor { src: usize, dst: usize },
}

/// Layout, input register, compute gates and statistic register of one inner iteration (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitPlan {
    pub layout: RegisterLayout,
    pub input_reg: usize,
    pub forward: Vec<Gate>,
    pub measured_reg: usize,
}

impl CircuitPlan {
    /// Plain Simon circuit on `[n, n]`: `|i⟩|0⟩ -> |i⟩|g(i)⟩`, measure register 1 (0-based).
    pub fn simon(n: u32) -> Result<Self> {
        Ok(CircuitPlan {
            layout: RegisterLayout::uniform(n, 2)?,
            input_reg: 0,
            forward: vec![Gate::Oracle { in_regs: vec![0], out_regs: vec![1] }],
            measured_reg: 1,
        })
    }

    pub fn check(&self, oracle: &dyn BlockFunction) -> Result<()> {
        self.layout.check(self.input_reg)?;
        self.layout.check(self.measured_reg)?;
        for g in &self.forward {
            match g {
                Gate::Oracle { in_regs, out_regs } => self.layout.check_oracle(oracle, in_regs, out_regs)?,
                Gate::Xor { src, dst } => self.layout.check_xor(*src, *dst)?,
            }
        }
        Ok(())
    }

    pub fn oracle_calls_per_iteration(&self) -> usize {
        2 * self.forward.iter().filter(|g| matches!(g, Gate::Oracle { .. })).count()
    }

    /// The value the statistic register takes on input-register value `i`, computed classically.
    pub fn statistic(&self, oracle: &dyn BlockFunction, i: u64) -> u64 {
        let mut label = self.layout.set(0, self.input_reg, i);
        for g in &self.forward {
            label = match g {
                Gate::Oracle { in_regs, out_regs } => self.layout.oracle_target(label, oracle, in_regs, out_regs),
                Gate::Xor { src, dst } => self.layout.xor_target(label, *src, *dst),
            };
        }
        self.layout.get(label, self.measured_reg)
    }

    /// One inner iteration as a [`Script`]: prepare, compute, measure, uncompute, Hadamard, sample.
    pub fn iteration_script(&self) -> Script {
        let gate_step = |g: &Gate| match g {
            Gate::Oracle { in_regs, out_regs } => Step::Oracle { in_regs: in_regs.clone(), out_regs: out_regs.clone() },
            Gate::Xor { src, dst } => Step::Xor { src: *src, dst: *dst },
        };
        let mut steps = vec![Step::Prepare { reg: self.input_reg }];
        steps.extend(self.forward.iter().map(gate_step));
        steps.push(Step::Measure { reg: self.measured_reg });
        steps.extend(self.forward.iter().rev().map(gate_step));
        steps.push(Step::Hadamard { reg: self.input_reg });
        steps.push(Step::Sample { reg: self.input_reg });
        Script { layout: self.layout.clone(), steps }
    }

    fn apply<E: QuantumEngine>(&self, state: &mut E, gate: &Gate, oracle: &dyn BlockFunction) -> Result<usize> {
        match gate {
            Gate::Oracle { in_regs, out_regs } => {
                state.apply_oracle_xor(oracle, in_regs, out_regs)?;
                Ok(1)
            }
            Gate::Xor { src, dst } => state.apply_xor_regs(*src, *dst).map(|_| 0),
        }
    }
}

/// Record of one trial (one matrix `M` and its nullspace).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub index: usize,
    /// Statistic-register value observed in each inner iteration.
    pub measured: Vec<u64>,
    /// Preimage size of each observed value (the coset-state support).
    pub collapse_sizes: Vec<usize>,
    pub y_samples: Vec<u64>,
    pub nullspace_dim: usize,
    pub x_bit: bool,
    /// Smallest nonzero nullspace vector, when one exists.
    pub witness: Option<u64>,
    pub queries: u64,
}

/// One trial on an arbitrary engine.
#[allow(clippy::too_many_arguments)]
pub fn simon_trial_with<E, R, P>(
    oracle: &dyn BlockFunction,
    plan: &CircuitPlan,
    samples: usize,
    mode: StatisticMode,
    index: usize,
    rng: &mut R,
    prepare: P,
) -> Result<TrialOutcome>
where
    E: QuantumEngine,
    R: RngCore + ?Sized,
    P: Fn(&RegisterLayout, usize) -> Result<E>,
{
    plan.check(oracle)?;
    let n = plan.layout.width(plan.input_reg);
    let mut measured = Vec::with_capacity(samples);
    let mut collapse_sizes = Vec::with_capacity(samples);
    let mut m = BitMatrix::new(n);
    let mut queries = 0u64;
    for t in 0..samples {
        let mut state = prepare(&plan.layout, plan.input_reg)?;
        for g in &plan.forward {
            queries += plan.apply(&mut state, g, oracle)? as u64;
        }
        let rec = match (mode, measured.first()) {
            (StatisticMode::PerCoset, Some(&v)) if t > 0 => force_measurement(&mut state, plan.measured_reg, v)?,
            _ => measure_register(&mut state, plan.measured_reg, rng)?,
        };
        measured.push(rec.value);
        collapse_sizes.push(rec.preimage_size);
        for g in plan.forward.iter().rev() {
            queries += plan.apply(&mut state, g, oracle)? as u64;
        }
        state.hadamard_register(plan.input_reg)?;
        m.push_row(sample_register(&state, plan.input_reg, rng)?);
    }
    let basis = m.nullspace_basis();
    let witness = min_nonzero_in_span(&basis);
    Ok(TrialOutcome {
        index,
        measured,
        collapse_sizes,
        y_samples: m.rows().to_vec(),
        nullspace_dim: basis.len(),
        x_bit: !basis.is_empty(),
        witness,
        queries,
    })
}

/// One trial on the sparse engine.
pub fn simon_trial<R: RngCore + ?Sized>(
    oracle: &dyn BlockFunction,
    config: &AlgorithmConfig,
    index: usize,
    rng: &mut R,
) -> Result<TrialOutcome> {
    let plan = config.plan()?;
    check_oracle_shape(oracle, config)?;
    simon_trial_with(oracle, &plan, config.samples_per_trial, config.mode, index, rng, SparseState::prepare_uniform)
}

fn check_oracle_shape(oracle: &dyn BlockFunction, cfg: &AlgorithmConfig) -> Result<()> {
    let bits = cfg.n * cfg.k;
    if oracle.input_bits() != bits || oracle.output_bits() != bits {
        return config(format!(
            "{} with n = {}, k = {} needs a {bits}-bit oracle, got {} -> {} bits",
            cfg.algorithm,
            cfg.n,
            cfg.k,
            oracle.input_bits(),
            oracle.output_bits()
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Scheme,
    Rp,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Scheme => "SCHEME",
            Label::Rp => "RP",
        })
    }
}

/// Outcome of a full distinguisher run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub label: Label,
    pub q: u32,
    pub n0: u32,
    pub n1: u32,
    pub trials: Vec<TrialOutcome>,
}

impl Verdict {
    pub fn total_queries(&self) -> u64 {
        self.trials.iter().map(|t| t.queries).sum()
    }
}

/// Runs `q` trials and applies the algorithm's decision rule.
pub fn run_distinguisher<R: RngCore + ?Sized>(
    oracle: &dyn BlockFunction,
    config: &AlgorithmConfig,
    rng: &mut R,
) -> Result<Verdict> {
    let q = config.q()?;
    let plan = config.plan()?;
    check_oracle_shape(oracle, config)?;
    let trials = (0..q as usize)
        .map(|k| {
            simon_trial_with(oracle, &plan, config.samples_per_trial, config.mode, k, rng, SparseState::prepare_uniform)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(verdict_from_trials(config.algorithm, trials))
}

/// Applies the algorithm's decision rule to finished trials.
pub fn verdict_from_trials(algorithm: Algorithm, trials: Vec<TrialOutcome>) -> Verdict {
    let q = trials.len() as u32;
    let n1 = trials.iter().filter(|t| t.x_bit).count() as u32;
    let n0 = q - n1;
    let label = if algorithm.is_majority() {
        majority_label(n0, n1)
    } else if n1 == 0 {
        Label::Scheme
    } else {
        Label::Rp
    };
    Verdict { label, q, n0, n1, trials }
}

/// `RP` iff `N₁ > N₀`; ties go to the scheme.
pub fn majority_label(n0: u32, n1: u32) -> Label {
    if n1 > n0 {
        Label::Rp
    } else {
        Label::Scheme
    }
}

fn expect_algorithm(config: &AlgorithmConfig, algorithm: Algorithm) -> Result<()> {
    if config.algorithm != algorithm {
        return Err(Error::Config(format!("configuration is for {}, not {algorithm}", config.algorithm)));
    }
    Ok(())
}

/// VFS vs RP: scheme iff every trial's system has only the zero solution.
pub fn algorithm1<R: RngCore + ?Sized>(oracle: &dyn BlockFunction, config: &AlgorithmConfig, rng: &mut R) -> Result<Verdict> {
    expect_algorithm(config, Algorithm::Alg1)?;
    run_distinguisher(oracle, config, rng)
}

/// Four-round Feistel vs RP over the `i ⊕ c` statistic.
pub fn algorithm2<R: RngCore + ?Sized>(oracle: &dyn BlockFunction, config: &AlgorithmConfig, rng: &mut R) -> Result<Verdict> {
    expect_algorithm(config, Algorithm::Alg2)?;
    run_distinguisher(oracle, config, rng)
}

/// `G_3^4` vs RP over the `I² ⊕ S¹` statistic.
pub fn algorithm3<R: RngCore + ?Sized>(oracle: &dyn BlockFunction, config: &AlgorithmConfig, rng: &mut R) -> Result<Verdict> {
    expect_algorithm(config, Algorithm::Alg3)?;
    run_distinguisher(oracle, config, rng)
}

/// `G_k^{k+1}` vs RP over the `S¹` statistic; `k ≥ 4`.
pub fn algorithm_k_plus_1<R: RngCore + ?Sized>(
    oracle: &dyn BlockFunction,
    config: &AlgorithmConfig,
    rng: &mut R,
) -> Result<Verdict> {
    expect_algorithm(config, Algorithm::KPlus1)?;
    run_distinguisher(oracle, config, rng)
}

#[cfg(test)]
mod tests;
