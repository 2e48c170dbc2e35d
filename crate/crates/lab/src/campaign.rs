//! Monte Carlo campaigns over the two oracle classes.
//!
//! Instance `i` of class `c` gets oracle seed `derive_path(seed, [1, c, i])`;
//! trial `t` of that run draws from `stream(derive_path(seed, [2, c, i, t]))`.
//! Every trial can therefore be replayed alone, and the same seeds are used
//! whatever the measured register or mode, so variants of one campaign see
//! the same oracles.

use std::collections::BTreeMap;

use qfeistel::distinguish::{
    error_bound, simon_trial, verdict_from_trials, Algorithm, Label, StatisticMode, TrialOutcome, Verdict,
};
use qfeistel::oracle::{OracleInstance, OracleKind};
use qfeistel::parallel::{map_indexed, Execution};
use qfeistel::seed::{self, PRNG_ID};
use qfeistel::stats::Proportion;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{BudgetSpec, Epsilon, ExperimentConfig};
use crate::error::{config_err, LabError, LabResult};

pub const SEED_RULE: &str =
    "oracle seed = derive_path(seed, [1, class, instance]); trial rng = stream(derive_path(seed, [2, class, instance, trial])); class 1 = scheme, 2 = rp";

/// The true class of an oracle instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleClass {
    Scheme,
    Rp,
}

impl OracleClass {
    pub const BOTH: [OracleClass; 2] = [OracleClass::Scheme, OracleClass::Rp];

    pub fn tag(self) -> u64 {
        match self {
            OracleClass::Scheme => 1,
            OracleClass::Rp => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OracleClass::Scheme => "scheme",
            OracleClass::Rp => "rp",
        }
    }

    fn label(self) -> Label {
        match self {
            OracleClass::Scheme => Label::Scheme,
            OracleClass::Rp => Label::Rp,
        }
    }
}

pub fn oracle_seed(experiment_seed: u64, class: OracleClass, instance: usize) -> u64 {
    seed::derive_path(experiment_seed, &[1, class.tag(), instance as u64])
}

pub fn trial_seed(experiment_seed: u64, class: OracleClass, instance: usize, trial: usize) -> u64 {
    seed::derive_path(experiment_seed, &[2, class.tag(), instance as u64, trial as u64])
}

/// Builds instance `instance` of `class` for this configuration.
pub fn build_oracle(cfg: &ExperimentConfig, class: OracleClass, instance: usize) -> LabResult<OracleInstance> {
    let s = oracle_seed(cfg.seed, class, instance);
    Ok(match class {
        OracleClass::Scheme => {
            let k = cfg.algorithm.sub_blocks(cfg.k)?;
            let (kind, params) = cfg.algorithm.scheme(cfg.n, k)?;
            OracleInstance::build(kind, params, s)?
        }
        OracleClass::Rp => OracleInstance::build(OracleKind::RandomPermutation, cfg.rp_params()?, s)?,
    })
}

/// Runs the configured distinguisher once on `oracle`, seeding each trial independently.
pub fn run_once(cfg: &ExperimentConfig, oracle: &OracleInstance, class: OracleClass, instance: usize) -> LabResult<Verdict> {
    let acfg = cfg.algorithm_config()?;
    let q = acfg.q()? as usize;
    let trials = (0..q)
        .map(|t| simon_trial(oracle, &acfg, t, &mut seed::stream(trial_seed(cfg.seed, class, instance, t))))
        .collect::<qfeistel::Result<Vec<_>>>()?;
    Ok(verdict_from_trials(cfg.algorithm, trials))
}

/// One line of the per-trial JSONL output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub class: OracleClass,
    pub instance: usize,
    pub oracle_seed: u64,
    pub trial: usize,
    pub trial_seed: u64,
    pub measured: Vec<String>,
    pub collapse_sizes: Vec<usize>,
    pub y: Vec<String>,
    pub nullspace_dim: usize,
    pub x_bit: u8,
    pub witness: Option<String>,
    pub queries: u64,
    pub verdict: Label,
}

fn hex(v: u64) -> String {
    format!("{v:#x}")
}

impl TrialRecord {
    fn new(cfg: &ExperimentConfig, class: OracleClass, instance: usize, t: &TrialOutcome, verdict: Label) -> Self {
        TrialRecord {
            class,
            instance,
            oracle_seed: oracle_seed(cfg.seed, class, instance),
            trial: t.index,
            trial_seed: trial_seed(cfg.seed, class, instance, t.index),
            measured: t.measured.iter().copied().map(hex).collect(),
            collapse_sizes: t.collapse_sizes.clone(),
            y: t.y_samples.iter().copied().map(hex).collect(),
            nullspace_dim: t.nullspace_dim,
            x_bit: u8::from(t.x_bit),
            witness: t.witness.map(hex),
            queries: t.queries,
            verdict,
        }
    }
}

/// Verdict counts, rows = true class, columns = verdict.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Confusion {
    pub scheme_as_scheme: u64,
    pub scheme_as_rp: u64,
    pub rp_as_scheme: u64,
    pub rp_as_rp: u64,
}

impl Confusion {
    pub fn total(&self) -> u64 {
        self.scheme_as_scheme + self.scheme_as_rp + self.rp_as_scheme + self.rp_as_rp
    }

    pub fn errors(&self) -> u64 {
        self.scheme_as_rp + self.rp_as_scheme
    }

    fn record(&mut self, class: OracleClass, verdict: Label) {
        match (class, verdict) {
            (OracleClass::Scheme, Label::Scheme) => self.scheme_as_scheme += 1,
            (OracleClass::Scheme, Label::Rp) => self.scheme_as_rp += 1,
            (OracleClass::Rp, Label::Scheme) => self.rp_as_scheme += 1,
            (OracleClass::Rp, Label::Rp) => self.rp_as_rp += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSummary {
    pub class: OracleClass,
    pub oracle_kind: OracleKind,
    pub runs: u64,
    /// Fraction of runs labelled correctly.
    pub accuracy: Proportion,
    /// Measured `P(x_k = 1)` over every trial of the class.
    pub x_rate: Proportion,
    /// The rate the correctness argument assumes.
    pub claimed_x_rate: f64,
    /// Collapse size -> number of inner iterations that collapsed onto a fiber of that size.
    pub collapse_sizes: BTreeMap<usize, u64>,
    pub queries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryCounts {
    pub per_trial: u64,
    pub per_run: u64,
    pub total: u64,
    /// Queries one full-domain classical collision count makes (`2^n`).
    pub classical_per_run: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub config_text: String,
    pub config_hash: String,
    pub prng: String,
    pub seed_rule: String,
    pub k: u32,
    pub q: u32,
    pub measured_register: usize,
    pub mode: StatisticMode,
    pub literal: bool,
    pub confusion: Confusion,
    pub empirical_error: Proportion,
    pub error_bound: f64,
    /// `P(SCHEME | scheme) - P(SCHEME | RP)`.
    pub advantage: f64,
    pub classes: Vec<ClassSummary>,
    pub queries: QueryCounts,
}

impl ExperimentReport {
    pub fn class(&self, class: OracleClass) -> &ClassSummary {
        self.classes.iter().find(|c| c.class == class).expect("both classes are always present")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize") + "\n"
    }

    pub const CSV_HEADER: &'static str = "alg,n,k,q,measure_reg,mode,runs_per_class,scheme_as_scheme,scheme_as_rp,rp_as_scheme,rp_as_rp,empirical_error,error_lower,error_upper,error_bound,advantage,x_rate_scheme,x_rate_rp,claimed_x_scheme,claimed_x_rp,queries_per_trial,queries_per_run,classical_queries";

    pub fn csv_row(&self) -> String {
        let c = &self.confusion;
        let (s, r) = (self.class(OracleClass::Scheme), self.class(OracleClass::Rp));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.config.algorithm,
            self.config.n,
            self.k,
            self.q,
            self.measured_register,
            self.mode.name(),
            self.config.trials,
            c.scheme_as_scheme,
            c.scheme_as_rp,
            c.rp_as_scheme,
            c.rp_as_rp,
            self.empirical_error.estimate,
            self.empirical_error.lower,
            self.empirical_error.upper,
            self.error_bound,
            self.advantage,
            s.x_rate.estimate,
            r.x_rate.estimate,
            s.claimed_x_rate,
            r.claimed_x_rate,
            self.queries.per_trial,
            self.queries.per_run,
            self.queries.classical_per_run,
        )
    }
}

/// A report plus the per-trial records it was aggregated from.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutput {
    pub report: ExperimentReport,
    pub records: Vec<TrialRecord>,
}

impl CampaignOutput {
    pub fn records_jsonl(&self) -> String {
        self.records.iter().map(|r| serde_json::to_string(r).expect("records serialize") + "\n").collect()
    }
}

pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// A measured-register / mode combination to run on the campaign's oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Variant {
    pub measure_reg: Option<usize>,
    pub mode: StatisticMode,
}

impl Variant {
    pub fn apply(&self, base: &ExperimentConfig) -> ExperimentConfig {
        ExperimentConfig { measure_reg: self.measure_reg, mode: self.mode, ..base.clone() }
    }
}

/// Runs the configured campaign: `trials` instances of each class.
pub fn run_campaign(cfg: &ExperimentConfig, execution: Execution) -> LabResult<CampaignOutput> {
    let variant = Variant { measure_reg: cfg.measure_reg, mode: cfg.mode };
    Ok(run_variants(cfg, &[variant], execution)?.remove(0))
}

/// Runs several variants over the same oracle instances, building each oracle once.
///
/// Output `j` equals `run_campaign(&variants[j].apply(base))`.
pub fn run_variants(base: &ExperimentConfig, variants: &[Variant], execution: Execution) -> LabResult<Vec<CampaignOutput>> {
    if variants.is_empty() {
        return config_err("no variants to run");
    }
    let configs: Vec<ExperimentConfig> = variants.iter().map(|v| v.apply(base)).collect();
    for c in &configs {
        c.validate()?;
    }
    // runs[class][instance][variant]
    let mut runs = Vec::new();
    for class in OracleClass::BOTH {
        let per_instance = map_indexed(execution, base.trials, |i| -> LabResult<Vec<Verdict>> {
            let oracle = build_oracle(base, class, i)?;
            configs.iter().map(|c| run_once(c, &oracle, class, i)).collect()
        });
        runs.push(per_instance.into_iter().collect::<LabResult<Vec<_>>>()?);
    }
    configs
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let verdicts: Vec<Vec<&Verdict>> = runs.iter().map(|cl| cl.iter().map(|v| &v[j]).collect()).collect();
            aggregate(c, &verdicts)
        })
        .collect()
}

fn aggregate(cfg: &ExperimentConfig, verdicts: &[Vec<&Verdict>]) -> LabResult<CampaignOutput> {
    let acfg = cfg.algorithm_config()?;
    let q = acfg.q()?;
    let (claimed_scheme, claimed_rp) = cfg.algorithm.claimed_x_rates();
    let mut confusion = Confusion::default();
    let mut records = Vec::new();
    let mut classes = Vec::new();
    let mut per_trial = None;
    for (class, runs) in OracleClass::BOTH.into_iter().zip(verdicts) {
        let mut correct = 0;
        let mut x_ones = 0;
        let mut x_total = 0;
        let mut queries = 0;
        let mut collapse_sizes = BTreeMap::new();
        for (i, v) in runs.iter().enumerate() {
            confusion.record(class, v.label);
            correct += u64::from(v.label == class.label());
            for t in &v.trials {
                if *per_trial.get_or_insert(t.queries) != t.queries {
                    return Err(LabError::Core(qfeistel::Error::Invariant(format!(
                        "trial query counts differ: {} vs {}",
                        per_trial.unwrap_or_default(),
                        t.queries
                    ))));
                }
                x_ones += u64::from(t.x_bit);
                x_total += 1;
                queries += t.queries;
                for &s in &t.collapse_sizes {
                    *collapse_sizes.entry(s).or_insert(0) += 1;
                }
                records.push(TrialRecord::new(cfg, class, i, t, v.label));
            }
        }
        let kind = match class {
            OracleClass::Scheme => cfg.algorithm.scheme(cfg.n, acfg.k)?.0,
            OracleClass::Rp => OracleKind::RandomPermutation,
        };
        classes.push(ClassSummary {
            class,
            oracle_kind: kind,
            runs: runs.len() as u64,
            accuracy: Proportion::wilson(correct, runs.len() as u64),
            x_rate: Proportion::wilson(x_ones, x_total),
            claimed_x_rate: if class == OracleClass::Scheme { claimed_scheme } else { claimed_rp },
            collapse_sizes,
            queries,
        });
    }
    let per_trial = per_trial.unwrap_or(0);
    let total: u64 = classes.iter().map(|c| c.queries).sum();
    let runs_per_class = cfg.trials as f64;
    let advantage = (confusion.scheme_as_scheme as f64 - confusion.rp_as_scheme as f64) / runs_per_class;
    let config_text = cfg.to_text_without_out();
    let report = ExperimentReport {
        config: cfg.clone(),
        config_hash: config_hash(&config_text),
        config_text,
        prng: PRNG_ID.to_string(),
        seed_rule: SEED_RULE.to_string(),
        k: acfg.k,
        q,
        measured_register: acfg.measured_register,
        mode: acfg.mode,
        literal: acfg.is_literal(),
        empirical_error: Proportion::wilson(confusion.errors(), confusion.total()),
        confusion,
        error_bound: error_bound(cfg.algorithm, q),
        advantage,
        classes,
        queries: QueryCounts {
            per_trial,
            per_run: per_trial * u64::from(q),
            total,
            classical_per_run: 1u64 << cfg.n,
        },
    };
    Ok(CampaignOutput { report, records })
}

/// The configuration axis a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    N,
    Q,
    Epsilon,
}

impl SweepAxis {
    pub fn parse(s: &str) -> LabResult<Self> {
        match s {
            "n" => Ok(SweepAxis::N),
            "q" => Ok(SweepAxis::Q),
            "epsilon" => Ok(SweepAxis::Epsilon),
            other => config_err(format!("unknown sweep axis `{other}` (expected n, q or epsilon)")),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::N => "n",
            SweepAxis::Q => "q",
            SweepAxis::Epsilon => "epsilon",
        }
    }
}

/// The configurations a sweep would run; every value is checked before anything runs.
pub fn sweep_configs(base: &ExperimentConfig, axis: SweepAxis, values: &[String]) -> LabResult<Vec<ExperimentConfig>> {
    if values.is_empty() {
        return config_err("sweep needs at least one value");
    }
    let configs = values
        .iter()
        .map(|v| {
            let mut c = base.clone();
            match axis {
                SweepAxis::N => {
                    c.n = v.trim().parse().or_else(|_| config_err(format!("sweep value `{v}` is not a width")))?
                }
                SweepAxis::Q => {
                    c.budget = BudgetSpec::Queries(
                        v.trim().parse().or_else(|_| config_err(format!("sweep value `{v}` is not a trial count")))?,
                    )
                }
                SweepAxis::Epsilon => c.budget = BudgetSpec::Epsilon(Epsilon::parse(v)?),
            }
            c.validate()?;
            Ok(c)
        })
        .collect::<LabResult<Vec<_>>>()?;
    Ok(configs)
}

pub fn sweep(
    base: &ExperimentConfig,
    axis: SweepAxis,
    values: &[String],
    execution: Execution,
) -> LabResult<Vec<CampaignOutput>> {
    sweep_configs(base, axis, values)?.iter().map(|c| run_campaign(c, execution)).collect()
}

pub const SWEEP_CSV_HEADER: &str = "axis,value,alg,n,k,q,queries_per_trial,queries_per_run,classical_queries,error_bound,empirical_error,advantage";

pub fn sweep_csv(axis: SweepAxis, values: &[String], outputs: &[CampaignOutput]) -> String {
    let mut s = format!("{SWEEP_CSV_HEADER}\n");
    for (v, o) in values.iter().zip(outputs) {
        let r = &o.report;
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            axis.name(),
            v.trim(),
            r.config.algorithm,
            r.config.n,
            r.k,
            r.q,
            r.queries.per_trial,
            r.queries.per_run,
            r.queries.classical_per_run,
            r.error_bound,
            r.empirical_error.estimate,
            r.advantage
        ));
    }
    s
}

/// The algorithm's scheme and RP instances for a quick look, used by `gen-oracle`.
pub fn oracle_for(algorithm: Algorithm, n: u32, k: Option<u32>, class: OracleClass, seed: u64) -> LabResult<OracleInstance> {
    let k = algorithm.sub_blocks(k)?;
    let (kind, params) = match class {
        OracleClass::Scheme => algorithm.scheme(n, k)?,
        OracleClass::Rp => (OracleKind::RandomPermutation, qfeistel::oracle::BlockParams::new(n, k, 1)?),
    };
    Ok(OracleInstance::build(kind, params, seed)?)
}
