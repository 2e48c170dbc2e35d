//! Classical diagnostics: fiber censuses of the measured statistic and the
//! collision-counting baselines.

use std::collections::BTreeMap;

use qfeistel::classical::{collision_keys, count_collisions, CollisionReport, Statistic};
use qfeistel::classical::{count_pairs_fs4, count_pairs_g34, count_pairs_gk, summarize_batch};
use qfeistel::distinguish::{coset_census, Algorithm, Label};
use qfeistel::oracle::{BlockParams, OracleInstance, OracleKind};
use qfeistel::parallel::{map_indexed, Execution};
use qfeistel::stats::{mean_std, Proportion};
use serde::Serialize;

use crate::campaign::{build_oracle, oracle_seed, OracleClass};
use crate::config::ExperimentConfig;
use crate::error::LabResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusClassSummary {
    pub class: OracleClass,
    pub instances: usize,
    pub mean_fiber_size: f64,
    pub mean_collision_pairs: f64,
    /// Fiber size -> total fibers of that size across instances.
    pub histogram: BTreeMap<usize, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusOutput {
    /// `(class, instance, oracle seed, fiber size, fibers)`.
    pub rows: Vec<(OracleClass, usize, u64, usize, usize)>,
    pub summary: Vec<CensusClassSummary>,
}

impl CensusOutput {
    pub fn csv(&self) -> String {
        let mut s = String::from("class,instance,oracle_seed,fiber_size,fibers\n");
        for (c, i, seed, size, count) in &self.rows {
            s.push_str(&format!("{},{i},{seed},{size},{count}\n", c.name()));
        }
        s
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("class,instances,mean_fiber_size,mean_collision_pairs\n");
        for c in &self.summary {
            s.push_str(&format!(
                "{},{},{},{}\n",
                c.class.name(),
                c.instances,
                c.mean_fiber_size,
                c.mean_collision_pairs
            ));
        }
        s
    }
}

/// Fiber census of the configured statistic over `trials` instances per class.
pub fn census(cfg: &ExperimentConfig, execution: Execution) -> LabResult<CensusOutput> {
    cfg.validate()?;
    let acfg = cfg.algorithm_config()?;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for class in OracleClass::BOTH {
        let censuses = map_indexed(execution, cfg.trials, |i| -> LabResult<_> {
            Ok(coset_census(&build_oracle(cfg, class, i)?, &acfg)?)
        })
        .into_iter()
        .collect::<LabResult<Vec<_>>>()?;
        let mut histogram = BTreeMap::new();
        for (i, c) in censuses.iter().enumerate() {
            for (&size, &count) in &c.histogram {
                rows.push((class, i, oracle_seed(cfg.seed, class, i), size, count));
                *histogram.entry(size).or_insert(0) += count;
            }
        }
        let fibers: Vec<f64> = censuses.iter().map(|c| c.mean_fiber_size()).collect();
        let pairs: Vec<f64> = censuses.iter().map(|c| c.collision_pairs() as f64).collect();
        summary.push(CensusClassSummary {
            class,
            instances: cfg.trials,
            mean_fiber_size: mean_std(&fibers).0,
            mean_collision_pairs: mean_std(&pairs).0,
            histogram,
        });
    }
    Ok(CensusOutput { rows, summary })
}

/// The collision statistic paired with each algorithm, and the scheme it is counted on.
pub fn classical_setup(algorithm: Algorithm, n: u32, k: Option<u32>) -> LabResult<(Statistic, OracleKind, BlockParams)> {
    let k = algorithm.sub_blocks(k)?;
    Ok(match algorithm {
        Algorithm::Alg1 | Algorithm::Alg2 => (Statistic::Fs4, OracleKind::Feistel, BlockParams::balanced(n, 4)?),
        Algorithm::Alg3 => (Statistic::G34, OracleKind::Unbalanced, BlockParams::new(n, 3, 4)?),
        Algorithm::KPlus1 => (Statistic::Gk, OracleKind::Unbalanced, BlockParams::new(n, k, k + 1)?),
    })
}

fn count(oracle: &OracleInstance, statistic: Statistic) -> LabResult<CollisionReport> {
    Ok(match statistic {
        Statistic::Fs4 => count_pairs_fs4(oracle)?,
        Statistic::G34 => count_pairs_g34(oracle)?,
        Statistic::Gk => count_pairs_gk(oracle, oracle.params().k)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalSummary {
    pub statistic: Statistic,
    pub n: u32,
    pub k: u32,
    pub instances: usize,
    pub m: u64,
    pub threshold: f64,
    pub expected_rp: f64,
    pub expected_scheme: f64,
    pub mean_scheme: f64,
    pub std_scheme: f64,
    pub mean_rp: f64,
    pub std_rp: f64,
    pub accuracy: Proportion,
    /// Quantum queries per run of the matching distinguisher, for comparison with `m`.
    pub quantum_queries_per_run: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalOutput {
    pub scheme: Vec<CollisionReport>,
    pub rp: Vec<CollisionReport>,
    pub summary: ClassicalSummary,
}

pub const CLASSICAL_CSV_HEADER: &str = "statistic,n,k,seed,m,N,expected_rp,expected_scheme,verdict";

pub fn classical_csv(reports: &[CollisionReport]) -> String {
    let mut s = format!("{CLASSICAL_CSV_HEADER}\n");
    for r in reports {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.statistic.name(),
            r.n,
            r.k,
            r.seed,
            r.m,
            r.pairs,
            r.expected_rp,
            r.expected_scheme,
            r.verdict
        ));
    }
    s
}

/// Collision counts over `trials` instances per class.
pub fn classical(cfg: &ExperimentConfig, execution: Execution) -> LabResult<ClassicalOutput> {
    cfg.validate()?;
    let (statistic, kind, params) = classical_setup(cfg.algorithm, cfg.n, cfg.k)?;
    OracleInstance::preflight(kind, &params)?;
    let run = |class: OracleClass| -> LabResult<Vec<CollisionReport>> {
        map_indexed(execution, cfg.trials, |i| {
            let s = oracle_seed(cfg.seed, class, i);
            let oracle = match class {
                OracleClass::Scheme => OracleInstance::build(kind, params, s)?,
                OracleClass::Rp => OracleInstance::build(OracleKind::RandomPermutation, cfg.rp_params()?, s)?,
            };
            count(&oracle, statistic)
        })
        .into_iter()
        .collect()
    };
    let mut scheme = run(OracleClass::Scheme)?;
    let mut rp = run(OracleClass::Rp)?;
    let (mean_scheme, std_scheme) = summarize_batch(&mut scheme);
    let (mean_rp, std_rp) = summarize_batch(&mut rp);
    let correct = scheme.iter().filter(|r| r.verdict == Label::Scheme).count()
        + rp.iter().filter(|r| r.verdict == Label::Rp).count();
    let acfg = cfg.algorithm_config()?;
    let first = &scheme[0];
    let summary = ClassicalSummary {
        statistic,
        n: cfg.n,
        k: params.k,
        instances: cfg.trials,
        m: first.m,
        threshold: first.threshold,
        expected_rp: first.expected_rp,
        expected_scheme: first.expected_scheme,
        mean_scheme,
        std_scheme,
        mean_rp,
        std_rp,
        accuracy: Proportion::wilson(correct as u64, 2 * cfg.trials as u64),
        quantum_queries_per_run: 2 * u64::from(acfg.q()?) * acfg.samples_per_trial as u64,
    };
    Ok(ClassicalOutput { scheme, rp, summary })
}

/// Recounts one report's `N` from scratch; used to cross-check CSV rows.
pub fn recount(report: &CollisionReport, kind: OracleKind, params: BlockParams) -> LabResult<u64> {
    let oracle = OracleInstance::build(kind, params, report.seed)?;
    let (keys, _) = collision_keys(&oracle, report.statistic)?;
    Ok(count_collisions(&keys, report.n))
}
