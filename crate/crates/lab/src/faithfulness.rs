//! The side-by-side measurement set: each algorithm under its literal
//! configuration and the register-3 / per-coset variants.

use qfeistel::distinguish::{Algorithm, StatisticMode};
use qfeistel::parallel::Execution;
use serde::Serialize;

use crate::campaign::{run_variants, ExperimentReport, OracleClass, Variant};
use crate::config::{BudgetSpec, Epsilon, ExperimentConfig};
use crate::error::LabResult;

/// Which configuration a row measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantName {
    Literal,
    Register3,
    PerCoset,
}

impl VariantName {
    pub fn name(self) -> &'static str {
        match self {
            VariantName::Literal => "literal",
            VariantName::Register3 => "register-3",
            VariantName::PerCoset => "per-coset",
        }
    }

    fn variant(self) -> Variant {
        match self {
            VariantName::Literal => Variant { measure_reg: None, mode: StatisticMode::Stacked },
            VariantName::Register3 => Variant { measure_reg: Some(3), mode: StatisticMode::Stacked },
            VariantName::PerCoset => Variant { measure_reg: None, mode: StatisticMode::PerCoset },
        }
    }
}

/// The variants measured for each algorithm. Register 3 is the literal choice
/// for `Alg2`, so only `Alg1` gets a separate register-3 row.
pub fn variants_for(algorithm: Algorithm) -> Vec<VariantName> {
    match algorithm {
        Algorithm::Alg1 => vec![VariantName::Literal, VariantName::Register3, VariantName::PerCoset],
        _ => vec![VariantName::Literal, VariantName::PerCoset],
    }
}

/// Base configuration: `Alg1` at `ε = 1/27` (q = 3), the majority rules at q = 21.
pub fn base_config(algorithm: Algorithm, n: u32, runs: usize, seed: u64) -> ExperimentConfig {
    let budget = match algorithm {
        Algorithm::Alg1 => BudgetSpec::Epsilon(Epsilon::parse("1/27").expect("constant parses")),
        _ => BudgetSpec::Queries(21),
    };
    ExperimentConfig {
        algorithm,
        n,
        k: (algorithm == Algorithm::KPlus1).then_some(4),
        budget,
        trials: runs,
        seed,
        measure_reg: None,
        mode: StatisticMode::Stacked,
        out: None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FaithfulnessRow {
    pub variant: VariantName,
    pub report: ExperimentReport,
}

/// Runs every algorithm and variant at each `n`.
pub fn faithfulness(ns: &[u32], runs: usize, seed: u64, execution: Execution) -> LabResult<Vec<FaithfulnessRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        for alg in Algorithm::ALL {
            let base = base_config(alg, n, runs, seed);
            let names = variants_for(alg);
            let variants: Vec<Variant> = names.iter().map(|v| v.variant()).collect();
            for (variant, out) in names.into_iter().zip(run_variants(&base, &variants, execution)?) {
                rows.push(FaithfulnessRow { variant, report: out.report });
            }
        }
    }
    Ok(rows)
}

/// Fixed-width text table of the rows.
pub fn render_table(rows: &[FaithfulnessRow]) -> String {
    let mut s = format!(
        "{:<5} {:>2} {:<10} {:>3} {:>3} | {:>5} {:>5} {:>5} {:>5} | {:>7} {:>17} {:>9} | {:>6} {:>6} {:>6} {:>6}\n",
        "alg", "n", "variant", "reg", "q", "S|S", "R|S", "S|R", "R|R", "error", "wilson95", "bound", "x|S", "x|R",
        "claim", "claim"
    );
    for row in rows {
        let r = &row.report;
        let c = &r.confusion;
        let (sc, rp) = (r.class(OracleClass::Scheme), r.class(OracleClass::Rp));
        s.push_str(&format!(
            "{:<5} {:>2} {:<10} {:>3} {:>3} | {:>5} {:>5} {:>5} {:>5} | {:>7.4} [{:.4}, {:.4}] {:>9.3e} | {:>6.3} {:>6.3} {:>6.3} {:>6.3}\n",
            r.config.algorithm.name(),
            r.config.n,
            row.variant.name(),
            r.measured_register,
            r.q,
            c.scheme_as_scheme,
            c.scheme_as_rp,
            c.rp_as_scheme,
            c.rp_as_rp,
            r.empirical_error.estimate,
            r.empirical_error.lower,
            r.empirical_error.upper,
            r.error_bound,
            sc.x_rate.estimate,
            rp.x_rate.estimate,
            sc.claimed_x_rate,
            rp.claimed_x_rate,
        ));
    }
    s
}
