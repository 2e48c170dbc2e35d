//! Experiment configuration and its flat `key=value` file format.
//!
//! Files are UTF-8, one `key = value` per line, `#` starts a comment line.
//! Keys: `alg`, `n`, `k`, `epsilon`, `q`, `trials`, `seed`, `measure_reg`,
//! `mode`, `out`. [`ExperimentConfig::to_text`] writes the canonical form,
//! which parses back to the same configuration and re-serializes to the
//! same bytes.

use std::path::{Path, PathBuf};

use qfeistel::distinguish::{Algorithm, AlgorithmConfig, Budget, StatisticMode};
use qfeistel::oracle::{BlockParams, OracleInstance, OracleKind};
use serde::Serialize;

use crate::error::{config_err, LabError, LabResult};

/// A target error kept with the text it was written as, so `1/27` survives a round trip.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Epsilon {
    pub text: String,
    pub value: f64,
}

impl Epsilon {
    pub fn parse(text: &str) -> LabResult<Self> {
        let text = text.trim();
        let value = match text.split_once('/') {
            Some((a, b)) => match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
                (Ok(a), Ok(b)) if b != 0.0 => a / b,
                _ => return config_err(format!("cannot read epsilon `{text}`")),
            },
            None => text.parse::<f64>().or_else(|_| config_err(format!("cannot read epsilon `{text}`")))?,
        };
        if !(value > 0.0 && value < 1.0) {
            return config_err(format!("epsilon must lie in (0, 1), got {text}"));
        }
        Ok(Epsilon { text: text.to_string(), value })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetSpec {
    Epsilon(Epsilon),
    Queries(u32),
}

impl BudgetSpec {
    pub fn budget(&self) -> Budget {
        match self {
            BudgetSpec::Epsilon(e) => Budget::Epsilon(e.value),
            BudgetSpec::Queries(q) => Budget::Queries(*q),
        }
    }
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub n: u32,
    pub k: Option<u32>,
    pub budget: BudgetSpec,
    /// Oracle instances per class.
    pub trials: usize,
    pub seed: u64,
    /// 1-based; `None` means the algorithm's default.
    pub measure_reg: Option<usize>,
    pub mode: StatisticMode,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// Unvalidated settings from one source (a file or the command line).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub alg: Option<String>,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub epsilon: Option<String>,
    pub q: Option<u32>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub measure_reg: Option<usize>,
    pub mode: Option<String>,
    pub out: Option<String>,
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> LabResult<T> {
    value.parse().or_else(|_| config_err(format!("`{key}` expects a non-negative integer, got `{value}`")))
}

impl RawConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        let mut raw = RawConfig::default();
        let mut seen = std::collections::BTreeSet::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return config_err(format!("line {}: expected key=value, got `{line}`", lineno + 1));
            };
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            if !seen.insert(key.clone()) {
                return config_err(format!("line {}: `{key}` given twice", lineno + 1));
            }
            match key.as_str() {
                "alg" => raw.alg = Some(value.to_string()),
                "n" => raw.n = Some(parse_num(&key, value)?),
                "k" => raw.k = Some(parse_num(&key, value)?),
                "epsilon" => raw.epsilon = Some(value.to_string()),
                "q" => raw.q = Some(parse_num(&key, value)?),
                "trials" => raw.trials = Some(parse_num(&key, value)?),
                "seed" => raw.seed = Some(parse_num(&key, value)?),
                "measure_reg" => raw.measure_reg = Some(parse_num(&key, value)?),
                "mode" => raw.mode = Some(value.to_string()),
                "out" => raw.out = Some(value.to_string()),
                other => return config_err(format!("line {}: unknown key `{other}`", lineno + 1)),
            }
        }
        Ok(raw)
    }

    pub fn load(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::parse(&text)
    }

    /// `self` with every setting present in `over` replaced. A budget in
    /// `over` (either `epsilon` or `q`) replaces both budget keys.
    pub fn merged(mut self, over: RawConfig) -> Self {
        if over.epsilon.is_some() || over.q.is_some() {
            self.epsilon = over.epsilon;
            self.q = over.q;
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(alg, n, k, trials, seed, measure_reg, mode, out);
        self
    }

    pub fn resolve(self) -> LabResult<ExperimentConfig> {
        let Some(alg) = self.alg else { return config_err("no algorithm given (alg / --alg)") };
        let Some(n) = self.n else { return config_err("no sub-block width given (n / --n)") };
        let budget = match (self.epsilon, self.q) {
            (Some(_), Some(_)) => return config_err("give either epsilon or q, not both"),
            (Some(e), None) => BudgetSpec::Epsilon(Epsilon::parse(&e)?),
            (None, Some(q)) => BudgetSpec::Queries(q),
            (None, None) => return config_err("no budget given (epsilon / q)"),
        };
        let cfg = ExperimentConfig {
            algorithm: Algorithm::parse(&alg)?,
            n,
            k: self.k,
            budget,
            trials: self.trials.unwrap_or(1),
            seed: self.seed.unwrap_or(0),
            measure_reg: self.measure_reg,
            mode: StatisticMode::parse(self.mode.as_deref().unwrap_or("stacked"))?,
            out: self.out.map(PathBuf::from),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> LabResult<Self> {
        RawConfig::parse(text)?.resolve()
    }

    /// Canonical file form.
    pub fn to_text(&self) -> String {
        let mut s = self.to_text_without_out();
        if let Some(out) = &self.out {
            s.push_str(&format!("out={}\n", out.display()));
        }
        s
    }

    /// Canonical form minus the output location; this is what reports hash.
    pub fn to_text_without_out(&self) -> String {
        let mut lines = vec![format!("alg={}", self.algorithm), format!("n={}", self.n)];
        if let Some(k) = self.k {
            lines.push(format!("k={k}"));
        }
        lines.push(match &self.budget {
            BudgetSpec::Epsilon(e) => format!("epsilon={}", e.text),
            BudgetSpec::Queries(q) => format!("q={q}"),
        });
        lines.push(format!("trials={}", self.trials));
        lines.push(format!("seed={}", self.seed));
        if let Some(r) = self.measure_reg {
            lines.push(format!("measure_reg={r}"));
        }
        lines.push(format!("mode={}", self.mode.name()));
        lines.iter().map(|l| format!("{l}\n")).collect()
    }

    pub fn validate(&self) -> LabResult<()> {
        if self.trials == 0 {
            return config_err("trials must be at least 1");
        }
        let cfg = self.algorithm_config()?;
        let (kind, params) = self.algorithm.scheme(self.n, cfg.k)?;
        OracleInstance::preflight(kind, &params)?;
        OracleInstance::preflight(OracleKind::RandomPermutation, &self.rp_params()?)?;
        Ok(())
    }

    pub fn algorithm_config(&self) -> LabResult<AlgorithmConfig> {
        let mut cfg = AlgorithmConfig::new(self.algorithm, self.n, self.k, self.budget.budget())?.with_mode(self.mode);
        if let Some(r) = self.measure_reg {
            cfg = cfg.with_measured_register(r)?;
        }
        Ok(cfg)
    }

    /// Parameters of the random-permutation class (same block width as the scheme).
    pub fn rp_params(&self) -> LabResult<BlockParams> {
        let k = self.algorithm.sub_blocks(self.k)?;
        Ok(BlockParams::new(self.n, k, 1)?)
    }
}
