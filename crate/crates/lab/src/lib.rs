//! Experiment harness for the `qfeistel` distinguishers: configuration files,
//! Monte Carlo campaigns, sweeps, classical diagnostics and reports.

pub mod campaign;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod faithfulness;
pub mod output;

pub use campaign::{run_campaign, run_variants, sweep, CampaignOutput, ExperimentReport, OracleClass, SweepAxis, Variant};
pub use config::{ExperimentConfig, RawConfig};
pub use error::{LabError, LabResult};
