use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qfeistel::distinguish::Algorithm;
use qfeistel::parallel::Execution;
use qfeistel_lab::campaign::{oracle_for, run_campaign, sweep, sweep_csv, OracleClass, SweepAxis};
use qfeistel_lab::config::{ExperimentConfig, RawConfig};
use qfeistel_lab::diagnostics::{census, classical, classical_csv};
use qfeistel_lab::error::LabResult;
use qfeistel_lab::output::write_file;

#[derive(Parser)]
#[command(name = "qfeistel-lab", version, about = "Quantum and classical distinguishers for Feistel schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one oracle instance and print or save it as JSON.
    GenOracle(GenOracleArgs),
    /// Run a campaign over both oracle classes and write its report.
    Run(ExperimentArgs),
    /// Run one campaign per value of an axis.
    Sweep {
        #[command(flatten)]
        args: ExperimentArgs,
        #[arg(long, value_parser = ["n", "q", "epsilon"])]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<String>,
    },
    /// Fiber census of the measured statistic.
    Census(ExperimentArgs),
    /// Classical collision-count baseline.
    Classical(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// key=value configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["alg1", "alg2", "alg3", "gk"])]
    alg: Option<String>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    /// Target error, e.g. 0.05 or 1/27.
    #[arg(long, conflicts_with = "q")]
    epsilon: Option<String>,
    /// Number of trials per run.
    #[arg(long)]
    q: Option<u32>,
    /// Oracle instances per class.
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// 1-based register to measure.
    #[arg(long)]
    measure_reg: Option<usize>,
    #[arg(long, value_parser = ["stacked", "per-coset"])]
    mode: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run instances one at a time on the calling thread.
    #[arg(long)]
    serial: bool,
}

impl ExperimentArgs {
    fn resolve(&self) -> LabResult<(ExperimentConfig, Execution)> {
        let file = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig::default(),
        };
        let flags = RawConfig {
            alg: self.alg.clone(),
            n: self.n,
            k: self.k,
            epsilon: self.epsilon.clone(),
            q: self.q,
            trials: self.trials,
            seed: self.seed,
            measure_reg: self.measure_reg,
            mode: self.mode.clone(),
            out: self.out.as_ref().map(|p| p.display().to_string()),
        };
        let exec = if self.serial { Execution::Sequential } else { Execution::Parallel };
        Ok((file.merged(flags).resolve()?, exec))
    }
}

#[derive(Args)]
struct GenOracleArgs {
    #[arg(long, value_parser = ["alg1", "alg2", "alg3", "gk"])]
    alg: String,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_parser = ["scheme", "rp"], default_value = "scheme")]
    class: String,
    /// Include the full lookup tables.
    #[arg(long)]
    tables: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, files: &[(&str, String)], stdout: &str) -> LabResult<()> {
    match out {
        Some(dir) => files.iter().try_for_each(|(name, text)| write_file(dir, name, text)),
        None => {
            print!("{stdout}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> LabResult<()> {
    match cli.command {
        Command::GenOracle(a) => {
            let class = if a.class == "rp" { OracleClass::Rp } else { OracleClass::Scheme };
            let oracle = oracle_for(Algorithm::parse(&a.alg)?, a.n, a.k, class, a.seed)?;
            let json = oracle.dump(a.tables).to_json() + "\n";
            emit(&a.out, &[("oracle.json", json.clone())], &json)
        }
        Command::Run(a) => {
            let (cfg, exec) = a.resolve()?;
            let out = run_campaign(&cfg, exec)?;
            let r = &out.report;
            let json = r.to_json();
            let csv = format!("{}\n{}\n", qfeistel_lab::ExperimentReport::CSV_HEADER, r.csv_row());
            emit(
                &cfg.out,
                &[
                    ("config.txt", cfg.to_text()),
                    ("report.json", json.clone()),
                    ("trials.jsonl", out.records_jsonl()),
                    ("summary.csv", csv),
                ],
                &json,
            )
        }
        Command::Sweep { args, axis, values } => {
            let (cfg, exec) = args.resolve()?;
            let axis = SweepAxis::parse(&axis)?;
            let outs = sweep(&cfg, axis, &values, exec)?;
            let csv = sweep_csv(axis, &values, &outs);
            let mut files = vec![("config.txt", cfg.to_text()), ("sweep.csv", csv.clone())];
            let reports: Vec<(String, String)> =
                outs.iter().enumerate().map(|(i, o)| (format!("report_{i}.json"), o.report.to_json())).collect();
            files.extend(reports.iter().map(|(n, t)| (n.as_str(), t.clone())));
            emit(&cfg.out, &files, &csv)
        }
        Command::Census(a) => {
            let (cfg, exec) = a.resolve()?;
            let c = census(&cfg, exec)?;
            let summary = c.summary_csv();
            emit(&cfg.out, &[("census.csv", c.csv()), ("census_summary.csv", summary.clone())], &summary)
        }
        Command::Classical(a) => {
            let (cfg, exec) = a.resolve()?;
            let c = classical(&cfg, exec)?;
            let summary = serde_json::to_string_pretty(&c.summary).expect("summary serializes") + "\n";
            emit(
                &cfg.out,
                &[
                    ("classical_scheme.csv", classical_csv(&c.scheme)),
                    ("classical_rp.csv", classical_csv(&c.rp)),
                    ("classical_summary.json", summary.clone()),
                ],
                &summary,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
