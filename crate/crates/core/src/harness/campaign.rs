//! Many runs over instances x scalarizers x seeds, summarized per cell.

use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{aggregate_wins, WinSummary};
use super::{run_ego, RefRule, RunConfig, RunResult, DEFAULT_FE_MAX, DEFAULT_FULL_REFIT_EVERY};
use crate::acquisition::GaConfig;
use crate::error::{Error, Result};
use crate::io::{content_hash, fmt_f64, write_json};
use crate::problems::BenchmarkInstance;
use crate::scalarizers::ScalarizerSpec;
use crate::surrogate::GpConfig;

fn default_fe_max() -> usize {
    DEFAULT_FE_MAX
}

fn default_alpha() -> f64 {
    0.05
}

fn yes() -> bool {
    true
}

fn default_full_refit_every() -> usize {
    DEFAULT_FULL_REFIT_EVERY
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub problem: String,
    pub k: usize,
}

/// Run `r` of every cell uses seed `seed + r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub instances: Vec<InstanceSpec>,
    pub scalarizers: Vec<ScalarizerSpec>,
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_fe_max")]
    pub fe_max: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_size: Option<usize>,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub gp: GpConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_h: Option<usize>,
    #[serde(default = "yes")]
    pub lift_zero_weights: bool,
    #[serde(default = "yes")]
    pub warm_start: bool,
    #[serde(default = "default_full_refit_every")]
    pub full_refit_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_size: Option<usize>,
    /// Significance level for the bold sets.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// One configuration per run, instance-major, then scalarizer, then seed.
    pub fn run_configs(&self) -> Result<Vec<RunConfig>> {
        if self.instances.is_empty() {
            return Err(Error::Config("campaign has no instances".into()));
        }
        if self.scalarizers.is_empty() {
            return Err(Error::Config("campaign has no scalarizers".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("campaign needs at least one run per cell".into()));
        }
        let labels: Vec<&str> = self.scalarizers.iter().map(|s| s.kind.label()).collect();
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::Config(format!("scalarizer {l} listed twice")));
            }
        }
        let mut out = Vec::new();
        for spec in &self.instances {
            let inst = BenchmarkInstance::from_name(&spec.problem, spec.k)?;
            for s in &self.scalarizers {
                for r in 0..self.runs {
                    let c = RunConfig {
                        instance: inst.clone(),
                        scalarizer: s.clone(),
                        fe_max: self.fe_max,
                        seed: self.seed.wrapping_add(r as u64),
                        init_size: self.init_size,
                        ga: self.ga.clone(),
                        gp: self.gp.clone(),
                        hypi_ref: RefRule::Benchmark,
                        lattice_h: self.lattice_h,
                        lift_zero_weights: self.lift_zero_weights,
                        warm_start: self.warm_start,
                        full_refit_every: self.full_refit_every,
                        front_size: self.front_size,
                    };
                    c.validate()?;
                    out.push(c);
                }
            }
        }
        Ok(out)
    }

    pub fn hash(&self) -> Result<String> {
        content_hash(self)
    }
}

/// Per-run metrics of one instance/scalarizer pair and their summaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignCell {
    pub instance: String,
    pub k: usize,
    pub scalarizer: String,
    pub seeds: Vec<u64>,
    pub igd: Vec<f64>,
    pub hv: Vec<f64>,
    pub mean_igd: f64,
    pub sd_igd: f64,
    pub mean_hv: f64,
    pub sd_hv: f64,
}

/// Mean and sample standard deviation; a single value has SD 0.
pub fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl CampaignCell {
    fn from_runs(runs: &[&RunResult]) -> Self {
        let first = &runs[0].config;
        let igd: Vec<f64> = runs.iter().map(|r| r.metrics.igd).collect();
        let hv: Vec<f64> = runs.iter().map(|r| r.metrics.hv).collect();
        let (mean_igd, sd_igd) = mean_sd(&igd);
        let (mean_hv, sd_hv) = mean_sd(&hv);
        CampaignCell {
            instance: first.instance.name(),
            k: first.instance.k,
            scalarizer: first.scalarizer.kind.label().to_string(),
            seeds: runs.iter().map(|r| r.config.seed).collect(),
            igd,
            hv,
            mean_igd,
            sd_igd,
            mean_hv,
            sd_hv,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignResult {
    pub config: CampaignConfig,
    pub runs: Vec<RunResult>,
    pub cells: Vec<CampaignCell>,
    pub wins: WinSummary,
}

impl CampaignResult {
    /// Long-format table, one row per cell.
    pub fn table_csv(&self) -> String {
        let mut s = String::from("problem,k,scalarizer,runs,mean_igd,sd_igd,mean_hv,sd_hv\n");
        for c in &self.cells {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                c.instance,
                c.k,
                c.scalarizer,
                c.igd.len(),
                fmt_f64(c.mean_igd),
                fmt_f64(c.sd_igd),
                fmt_f64(c.mean_hv),
                fmt_f64(c.sd_hv)
            ));
        }
        s
    }

    /// Writes `campaign_<hash>.csv`, `wins_<hash>.json` and one JSON file per
    /// run into `dir`. Returns the table and win-count paths.
    pub fn save(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let hash = self.config.hash()?;
        let table = dir.join(format!("campaign_{hash}.csv"));
        std::fs::write(&table, self.table_csv())?;
        let wins = dir.join(format!("wins_{hash}.json"));
        write_json(&wins, &self.wins)?;
        for r in &self.runs {
            r.save(dir)?;
        }
        Ok((table, wins))
    }
}

fn execute(configs: &[RunConfig]) -> Result<Vec<RunResult>> {
    #[cfg(feature = "parallel")]
    {
        configs.par_iter().map(run_ego).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        configs.iter().map(run_ego).collect()
    }
}

/// Runs every configuration (in parallel with the `parallel` feature) and
/// summarizes per cell. Results do not depend on execution order.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignResult> {
    let configs = config.run_configs()?;
    let runs = execute(&configs)?;
    let cells: Vec<CampaignCell> = runs
        .chunks(config.runs)
        .map(|chunk| CampaignCell::from_runs(&chunk.iter().collect::<Vec<_>>()))
        .collect();
    let wins = aggregate_wins(&cells, config.alpha)?;
    Ok(CampaignResult {
        config: config.clone(),
        runs,
        cells,
        wins,
    })
}
