//! The optimization loop, experiment campaigns, statistics and persistence.

mod campaign;
mod landscape;
mod stats;

pub use campaign::{mean_sd, run_campaign, CampaignCell, CampaignConfig, CampaignResult, InstanceSpec};
pub use landscape::{landscape_slice, LandscapeCurve, SliceRequest};
pub use stats::{aggregate_wins, wilcoxon_rank_sum, InstanceOutcome, RankSum, WinSummary, EXACT_LIMIT};

use std::path::{Path, PathBuf};
use std::time::Duration;

use log::{debug, warn};
use rand::Rng;
use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::acquisition::{propose_infill, GaConfig};
use crate::domain::{normalize_objectives, Archive, EvaluatedSample, RunState};
use crate::error::{Error, Result};
use crate::io::{content_hash, to_json_string, write_json};
use crate::pareto::{hypervolume_estimate, igd, nondominated_subset};
use crate::problems::{cache_dir_from_env, default_front_size, reference_front_cached, BenchmarkInstance, Problem};
use crate::rng::{self, derive_seed, Component};
use crate::sampling::{default_lattice_h, initial_design_size, latin_hypercube, pick_weight, simplex_lattice};
use crate::scalarizers::{scalarize_archive, ScalarizerContext, ScalarizerSpec};
use crate::surrogate::{gp_fit, GpConfig, Hyperparams};

pub const DEFAULT_FE_MAX: usize = 300;

fn default_fe_max() -> usize {
    DEFAULT_FE_MAX
}

fn yes() -> bool {
    true
}

fn default_full_refit_every() -> usize {
    DEFAULT_FULL_REFIT_EVERY
}

pub const DEFAULT_FULL_REFIT_EVERY: usize = 20;

/// How the hypervolume reference point is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RefRule {
    /// Fixed per-problem values for DTLZ, twice the front nadir for WFG.
    #[default]
    Benchmark,
    Explicit(Vec<f64>),
}

impl RefRule {
    pub fn resolve(&self, inst: &BenchmarkInstance) -> Result<Vec<f64>> {
        match self {
            RefRule::Benchmark => Ok(inst.hv_reference()),
            RefRule::Explicit(r) if r.len() == inst.k => Ok(r.clone()),
            RefRule::Explicit(r) => Err(Error::DimensionMismatch {
                expected: inst.k,
                got: r.len(),
            }),
        }
    }
}

/// One optimization run. `ga.seed` is ignored: GA, GP and weight streams
/// are all derived from `seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub instance: BenchmarkInstance,
    pub scalarizer: ScalarizerSpec,
    #[serde(default = "default_fe_max")]
    pub fe_max: usize,
    #[serde(default)]
    pub seed: u64,
    /// Initial design size; `11n - 1` capped at half the budget when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_size: Option<usize>,
    #[serde(default)]
    pub ga: GaConfig,
    #[serde(default)]
    pub gp: GpConfig,
    #[serde(default)]
    pub hypi_ref: RefRule,
    /// Simplex-lattice resolution; the per-k default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_h: Option<usize>,
    /// Replace zero weight components by a small floor.
    #[serde(default = "yes")]
    pub lift_zero_weights: bool,
    /// Start each GP fit from the previous iteration's hyperparameters.
    #[serde(default = "yes")]
    pub warm_start: bool,
    /// With warm starts on, every this many iterations the fit uses all
    /// random starts instead; 0 never does.
    #[serde(default = "default_full_refit_every")]
    pub full_refit_every: usize,
    /// Reference-front sample size for IGD; the per-k default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub front_size: Option<usize>,
}

impl RunConfig {
    pub fn new(instance: BenchmarkInstance, scalarizer: ScalarizerSpec, fe_max: usize, seed: u64) -> Self {
        RunConfig {
            instance,
            scalarizer,
            fe_max,
            seed,
            init_size: None,
            ga: GaConfig::default(),
            gp: GpConfig::default(),
            hypi_ref: RefRule::Benchmark,
            lattice_h: None,
            lift_zero_weights: true,
            warm_start: true,
            full_refit_every: DEFAULT_FULL_REFIT_EVERY,
            front_size: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn init_size(&self) -> usize {
        self.init_size
            .unwrap_or_else(|| initial_design_size(self.instance.n, self.fe_max))
    }

    pub fn lattice_h(&self) -> usize {
        self.lattice_h.unwrap_or_else(|| default_lattice_h(self.instance.k))
    }

    pub fn front_size(&self) -> usize {
        self.front_size.unwrap_or_else(|| default_front_size(self.instance.k))
    }

    pub fn validate(&self) -> Result<()> {
        self.instance.validate()?;
        self.scalarizer.validate()?;
        self.ga.validate()?;
        let init = self.init_size();
        if init < self.instance.n + 2 || self.fe_max <= init {
            return Err(Error::Config(format!(
                "need fe_max > init_size >= n + 2, got fe_max={}, init_size={init}, n={}",
                self.fe_max, self.instance.n
            )));
        }
        if self.lattice_h() == 0 {
            return Err(Error::Config("lattice resolution must be positive".into()));
        }
        Ok(())
    }

    /// Short content hash of the canonical JSON form.
    pub fn hash(&self) -> Result<String> {
        content_hash(self)
    }

    /// Scalarizer with the HypI reference point filled in from the rule.
    fn resolved_scalarizer(&self) -> Result<ScalarizerSpec> {
        let mut spec = self.scalarizer.clone();
        if spec.ref_point.is_none() && spec.kind == crate::ScalarizerKind::HypervolumeImprovement {
            spec.ref_point = Some(self.hypi_ref.resolve(&self.instance)?);
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationLog {
    pub iteration: usize,
    pub eval_index: usize,
    pub weight_index: usize,
    pub weight: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperparams: Option<Hyperparams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log_marginal_likelihood: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_improvement: Option<f64>,
    /// Set when the model step failed and a random point was evaluated.
    pub fallback: bool,
    pub perturbed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub igd: f64,
    pub hv: f64,
    /// `hv` divided by the volume of the box between the origin and the
    /// reference point.
    pub hv_normalized: f64,
    pub hv_exact: bool,
    pub hv_reference: Vec<f64>,
    pub front_size: usize,
}

/// Outcome of one run. Wall time is kept in memory only, so the JSON form
/// is a pure function of the configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub config: RunConfig,
    pub config_hash: String,
    pub archive: Archive,
    pub iterations: Vec<IterationLog>,
    pub final_front: Vec<EvaluatedSample>,
    pub metrics: Metrics,
    pub evaluations: usize,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl RunResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(to_json_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn file_name(&self) -> String {
        format!("run_{}.json", self.config_hash)
    }

    /// Writes `run_<hash>.json` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(self.file_name());
        write_json(&path, self)?;
        Ok(path)
    }
}

/// Wraps a problem and counts evaluations.
struct Counted<'a> {
    inner: &'a dyn Problem,
    calls: usize,
}

impl Counted<'_> {
    fn evaluate(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.calls += 1;
        self.inner.evaluate(x)
    }
}

fn scale_to_box(u: &[f64], lower: &[f64], upper: &[f64]) -> Vec<f64> {
    u.iter()
        .zip(lower.iter().zip(upper))
        .map(|(v, (l, h))| l + v * (h - l))
        .collect()
}

fn random_point(seed: u64, counter: u64, lower: &[f64], upper: &[f64]) -> Vec<f64> {
    let mut rng = rng::stream(seed, Component::Fallback, counter);
    lower.iter().zip(upper).map(|(&l, &h)| rng.random_range(l..=h)).collect()
}

/// Metrics of the nondominated part of `archive` on raw objectives.
pub fn compute_metrics(archive: &Archive, front: &[Vec<f64>], reference: &[f64]) -> Result<Metrics> {
    let nd = nondominated_subset(archive)?;
    let rows: Vec<Vec<f64>> = nd.iter().map(|s| s.f.clone()).collect();
    let hv = hypervolume_estimate(&rows, reference);
    let box_volume: f64 = reference.iter().product();
    Ok(Metrics {
        igd: igd(&rows, front)?,
        hv: hv.value,
        hv_normalized: if box_volume > 0.0 { hv.value / box_volume } else { 0.0 },
        hv_exact: hv.exact,
        hv_reference: reference.to_vec(),
        front_size: rows.len(),
    })
}

struct Finish<'a> {
    config: &'a RunConfig,
    archive: Archive,
    iterations: Vec<IterationLog>,
    evaluations: usize,
    started: Instant,
}

fn finish(f: Finish<'_>) -> Result<RunResult> {
    let inst = &f.config.instance;
    let front = reference_front_cached(inst, f.config.front_size(), cache_dir_from_env().as_deref())?;
    let reference = f.config.hypi_ref.resolve(inst)?;
    let metrics = compute_metrics(&f.archive, &front, &reference)?;
    Ok(RunResult {
        config: f.config.clone(),
        config_hash: f.config.hash()?,
        final_front: nondominated_subset(&f.archive)?,
        archive: f.archive,
        iterations: f.iterations,
        metrics,
        evaluations: f.evaluations,
        wall_time: f.started.elapsed(),
    })
}

fn initial_archive(config: &RunConfig, problem: &mut Counted<'_>) -> Result<Archive> {
    let spec = problem.inner.spec();
    let mut archive = Archive::new(spec.clone());
    let design = latin_hypercube(config.init_size(), spec.n, derive_seed(config.seed, Component::Sampler, 0));
    for u in design {
        let x = scale_to_box(&u, &spec.lower, &spec.upper);
        let f = problem.evaluate(&x)?;
        archive.push(x, f)?;
    }
    Ok(archive)
}

/// Runs the surrogate-assisted loop on the configured benchmark.
pub fn run_ego(config: &RunConfig) -> Result<RunResult> {
    run_ego_on(config, &config.instance)
}

/// Runs the loop on an arbitrary problem with the dimensions of
/// `config.instance`; metrics still use the configured benchmark's front.
pub fn run_ego_on(config: &RunConfig, problem: &dyn Problem) -> Result<RunResult> {
    config.validate()?;
    let started = Instant::now();
    let spec = problem.spec();
    if spec.k != config.instance.k || spec.n != config.instance.n {
        return Err(Error::Config("problem dimensions differ from the configured instance".into()));
    }
    let scalarizer = config.resolved_scalarizer()?;
    let lattice = simplex_lattice(spec.k, config.lattice_h())?;
    let mut counted = Counted {
        inner: problem,
        calls: 0,
    };
    let mut archive = initial_archive(config, &mut counted)?;
    let mut iterations = Vec::new();
    let mut warm: Option<Hyperparams> = None;

    while archive.len() < config.fe_max {
        let t = iterations.len();
        let pick = pick_weight(&lattice, t as u64, config.seed, config.lift_zero_weights);
        let mut log = IterationLog {
            iteration: t,
            eval_index: archive.len(),
            weight_index: pick.index,
            weight: pick.w.clone(),
            hyperparams: None,
            log_marginal_likelihood: None,
            expected_improvement: None,
            fallback: false,
            perturbed: false,
        };
        let step = || -> Result<(Vec<f64>, Hyperparams, f64, f64, bool)> {
            let normalized = normalize_objectives(&archive)?;
            let ctx = ScalarizerContext {
                w: pick.w.clone(),
                bounds: normalized.bounds,
                gamma: pick.gamma,
                run: RunState {
                    fe: archive.len(),
                    fe_max: config.fe_max,
                    rng_seed: config.seed,
                },
                lattice_h: config.lattice_h(),
            };
            let g = scalarize_archive(&scalarizer, &archive, &ctx)?;
            let x = archive.decisions();
            let model = gp_fit(
                &x,
                &g,
                &config.gp,
                derive_seed(config.seed, Component::Surrogate, t as u64),
                if config.warm_start && (config.full_refit_every == 0 || t % config.full_refit_every != 0) {
                    warm
                } else {
                    None
                },
            )?;
            let ga = GaConfig {
                seed: derive_seed(config.seed, Component::Genetic, t as u64),
                ..config.ga.clone()
            };
            let infill = propose_infill(&model, &g, &spec, &x, &ga)?;
            Ok((infill.x, model.hyperparams(), model.log_marginal_likelihood(), infill.ei, infill.perturbed))
        };
        let x = match step() {
            Ok((x, hyper, lml, ei, perturbed)) => {
                warm = Some(hyper);
                log.hyperparams = Some(hyper);
                log.log_marginal_likelihood = Some(lml);
                log.expected_improvement = Some(ei);
                log.perturbed = perturbed;
                x
            }
            Err(e) => {
                warn!("iteration {t}: model step failed ({e}); evaluating a random point");
                log.fallback = true;
                random_point(config.seed, t as u64, &spec.lower, &spec.upper)
            }
        };
        let f = counted.evaluate(&x)?;
        debug!("iteration {t}: f = {f:?}");
        archive.push(x, f)?;
        iterations.push(log);
    }

    let evaluations = counted.calls;
    finish(Finish {
        config,
        archive,
        iterations,
        evaluations,
        started,
    })
}

/// Baseline: the same initial design followed by uniform random points,
/// for the same budget.
pub fn random_search(config: &RunConfig) -> Result<RunResult> {
    config.validate()?;
    let started = Instant::now();
    let problem = &config.instance;
    let spec = problem.spec();
    let mut counted = Counted {
        inner: problem,
        calls: 0,
    };
    let mut archive = initial_archive(config, &mut counted)?;
    let mut t = 0u64;
    while archive.len() < config.fe_max {
        let x = random_point(config.seed, t, &spec.lower, &spec.upper);
        let f = counted.evaluate(&x)?;
        archive.push(x, f)?;
        t += 1;
    }
    let evaluations = counted.calls;
    finish(Finish {
        config,
        archive,
        iterations: Vec::new(),
        evaluations,
        started,
    })
}
