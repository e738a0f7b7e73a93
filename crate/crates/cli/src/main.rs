use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use scalbo::harness::{landscape_slice, run_campaign, run_ego, CampaignConfig, RunConfig, RunResult, SliceRequest};
use scalbo::io::{content_hash, read_matrix_csv, write_json};
use scalbo::pareto::{hypervolume_estimate, igd};
use scalbo::problems::BenchmarkInstance;
use scalbo::Archive;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "scalbo", version, about = "Scalarization-based Bayesian multiobjective optimization")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Overrides the seed given in the input file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for campaigns; all cores when absent.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Runs one optimization from a run configuration JSON.
    Run { config: PathBuf },
    /// Runs every instance/scalarizer/seed combination of a campaign JSON.
    Campaign { config: PathBuf },
    /// Samples a one-dimensional slice of a scalarized landscape and its model.
    Landscape {
        /// Archive JSON, or a run result JSON whose archive is used.
        #[arg(long)]
        archive: PathBuf,
        /// Slice request JSON.
        #[arg(long)]
        request: PathBuf,
        /// Problem name such as DTLZ2; read from the run result when omitted.
        #[arg(long)]
        problem: Option<String>,
    },
    /// IGD and hypervolume of an approximation set against a reference front.
    Metrics {
        /// Reference front CSV with a header row.
        #[arg(long)]
        front: PathBuf,
        /// Approximation set CSV with a header row.
        #[arg(long)]
        approx: PathBuf,
        /// Hypervolume reference point as comma-separated values; 1.1 times
        /// the front's componentwise maximum when absent.
        #[arg(long, value_delimiter = ',')]
        reference: Option<Vec<f64>>,
    },
}

#[derive(Serialize)]
struct MetricsReport {
    igd: f64,
    hv: f64,
    hv_std_error: f64,
    hv_exact: bool,
    hv_reference: Vec<f64>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn cmd_run(global: &Global, path: &Path) -> Result<Vec<PathBuf>> {
    let mut config = RunConfig::from_json(&read(path)?)?;
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    let result = run_ego(&config)?;
    eprintln!(
        "{} with {}: IGD {:.6}, HV {:.6} after {} evaluations",
        config.instance,
        config.scalarizer.kind.label(),
        result.metrics.igd,
        result.metrics.hv,
        result.evaluations
    );
    Ok(vec![result.save(&global.out_dir)?])
}

fn cmd_campaign(global: &Global, path: &Path) -> Result<Vec<PathBuf>> {
    let mut config = CampaignConfig::from_json(&read(path)?)?;
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    let result = run_campaign(&config)?;
    for c in &result.cells {
        eprintln!(
            "{} k={} {}: IGD {:.4} ({:.4})",
            c.instance, c.k, c.scalarizer, c.mean_igd, c.sd_igd
        );
    }
    let (table, wins) = result.save(&global.out_dir)?;
    Ok(vec![table, wins])
}

fn cmd_landscape(global: &Global, archive: &Path, request: &Path, problem: Option<&str>) -> Result<Vec<PathBuf>> {
    let text = read(archive)?;
    let (archive, from_run) = match RunResult::from_json(&text) {
        Ok(run) => (run.archive, Some(run.config.instance)),
        Err(_) => (Archive::from_json(&text).context("archive file is neither a run result nor an archive")?, None),
    };
    let instance = match (problem, from_run) {
        (Some(name), _) => BenchmarkInstance::from_name(name, archive.problem.k)?,
        (None, Some(inst)) => inst,
        (None, None) => bail!("--problem is required when the archive file is not a run result"),
    };
    let mut req: SliceRequest = serde_json::from_str(&read(request)?).context("parsing slice request")?;
    if let Some(seed) = global.seed {
        req.seed = seed;
    }
    let curve = landscape_slice(&instance, &archive, &req)?;
    let hash = content_hash(&(&archive, &req, instance.name()))?;
    std::fs::create_dir_all(&global.out_dir)?;
    let out = global.out_dir.join(format!("landscape_{hash}.csv"));
    std::fs::write(&out, curve.to_csv())?;
    Ok(vec![out])
}

fn cmd_metrics(global: &Global, front: &Path, approx: &Path, reference: Option<Vec<f64>>) -> Result<Vec<PathBuf>> {
    let front = read_matrix_csv(front).with_context(|| format!("reading {}", front.display()))?;
    let approx = read_matrix_csv(approx).with_context(|| format!("reading {}", approx.display()))?;
    let k = front.first().map_or(0, |r| r.len());
    if approx.iter().any(|r| r.len() != k) {
        bail!("front has {k} objectives but the approximation set does not");
    }
    let reference = match reference {
        Some(r) if r.len() == k => r,
        Some(r) => bail!("reference point has {} values, expected {k}", r.len()),
        None => (0..k)
            .map(|j| 1.1 * front.iter().map(|r| r[j]).fold(f64::NEG_INFINITY, f64::max))
            .collect(),
    };
    let hv = hypervolume_estimate(&approx, &reference);
    let report = MetricsReport {
        igd: igd(&approx, &front)?,
        hv: hv.value,
        hv_std_error: hv.std_error,
        hv_exact: hv.exact,
        hv_reference: reference,
    };
    println!("{}", serde_json::to_string_pretty(&report)?);
    let hash = content_hash(&(&front, &approx, &report.hv_reference))?;
    std::fs::create_dir_all(&global.out_dir)?;
    let out = global.out_dir.join(format!("metrics_{hash}.json"));
    write_json(&out, &report)?;
    Ok(vec![out])
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let started = Instant::now();
    let g = &cli.global;
    let written = match &cli.command {
        Command::Run { config } => cmd_run(g, config)?,
        Command::Campaign { config } => cmd_campaign(g, config)?,
        Command::Landscape {
            archive,
            request,
            problem,
        } => cmd_landscape(g, archive, request, problem.as_deref())?,
        Command::Metrics {
            front,
            approx,
            reference,
        } => cmd_metrics(g, front, approx, reference.clone())?,
    };
    for p in &written {
        eprintln!("wrote {}", p.display());
    }
    eprintln!("wall time {:.2} s", started.elapsed().as_secs_f64());
    Ok(())
}
