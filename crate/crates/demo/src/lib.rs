//! WebAssembly bindings for the static page in `www/`.
//!
//! Each export has a plain Rust counterpart returning [`scalbo::Result`] so
//! the logic is testable off the browser.

use scalbo::acquisition::GaConfig;
use scalbo::domain::NormalizationBounds;
use scalbo::harness::{landscape_slice, run_ego, RunConfig, SliceRequest};
use scalbo::pareto::nondominated_indices;
use scalbo::problems::{reference_front, BenchmarkInstance, Problem};
use scalbo::sampling::latin_hypercube;
use scalbo::scalarizers::{scalarize_point, ScalarizerContext};
use scalbo::{Archive, Error, Result, RunState, ScalarizerKind, ScalarizerSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Fixed population the set-based scalarizers are scored against.
const FIELD_POPULATION: [[f64; 2]; 4] = [[0.1, 0.8], [0.35, 0.45], [0.6, 0.3], [0.9, 0.05]];

fn parse_kind(label: &str) -> Result<ScalarizerKind> {
    ScalarizerKind::from_label(label).ok_or_else(|| Error::InvalidParameter(format!("unknown scalarizer '{label}'")))
}

fn weight(w1: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&w1) {
        return Err(Error::InvalidParameter(format!("weight {w1} outside [0, 1]")));
    }
    Ok(vec![w1, 1.0 - w1])
}

/// Scalarized values on a `resolution x resolution` grid over the unit
/// square of normalized objectives, row-major with `f2` as the slow index.
pub fn field(kind: &str, w1: f64, resolution: usize) -> Result<Vec<f64>> {
    if resolution < 2 {
        return Err(Error::InvalidParameter("resolution must be at least 2".into()));
    }
    let spec = ScalarizerSpec::new(parse_kind(kind)?);
    let ctx = ScalarizerContext {
        w: weight(w1)?,
        bounds: NormalizationBounds {
            ideal: vec![0.0; 2],
            nadir: vec![1.0; 2],
        },
        gamma: 0.3,
        run: RunState {
            fe: 50,
            fe_max: 100,
            rng_seed: 0,
        },
        lattice_h: 4,
    };
    let population: Vec<Vec<f64>> = FIELD_POPULATION.iter().map(|p| p.to_vec()).collect();
    let step = 1.0 / (resolution - 1) as f64;
    let mut out = Vec::with_capacity(resolution * resolution);
    for row in 0..resolution {
        for col in 0..resolution {
            let f = [col as f64 * step, row as f64 * step];
            out.push(scalarize_point(&spec, &population, &f, &ctx)?);
        }
    }
    Ok(out)
}

/// Slice through DTLZ2 with two objectives along `var_index`, the other
/// variables held at 0.5. The model is fitted to `n_samples` Latin
/// hypercube points. Returns `[x, g_true, g_pred, sd]` per grid point.
pub fn slice(kind: &str, w1: f64, var_index: usize, n_samples: usize, n_test: usize, seed: u64) -> Result<Vec<f64>> {
    let inst = BenchmarkInstance::dtlz(2, 2)?;
    let spec = inst.spec();
    let mut archive = Archive::new(spec.clone());
    for x in latin_hypercube(n_samples, spec.n, seed) {
        let f = inst.evaluate(&x)?;
        archive.push(x, f)?;
    }
    let req = SliceRequest {
        scalarizer: ScalarizerSpec::new(parse_kind(kind)?),
        weight: weight(w1)?,
        var_index,
        n_test,
        fixed_values: vec![0.5; spec.n],
        gp: Default::default(),
        seed,
        fe_max: None,
        lattice_h: None,
    };
    let curve = landscape_slice(&inst, &archive, &req)?;
    Ok((0..curve.x_grid.len())
        .flat_map(|i| [curve.x_grid[i], curve.g_true[i], curve.g_pred[i], curve.sd[i]])
        .collect())
}

#[derive(Debug, Serialize)]
pub struct DemoRun {
    pub objectives: Vec<Vec<f64>>,
    pub nondominated: Vec<usize>,
    pub init_size: usize,
    pub front: Vec<Vec<f64>>,
    pub igd: f64,
    pub hv: f64,
}

/// A short optimization on a two-objective benchmark with a reduced GA.
pub fn optimize(problem: &str, kind: &str, fe_max: usize, seed: u64) -> Result<DemoRun> {
    if fe_max > 120 {
        return Err(Error::InvalidParameter("the demo caps the budget at 120".into()));
    }
    let inst = BenchmarkInstance::from_name(problem, 2)?;
    let mut config = RunConfig::new(inst.clone(), ScalarizerSpec::new(parse_kind(kind)?), fe_max, seed);
    config.ga = GaConfig {
        population: 40,
        generations: 25,
        ..GaConfig::default()
    };
    config.front_size = Some(200);
    let init_size = config.init_size();
    let run = run_ego(&config)?;
    let objectives = run.archive.objectives();
    Ok(DemoRun {
        nondominated: nondominated_indices(&objectives),
        objectives,
        init_size,
        front: reference_front(&inst, 200),
        igd: run.metrics.igd,
        hv: run.metrics.hv,
    })
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = scalarizerField)]
pub fn scalarizer_field(kind: &str, w1: f64, resolution: usize) -> std::result::Result<Vec<f64>, JsError> {
    field(kind, w1, resolution).map_err(js)
}

#[wasm_bindgen(js_name = landscapeSlice)]
pub fn landscape(
    kind: &str,
    w1: f64,
    var_index: usize,
    n_samples: usize,
    n_test: usize,
    seed: u64,
) -> std::result::Result<Vec<f64>, JsError> {
    slice(kind, w1, var_index, n_samples, n_test, seed).map_err(js)
}

/// JSON-encoded [`DemoRun`].
#[wasm_bindgen(js_name = runOptimization)]
pub fn run_optimization(problem: &str, kind: &str, fe_max: usize, seed: u64) -> std::result::Result<String, JsError> {
    let run = optimize(problem, kind, fe_max, seed).map_err(js)?;
    serde_json::to_string(&run).map_err(|e| JsError::new(&e.to_string()))
}
