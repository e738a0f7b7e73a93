//! One-dimensional slices through a scalarized landscape and its GP model.

use serde::{Deserialize, Serialize};

use crate::domain::{normalize_objectives, Archive, RunState};
use crate::error::{check_len, Error, Result};
use crate::io::matrix_to_csv;
use crate::problems::Problem;
use crate::sampling::{angle_between, default_lattice_h, simplex_lattice};
use crate::scalarizers::{scalarize_archive, scalarize_point, ScalarizerContext, ScalarizerSpec};
use crate::surrogate::{gp_fit, GpConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceRequest {
    pub scalarizer: ScalarizerSpec,
    pub weight: Vec<f64>,
    pub var_index: usize,
    pub n_test: usize,
    /// Values of all variables; the swept one is overwritten.
    pub fixed_values: Vec<f64>,
    #[serde(default)]
    pub gp: GpConfig,
    #[serde(default)]
    pub seed: u64,
    /// Budget used for progress-dependent scalarizers; the archive size
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fe_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_h: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeCurve {
    pub x_grid: Vec<f64>,
    pub g_true: Vec<f64>,
    pub g_pred: Vec<f64>,
    pub sd: Vec<f64>,
}

impl LandscapeCurve {
    pub fn to_csv(&self) -> String {
        let header: Vec<String> = ["x", "g_true", "g_pred", "sd"].iter().map(|s| s.to_string()).collect();
        let rows: Vec<Vec<f64>> = (0..self.x_grid.len())
            .map(|i| vec![self.x_grid[i], self.g_true[i], self.g_pred[i], self.sd[i]])
            .collect();
        matrix_to_csv(&header, &rows)
    }
}

/// Sweeps variable `var_index` over its bounds with the others held at
/// `fixed_values`, reporting the true scalarized value (normalized with the
/// archive's bounds), the GP mean fitted to the archive's scalarized values,
/// and the GP standard deviation. Values are minimization-oriented.
pub fn landscape_slice(problem: &dyn Problem, archive: &Archive, req: &SliceRequest) -> Result<LandscapeCurve> {
    let spec = problem.spec();
    check_len(spec.n, req.fixed_values.len())?;
    check_len(spec.k, req.weight.len())?;
    if req.var_index >= spec.n {
        return Err(Error::InvalidParameter(format!(
            "variable index {} out of range for {} variables",
            req.var_index, spec.n
        )));
    }
    if req.n_test < 2 {
        return Err(Error::InvalidParameter("a slice needs at least 2 grid points".into()));
    }
    req.scalarizer.validate()?;
    let lattice_h = req.lattice_h.unwrap_or_else(|| default_lattice_h(spec.k));
    let lattice = simplex_lattice(spec.k, lattice_h)?;
    let gamma = lattice
        .vectors
        .iter()
        .map(|v| angle_between(v, &req.weight))
        .filter(|a| *a > 1e-12)
        .fold(f64::INFINITY, f64::min);
    let normalized = normalize_objectives(archive)?;
    let ctx = ScalarizerContext {
        w: req.weight.clone(),
        bounds: normalized.bounds.clone(),
        gamma: if gamma.is_finite() { gamma } else { std::f64::consts::FRAC_PI_2 },
        run: RunState {
            fe: archive.len(),
            fe_max: req.fe_max.unwrap_or(archive.len()).max(archive.len()),
            rng_seed: req.seed,
        },
        lattice_h,
    };
    let g = scalarize_archive(&req.scalarizer, archive, &ctx)?;
    let model = gp_fit(&archive.decisions(), &g, &req.gp, req.seed, None)?;

    let (lo, hi) = (spec.lower[req.var_index], spec.upper[req.var_index]);
    let mut curve = LandscapeCurve {
        x_grid: Vec::with_capacity(req.n_test),
        g_true: Vec::with_capacity(req.n_test),
        g_pred: Vec::with_capacity(req.n_test),
        sd: Vec::with_capacity(req.n_test),
    };
    let mut x = req.fixed_values.clone();
    for i in 0..req.n_test {
        let v = lo + (hi - lo) * i as f64 / (req.n_test - 1) as f64;
        x[req.var_index] = v;
        let f = problem.evaluate(&x)?;
        let g_true = scalarize_point(&req.scalarizer, &normalized.values, &normalized.bounds.normalize(&f), &ctx)?;
        let (mu, var) = model.predict(&x);
        curve.x_grid.push(v);
        curve.g_true.push(g_true);
        curve.g_pred.push(mu);
        curve.sd.push(var.max(0.0).sqrt());
    }
    Ok(curve)
}
