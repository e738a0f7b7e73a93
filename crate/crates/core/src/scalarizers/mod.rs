//! The fifteen scalarizing functions and the dispatch that turns an archive
//! into one surrogate training target per sample.

mod functions;
mod setwise;

pub use functions::{
    apd, augmented_chebyshev, chebyshev, exp_weighted_criterion, inverted_pbi, modified_chebyshev,
    pbi, pbi_distances, qpbi_d_star, quadratic_pbi, weighted_norm, weighted_power,
    weighted_product, weighted_sum,
};
pub use setwise::{domrank_fitness, hypi_fitness, msd_fitness};

use serde::{Deserialize, Serialize};

use crate::domain::{normalize_rows, Archive, NormalizationBounds, RunState};
use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ScalarizerKind {
    #[serde(rename = "WS")]
    WeightedSum,
    #[serde(rename = "EWC")]
    ExpWeightedCriterion,
    #[serde(rename = "WPO")]
    WeightedPower,
    #[serde(rename = "WN")]
    WeightedNorm,
    #[serde(rename = "WPR")]
    WeightedProduct,
    #[serde(rename = "TCH")]
    Chebyshev,
    #[serde(rename = "ATCH")]
    AugmentedChebyshev,
    #[serde(rename = "MTCH")]
    ModifiedChebyshev,
    #[serde(rename = "PBI")]
    Pbi,
    #[serde(rename = "IPBI")]
    InvertedPbi,
    #[serde(rename = "QPBI")]
    QuadraticPbi,
    #[serde(rename = "APD")]
    AnglePenalizedDistance,
    #[serde(rename = "HypI")]
    HypervolumeImprovement,
    #[serde(rename = "DomRank")]
    DominanceRank,
    #[serde(rename = "MSD")]
    MinimumSignedDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Minimize,
    Maximize,
}

impl ScalarizerKind {
    pub const ALL: [ScalarizerKind; 15] = [
        ScalarizerKind::WeightedSum,
        ScalarizerKind::ExpWeightedCriterion,
        ScalarizerKind::WeightedPower,
        ScalarizerKind::WeightedNorm,
        ScalarizerKind::WeightedProduct,
        ScalarizerKind::Chebyshev,
        ScalarizerKind::AugmentedChebyshev,
        ScalarizerKind::ModifiedChebyshev,
        ScalarizerKind::Pbi,
        ScalarizerKind::InvertedPbi,
        ScalarizerKind::QuadraticPbi,
        ScalarizerKind::AnglePenalizedDistance,
        ScalarizerKind::HypervolumeImprovement,
        ScalarizerKind::DominanceRank,
        ScalarizerKind::MinimumSignedDistance,
    ];

    pub fn label(self) -> &'static str {
        use ScalarizerKind::*;
        match self {
            WeightedSum => "WS",
            ExpWeightedCriterion => "EWC",
            WeightedPower => "WPO",
            WeightedNorm => "WN",
            WeightedProduct => "WPR",
            Chebyshev => "TCH",
            AugmentedChebyshev => "ATCH",
            ModifiedChebyshev => "MTCH",
            Pbi => "PBI",
            InvertedPbi => "IPBI",
            QuadraticPbi => "QPBI",
            AnglePenalizedDistance => "APD",
            HypervolumeImprovement => "HypI",
            DominanceRank => "DomRank",
            MinimumSignedDistance => "MSD",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.label().eq_ignore_ascii_case(label))
    }

    pub fn direction(self) -> Direction {
        match self {
            ScalarizerKind::HypervolumeImprovement
            | ScalarizerKind::DominanceRank
            | ScalarizerKind::MinimumSignedDistance => Direction::Maximize,
            _ => Direction::Minimize,
        }
    }

    /// Whether a sample's value depends on the rest of the archive.
    pub fn is_setwise(self) -> bool {
        self.direction() == Direction::Maximize
    }
}

impl std::fmt::Display for ScalarizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Which scalarizer to use and its parameters. Missing parameters take the
/// per-kind defaults (`p` 100/3/0.5 for EWC/WPO/WN, `alpha` 1e-4 for the
/// augmented and modified Chebyshev and 2 for APD, `theta` 5/5/1 for
/// PBI/IPBI/QPBI).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalarizerSpec {
    pub kind: ScalarizerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    /// HypI reference point in raw objective space.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ref_point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_star_alpha: Option<f64>,
}

/// Default HypI reference coordinate in normalized space.
pub const DEFAULT_NORMALIZED_REF: f64 = 2.0;

impl ScalarizerSpec {
    pub fn new(kind: ScalarizerKind) -> Self {
        ScalarizerSpec {
            kind,
            p: None,
            alpha: None,
            theta: None,
            ref_point: None,
            d_star_alpha: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ScalarizerSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    pub fn with_ref_point(mut self, r: Vec<f64>) -> Self {
        self.ref_point = Some(r);
        self
    }

    pub fn p(&self) -> f64 {
        self.p.unwrap_or(match self.kind {
            ScalarizerKind::ExpWeightedCriterion => 100.0,
            ScalarizerKind::WeightedPower => 3.0,
            ScalarizerKind::WeightedNorm => 0.5,
            _ => 1.0,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(match self.kind {
            ScalarizerKind::AnglePenalizedDistance => 2.0,
            _ => 1e-4,
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta.unwrap_or(match self.kind {
            ScalarizerKind::QuadraticPbi => 1.0,
            _ => 5.0,
        })
    }

    pub fn d_star_alpha(&self) -> f64 {
        self.d_star_alpha.unwrap_or(1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self.kind {
            ScalarizerKind::ExpWeightedCriterion if !(self.p() > 0.0) => {
                bad(format!("EWC needs p > 0, got {}", self.p()))
            }
            ScalarizerKind::WeightedPower if !(self.p() > 0.0) => {
                bad(format!("WPO needs p > 0, got {}", self.p()))
            }
            ScalarizerKind::WeightedNorm if self.p() == 0.0 || !self.p().is_finite() => {
                bad(format!("WN needs finite p != 0, got {}", self.p()))
            }
            ScalarizerKind::AugmentedChebyshev
            | ScalarizerKind::ModifiedChebyshev
            | ScalarizerKind::AnglePenalizedDistance
                if !(self.alpha() >= 0.0) =>
            {
                bad(format!("{} needs alpha >= 0, got {}", self.kind, self.alpha()))
            }
            ScalarizerKind::Pbi | ScalarizerKind::InvertedPbi | ScalarizerKind::QuadraticPbi
                if !(self.theta() >= 0.0) =>
            {
                bad(format!("{} needs theta >= 0, got {}", self.kind, self.theta()))
            }
            ScalarizerKind::QuadraticPbi if !(self.d_star_alpha() > 0.0) => {
                bad(format!("QPBI needs d_star_alpha > 0, got {}", self.d_star_alpha()))
            }
            _ => Ok(()),
        }
    }
}

/// Per-iteration inputs shared by all scalarizers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarizerContext {
    /// Weight vector, nonnegative and summing to one.
    pub w: Vec<f64>,
    /// Raw-space ideal and nadir of the archive.
    pub bounds: NormalizationBounds,
    /// Minimum angle between the chosen lattice vector and any other.
    pub gamma: f64,
    pub run: RunState,
    pub lattice_h: usize,
}

impl ScalarizerContext {
    pub fn validate(&self, k: usize) -> Result<()> {
        check_len(k, self.w.len())?;
        check_len(k, self.bounds.dim())?;
        if self.w.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        let s: f64 = self.w.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("weights sum to {s}, not 1")));
        }
        Ok(())
    }

    /// HypI reference point in normalized space: the raw point mapped through
    /// the archive bounds, or the default when none is configured.
    pub fn normalized_reference(&self, spec: &ScalarizerSpec) -> Result<Vec<f64>> {
        let k = self.bounds.dim();
        match &spec.ref_point {
            None => Ok(vec![DEFAULT_NORMALIZED_REF; k]),
            Some(r) => {
                check_len(k, r.len())?;
                Ok((0..k)
                    .map(|i| {
                        if self.bounds.is_degenerate(i) {
                            DEFAULT_NORMALIZED_REF
                        } else {
                            (r[i] - self.bounds.ideal[i]) / (self.bounds.nadir[i] - self.bounds.ideal[i])
                        }
                    })
                    .collect())
            }
        }
    }
}

/// Ideal and nadir in scalarizer space: normalization maps them to the
/// origin and the all-ones vector.
fn unit_bounds(k: usize) -> NormalizationBounds {
    NormalizationBounds {
        ideal: vec![0.0; k],
        nadir: vec![1.0; k],
    }
}

fn pointwise(spec: &ScalarizerSpec, f: &[f64], ctx: &ScalarizerContext, space: &NormalizationBounds) -> Result<f64> {
    use ScalarizerKind::*;
    let w = &ctx.w;
    match spec.kind {
        WeightedSum => weighted_sum(f, w),
        ExpWeightedCriterion => exp_weighted_criterion(f, w, spec.p()),
        WeightedPower => weighted_power(f, w, spec.p()),
        WeightedNorm => weighted_norm(f, w, spec.p()),
        WeightedProduct => weighted_product(f, w),
        Chebyshev => chebyshev(f, w),
        AugmentedChebyshev => augmented_chebyshev(f, w, spec.alpha()),
        ModifiedChebyshev => modified_chebyshev(f, w, spec.alpha()),
        Pbi => pbi(f, w, spec.theta()),
        InvertedPbi => inverted_pbi(f, w, spec.theta(), &space.nadir),
        QuadraticPbi => {
            let d_star = qpbi_d_star(spec.d_star_alpha(), ctx.lattice_h, &space.ideal, &space.nadir)?;
            quadratic_pbi(f, w, spec.theta(), d_star)
        }
        AnglePenalizedDistance => apd(f, w, spec.alpha(), ctx.run.progress(), ctx.gamma),
        HypervolumeImprovement | DominanceRank | MinimumSignedDistance => {
            unreachable!("set-based scalarizers are handled by scalarize_rows")
        }
    }
}

/// Scalarizes already-normalized rows. Output is oriented for minimization:
/// HypI, DomRank and MSD values are negated.
pub fn scalarize_rows(spec: &ScalarizerSpec, rows: &[Vec<f64>], ctx: &ScalarizerContext) -> Result<Vec<f64>> {
    spec.validate()?;
    let k = rows.first().ok_or(Error::Empty("archive"))?.len();
    ctx.validate(k)?;
    let raw = match spec.kind {
        ScalarizerKind::HypervolumeImprovement => hypi_fitness(rows, &ctx.normalized_reference(spec)?)?,
        ScalarizerKind::DominanceRank => domrank_fitness(rows)?,
        ScalarizerKind::MinimumSignedDistance => msd_fitness(rows)?,
        _ => {
            let space = unit_bounds(k);
            return rows.iter().map(|f| pointwise(spec, f, ctx, &space)).collect();
        }
    };
    Ok(raw.into_iter().map(|v| -v).collect())
}

/// Normalizes the archive objectives and scalarizes every sample.
pub fn scalarize_archive(spec: &ScalarizerSpec, archive: &Archive, ctx: &ScalarizerContext) -> Result<Vec<f64>> {
    if archive.is_empty() {
        return Err(Error::Empty("archive"));
    }
    let normalized = normalize_rows(&archive.objectives())?;
    scalarize_rows(spec, &normalized.values, ctx)
}

/// Minimization-oriented value of a new normalized point against an
/// already-normalized archive. Set-based scalarizers score the point within
/// `rows + [f]`.
pub fn scalarize_point(spec: &ScalarizerSpec, rows: &[Vec<f64>], f: &[f64], ctx: &ScalarizerContext) -> Result<f64> {
    if spec.kind.is_setwise() {
        let mut all = rows.to_vec();
        all.push(f.to_vec());
        let g = scalarize_rows(spec, &all, ctx)?;
        Ok(g[g.len() - 1])
    } else {
        spec.validate()?;
        ctx.validate(f.len())?;
        let space = unit_bounds(f.len());
        pointwise(spec, f, ctx, &space)
    }
}
