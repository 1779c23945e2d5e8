//! Likelihood evaluation and maximum-likelihood fitting.
//!
//! The log-likelihood of an ordered tree factorizes over vertices, so it
//! depends on a corpus only through the offspring tallies. Fitting
//! maximizes it over the non-negative structure parameters with a
//! deterministic multi-start simplex search on log-transformed
//! coordinates; moves into infeasible regions score `-inf` and are simply
//! rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::offspring::{NativeParams, OffspringFamily};
use crate::optim::NelderMead;
use crate::stats::SufficientStats;
use crate::structure::{ModelSpec, StructureKind, StructureSpec};

/// A model with the family assignment and structure kinds fixed and the
/// structure parameters left free.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitTemplate {
    pub default_family: OffspringFamily,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub family_overrides: BTreeMap<u32, OffspringFamily>,
    pub mean: StructureKind,
    pub variance: StructureKind,
}

impl FitTemplate {
    /// The template of the built-in reference model.
    pub fn reference() -> Self {
        let mut family_overrides = BTreeMap::new();
        family_overrides.insert(0, OffspringFamily::PoissonZero);
        FitTemplate {
            default_family: OffspringFamily::GeometricZero,
            family_overrides,
            mean: StructureKind::AnchoredExpConst,
            variance: StructureKind::Exp,
        }
    }

    /// Total number of free parameters.
    pub fn dim(&self) -> usize {
        self.mean.arity() + self.variance.arity()
    }

    /// Instantiates a model from a flat parameter vector
    /// (mean parameters first).
    pub fn model_with(&self, params: &[f64]) -> Result<ModelSpec> {
        let split = self.mean.arity();
        if params.len() != self.dim() {
            return Err(Error::InvalidParameter(format!(
                "template takes {} parameters, got {}",
                self.dim(),
                params.len()
            )));
        }
        Ok(ModelSpec {
            default_family: self.default_family,
            family_overrides: self.family_overrides.clone(),
            mean: StructureSpec::new(self.mean, params[..split].to_vec())?,
            variance: StructureSpec::new(self.variance, params[split..].to_vec())?,
        })
    }
}

/// Optimizer settings for [`fit`]. Defaults: 16 deterministic starts,
/// simplex spread tolerance 1e-8.
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub starts: usize,
    pub max_iterations: usize,
    pub spread_tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions { starts: 16, max_iterations: 4000, spread_tol: 1e-8 }
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    /// The template instantiated with the fitted parameters.
    pub model: ModelSpec,
    /// Full log-likelihood at the optimum (constants included).
    pub log_likelihood: f64,
    /// Whether the winning run met the simplex spread tolerance.
    pub converged: bool,
    /// Set when the optimum sits on the parameter or probability boundary
    /// (for instance a fitted zero-offspring probability of one). Such
    /// optima are legitimate for degenerate corpora.
    pub boundary: bool,
    /// Simplex iterations spent by the winning start.
    pub iterations: usize,
    /// Number of multi-start points that had a feasible neighborhood and
    /// were actually searched.
    pub restarts_used: usize,
}

/// Full log-likelihood of the tallied corpus under `model`; `-inf` when
/// any observed generation is infeasible for its family or any vertex has
/// exactly one offspring.
///
/// Constant terms are kept, so values are comparable across families.
pub fn log_likelihood(model: &ModelSpec, stats: &SufficientStats) -> f64 {
    let mut total = 0.0;
    for n in 0..=stats.n_max_observed() {
        let vertices = stats.generation_vertices(n);
        if vertices == 0 {
            continue;
        }
        if stats.count(n, 1) > 0 {
            return f64::NEG_INFINITY; // both families put zero mass on 1
        }
        let Ok(native) = model.native_at(n) else {
            return f64::NEG_INFINITY;
        };
        let n0 = stats.count(n, 0) as f64;
        let a = stats.a(n) as f64;
        let b = stats.b(n) as f64;
        let term = match native {
            NativeParams::PoissonZero { p, lambda } => {
                let mut t = weighted_ln(n0, p) + weighted_ln(a, 1.0 - p) - a * lambda
                    + weighted_ln(b, lambda);
                // the factorial constants of the translated Poisson pmf
                for (k, count) in stats.range(n) {
                    if k >= 3 {
                        t -= count as f64 * ln_gamma(f64::from(k - 2) + 1.0);
                    }
                }
                t
            }
            NativeParams::GeometricZero { p, q } => {
                weighted_ln(n0, p)
                    + weighted_ln(a, 1.0 - p)
                    + weighted_ln(a, q)
                    + weighted_ln(b, 1.0 - q)
            }
        };
        if term == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        total += term;
    }
    total
}

/// `w * ln(x)` with the convention `0 * ln(0) = 0`.
fn weighted_ln(w: f64, x: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w * x.ln()
    }
}

/// Maximum-likelihood fit of the template's free parameters.
///
/// Deterministic: starts come from data-informed centers perturbed along
/// a fixed low-discrepancy sequence, and ties between equally good runs
/// break by start index.
pub fn fit(stats: &SufficientStats, template: &FitTemplate, options: &FitOptions) -> Result<FitResult> {
    if stats.is_empty() {
        return Err(Error::EmptyInput("cannot fit an empty corpus"));
    }
    if options.starts == 0 {
        return Err(Error::InvalidParameter("fit needs at least one start".into()));
    }
    let dim = template.dim();
    let objective = |log_params: &[f64]| {
        let params: Vec<f64> = log_params.iter().map(|y| y.exp()).collect();
        match template.model_with(&params) {
            Ok(model) => -log_likelihood(&model, stats),
            Err(_) => f64::INFINITY,
        }
    };

    let (centers, spans) = start_geometry(stats, template);
    let nm = NelderMead {
        max_iterations: options.max_iterations,
        spread_tol: options.spread_tol,
        ..Default::default()
    };

    let mut best: Option<crate::optim::Minimum> = None;
    let mut restarts_used = 0;
    for s in 0..options.starts {
        let x0: Vec<f64> = (0..dim)
            .map(|d| {
                // start 0 sits exactly on the centers
                let u = if s == 0 { 0.5 } else { kronecker(s, d) };
                centers[d].ln() + (u - 0.5) * spans[d]
            })
            .collect();
        if !objective(&x0).is_finite() && !probe_feasible(&nm, &objective, &x0) {
            continue;
        }
        restarts_used += 1;
        let mut run = nm.minimize(objective, &x0);
        // one polish pass from the optimum helps the simplex re-expand
        let polish = nm.minimize(objective, &run.point);
        if polish.value < run.value {
            run = crate::optim::Minimum { iterations: run.iterations + polish.iterations, ..polish };
        }
        // strict improvement keeps the earliest start on ties
        if best.as_ref().is_none_or(|incumbent| run.value < incumbent.value) {
            best = Some(run);
        }
    }
    let minimum = best.ok_or(Error::NoFeasibleStart)?;
    if !minimum.value.is_finite() {
        return Err(Error::NoFeasibleStart);
    }

    let params: Vec<f64> = minimum.point.iter().map(|y| y.exp()).collect();
    let model = template.model_with(&params)?;
    let boundary = at_boundary(&model, stats, &params);
    Ok(FitResult {
        log_likelihood: -minimum.value,
        model,
        converged: minimum.converged,
        boundary,
        iterations: minimum.iterations,
        restarts_used,
    })
}

/// Checks whether the initial simplex of a start touches the feasible
/// region at all; starts that cannot see any finite value are skipped.
fn probe_feasible<F: FnMut(&[f64]) -> f64>(nm: &NelderMead, mut f: F, x0: &[f64]) -> bool {
    for i in 0..x0.len() {
        let mut p = x0.to_vec();
        p[i] += nm.initial_step;
        if f(&p).is_finite() {
            return true;
        }
    }
    false
}

fn at_boundary(model: &ModelSpec, stats: &SufficientStats, params: &[f64]) -> bool {
    if params.iter().any(|p| *p < 1e-8) {
        return true;
    }
    for n in 0..=stats.n_max_observed() {
        if stats.generation_vertices(n) == 0 {
            continue;
        }
        if let Ok(native) = model.native_at(n) {
            let p = native.p_zero();
            if p <= 1e-9 || p >= 1.0 - 1e-9 {
                return true;
            }
        }
    }
    false
}

/// Golden-ratio-style Kronecker sequence: `frac(s * sqrt(prime_d))`.
fn kronecker(s: usize, d: usize) -> f64 {
    const PRIMES: [f64; 8] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0];
    (s as f64 * PRIMES[d % PRIMES.len()].sqrt()).fract()
}

/// Data-informed start centers and log-space spans per parameter.
fn start_geometry(stats: &SufficientStats, template: &FitTemplate) -> (Vec<f64>, Vec<f64>) {
    let per_gen: Vec<(u32, f64, Option<f64>)> = (0..=stats.n_max_observed())
        .filter_map(|n| stats.offspring_moments(n).map(|(m, v, _)| (n, m, v)))
        .collect();

    let mean_vals: Vec<(u32, f64)> = per_gen.iter().map(|&(n, m, _)| (n, m)).collect();
    let var_vals: Vec<(u32, f64)> = per_gen
        .iter()
        .filter_map(|&(n, _, v)| v.map(|v| (n, v)))
        .collect();

    let mut centers = structure_centers(template.mean, &mean_vals);
    centers.extend(structure_centers(template.variance, &var_vals));
    let mut spans = structure_spans(template.mean);
    spans.extend(structure_spans(template.variance));
    (centers, spans)
}

fn structure_centers(kind: StructureKind, values: &[(u32, f64)]) -> Vec<f64> {
    let floor = 0.05;
    let at = |n: u32| values.iter().find(|(g, _)| *g == n).map(|(_, v)| *v);
    let level0 = at(0).unwrap_or(1.0).max(floor);
    let level1 = at(1).or(at(0)).unwrap_or(1.0).max(floor);
    // decay ratio from the geometric mean of successive observed ratios
    let mut ratios = Vec::new();
    for w in values.windows(2) {
        let ((n0, v0), (n1, v1)) = (w[0], w[1]);
        if n1 == n0 + 1 && n0 >= 1 && v0 > floor && v1 > floor {
            ratios.push(v1 / v0);
        }
    }
    let ratio = if ratios.is_empty() {
        0.7
    } else {
        let ln_mean = ratios.iter().map(|r| r.ln()).sum::<f64>() / ratios.len() as f64;
        ln_mean.exp().clamp(0.25, 1.02)
    };
    // typical tail level, for additive constants
    let tail = values
        .iter()
        .filter(|(n, _)| *n >= 2)
        .map(|(_, v)| *v)
        .fold(f64::NAN, f64::min);
    let tail = if tail.is_nan() { level1 / 2.0 } else { tail }.max(floor);
    match kind {
        StructureKind::Constant => {
            let all = if values.is_empty() {
                1.0
            } else {
                values.iter().map(|(_, v)| v).sum::<f64>() / values.len() as f64
            };
            vec![all.max(floor)]
        }
        StructureKind::Exp => vec![level0, ratio],
        StructureKind::AnchoredExp => vec![level0, level1 / ratio, ratio],
        StructureKind::AnchoredExpConst => {
            vec![level0, (level1 - tail * 0.8).max(floor) / ratio, ratio, tail]
        }
    }
}

fn structure_spans(kind: StructureKind) -> Vec<f64> {
    // log-space widths: scale-like parameters explore x/4 .. 4x, decay
    // ratios a narrower window
    let scale = 4.0f64.ln() * 2.0;
    let ratio = 2.0f64.ln() * 2.0;
    match kind {
        StructureKind::Constant => vec![scale],
        StructureKind::Exp => vec![scale, ratio],
        StructureKind::AnchoredExp => vec![scale, scale, ratio],
        StructureKind::AnchoredExpConst => vec![scale, scale, ratio, scale],
    }
}

/// Per-generation feasibility of a template against empirical moments.
#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub rows: Vec<GenerationFeasibility>,
}

/// One generation's empirical moments versus the template family.
#[derive(Debug, Clone, Serialize)]
pub struct GenerationFeasibility {
    pub generation: u32,
    pub vertices: u64,
    pub mean: f64,
    /// Sample variance; absent with fewer than two observations.
    pub variance: Option<f64>,
    pub family: OffspringFamily,
    /// Whether the family can represent the empirical pair; absent when
    /// the variance is undefined.
    pub feasible: Option<bool>,
}

/// Pre-flights a fit: for each observed generation, can the template
/// family represent the empirical (mean, variance)?
pub fn profile_feasibility(template: &FitTemplate, stats: &SufficientStats) -> FeasibilityReport {
    let mut rows = Vec::new();
    for n in 0..=stats.n_max_observed() {
        let Some((mean, variance, vertices)) = stats.offspring_moments(n) else {
            continue;
        };
        let family = template
            .family_overrides
            .get(&n)
            .copied()
            .unwrap_or(template.default_family);
        let feasible = variance
            .map(|v| family.is_feasible(crate::offspring::MomentPair::new(mean, v)));
        rows.push(GenerationFeasibility { generation: n, vertices, mean, variance, family, feasible });
    }
    FeasibilityReport { rows }
}
