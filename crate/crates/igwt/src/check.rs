//! Goodness-of-fit tooling: empirical statistics with confidence
//! intervals, ECDFs with point-wise bands, and a data / simulation /
//! analytical comparison report.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::moments;
use crate::simulate::{self, SimConfig};
use crate::structure::ModelSpec;
use crate::tree::OrderedTree;

/// An empirical CDF with point-wise confidence bands
/// `F +- z sqrt(F (1-F) / n)`, clipped to [0, 1] (asymptotic normal
/// approximation).
#[derive(Debug, Clone, Serialize)]
pub struct EcdfBand {
    /// Jump points, sorted and unique.
    pub xs: Vec<f64>,
    /// ECDF value at and after each jump point.
    pub f: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub n: usize,
    pub level: f64,
}

/// ECDF of the samples with point-wise bands at the given confidence
/// level.
pub fn ecdf_with_band(samples: &[f64], level: f64) -> Result<EcdfBand> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("ecdf needs at least one sample"));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level {level} must lie in (0, 1)"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let z = Normal::standard().inverse_cdf((1.0 + level) / 2.0);

    let mut xs = Vec::new();
    let mut f = Vec::new();
    let mut seen = 0usize;
    let mut i = 0usize;
    while i < n {
        let x = sorted[i];
        while i < n && sorted[i] == x {
            i += 1;
            seen += 1;
        }
        xs.push(x);
        f.push(seen as f64 / n as f64);
    }
    let half_width: Vec<f64> = f
        .iter()
        .map(|&p| z * (p * (1.0 - p) / n as f64).sqrt())
        .collect();
    let lower = f.iter().zip(&half_width).map(|(p, h)| (p - h).max(0.0)).collect();
    let upper = f.iter().zip(&half_width).map(|(p, h)| (p + h).min(1.0)).collect();
    Ok(EcdfBand { xs, f, lower, upper, n, level })
}

impl EcdfBand {
    /// ECDF value at `x` (right-continuous step function).
    pub fn eval(&self, x: f64) -> f64 {
        match self.xs.partition_point(|&j| j <= x) {
            0 => 0.0,
            k => self.f[k - 1],
        }
    }
}

/// Which per-generation statistic to summarize.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerationStatistic {
    /// Offspring counts of generation-`n` vertices, pooled over the corpus.
    OffspringCounts,
    /// Generation-`n` sizes `z_n`, one value per tree (zero for trees
    /// that end earlier).
    GenerationSizes,
}

/// Empirical mean/variance with bootstrap confidence intervals.
#[derive(Debug, Clone, Serialize)]
pub struct GenerationMomentsCi {
    pub mean: f64,
    /// Sample variance; absent with fewer than two observations.
    pub variance: Option<f64>,
    pub mean_ci: (f64, f64),
    pub variance_ci: Option<(f64, f64)>,
    pub observations: usize,
}

/// Number of bootstrap resamples used for confidence intervals.
pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Empirical moments of a generation statistic with seeded percentile
/// bootstrap CIs (95%, [`BOOTSTRAP_RESAMPLES`] resamples).
///
/// All-equal samples yield zero-width intervals.
pub fn empirical_generation_moments(
    trees: &[OrderedTree],
    n: u32,
    statistic: GenerationStatistic,
    seed: u64,
) -> Result<GenerationMomentsCi> {
    let values: Vec<f64> = match statistic {
        GenerationStatistic::OffspringCounts => trees
            .iter()
            .flat_map(|t| t.vertices())
            .filter(|v| v.generation == n)
            .map(|v| v.children.len() as f64)
            .collect(),
        GenerationStatistic::GenerationSizes => trees
            .iter()
            .map(|t| {
                t.summary()
                    .per_generation_counts
                    .get(n as usize)
                    .copied()
                    .unwrap_or(0) as f64
            })
            .collect(),
    };
    if values.is_empty() {
        return Err(Error::EmptyInput("no observations at this generation"));
    }
    let mean = sample_mean(&values);
    let variance = sample_variance(&values);
    let mut rng = simulate::replicate_rng(seed, u64::from(n));
    let mean_ci = bootstrap_ci(&values, sample_mean, &mut rng);
    let variance_ci = variance.map(|_| {
        bootstrap_ci(&values, |v| sample_variance(v).unwrap_or(0.0), &mut rng)
    });
    Ok(GenerationMomentsCi {
        mean,
        variance,
        mean_ci,
        variance_ci,
        observations: values.len(),
    })
}

fn sample_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_variance(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let mean = sample_mean(values);
    Some(values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64)
}

/// Standard error of the sample variance from the fourth central moment.
fn variance_se(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = sample_mean(values);
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let s2 = sample_variance(values).unwrap_or(0.0);
    ((m4 - s2 * s2).max(0.0) / n).sqrt()
}

/// Seeded percentile bootstrap at the 95% level.
fn bootstrap_ci<F: Fn(&[f64]) -> f64>(
    values: &[f64],
    statistic: F,
    rng: &mut ChaCha12Rng,
) -> (f64, f64) {
    let mut stats = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut resample = vec![0.0; values.len()];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for slot in resample.iter_mut() {
            *slot = values[rng.random_range(0..values.len())];
        }
        stats.push(statistic(&resample));
    }
    stats.sort_by(f64::total_cmp);
    let pick = |q: f64| stats[((q * (BOOTSTRAP_RESAMPLES - 1) as f64).round()) as usize];
    (pick(0.025), pick(0.975))
}

/// A (mean, variance) cell of the comparison table.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SummaryPair {
    pub mean: f64,
    pub variance: f64,
}

/// One row of the data / simulation / analytical comparison.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub statistic: String,
    pub data: SummaryPair,
    pub simulation: SummaryPair,
    /// Monte Carlo standard errors of the simulation column.
    pub simulation_se: SummaryPair,
    pub analytical: SummaryPair,
}

/// One generation of the empirical-vs-analytical moment comparison.
#[derive(Debug, Clone, Serialize)]
pub struct GenerationRow {
    pub generation: u32,
    pub empirical: GenerationMomentsCi,
    pub analytic_mean: f64,
    pub analytic_variance: f64,
}

/// A named ECDF with bands.
#[derive(Debug, Clone, Serialize)]
pub struct NamedEcdf {
    pub name: String,
    pub ecdf: EcdfBand,
}

/// The full model-checking report.
#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    /// Total vertices, height and leaves: data vs simulation vs analytical.
    pub table: Vec<SummaryRow>,
    /// Offspring-count moments per generation (data vs structure).
    pub offspring_moments: Vec<GenerationRow>,
    /// Generation-size moments per generation (data vs `m_n`, `s_n^2`).
    pub generation_sizes: Vec<GenerationRow>,
    /// ECDFs of the per-tree statistics, for data and simulation.
    pub ecdfs: Vec<NamedEcdf>,
    /// Analytical height CDF, `P(height <= n)` by generation.
    pub height_cdf_analytic: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
}

/// Builds the comparison report: summaries of the data corpus, a seeded
/// simulated ensemble, and the analytical moments, plus per-generation
/// comparisons and ECDFs.
pub fn check(
    model: &ModelSpec,
    data: &[OrderedTree],
    replicates: usize,
    seed: u64,
    tol: f64,
) -> Result<CheckReport> {
    if data.is_empty() {
        return Err(Error::EmptyInput("model checking needs a data corpus"));
    }
    if replicates == 0 {
        return Err(Error::InvalidParameter("need at least one replicate".into()));
    }
    let sim = simulate::sample_ensemble(model, replicates, &SimConfig::new(seed))?;

    let collect = |trees: &[OrderedTree]| {
        let mut z = Vec::with_capacity(trees.len());
        let mut h = Vec::with_capacity(trees.len());
        let mut l = Vec::with_capacity(trees.len());
        for t in trees {
            let s = t.summary();
            z.push(s.total_vertices as f64);
            h.push(f64::from(s.height));
            l.push(s.leaves as f64);
        }
        (z, h, l)
    };
    let (data_z, data_h, data_l) = collect(data);
    let (sim_z, sim_h, sim_l) = collect(&sim);

    let totals = moments::total_moments(model, tol)?;
    let leaves = moments::leaf_total_moments(model, tol)?;
    let height = moments::height_distribution(model, tol)?;

    let row = |name: &str, d: &[f64], s: &[f64], mean: f64, variance: f64| SummaryRow {
        statistic: name.to_string(),
        data: SummaryPair { mean: sample_mean(d), variance: sample_variance(d).unwrap_or(0.0) },
        simulation: SummaryPair {
            mean: sample_mean(s),
            variance: sample_variance(s).unwrap_or(0.0),
        },
        simulation_se: SummaryPair {
            mean: (sample_variance(s).unwrap_or(0.0) / s.len() as f64).sqrt(),
            variance: variance_se(s),
        },
        analytical: SummaryPair { mean, variance },
    };
    let table = vec![
        row("total_vertices", &data_z, &sim_z, totals.mean, totals.variance),
        row("height", &data_h, &sim_h, height.mean, height.variance),
        row("leaves", &data_l, &sim_l, leaves.mean, leaves.variance),
    ];

    let max_gen = data.iter().map(|t| t.max_generation()).max().unwrap_or(0);
    let mut offspring_moments = Vec::new();
    let mut generation_sizes = Vec::new();
    for n in 0..=max_gen {
        let pair = model.moments_at(n);
        offspring_moments.push(GenerationRow {
            generation: n,
            empirical: empirical_generation_moments(
                data,
                n,
                GenerationStatistic::OffspringCounts,
                seed ^ 0x6f66_6673,
            )?,
            analytic_mean: pair.mean,
            analytic_variance: pair.variance,
        });
        let (m_n, s2_n) = moments::generation_moments(model, n);
        generation_sizes.push(GenerationRow {
            generation: n,
            empirical: empirical_generation_moments(
                data,
                n,
                GenerationStatistic::GenerationSizes,
                seed ^ 0x7369_7a65,
            )?,
            analytic_mean: m_n,
            analytic_variance: s2_n,
        });
    }

    let level = 0.95;
    let ecdfs = vec![
        NamedEcdf { name: "total_vertices_data".into(), ecdf: ecdf_with_band(&data_z, level)? },
        NamedEcdf { name: "total_vertices_sim".into(), ecdf: ecdf_with_band(&sim_z, level)? },
        NamedEcdf { name: "leaves_data".into(), ecdf: ecdf_with_band(&data_l, level)? },
        NamedEcdf { name: "leaves_sim".into(), ecdf: ecdf_with_band(&sim_l, level)? },
        NamedEcdf { name: "height_data".into(), ecdf: ecdf_with_band(&data_h, level)? },
    ];

    Ok(CheckReport {
        table,
        offspring_moments,
        generation_sizes,
        ecdfs,
        height_cdf_analytic: height.cdf,
        replicates,
        seed,
    })
}

impl CheckReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes plot-ready CSV files (one per ECDF or series) into `dir`.
    pub fn write_csv_files(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for named in &self.ecdfs {
            let mut out = String::from("x,f,lower,upper\n");
            for i in 0..named.ecdf.xs.len() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    named.ecdf.xs[i], named.ecdf.f[i], named.ecdf.lower[i], named.ecdf.upper[i]
                ));
            }
            write_file(&dir.join(format!("ecdf_{}.csv", named.name)), &out)?;
        }
        for (name, rows) in [
            ("offspring_moments", &self.offspring_moments),
            ("generation_sizes", &self.generation_sizes),
        ] {
            let mut out = String::from(
                "generation,mean,mean_lo,mean_hi,variance,variance_lo,variance_hi,analytic_mean,analytic_variance\n",
            );
            for r in rows {
                let (vlo, vhi) = r.empirical.variance_ci.unwrap_or((f64::NAN, f64::NAN));
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    r.generation,
                    r.empirical.mean,
                    r.empirical.mean_ci.0,
                    r.empirical.mean_ci.1,
                    r.empirical.variance.unwrap_or(f64::NAN),
                    vlo,
                    vhi,
                    r.analytic_mean,
                    r.analytic_variance
                ));
            }
            write_file(&dir.join(format!("{name}.csv")), &out)?;
        }
        let mut out = String::from("generation,cdf\n");
        for (n, c) in self.height_cdf_analytic.iter().enumerate() {
            out.push_str(&format!("{n},{c}\n"));
        }
        write_file(&dir.join("height_cdf.csv"), &out)?;

        let mut out = String::from(
            "statistic,data_mean,data_variance,sim_mean,sim_variance,sim_se_mean,sim_se_variance,analytic_mean,analytic_variance\n",
        );
        for r in &self.table {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.statistic,
                r.data.mean,
                r.data.variance,
                r.simulation.mean,
                r.simulation.variance,
                r.simulation_se.mean,
                r.simulation_se.variance,
                r.analytical.mean,
                r.analytical.variance
            ));
        }
        write_file(&dir.join("summary_table.csv"), &out)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}
