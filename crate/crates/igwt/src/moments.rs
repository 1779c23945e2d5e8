//! Analytical moments of generation sizes, totals, leaf counts and tree
//! height, plus the correlated-offspring variance correction.
//!
//! Per-generation quantities are exact. Whole-tree quantities are
//! infinite sums truncated under a certified geometric tail bound: once
//! every remaining generation mean is at most some `c < 1`, the neglected
//! mass is bounded in closed form and summation stops when that bound
//! drops below the requested tolerance.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::offspring::NativeParams;
use crate::structure::ModelSpec;

/// Hard cap on the number of generations a truncated sum may walk.
pub const GENERATION_CAP: u32 = 100_000;

/// Mean and variance of the generation-`n` size: `m_n` and `s_n^2`.
///
/// Computed by the forward recursion `m_{n+1} = m_n mu_n`,
/// `s_{n+1}^2 = sigma_n^2 m_n + mu_n^2 s_n^2`, which is algebraically
/// identical to the closed-form product/sum expressions.
pub fn generation_moments(model: &ModelSpec, n: u32) -> (f64, f64) {
    let mut m = 1.0;
    let mut s2 = 0.0;
    for i in 0..n {
        let mu = model.mean_at(i);
        s2 = model.variance_at(i) * m + mu * mu * s2;
        m *= mu;
    }
    (m, s2)
}

/// Covariance of the generation sizes `k` apart: `cov(Z_n, Z_{n+k})`.
///
/// Evaluated in the division-free form `s_n^2 * prod_{j=n}^{n+k-1} mu_j`,
/// which equals `s_n^2 m_{n+k} / m_n` and stays well defined when
/// `m_n = 0`.
pub fn generation_cov(model: &ModelSpec, n: u32, k: u32) -> f64 {
    if k == 0 {
        return generation_moments(model, n).1;
    }
    let (_, s2) = generation_moments(model, n);
    let mut growth = 1.0;
    for j in n..n + k {
        growth *= model.mean_at(j);
    }
    s2 * growth
}

/// Mean and variance of the total vertex count.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TotalMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Mean and variance of the total leaf count.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LeafTotalMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Distribution of the tree height (largest generation index; the root
/// alone has height 0).
#[derive(Debug, Clone, Serialize)]
pub struct HeightDistribution {
    /// `cdf[n] = P(height <= n)`.
    pub cdf: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

/// Everything the analytical layer can say about a model.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    /// `m_n` for generations `0..=truncation_generation`.
    pub gen_mean: Vec<f64>,
    /// `s_n^2` over the same range.
    pub gen_var: Vec<f64>,
    pub total_mean: f64,
    pub total_var: f64,
    /// Leaf-count means per generation; may stop earlier than `gen_mean`
    /// if a generation becomes infeasible for its family.
    pub leaf_gen_mean: Vec<f64>,
    pub leaf_gen_var: Vec<f64>,
    pub leaf_total_mean: f64,
    pub leaf_total_var: f64,
    /// `P(height <= n)` for the computed range.
    pub height_cdf: Vec<f64>,
    pub height_mean: f64,
    pub height_var: f64,
    /// Last generation included in the vertex-count sums.
    pub truncation_generation: u32,
    /// Certified bound on everything the truncated sums neglect. Equals
    /// the requested tolerance unless an infeasible generation forced an
    /// early stop of the leaf and height sums.
    pub truncation_tol: f64,
}

/// Variance of the generation-2 size when generation-1 offspring counts
/// within one tree share a pairwise correlation `rho`:
/// `sigma_1^2 mu_0 + (sigma_0^2 + mu_0^2 - mu_0) sigma_1^2 rho
///  + sigma_0^2 mu_1^2`. At `rho = 0` this is the independent-offspring
/// `s_2^2`.
pub fn correlated_gen2_variance(mu0: f64, var0: f64, mu1: f64, var1: f64, rho: f64) -> f64 {
    var1 * mu0 + (var0 + mu0 * mu0 - mu0) * var1 * rho + var0 * mu1 * mu1
}

/// Leaf-count mean and variance at generation `n`:
/// `m_n p_n` and `s_n^2 p_n^2 + m_n p_n (1 - p_n)`.
pub fn leaf_generation_moments(model: &ModelSpec, n: u32) -> Result<(f64, f64)> {
    let p = model.native_at(n)?.p_zero();
    let (m, s2) = generation_moments(model, n);
    Ok((m * p, s2 * p * p + m * p * (1.0 - p)))
}

/// Covariance of leaf counts `k > 0` generations apart:
/// `p_{n+k} p_n m_{n+k} (s_n^2 / m_n - 1)`.
pub fn leaf_generation_cov(model: &ModelSpec, n: u32, k: u32) -> Result<f64> {
    let p_n = model.native_at(n)?.p_zero();
    let p_nk = model.native_at(n + k)?.p_zero();
    let (m_n, s2_n) = generation_moments(model, n);
    if m_n == 0.0 {
        return Ok(0.0); // no vertices, no leaves
    }
    let (m_nk, _) = generation_moments(model, n + k);
    Ok(p_nk * p_n * m_nk * (s2_n / m_n - 1.0))
}

/// Mean and variance of the total vertex count, truncated at `tol`.
pub fn total_moments(model: &ModelSpec, tol: f64) -> Result<TotalMoments> {
    let exp = Expansion::build(model, tol)?;
    Ok(TotalMoments { mean: exp.total_mean(), variance: exp.total_var() })
}

/// Mean and variance of the total leaf count, truncated at `tol`.
///
/// If some generation's moments are infeasible for its family before the
/// tail criterion is met, summation stops there; the neglected remainder
/// is still certified and reported through [`moment_report`].
pub fn leaf_total_moments(model: &ModelSpec, tol: f64) -> Result<LeafTotalMoments> {
    let exp = Expansion::build(model, tol)?;
    let (mean, variance, _) = exp.leaf_totals()?;
    Ok(LeafTotalMoments { mean, variance })
}

/// Height CDF via pgf composition, with mean and variance of the height.
pub fn height_distribution(model: &ModelSpec, tol: f64) -> Result<HeightDistribution> {
    let exp = Expansion::build(model, tol)?;
    let (cdf, mean, variance, _) = exp.height(tol)?;
    Ok(HeightDistribution { cdf, mean, variance })
}

/// The full analytical report for a model.
pub fn moment_report(model: &ModelSpec, tol: f64) -> Result<MomentReport> {
    let exp = Expansion::build(model, tol)?;
    let (leaf_total_mean, leaf_total_var, leaf_tail) = exp.leaf_totals()?;
    let (height_cdf, height_mean, height_var, height_tail) = exp.height(tol)?;
    let n_leaf = exp.natives.len();
    let mut leaf_gen_mean = Vec::with_capacity(n_leaf);
    let mut leaf_gen_var = Vec::with_capacity(n_leaf);
    for n in 0..n_leaf {
        let p = exp.natives[n].p_zero();
        let (m, s2) = (exp.m[n], exp.s2[n]);
        leaf_gen_mean.push(m * p);
        leaf_gen_var.push(s2 * p * p + m * p * (1.0 - p));
    }
    Ok(MomentReport {
        gen_mean: exp.m.clone(),
        gen_var: exp.s2.clone(),
        total_mean: exp.total_mean(),
        total_var: exp.total_var(),
        leaf_gen_mean,
        leaf_gen_var,
        leaf_total_mean,
        leaf_total_var,
        height_cdf,
        height_mean,
        height_var,
        truncation_generation: exp.last_generation(),
        truncation_tol: exp
            .m_tail
            .max(exp.s2_tail())
            .max(leaf_tail)
            .max(height_tail),
    })
}

impl MomentReport {
    /// Tabular form: a scalar summary block as `#` comment lines, then
    /// one row per generation with empty cells where a series stopped
    /// early.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (name, value) in [
            ("total_mean", self.total_mean),
            ("total_var", self.total_var),
            ("leaf_total_mean", self.leaf_total_mean),
            ("leaf_total_var", self.leaf_total_var),
            ("height_mean", self.height_mean),
            ("height_var", self.height_var),
            ("truncation_generation", f64::from(self.truncation_generation)),
            ("truncation_tol", self.truncation_tol),
        ] {
            out.push_str(&format!("# {name} = {value}\n"));
        }
        out.push_str("generation,gen_mean,gen_var,leaf_gen_mean,leaf_gen_var,height_cdf\n");
        for n in 0..self.gen_mean.len() {
            let cell = |v: Option<&f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                n,
                self.gen_mean[n],
                self.gen_var[n],
                cell(self.leaf_gen_mean.get(n)),
                cell(self.leaf_gen_var.get(n)),
                cell(self.height_cdf.get(n)),
            ));
        }
        out
    }
}

/// Per-generation expansion of a model with certified tail bounds.
struct Expansion<'a> {
    model: &'a ModelSpec,
    /// `m_n` for `0..=N`, all positive except possibly a trailing zero.
    m: Vec<f64>,
    /// `s_n^2` for the same range.
    s2: Vec<f64>,
    /// Bound on `sum_{j>N} m_j`.
    m_tail: f64,
    /// Bound on the neglected variance-sum terms beyond `N`.
    s2_term_tail: f64,
    /// Bound on `sum_{j>N} (2j+1) m_j`.
    weighted_m_tail: f64,
    /// Factor `1 + 2c/(1-c)` for the certified tail ratio at the stop.
    tail_factor: f64,
    /// Native parameters for generations `0..natives.len()`; shorter than
    /// `m` when a generation is infeasible for its family.
    natives: Vec<NativeParams>,
    first_infeasible: Option<u32>,
}

impl<'a> Expansion<'a> {
    fn build(model: &'a ModelSpec, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive and finite, got {tol}"
            )));
        }
        if !model.certifies_finite() {
            return Err(Error::FinitenessNotCertified);
        }
        let mut m = vec![1.0f64];
        let mut s2 = vec![0.0f64];
        let mut tails: Option<(f64, f64, f64, f64)> = None;
        for n in 0..GENERATION_CAP {
            let mu = model.mean_at(n);
            let sig2 = model.variance_at(n);
            let n = n as usize;
            let m_next = m[n] * mu;
            let s2_next = sig2 * m[n] + mu * mu * s2[n];
            if m_next == 0.0 {
                // the process is extinct by generation n+1; sums are exact
                tails = Some((0.0, 0.0, 0.0, 1.0));
                break;
            }
            let c = model.mean.tail_sup(n as u32 + 1);
            if c < 1.0 {
                let sig_sup = model.variance.tail_sup(n as u32 + 1);
                if sig_sup.is_finite() {
                    let m_tail = m_next / (1.0 - c);
                    let factor = 1.0 + 2.0 * c / (1.0 - c);
                    let s2_sum_bound = (s2_next + sig_sup * m_tail) / (1.0 - c * c);
                    let s2_term_tail = factor * s2_sum_bound;
                    let weighted =
                        m_next * ((2.0 * (n as f64 + 1.0) + 1.0) / (1.0 - c) + 2.0 * c / ((1.0 - c) * (1.0 - c)));
                    if m_tail < tol && s2_term_tail < tol && weighted < tol {
                        tails = Some((m_tail, s2_term_tail, weighted, factor));
                        break;
                    }
                }
            }
            m.push(m_next);
            s2.push(s2_next);
        }
        let (m_tail, s2_term_tail, weighted_m_tail, tail_factor) =
            tails.ok_or(Error::TruncationCap(GENERATION_CAP))?;

        let mut natives = Vec::with_capacity(m.len());
        let mut first_infeasible = None;
        for n in 0..m.len() {
            match model.native_at(n as u32) {
                Ok(native) => natives.push(native),
                Err(_) => {
                    first_infeasible = Some(n as u32);
                    break;
                }
            }
        }
        Ok(Expansion {
            model,
            m,
            s2,
            m_tail,
            s2_term_tail,
            weighted_m_tail,
            tail_factor,
            natives,
            first_infeasible,
        })
    }

    fn last_generation(&self) -> u32 {
        (self.m.len() - 1) as u32
    }

    fn total_mean(&self) -> f64 {
        self.m.iter().sum()
    }

    fn total_var(&self) -> f64 {
        // s^2 = sum_{n>=1} s_n^2 + 2 (s_n^2 / m_n) sum_{k>=1} m_{n+k}
        let len = self.m.len();
        let mut suffix = vec![0.0; len + 1];
        for n in (0..len).rev() {
            suffix[n] = suffix[n + 1] + self.m[n];
        }
        let mut total = 0.0;
        for n in 1..len {
            total += self.s2[n] + 2.0 * (self.s2[n] / self.m[n]) * suffix[n + 1];
        }
        total
    }

    /// Certified bound on what `total_var` neglects.
    fn s2_tail(&self) -> f64 {
        let ratio_sum: f64 = (1..self.m.len()).map(|n| self.s2[n] / self.m[n]).sum();
        self.s2_term_tail + 2.0 * ratio_sum * self.m_tail
    }

    /// Leaf totals plus the certified bound on their neglected tail.
    fn leaf_totals(&self) -> Result<(f64, f64, f64)> {
        if self.natives.is_empty() {
            return Err(self.model.native_at(0).unwrap_err());
        }
        let nl = self.natives.len(); // generations 0..nl have leaf terms
        let p: Vec<f64> = self.natives.iter().map(|x| x.p_zero()).collect();

        let mut leaf_suffix = vec![0.0; nl + 1];
        for n in (0..nl).rev() {
            leaf_suffix[n] = leaf_suffix[n + 1] + p[n] * self.m[n];
        }
        let mean = leaf_suffix[0];

        let mut variance = 0.0;
        let mut ratio_plus_sum = 0.0;
        for n in 0..nl {
            let ratio = if n == 0 { 0.0 } else { self.s2[n] / self.m[n] };
            variance +=
                p[n] * (self.m[n] + (ratio - 1.0) * (self.m[n] * p[n] + 2.0 * leaf_suffix[n + 1]));
            ratio_plus_sum += p[n] * (ratio + 1.0);
        }

        // Tail accounting. Everything from generation nl on is neglected:
        // the stored-but-infeasible range nl..=N contributes its exact
        // m/s2 values to the bound, and beyond N the certified geometric
        // bounds apply.
        let stored_m_rest: f64 = self.m[nl..].iter().sum();
        let stored_s2_rest: f64 = self.s2[nl..].iter().sum();
        let leaf_m_tail = stored_m_rest + self.m_tail;
        let leaf_s2_tail = leaf_m_tail
            + (stored_s2_rest + stored_m_rest) * self.forced_tail_factor()?
            + self.s2_term_tail
            + self.tail_factor * self.m_tail
            + 2.0 * ratio_plus_sum * leaf_m_tail;
        Ok((mean, variance, leaf_m_tail.max(leaf_s2_tail)))
    }

    /// `1 + 2c/(1-c)` valid from the first neglected leaf generation.
    /// Fails when no `c < 1` holds there, i.e. the remainder is unbounded.
    fn forced_tail_factor(&self) -> Result<f64> {
        match self.first_infeasible {
            None => Ok(self.tail_factor),
            Some(f) => {
                let c = self.model.mean.tail_sup(f);
                if c < 1.0 {
                    Ok(1.0 + 2.0 * c / (1.0 - c))
                } else {
                    Err(self.model.native_at(f).unwrap_err())
                }
            }
        }
    }

    /// Height CDF, mean, variance and the certified tail bound.
    fn height(&self, tol: f64) -> Result<(Vec<f64>, f64, f64, f64)> {
        if self.natives.is_empty() {
            return Err(self.model.native_at(0).unwrap_err());
        }
        let mut cdf: Vec<f64> = Vec::new();
        for n in 0..self.natives.len() {
            // P(height <= n) = g_0(g_1(...g_n(0))), composed inner to outer
            let mut a = 0.0f64;
            for native in self.natives[..=n].iter().rev() {
                a = native.pgf(a).expect("pgf argument stays in [0,1]").min(1.0);
            }
            cdf.push(a);
            if 1.0 - a < tol {
                break;
            }
        }
        let mean: f64 = cdf.iter().map(|c| 1.0 - c).sum();
        let second: f64 = cdf
            .iter()
            .enumerate()
            .map(|(n, c)| (2.0 * n as f64 + 1.0) * (1.0 - c))
            .sum();
        let variance = second - mean * mean;

        // 1 - CDF(j) <= m_{j+1}, so the neglected tail is bounded by the
        // neglected (weighted) vertex means.
        let start = cdf.len() + 1; // first m-index not covered by the cdf sums
        let stored_rest: f64 = self.m[start.min(self.m.len())..].iter().sum();
        let stored_weighted: f64 = (start.min(self.m.len())..self.m.len())
            .map(|i| (2.0 * i as f64 + 1.0) * self.m[i])
            .sum();
        let tail = (stored_rest + self.m_tail).max(stored_weighted + self.weighted_m_tail);
        Ok((cdf, mean, variance, tail))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::offspring::OffspringFamily;
    use crate::structure::StructureSpec;
    use std::collections::BTreeMap;

    fn constant_model(mu: f64, var: f64) -> ModelSpec {
        ModelSpec {
            default_family: OffspringFamily::PoissonZero,
            family_overrides: BTreeMap::new(),
            mean: StructureSpec::constant(mu).unwrap(),
            variance: StructureSpec::constant(var).unwrap(),
        }
    }

    /// Literal closed-form product/sum expressions, as an independent
    /// route to the recursion used by the implementation.
    fn closed_form(model: &ModelSpec, n: u32) -> (f64, f64) {
        let mu: Vec<f64> = (0..n).map(|i| model.mean_at(i)).collect();
        let m: f64 = mu.iter().product();
        let mut s2 = 0.0;
        for i in 0..n as usize {
            let head: f64 = mu[..i].iter().product();
            let tail: f64 = mu[i + 1..].iter().map(|x| x * x).product();
            s2 += model.variance_at(i as u32) * head * tail;
        }
        (m, s2)
    }

    #[test]
    fn generation_zero_is_deterministic() {
        let model = ModelSpec::reference();
        assert_eq!(generation_moments(&model, 0), (1.0, 0.0));
    }

    #[test]
    fn constant_half_example() {
        let model = constant_model(0.5, 0.25);
        let (m2, s2) = generation_moments(&model, 2);
        assert!((m2 - 0.25).abs() < 1e-15);
        assert!((s2 - 0.1875).abs() < 1e-15); // 0.25*0.25 + 0.25*0.5
    }

    #[test]
    fn recursion_matches_closed_form() {
        let models = [
            ModelSpec::reference(),
            constant_model(0.8, 1.3),
            ModelSpec {
                mean: StructureSpec::anchored_exp(2.0, 1.1, 0.7).unwrap(),
                variance: StructureSpec::exp(0.9, 1.05).unwrap(),
                ..constant_model(0.0, 0.0)
            },
        ];
        for model in &models {
            for n in 0..=30 {
                let (m_a, s_a) = generation_moments(model, n);
                let (m_b, s_b) = closed_form(model, n);
                assert!((m_a - m_b).abs() <= 1e-12 * m_b.abs().max(1.0));
                assert!((s_a - s_b).abs() <= 1e-12 * s_b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn homogeneous_variance_identity() {
        // constant mu, sigma^2: s_n^2 = sigma^2 mu^{n-1} (mu^n - 1)/(mu - 1)
        let (mu, var) = (0.7, 0.9);
        let model = constant_model(mu, var);
        for n in 1..=20u32 {
            let (_, s2) = generation_moments(&model, n);
            let expect =
                var * mu.powi(n as i32 - 1) * (mu.powi(n as i32) - 1.0) / (mu - 1.0);
            assert!((s2 - expect).abs() < 1e-12 * expect.max(1.0));
        }
    }

    #[test]
    fn covariance_examples() {
        let model = constant_model(0.5, 0.25);
        assert_eq!(generation_cov(&model, 0, 3), 0.0); // s_0^2 = 0
        let c12 = generation_cov(&model, 1, 1);
        assert!((c12 - 0.125).abs() < 1e-15); // 0.25 * 0.5
    }

    #[test]
    fn correlations_stay_in_unit_interval() {
        for model in [ModelSpec::reference(), constant_model(0.9, 2.0)] {
            for n in 1..10 {
                for k in 1..5 {
                    let c = generation_cov(&model, n, k);
                    let (_, sn) = generation_moments(&model, n);
                    let (_, snk) = generation_moments(&model, n + k);
                    let r = c / (sn * snk).sqrt();
                    assert!((0.0..=1.0 + 1e-12).contains(&r), "corr {r} at ({n},{k})");
                }
            }
        }
    }

    #[test]
    fn subcritical_constant_total_mean() {
        // constant mu < 1: m = 1/(1-mu)
        let model = constant_model(0.6, 0.3);
        let t = total_moments(&model, 1e-12).unwrap();
        assert!((t.mean - 1.0 / 0.4).abs() < 1e-9);
    }

    #[test]
    fn extinct_at_root() {
        let model = constant_model(0.0, 0.0);
        let t = total_moments(&model, 1e-12).unwrap();
        assert_eq!((t.mean, t.variance), (1.0, 0.0));
        let l = leaf_total_moments(&model, 1e-12).unwrap();
        assert_eq!((l.mean, l.variance), (1.0, 0.0));
        let h = height_distribution(&model, 1e-12).unwrap();
        assert_eq!(h.cdf[0], 1.0);
        assert_eq!((h.mean, h.variance), (0.0, 0.0));
    }

    #[test]
    fn finiteness_is_a_precondition() {
        let model = constant_model(1.1, 0.5);
        assert!(matches!(
            total_moments(&model, 1e-9),
            Err(Error::FinitenessNotCertified)
        ));
    }

    #[test]
    fn leaf_generation_zero_is_bernoulli() {
        let model = ModelSpec::reference();
        let p0 = model.native_at(0).unwrap().p_zero();
        let (lm, lv) = leaf_generation_moments(&model, 0).unwrap();
        assert!((lm - p0).abs() < 1e-15);
        assert!((lv - p0 * (1.0 - p0)).abs() < 1e-15);
        assert!((p0 - 0.0751).abs() < 5e-5);
    }

    #[test]
    fn leaf_means_bounded_by_generation_means() {
        let model = ModelSpec::reference();
        for n in 0..20 {
            let (m, _) = generation_moments(&model, n);
            let (lm, _) = leaf_generation_moments(&model, n).unwrap();
            assert!(lm <= m + 1e-12);
        }
    }

    #[test]
    fn leaf_cov_special_cases() {
        let model = ModelSpec::reference();
        // n = 0: s_0^2/m_0 - 1 = -1, so the covariance is -p_k p_0 m_k
        let k = 3;
        let c = leaf_generation_cov(&model, 0, k).unwrap();
        let p0 = model.native_at(0).unwrap().p_zero();
        let pk = model.native_at(k).unwrap().p_zero();
        let (mk, _) = generation_moments(&model, k);
        assert!((c + pk * p0 * mk).abs() < 1e-12);
        // s_n^2 = m_n makes the covariance vanish: constant mu = sigma^2
        // gives s_1^2 = sigma_0^2 = mu_0 = m_1 (feasible at mu = 1, the
        // {0,2} boundary)
        let balanced = constant_model(1.0, 1.0);
        let (m1, s1) = generation_moments(&balanced, 1);
        assert_eq!(m1, s1);
        for k in 1..4 {
            assert!(leaf_generation_cov(&balanced, 1, k).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn correlated_variance_reduces_to_independent_case() {
        let model = ModelSpec::reference();
        let m0 = model.moments_at(0);
        let m1 = model.moments_at(1);
        let (_, s2_2) = generation_moments(&model, 2);
        let v = correlated_gen2_variance(m0.mean, m0.variance, m1.mean, m1.variance, 0.0);
        assert!((v - s2_2).abs() < 1e-12 * s2_2);
        // rho > 0 only adds variance
        let v1 = correlated_gen2_variance(m0.mean, m0.variance, m1.mean, m1.variance, 1.0);
        assert!(v1 > v);
    }

    #[test]
    fn height_cdf_monotone_and_bounded() {
        let report = moment_report(&ModelSpec::reference(), 1e-12).unwrap();
        let cdf = &report.height_cdf;
        assert!(cdf.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        assert!(cdf.iter().all(|c| (0.0..=1.0).contains(c)));
        assert!((cdf[0] - 0.0751).abs() < 5e-5); // P(one-vertex tree)
    }

    #[test]
    fn report_invariants() {
        let report = moment_report(&ModelSpec::reference(), 1e-12).unwrap();
        assert_eq!(report.gen_mean[0], 1.0);
        assert_eq!(report.gen_var[0], 0.0);
        assert!(report.total_mean >= 1.0);
        // the reference model hits an infeasible generation at n = 32, so
        // the leaf series is shorter than the vertex series and the
        // achieved tolerance reflects the forced stop
        assert_eq!(report.leaf_gen_mean.len(), 32);
        assert!(report.gen_mean.len() > 32);
        assert!(report.truncation_tol > 1e-12 && report.truncation_tol < 0.05);
        let csv = report.to_csv();
        assert!(csv.contains("\ngeneration,"));
        assert!(csv.starts_with(&format!("# total_mean = {}\n", report.total_mean)));
        assert_eq!(csv.lines().count(), report.gen_mean.len() + 9);
    }

    #[test]
    fn report_matches_frozen_reference_values() {
        // frozen from an independent implementation of the same sums
        let report = moment_report(&ModelSpec::reference(), 1e-12).unwrap();
        assert!((report.total_mean - 37.083101).abs() < 1e-4);
        assert!((report.total_var - 1772.7039).abs() < 1e-2);
        assert!((report.leaf_total_mean - 26.179747).abs() < 1e-4);
        assert!((report.leaf_total_var - 909.1414).abs() < 1e-2);
        assert!((report.height_mean - 4.828266).abs() < 1e-4);
        assert!((report.height_var - 11.857251).abs() < 1e-4);
    }
}
