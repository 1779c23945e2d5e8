//! Offspring distributions on the non-negative integers excluding 1.
//!
//! Both families mix a point mass at zero with a standard discrete
//! distribution translated by 2, so no vertex ever has exactly one
//! offspring. Each family is uniquely parametrized either by its native
//! parameters or by its (mean, variance) pair, with exact transforms in
//! both directions.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Slack used when classifying moment pairs on the feasibility boundary,
/// where floating-point cancellation in the inverse transforms would
/// otherwise produce spurious rejections or NaNs.
const BOUNDARY_EPS: f64 = 1e-12;

/// A (mean, variance) pair for one generation's offspring distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

impl MomentPair {
    pub fn new(mean: f64, variance: f64) -> Self {
        Self { mean, variance }
    }
}

/// The closed set of offspring families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OffspringFamily {
    /// Point mass at 0 mixed with a Poisson distribution translated by 2.
    PoissonZero,
    /// Point mass at 0 mixed with a geometric distribution translated by 2.
    GeometricZero,
}

impl fmt::Display for OffspringFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OffspringFamily::PoissonZero => write!(f, "poisson-zero"),
            OffspringFamily::GeometricZero => write!(f, "geometric-zero"),
        }
    }
}

/// Native parameters of an offspring distribution.
///
/// `p` is the zero-mixture weight for either family; `lambda` is the rate
/// of the translated Poisson component and `q` the success probability of
/// the translated geometric component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family")]
pub enum NativeParams {
    PoissonZero { p: f64, lambda: f64 },
    GeometricZero { p: f64, q: f64 },
}

impl NativeParams {
    /// Validated Poisson-zero parameters: `p` in [0, 1], `lambda` >= 0.
    pub fn poisson_zero(p: f64, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mixture weight p = {p} must lie in [0, 1]"
            )));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "poisson rate lambda = {lambda} must be non-negative"
            )));
        }
        Ok(NativeParams::PoissonZero { p, lambda })
    }

    /// Validated geometric-zero parameters: `p` in [0, 1], `q` in (0, 1].
    pub fn geometric_zero(p: f64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mixture weight p = {p} must lie in [0, 1]"
            )));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric parameter q = {q} must lie in (0, 1]"
            )));
        }
        Ok(NativeParams::GeometricZero { p, q })
    }

    pub fn family(&self) -> OffspringFamily {
        match self {
            NativeParams::PoissonZero { .. } => OffspringFamily::PoissonZero,
            NativeParams::GeometricZero { .. } => OffspringFamily::GeometricZero,
        }
    }

    /// Probability of exactly `x` offspring.
    pub fn pmf(&self, x: u32) -> f64 {
        match x {
            0 => self.p_zero(),
            1 => 0.0,
            _ => self.ln_pmf(x).exp(),
        }
    }

    /// Natural log of the pmf; `-inf` where the pmf is zero.
    pub fn ln_pmf(&self, x: u32) -> f64 {
        match (self, x) {
            (NativeParams::PoissonZero { p, .. }, 0)
            | (NativeParams::GeometricZero { p, .. }, 0) => p.ln(),
            (_, 1) => f64::NEG_INFINITY,
            (NativeParams::PoissonZero { p, lambda }, x) => {
                let k = f64::from(x - 2);
                if *lambda == 0.0 {
                    // point mass at 2
                    return if x == 2 { (1.0 - p).ln() } else { f64::NEG_INFINITY };
                }
                (1.0 - p).ln() - lambda + k * lambda.ln() - ln_gamma(k + 1.0)
            }
            (NativeParams::GeometricZero { p, q }, x) => {
                let k = f64::from(x - 2);
                if *q == 1.0 {
                    return if x == 2 { (1.0 - p).ln() } else { f64::NEG_INFINITY };
                }
                (1.0 - p).ln() + q.ln() + k * (-q).ln_1p()
            }
        }
    }

    /// Probability of zero offspring (the leaf probability).
    pub fn p_zero(&self) -> f64 {
        match self {
            NativeParams::PoissonZero { p, .. } | NativeParams::GeometricZero { p, .. } => *p,
        }
    }

    /// Probability generating function at `s` in [0, 1].
    pub fn pgf(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::PgfArgument(s));
        }
        Ok(match self {
            NativeParams::PoissonZero { p, lambda } => {
                p + (1.0 - p) * s * s * (lambda * (s - 1.0)).exp()
            }
            NativeParams::GeometricZero { p, q } => {
                p + (1.0 - p) * s * s * q / (1.0 - (1.0 - q) * s)
            }
        })
    }

    /// Exact mean and variance of the distribution.
    pub fn moments(&self) -> MomentPair {
        match self {
            NativeParams::PoissonZero { p, lambda } => {
                let mean = (1.0 - p) * (lambda + 2.0);
                let variance = (1.0 - p) * (lambda + p * (lambda + 2.0).powi(2));
                MomentPair::new(mean, variance)
            }
            NativeParams::GeometricZero { p, q } => {
                // Y = 2 + shifted geometric: E[Y] = (1-q)/q + 2, Var(Y) = (1-q)/q^2.
                let ey = (1.0 - q) / q + 2.0;
                let vy = (1.0 - q) / (q * q);
                let mean = (1.0 - p) * ey;
                let variance = (1.0 - p) * vy + p * (1.0 - p) * ey * ey;
                MomentPair::new(mean, variance)
            }
        }
    }

    /// Samples an offspring count.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match self {
            NativeParams::PoissonZero { p, lambda } => {
                if rng.random::<f64>() < *p {
                    0
                } else {
                    2 + sample_poisson(*lambda, rng)
                }
            }
            NativeParams::GeometricZero { p, q } => {
                if rng.random::<f64>() < *p {
                    0
                } else {
                    2 + sample_geometric(*q, rng)
                }
            }
        }
    }
}

impl OffspringFamily {
    /// Inverts a feasible (mean, variance) pair to native parameters.
    ///
    /// Fails with [`Error::InfeasibleMoments`] when no member of the family
    /// attains the pair. A zero mean maps to the degenerate point mass at
    /// zero for either family.
    pub fn from_moments(&self, moments: MomentPair) -> Result<NativeParams> {
        let MomentPair { mean: mu, variance: var } = moments;
        if !(mu >= 0.0 && mu.is_finite() && var >= 0.0 && var.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "moments (mean={mu}, variance={var}) must be finite and non-negative"
            )));
        }
        let infeasible = || Error::InfeasibleMoments {
            family: *self,
            mean: mu,
            variance: var,
        };
        match self {
            OffspringFamily::PoissonZero => {
                if mu == 0.0 {
                    return NativeParams::poisson_zero(1.0, 0.0);
                }
                if !poisson_zero_feasible(mu, var) {
                    return Err(infeasible());
                }
                let a = var / mu + mu - 1.0;
                let mut lambda = 0.5 * (a + (a * a + 8.0).sqrt()) - 2.0;
                if lambda < 0.0 {
                    // cancellation at the lambda = 0 boundary
                    if lambda > -1e-9 {
                        lambda = 0.0;
                    } else {
                        return Err(infeasible());
                    }
                }
                let p = (1.0 - mu / (lambda + 2.0)).clamp(0.0, 1.0);
                NativeParams::poisson_zero(p, lambda)
            }
            OffspringFamily::GeometricZero => {
                if mu == 0.0 {
                    return NativeParams::geometric_zero(1.0, 1.0);
                }
                let s = var + 3.0 * mu + mu * mu;
                let mut disc = s * s - 16.0 * mu * mu;
                if disc < 0.0 {
                    if disc > -BOUNDARY_EPS * s * s {
                        disc = 0.0;
                    } else {
                        return Err(infeasible());
                    }
                }
                // rationalized form of 1 - (s - sqrt(disc))/4, stable for small mu
                let p = 1.0 - 4.0 * mu * mu / (s + disc.sqrt());
                if !(0.0..1.0).contains(&p) {
                    return Err(infeasible());
                }
                let ey = mu / (1.0 - p);
                if ey < 2.0 - 1e-9 {
                    return Err(infeasible());
                }
                let q = (ey.max(2.0) - 1.0).recip();
                let native = NativeParams::geometric_zero(p, q.min(1.0))?;
                // the inversion must reproduce the input; guards fp corners
                let back = native.moments();
                let tol = 1e-9;
                if (back.mean - mu).abs() > tol * mu.max(1.0)
                    || (back.variance - var).abs() > tol * var.max(1.0)
                {
                    return Err(infeasible());
                }
                Ok(native)
            }
        }
    }

    /// Whether some member of the family has the given moments.
    pub fn is_feasible(&self, moments: MomentPair) -> bool {
        let MomentPair { mean: mu, variance: var } = moments;
        if !(mu >= 0.0 && mu.is_finite() && var >= 0.0 && var.is_finite()) {
            return false;
        }
        match self {
            OffspringFamily::PoissonZero => mu == 0.0 || poisson_zero_feasible(mu, var),
            // No closed-form boundary; decided constructively.
            OffspringFamily::GeometricZero => self.from_moments(moments).is_ok(),
        }
    }
}

/// Closed-form feasibility region of the Poisson-zero family: the minimum
/// variance is `2*mu*(1 - mu/2)` for `mu <= 2` (attained at `lambda = 0`)
/// and `mu - 2` for `mu > 2` (attained at `p = 0`).
fn poisson_zero_feasible(mu: f64, var: f64) -> bool {
    let bound = if mu <= 2.0 {
        2.0 * mu * (1.0 - mu / 2.0)
    } else {
        mu - 2.0
    };
    var >= bound - BOUNDARY_EPS * (1.0 + bound.abs())
}

/// Poisson draw: chop-down inversion for small rates, transformed
/// rejection (PTRS) for large ones.
fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u32 {
    if lambda == 0.0 {
        return 0;
    }
    if lambda < 10.0 {
        let u = rng.random::<f64>();
        let mut pk = (-lambda).exp();
        let mut cdf = pk;
        let mut k = 0u32;
        while u > cdf && k < 1_000 {
            k += 1;
            pk *= lambda / f64::from(k);
            cdf += pk;
        }
        k
    } else {
        sample_poisson_ptrs(lambda, rng)
    }
}

/// Hörmann's PTRS transformed-rejection Poisson sampler, valid for
/// lambda >= 10.
fn sample_poisson_ptrs<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u32 {
    let b = 0.931 + 2.53 * lambda.sqrt();
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let v_r = 0.9277 - 3.6224 / (b - 2.0);
    let ln_lambda = lambda.ln();
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v = rng.random::<f64>();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= v_r {
            return k as u32;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if (v * inv_alpha / (a / (us * us) + b)).ln() <= k * ln_lambda - lambda - ln_gamma(k + 1.0)
        {
            return k as u32;
        }
    }
}

/// Geometric draw on {0, 1, ...} with success probability `q`, by CDF
/// inversion (chop-down for moderate `q`, logarithmic for tiny `q`).
fn sample_geometric<R: Rng + ?Sized>(q: f64, rng: &mut R) -> u32 {
    if q >= 1.0 {
        return 0;
    }
    let u = rng.random::<f64>();
    if q >= 0.01 {
        let mut pk = q;
        let mut cdf = q;
        let mut k = 0u32;
        while u > cdf && k < 100_000 {
            k += 1;
            pk *= 1.0 - q;
            cdf += pk;
        }
        k
    } else {
        ((1.0 - u).ln() / (1.0 - q).ln()).floor() as u32
    }
}
